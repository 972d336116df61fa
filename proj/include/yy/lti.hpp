#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace yy {

using Matrix  = Eigen::MatrixXd;
using Vector  = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Thrown when a transfer matrix is evaluated at (or numerically at) a pole.
class EvaluationAtPole : public std::runtime_error {
  public:
    EvaluationAtPole(const std::string& what, double rcond) : std::runtime_error(what), rcond_(rcond) {}
    double rcond() const { return rcond_; }

  private:
    double rcond_;
};

enum class Stability { stable, marginal, unstable };

// Stability bands shared by every classifier in the library.
inline constexpr double kStabilityMargin = 1e-9;

/// Analog LTI model  x' = Ax + Bu,  y = Cx + Du.
class ContinuousStateSpace {
  public:
    ContinuousStateSpace(Matrix A, Matrix B, Matrix C, Matrix D);

    /// Static gain with no states.
    static ContinuousStateSpace gain(const Matrix& D);

    const Matrix& A() const { return A_; }
    const Matrix& B() const { return B_; }
    const Matrix& C() const { return C_; }
    const Matrix& D() const { return D_; }

    Eigen::Index states() const { return A_.rows(); }
    Eigen::Index inputs() const { return D_.cols(); }
    Eigen::Index outputs() const { return D_.rows(); }

    bool strictly_proper() const { return D_.isZero(0.0); }

    /// C(sI - A)^-1 B + D at s = j*omega.
    CMatrix frequency_response(double omega) const;

  private:
    Matrix A_, B_, C_, D_;
};

/// Sampled LTI model  x[k+1] = Ax[k] + Bu[k],  y[k] = Cx[k] + Du[k]  with period `step`.
class DiscreteStateSpace {
  public:
    DiscreteStateSpace(Matrix A, Matrix B, Matrix C, Matrix D, double step);

    static DiscreteStateSpace gain(const Matrix& D, double step);

    const Matrix& A() const { return A_; }
    const Matrix& B() const { return B_; }
    const Matrix& C() const { return C_; }
    const Matrix& D() const { return D_; }
    double        step() const { return step_; }

    Eigen::Index states() const { return A_.rows(); }
    Eigen::Index in_dim() const { return D_.cols(); }
    Eigen::Index out_dim() const { return D_.rows(); }

    /// Transposed (dual) system; run on reversed time it realizes the finite-horizon adjoint.
    DiscreteStateSpace transposed() const;

    /// Same dynamics with C and D multiplied by `factor`.
    DiscreteStateSpace scaled_output(double factor) const;

  private:
    Matrix A_, B_, C_, D_;
    double step_;
};

/// Uniformly sampled vector signal. Column k of `values` is the sample at start + k*step.
class SignalGrid {
  public:
    SignalGrid(double step, double start_time, Matrix values);

    /// Scalar signal from a plain sequence.
    static SignalGrid scalar(double step, double start_time, const std::vector<double>& values);

    double        step() const { return step_; }
    double        start_time() const { return start_; }
    const Matrix& values() const { return values_; }
    Eigen::Index  dim() const { return values_.rows(); }
    Eigen::Index  length() const { return values_.cols(); }
    double        time(Eigen::Index k) const { return start_ + static_cast<double>(k) * step_; }

    /// Row 0 as a std::vector (scalar signals).
    std::vector<double> channel(Eigen::Index row = 0) const;

  private:
    double step_;
    double start_;
    Matrix values_;
};

/// Matrix exponential by scaling and squaring with a degree-13 Pade core.
Matrix expm(const Matrix& M);

/// Zero-order-hold discretization; Ad and Bd come from one exponential of [[A, B], [0, 0]] * step.
DiscreteStateSpace c2d_zoh(const ContinuousStateSpace& sys, double step);

/// Realization of `second` after `first` (output of first feeds input of second).
DiscreteStateSpace   series(const DiscreteStateSpace& first, const DiscreteStateSpace& second);
ContinuousStateSpace series(const ContinuousStateSpace& first, const ContinuousStateSpace& second);

/// Sum of two systems driven by the same input.
DiscreteStateSpace parallel(const DiscreteStateSpace& a, const DiscreteStateSpace& b);

SignalGrid simulate(const DiscreteStateSpace& sys, const SignalGrid& input, const Vector& x0);
SignalGrid simulate(const DiscreteStateSpace& sys, const SignalGrid& input);

/// C(e^{j theta} I - A)^-1 B + D. Throws EvaluationAtPole when the resolvent is singular.
CMatrix frequency_response(const DiscreteStateSpace& sys, double theta);

/// Eigenvalues of a real square matrix (real Schur / QR iteration).
CVector eigenvalues(const Matrix& A);

/// Discrete: compares spectral radius with 1; continuous: compares the spectral abscissa with 0.
Stability classify(const DiscreteStateSpace& sys);
Stability classify(const ContinuousStateSpace& sys);

/// Largest singular value of a complex matrix (0 for empty matrices).
double max_singular_value(const CMatrix& M);
double max_singular_value(const Matrix& M);

}  // namespace yy
