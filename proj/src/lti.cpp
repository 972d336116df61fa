#include "yy/lti.hpp"

#include <algorithm>
#include <cmath>

namespace yy {

namespace {

void check_dims(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D) {
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("state matrix A must be square");
    }
    if (B.rows() != A.rows()) {
        throw std::invalid_argument("B must have as many rows as A");
    }
    if (C.cols() != A.cols()) {
        throw std::invalid_argument("C must have as many columns as A");
    }
    if (D.rows() != C.rows() || D.cols() != B.cols()) {
        throw std::invalid_argument("D must be outputs x inputs");
    }
    if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite()) {
        throw std::invalid_argument("state-space matrices must be finite");
    }
}

Matrix block_diag(const Matrix& X, const Matrix& Y) {
    Matrix out = Matrix::Zero(X.rows() + Y.rows(), X.cols() + Y.cols());
    out.topLeftCorner(X.rows(), X.cols())         = X;
    out.bottomRightCorner(Y.rows(), Y.cols())     = Y;
    return out;
}

}  // namespace

ContinuousStateSpace::ContinuousStateSpace(Matrix A, Matrix B, Matrix C, Matrix D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
    check_dims(A_, B_, C_, D_);
}

ContinuousStateSpace ContinuousStateSpace::gain(const Matrix& D) {
    return {Matrix(0, 0), Matrix(0, D.cols()), Matrix(D.rows(), 0), D};
}

CMatrix ContinuousStateSpace::frequency_response(double omega) const {
    const auto n = states();
    if (n == 0) {
        return D_.cast<Complex>();
    }
    CMatrix resolvent = Complex(0.0, omega) * CMatrix::Identity(n, n) - A_.cast<Complex>();
    Eigen::FullPivLU<CMatrix> lu(resolvent);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) {
        throw EvaluationAtPole("continuous frequency response evaluated at a pole", lu.rcond());
    }
    return C_.cast<Complex>() * lu.solve(B_.cast<Complex>()) + D_.cast<Complex>();
}

DiscreteStateSpace::DiscreteStateSpace(Matrix A, Matrix B, Matrix C, Matrix D, double step)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)), step_(step) {
    check_dims(A_, B_, C_, D_);
    if (!(step_ > 0.0) || !std::isfinite(step_)) {
        throw std::invalid_argument("discrete system step must be positive");
    }
}

DiscreteStateSpace DiscreteStateSpace::gain(const Matrix& D, double step) {
    return {Matrix(0, 0), Matrix(0, D.cols()), Matrix(D.rows(), 0), D, step};
}

DiscreteStateSpace DiscreteStateSpace::transposed() const {
    return {A_.transpose(), C_.transpose(), B_.transpose(), D_.transpose(), step_};
}

DiscreteStateSpace DiscreteStateSpace::scaled_output(double factor) const {
    return {A_, B_, factor * C_, factor * D_, step_};
}

SignalGrid::SignalGrid(double step, double start_time, Matrix values)
    : step_(step), start_(start_time), values_(std::move(values)) {
    if (!(step_ > 0.0) || !std::isfinite(step_)) {
        throw std::invalid_argument("signal grid step must be positive");
    }
}

SignalGrid SignalGrid::scalar(double step, double start_time, const std::vector<double>& values) {
    Matrix m(1, static_cast<Eigen::Index>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) {
        m(0, static_cast<Eigen::Index>(k)) = values[k];
    }
    return {step, start_time, std::move(m)};
}

std::vector<double> SignalGrid::channel(Eigen::Index row) const {
    std::vector<double> out(static_cast<std::size_t>(length()));
    for (Eigen::Index k = 0; k < length(); ++k) {
        out[static_cast<std::size_t>(k)] = values_(row, k);
    }
    return out;
}

Matrix expm(const Matrix& M) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument("expm: matrix must be square");
    }
    if (!M.allFinite()) {
        throw std::invalid_argument("expm: matrix must be finite");
    }
    const auto n = M.rows();
    if (n == 0) {
        return Matrix(0, 0);
    }

    // Higham (2005) degree-13 Pade coefficients.
    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double norm1 = M.cwiseAbs().colwise().sum().maxCoeff();
    int          s     = 0;
    if (norm1 > theta13) {
        s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    }
    const Matrix A  = M / std::ldexp(1.0, s);
    const Matrix I  = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;

    const Matrix U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;

    Matrix E = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < s; ++k) {
        E = E * E;
    }
    return E;
}

DiscreteStateSpace c2d_zoh(const ContinuousStateSpace& sys, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("c2d_zoh: step must be positive");
    }
    const auto n = sys.states();
    const auto m = sys.inputs();
    Matrix     aug = Matrix::Zero(n + m, n + m);
    aug.topLeftCorner(n, n)  = sys.A();
    aug.topRightCorner(n, m) = sys.B();
    const Matrix E = expm(aug * step);
    return {E.topLeftCorner(n, n), E.topRightCorner(n, m), sys.C(), sys.D(), step};
}

DiscreteStateSpace series(const DiscreteStateSpace& first, const DiscreteStateSpace& second) {
    if (first.out_dim() != second.in_dim()) {
        throw std::invalid_argument("series: output of first must match input of second");
    }
    if (std::abs(first.step() - second.step()) > 1e-12 * std::max(first.step(), second.step())) {
        throw std::invalid_argument("series: step mismatch");
    }
    const auto n1 = first.states();
    const auto n2 = second.states();
    Matrix     A  = Matrix::Zero(n1 + n2, n1 + n2);
    A.topLeftCorner(n1, n1)     = first.A();
    A.bottomLeftCorner(n2, n1)  = second.B() * first.C();
    A.bottomRightCorner(n2, n2) = second.A();
    Matrix B(n1 + n2, first.in_dim());
    B.topRows(n1)    = first.B();
    B.bottomRows(n2) = second.B() * first.D();
    Matrix C(second.out_dim(), n1 + n2);
    C.leftCols(n1)  = second.D() * first.C();
    C.rightCols(n2) = second.C();
    return {std::move(A), std::move(B), std::move(C), second.D() * first.D(), first.step()};
}

ContinuousStateSpace series(const ContinuousStateSpace& first, const ContinuousStateSpace& second) {
    if (first.outputs() != second.inputs()) {
        throw std::invalid_argument("series: output of first must match input of second");
    }
    const auto n1 = first.states();
    const auto n2 = second.states();
    Matrix     A  = Matrix::Zero(n1 + n2, n1 + n2);
    A.topLeftCorner(n1, n1)     = first.A();
    A.bottomLeftCorner(n2, n1)  = second.B() * first.C();
    A.bottomRightCorner(n2, n2) = second.A();
    Matrix B(n1 + n2, first.inputs());
    B.topRows(n1)    = first.B();
    B.bottomRows(n2) = second.B() * first.D();
    Matrix C(second.outputs(), n1 + n2);
    C.leftCols(n1)  = second.D() * first.C();
    C.rightCols(n2) = second.C();
    return {std::move(A), std::move(B), std::move(C), second.D() * first.D()};
}

DiscreteStateSpace parallel(const DiscreteStateSpace& a, const DiscreteStateSpace& b) {
    if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) {
        throw std::invalid_argument("parallel: dimension mismatch");
    }
    if (std::abs(a.step() - b.step()) > 1e-12 * std::max(a.step(), b.step())) {
        throw std::invalid_argument("parallel: step mismatch");
    }
    Matrix B(a.states() + b.states(), a.in_dim());
    B.topRows(a.states())    = a.B();
    B.bottomRows(b.states()) = b.B();
    Matrix C(a.out_dim(), a.states() + b.states());
    C.leftCols(a.states())  = a.C();
    C.rightCols(b.states()) = b.C();
    return {block_diag(a.A(), b.A()), std::move(B), std::move(C), a.D() + b.D(), a.step()};
}

SignalGrid simulate(const DiscreteStateSpace& sys, const SignalGrid& input, const Vector& x0) {
    if (input.dim() != sys.in_dim()) {
        throw std::invalid_argument("simulate: input dimension mismatch");
    }
    if (x0.size() != sys.states()) {
        throw std::invalid_argument("simulate: initial state dimension mismatch");
    }
    if (std::abs(input.step() - sys.step()) > 1e-9 * sys.step()) {
        throw std::invalid_argument("simulate: input step differs from system step");
    }
    const Matrix& u = input.values();
    Matrix        y(sys.out_dim(), u.cols());
    Vector        x = x0;
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        y.col(k) = sys.C() * x + sys.D() * u.col(k);
        x        = sys.A() * x + sys.B() * u.col(k);
    }
    return {input.step(), input.start_time(), std::move(y)};
}

SignalGrid simulate(const DiscreteStateSpace& sys, const SignalGrid& input) {
    return simulate(sys, input, Vector::Zero(sys.states()));
}

CMatrix frequency_response(const DiscreteStateSpace& sys, double theta) {
    const auto n = sys.states();
    if (n == 0) {
        return sys.D().cast<Complex>();
    }
    CMatrix resolvent = std::polar(1.0, theta) * CMatrix::Identity(n, n) - sys.A().cast<Complex>();
    Eigen::FullPivLU<CMatrix> lu(resolvent);
    const double rcond = lu.rcond();
    if (!lu.isInvertible() || rcond < 1e-14) {
        throw EvaluationAtPole("frequency response evaluated at a pole (rcond " + std::to_string(rcond) + ")",
                               rcond);
    }
    return sys.C().cast<Complex>() * lu.solve(sys.B().cast<Complex>()) + sys.D().cast<Complex>();
}

CVector eigenvalues(const Matrix& A) {
    if (A.rows() == 0) {
        return CVector(0);
    }
    Eigen::EigenSolver<Matrix> solver(A, false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigenvalue iteration did not converge");
    }
    return solver.eigenvalues();
}

Stability classify(const DiscreteStateSpace& sys) {
    if (sys.states() == 0) {
        return Stability::stable;
    }
    const double rho = eigenvalues(sys.A()).cwiseAbs().maxCoeff();
    if (rho < 1.0 - kStabilityMargin) {
        return Stability::stable;
    }
    if (rho <= 1.0 + kStabilityMargin) {
        return Stability::marginal;
    }
    return Stability::unstable;
}

Stability classify(const ContinuousStateSpace& sys) {
    if (sys.states() == 0) {
        return Stability::stable;
    }
    const double abscissa = eigenvalues(sys.A()).real().maxCoeff();
    if (abscissa < -kStabilityMargin) {
        return Stability::stable;
    }
    if (abscissa <= kStabilityMargin) {
        return Stability::marginal;
    }
    return Stability::unstable;
}

double max_singular_value(const CMatrix& M) {
    if (M.size() == 0) {
        return 0.0;
    }
    if (M.rows() == 1 || M.cols() == 1) {
        return M.norm();
    }
    Eigen::JacobiSVD<CMatrix> svd(M);
    return svd.singularValues()(0);
}

double max_singular_value(const Matrix& M) {
    if (M.size() == 0) {
        return 0.0;
    }
    if (M.rows() == 1 || M.cols() == 1) {
        return M.norm();
    }
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(0);
}

}  // namespace yy
