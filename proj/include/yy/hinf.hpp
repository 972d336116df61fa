#pragma once

#include "yy/lti.hpp"

#include <stdexcept>
#include <string>

namespace yy {

struct NormResult {
    double value      = 0.0;
    bool   certified  = false;
    double peak_theta = 0.0;  ///< arg-max frequency estimate in [0, pi]
    int    iterations = 0;
};

class UnstableSystem : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The bounded-real test could not be decided (singular feedthrough block or QZ failure).
class NormInconclusive : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultNormTol    = 1e-6;
inline constexpr int    kDefaultGridPoints = 2048;

/// Certified discrete-time H-infinity norm.
///
/// Bisects on gamma; each gamma is decided by looking for unit-circle eigenvalues of the
/// symplectic pencil built from (A, B, C, D, gamma). When the pencil reports crossings, the
/// singular values at and between the crossing frequencies are evaluated and lift the lower
/// bracket directly, which makes most runs converge in a handful of steps. The returned value
/// is the upper end of a bracket whose relative width is at most `tol`.
NormResult hinf_norm(const DiscreteStateSpace& sys, double tol = kDefaultNormTol);

/// max over a nested frequency set of sigma_max(G(e^{j theta})). Never certified.
///
/// The set is {0, pi} plus the golden-ratio sequence pi*frac(k/phi); sets for increasing
/// `num_points` are nested, so the bound is nondecreasing in `num_points`.
NormResult grid_lower_bound(const DiscreteStateSpace& sys, int num_points = kDefaultGridPoints);

/// Frequencies used by grid_lower_bound, in generation order.
std::vector<double> golden_grid(int num_points);

double spectral_radius(const Matrix& A);
double spectral_radius(const DiscreteStateSpace& sys);

/// Whether some frequency has sigma_max(G) >= gamma, decided by the pencil; exposed for tests.
bool pencil_has_unit_circle_eigenvalues(const DiscreteStateSpace& sys, double gamma,
                                        std::vector<double>* crossing_thetas = nullptr);

}  // namespace yy
