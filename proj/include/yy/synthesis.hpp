#pragma once

#include "yy/hinf.hpp"
#include "yy/lifting.hpp"

#include <cstdint>
#include <vector>

namespace yy {

/// Causal FIR filter K(z) = sum_n taps[n] z^-n running at `period`.
class FirFilter {
  public:
    FirFilter(std::vector<double> taps, double period);

    static FirFilter zeros(int num_taps, double period) {
        return {std::vector<double>(static_cast<std::size_t>(num_taps), 0.0), period};
    }

    const std::vector<double>& taps() const { return taps_; }
    double                     period() const { return period_; }
    int                        size() const { return static_cast<int>(taps_.size()); }

    /// Shift-register realization; zero states for a single tap.
    DiscreteStateSpace realization() const;

    /// K(e^{j theta}).
    Complex response(double theta) const;

  private:
    std::vector<double> taps_;
    double              period_;
};

struct IterationRecord {
    int    iteration   = 0;
    double lower_bound = 0.0;  ///< optimum of the cutting-plane model
    double certified   = 0.0;  ///< certified norm of this iterate
    double best        = 0.0;  ///< best certified norm so far
};

struct SynthesisReport {
    FirFilter                    filter;
    double                       achieved_norm = 0.0;
    double                       lower_bound   = 0.0;
    int                          iterations    = 0;
    bool                         converged     = false;
    std::vector<IterationRecord> log;
};

struct SynthesisOptions {
    double tol            = 1e-4;
    int    max_iterations = 200;
    int    max_frequencies = 1024;
    int    phases         = 32;
    int    grid_points    = 512;
    double tap_bound      = 1e4;  ///< box |a_n| <= tap_bound that keeps the cutting-plane model bounded
    double norm_tol       = 1e-7;
};

/// Minimizes a -> ||G1 + G2 K_a G3||_inf over num_taps FIR coefficients.
SynthesisReport design_fir(const GeneralizedPlant& plant, int num_taps, const SynthesisOptions& options = {});
SynthesisReport design_fir(const GeneralizedPlant& plant, int num_taps, double tol);

/// Certified ||E_N(K)||_inf for the problem's N and delay.
double evaluate_J(const DesignProblem& problem, const FirFilter& K, double norm_tol = kDefaultNormTol);
double evaluate_J(const GeneralizedPlant& plant, const FirFilter& K, double norm_tol = kDefaultNormTol);

struct UncertaintySpec {
    double gamma   = 1.0;  ///< bound on ||1 + Delta||_inf
    int    samples = 50;
};

struct RobustnessReport {
    double              nominal       = 0.0;
    double              gamma_bound   = 0.0;  ///< gamma * nominal
    double              max_perturbed = 0.0;
    double              worst_ratio   = 0.0;  ///< max perturbed / nominal
    bool                bound_holds   = true;
    std::vector<double> perturbed;
};

/// 1 + Delta(z) = kappa (z - zero) / (z - pole) at the fast step, with kappa chosen so that
/// ||1 + Delta||_inf = gamma exactly.
DiscreteStateSpace first_order_perturbation(double pole, double zero, double gamma, double step);

/// Monte-Carlo check of ||E^Delta(K)|| <= gamma ||E(K)|| with random first-order Delta.
/// Perturbations are drawn from std::mt19937_64 seeded with `seed`.
RobustnessReport robustness_check(const DesignProblem& problem, const FirFilter& K, const UncertaintySpec& spec,
                                  std::uint64_t seed = 1, double norm_tol = 1e-10);

/// Same inequality for one given multiplicative factor (1 + Delta) at the fast step.
double perturbed_norm(const DesignProblem& problem, const FirFilter& K, const DiscreteStateSpace& one_plus_delta,
                      double norm_tol = 1e-10);

}  // namespace yy
