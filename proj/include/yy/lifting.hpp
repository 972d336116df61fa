#pragma once

#include "yy/lti.hpp"

#include <optional>

namespace yy {

class FirFilter;

/// Analog models and rates of the sampled-data reconstruction problem.
///
/// The reference path delays x = F w by delay_steps fast periods (h / N each); the
/// reconstruction path samples H1 x at period h, filters, holds, and post-filters with H2.
struct DesignProblem {
    ContinuousStateSpace F;   ///< signal model, stable and strictly proper, SISO
    ContinuousStateSpace H1;  ///< acquisition filter, stable, SISO
    ContinuousStateSpace H2;  ///< hold post-filter, stable, SISO
    double               h           = 1.0;
    int                  N           = 1;
    int                  delay_steps = 0;

    double fast_step() const { return h / N; }

    /// Throws std::invalid_argument naming the violated invariant.
    void validate() const;
};

/// Lifted single-rate triple with E_N(K) = G1 + G2 K G3, all at the slow step h.
struct GeneralizedPlant {
    DiscreteStateSpace G1;  ///< N -> N
    DiscreteStateSpace G2;  ///< 1 -> N
    DiscreteStateSpace G3;  ///< N -> 1
    std::optional<DesignProblem> problem;

    double step() const { return G1.step(); }
    int    block_size() const { return static_cast<int>(G1.in_dim()); }

    /// Checks the dimension and step contract; problem may be absent for hand-built plants.
    static GeneralizedPlant from_blocks(DiscreteStateSpace G1, DiscreteStateSpace G2, DiscreteStateSpace G3);
};

/// Blocking of `sys` by N: step N*delta, inputs and outputs stacked N at a time.
DiscreteStateSpace lift(const DiscreteStateSpace& sys, int N);

/// m-step shift register on `dim` channels; m = 0 gives an identity feedthrough.
DiscreteStateSpace delay_line(int m, int dim, double step);

/// Fast discretization + lifting of the sampled-data error system.
GeneralizedPlant build_generalized_plant(const DesignProblem& problem);

/// As above with the input w first passed through `input_shaping`, a SISO system at the fast
/// step h/N (used for multiplicative perturbations of F).
GeneralizedPlant build_generalized_plant(const DesignProblem& problem, const DiscreteStateSpace& input_shaping);

/// Realization of G1 + G2 K G3.
DiscreteStateSpace close_loop(const GeneralizedPlant& plant, const FirFilter& K);

}  // namespace yy
