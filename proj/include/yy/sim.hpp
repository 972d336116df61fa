#pragma once

#include "yy/baselines.hpp"
#include "yy/synthesis.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace yy {

struct YyPipeline {
    FirFilter K;
};

struct SincPipeline {
    int truncation = 128;
};

/// Generalized sampling with phi1, two-sided Gram inverse, synthesis with phi2.
struct SplinePipeline {
    Kernel phi1;
    Kernel phi2;
    int    tail_length = 64;
};

struct PipelineSpec {
    std::variant<YyPipeline, SincPipeline, SplinePipeline> kind;
    int  sim_rate_multiplier = 8;  ///< grid step is h / M
    /// When true the input w drives the signal model F (x = F w); otherwise x = w.
    bool shape_input = true;

    std::string label() const;
};

struct PipelineResult {
    SignalGrid reconstruction;
    SignalGrid error;
    double     l2_error = 0.0;
    double     l2_input = 0.0;
};

/// Trapezoid-rule L2 norm of a scalar grid signal.
double l2_norm(const SignalGrid& s);

/// Simulates one reconstruction pipeline on the fast grid h/M.
///
/// yy: x = F w, samples (H1 x)(kh), filters with K, holds over h, post-filters with H2 and
/// compares with x delayed by delay_steps * h / N. With M = N this is the lifted closed loop.
/// sinc and spline reconstruct x itself (no delay, no H1) from x(nh) or <x, phi1(. - nh)>.
/// Throws std::invalid_argument on grid misalignment.
PipelineResult run_pipeline(const DesignProblem& problem, const PipelineSpec& spec, const SignalGrid& w);

struct GainProbeResult {
    double      empirical_ratio = 0.0;
    double      certified_norm  = 0.0;
    std::string input_id;
};

/// Random white / sinusoidal-burst / chirp probes through the error system at M = N, followed by
/// 20 power-iteration passes (adjoint by time reversal) started from the worst probe.
GainProbeResult gain_probe(const DesignProblem& problem, const FirFilter& K, int num_probes, std::uint64_t seed);

struct CompareRow {
    std::string pipeline;
    int         signal   = 0;  ///< corpus index
    double      l2_error = 0.0;
    double      l2_input = 0.0;
    double      ratio    = 0.0;
    bool        defined  = true;  ///< false when the input has zero norm
};

struct CompareSummary {
    std::string pipeline;
    double      worst_ratio = 0.0;
    double      mean_ratio  = 0.0;
    int         defined_count = 0;
    bool        flagged       = false;  ///< some ratio was undefined
};

struct CompareTable {
    std::vector<CompareRow>     rows;     ///< pipelines in the given order, signals in corpus order
    std::vector<CompareSummary> summary;  ///< one per pipeline
};

CompareTable compare(const DesignProblem& problem, const std::vector<PipelineSpec>& specs,
                     const std::vector<SignalGrid>& corpus);

}  // namespace yy
