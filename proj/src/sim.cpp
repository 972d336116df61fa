#include "yy/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace yy {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::vector<double> run(const DiscreteStateSpace& sys, const std::vector<double>& u, double step) {
    return simulate(sys, SignalGrid::scalar(step, 0.0, u)).channel(0);
}

std::vector<double> fir(const std::vector<double>& taps, const std::vector<double>& u) {
    std::vector<double> y(u.size(), 0.0);
    for (std::size_t k = 0; k < u.size(); ++k) {
        for (std::size_t i = 0; i < taps.size() && i <= k; ++i) {
            y[k] += taps[i] * u[k - i];
        }
    }
    return y;
}

double l2_of(const std::vector<double>& v, double step) {
    if (v.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (double x : v) {
        acc += x * x;
    }
    acc -= 0.5 * (v.front() * v.front() + v.back() * v.back());
    return std::sqrt(std::max(0.0, acc) * step);
}

std::vector<double> reconstruct_yy(const DesignProblem& p, const FirFilter& K, int M, bool shape,
                                   const std::vector<double>& w, std::vector<double>& reference) {
    if (M % p.N != 0) {
        throw std::invalid_argument("grid misalignment: sim_rate_multiplier must be a multiple of N");
    }
    if (std::abs(K.period() - p.h) > 1e-9 * p.h) {
        throw std::invalid_argument("grid misalignment: filter period differs from h");
    }
    const double step = p.h / M;
    const auto   len  = w.size();

    const std::vector<double> x     = shape ? run(c2d_zoh(p.F, step), w, step) : w;
    const std::vector<double> front = shape ? run(c2d_zoh(series(p.F, p.H1), step), w, step)
                                            : run(c2d_zoh(p.H1, step), w, step);

    std::vector<double> samples;
    for (std::size_t i = 0; i < len; i += static_cast<std::size_t>(M)) {
        samples.push_back(front[i]);
    }
    const std::vector<double> u = fir(K.taps(), samples);
    std::vector<double>       held(len);
    for (std::size_t i = 0; i < len; ++i) {
        held[i] = u[i / static_cast<std::size_t>(M)];
    }
    const std::vector<double> out = run(c2d_zoh(p.H2, step), held, step);

    const std::size_t d = static_cast<std::size_t>(p.delay_steps) * static_cast<std::size_t>(M / p.N);
    reference.assign(len, 0.0);
    for (std::size_t i = d; i < len; ++i) {
        reference[i] = x[i - d];
    }
    return out;
}

std::vector<double> reconstruct_sinc(double h, int M, int truncation, const std::vector<double>& x) {
    std::vector<double> s;
    for (std::size_t i = 0; i < x.size(); i += static_cast<std::size_t>(M)) {
        s.push_back(x[i]);
    }
    const SignalGrid    samples = SignalGrid::scalar(h, 0.0, s);
    const double        step    = h / M;
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = sinc_reconstruct(samples, static_cast<double>(i) * step, truncation);
    }
    return y;
}

std::vector<double> reconstruct_spline(double h, int M, const SplinePipeline& sp, const std::vector<double>& x) {
    if (std::abs(sp.phi1.scale - h) > 1e-12 * h || std::abs(sp.phi2.scale - h) > 1e-12 * h) {
        throw std::invalid_argument("grid misalignment: kernel scale differs from h");
    }
    const double     step = h / M;
    const SignalGrid xs   = SignalGrid::scalar(step, 0.0, x);
    const int        last = static_cast<int>((x.size() - 1) / static_cast<std::size_t>(M));

    const IndexedSequence samples = generalized_samples(xs, sp.phi1, 0, last);
    const GramInverse     inv     = invert_gram(gram_filter(sp.phi1, sp.phi2), sp.tail_length);

    IndexedSequence c{0, std::vector<double>(samples.values.size(), 0.0)};
    const auto&     k = inv.response;
    for (int n = 0; n <= last; ++n) {
        double acc = 0.0;
        for (int j = k.first_index(); j <= k.last_index(); ++j) {
            const int src = n - j;
            if (src >= 0 && src <= last) {
                acc += k[j] * samples.values[static_cast<std::size_t>(src)];
            }
        }
        c.values[static_cast<std::size_t>(n)] = acc;
    }
    return synthesize(c, sp.phi2, step, 0.0, static_cast<Eigen::Index>(x.size())).channel(0);
}

}  // namespace

std::string PipelineSpec::label() const {
    return std::visit(overloaded{
                          [](const YyPipeline& p) { return "yy:" + std::to_string(p.K.size()) + "taps"; },
                          [](const SincPipeline& p) { return "sinc:T" + std::to_string(p.truncation); },
                          [](const SplinePipeline& p) { return "spline:" + p.phi1.name() + "/" + p.phi2.name(); },
                      },
                      kind);
}

double l2_norm(const SignalGrid& s) { return l2_of(s.channel(0), s.step()); }

PipelineResult run_pipeline(const DesignProblem& problem, const PipelineSpec& spec, const SignalGrid& w) {
    const int M = spec.sim_rate_multiplier;
    if (M < 1) {
        throw std::invalid_argument("sim_rate_multiplier must be at least 1");
    }
    if (w.dim() != 1) {
        throw std::invalid_argument("pipeline input must be scalar");
    }
    const double step = problem.h / M;
    if (std::abs(w.step() - step) > 1e-9 * step) {
        throw std::invalid_argument("grid misalignment: input step differs from h / sim_rate_multiplier");
    }
    const std::vector<double> wv = w.channel(0);
    const auto                len = wv.size();

    std::vector<double> reference;
    std::vector<double> recon = std::visit(
        overloaded{
            [&](const YyPipeline& p) { return reconstruct_yy(problem, p.K, M, spec.shape_input, wv, reference); },
            [&](const SincPipeline& p) {
                reference = spec.shape_input ? run(c2d_zoh(problem.F, step), wv, step) : wv;
                return reconstruct_sinc(problem.h, M, p.truncation, reference);
            },
            [&](const SplinePipeline& p) {
                reference = spec.shape_input ? run(c2d_zoh(problem.F, step), wv, step) : wv;
                return reconstruct_spline(problem.h, M, p, reference);
            },
        },
        spec.kind);

    std::vector<double> err(len);
    for (std::size_t i = 0; i < len; ++i) {
        err[i] = reference[i] - recon[i];
    }
    PipelineResult out{SignalGrid::scalar(step, w.start_time(), recon), SignalGrid::scalar(step, w.start_time(), err),
                       l2_of(err, step), l2_of(wv, step)};
    return out;
}

GainProbeResult gain_probe(const DesignProblem& problem, const FirFilter& K, int num_probes, std::uint64_t seed) {
    if (num_probes < 1) {
        throw std::invalid_argument("gain_probe: num_probes must be at least 1");
    }
    const int    N      = problem.N;
    const double delta  = problem.fast_step();
    const int    blocks = 256;
    const int    active = 192;  // trailing blocks stay zero so the response can decay
    const auto   len    = static_cast<std::size_t>(blocks * N);
    const auto   used   = static_cast<std::size_t>(active * N);

    GainProbeResult result;
    result.certified_norm = evaluate_J(problem, K);

    std::mt19937_64                        rng(seed);
    std::normal_distribution<double>       gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double                           nyquist = std::numbers::pi / delta;

    PipelineSpec        spec{YyPipeline{K}, N, true};
    std::vector<double> worst_w;
    double              worst = -1.0;
    auto                consider = [&](const std::vector<double>& w, const std::string& id) {
        const PipelineResult r = run_pipeline(problem, spec, SignalGrid::scalar(delta, 0.0, w));
        if (r.l2_input == 0.0) {
            return;
        }
        const double ratio = r.l2_error / r.l2_input;
        if (ratio > worst) {
            worst           = ratio;
            worst_w         = w;
            result.input_id = id;
        }
    };

    for (int p = 0; p < num_probes; ++p) {
        std::vector<double> w(len, 0.0);
        std::string         id;
        switch (p % 3) {
            case 0:
                for (std::size_t i = 1; i < used; ++i) {
                    w[i] = gauss(rng);
                }
                id = "white#" + std::to_string(p / 3);
                break;
            case 1: {
                const double omega = nyquist * unif(rng);
                const double phase = 2.0 * std::numbers::pi * unif(rng);
                const auto   a     = static_cast<std::size_t>(unif(rng) * 0.5 * static_cast<double>(used));
                const auto   b     = std::min(used, a + std::max<std::size_t>(8, static_cast<std::size_t>(unif(rng) * static_cast<double>(used - a))));
                for (std::size_t i = std::max<std::size_t>(a, 1); i < b; ++i) {
                    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i - a) / static_cast<double>(b - a));
                    w[i]              = hann * std::sin(omega * static_cast<double>(i) * delta + phase);
                }
                id = "burst#" + std::to_string(p / 3);
                break;
            }
            default: {
                const double f0 = nyquist * unif(rng), f1 = nyquist * unif(rng);
                const double T  = static_cast<double>(used) * delta;
                for (std::size_t i = 1; i < used; ++i) {
                    const double t = static_cast<double>(i) * delta;
                    w[i]           = std::sin(f0 * t + 0.5 * (f1 - f0) * t * t / T);
                }
                id = "chirp#" + std::to_string(p / 3);
                break;
            }
        }
        consider(w, id);
    }

    // Power iteration on the truncated lifted operator; ratios in the lifted l2 norm.
    const DiscreteStateSpace T   = close_loop(build_generalized_plant(problem), K);
    const DiscreteStateSpace Tt  = T.transposed();
    auto                     blockify = [&](const std::vector<double>& v) {
        Matrix m(N, blocks);
        for (int k = 0; k < blocks; ++k) {
            for (int i = 0; i < N; ++i) {
                m(i, k) = v[static_cast<std::size_t>(k * N + i)];
            }
        }
        return m;
    };
    if (worst_w.empty()) {
        worst_w.assign(len, 0.0);
        worst_w[1 % len] = 1.0;
    }
    Matrix W = blockify(worst_w);
    for (int pass = 0; pass < 20; ++pass) {
        const double wn = W.norm();
        if (wn == 0.0) {
            break;
        }
        W /= wn;
        const Matrix E     = simulate(T, SignalGrid(problem.h, 0.0, W)).values();
        const double ratio = E.norm();
        if (ratio > worst) {
            worst           = ratio;
            result.input_id = "power#" + std::to_string(pass);
        }
        const Matrix Er = E.rowwise().reverse();
        W               = simulate(Tt, SignalGrid(problem.h, 0.0, Er)).values().rowwise().reverse();
    }
    result.empirical_ratio = std::max(0.0, worst);
    return result;
}

CompareTable compare(const DesignProblem& problem, const std::vector<PipelineSpec>& specs,
                     const std::vector<SignalGrid>& corpus) {
    if (corpus.empty()) {
        throw std::invalid_argument("compare: empty corpus");
    }
    for (const auto& s : corpus) {
        if (std::abs(s.step() - corpus.front().step()) > 1e-9 * corpus.front().step()) {
            throw std::invalid_argument("compare: corpus signals are on different grids");
        }
    }
    CompareTable table;
    for (const auto& spec : specs) {
        CompareSummary sum{spec.label(), 0.0, 0.0, 0, false};
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const PipelineResult r = run_pipeline(problem, spec, corpus[i]);
            CompareRow           row{sum.pipeline, static_cast<int>(i), r.l2_error, r.l2_input, 0.0, r.l2_input > 0.0};
            if (row.defined) {
                row.ratio       = r.l2_error / r.l2_input;
                sum.worst_ratio = std::max(sum.worst_ratio, row.ratio);
                sum.mean_ratio += row.ratio;
                ++sum.defined_count;
            } else {
                sum.flagged = true;
            }
            table.rows.push_back(row);
        }
        if (sum.defined_count > 0) {
            sum.mean_ratio /= sum.defined_count;
        }
        table.summary.push_back(sum);
    }
    return table;
}

}  // namespace yy
