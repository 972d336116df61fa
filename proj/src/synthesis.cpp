#include "yy/synthesis.hpp"

#include "yy/qp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace yy {

FirFilter::FirFilter(std::vector<double> taps, double period) : taps_(std::move(taps)), period_(period) {
    if (taps_.empty()) {
        throw std::invalid_argument("FIR filter needs at least one tap");
    }
    for (double a : taps_) {
        if (!std::isfinite(a)) {
            throw std::invalid_argument("FIR taps must be finite");
        }
    }
    if (!(period_ > 0.0) || !std::isfinite(period_)) {
        throw std::invalid_argument("FIR period must be positive");
    }
}

DiscreteStateSpace FirFilter::realization() const {
    const auto n = static_cast<Eigen::Index>(taps_.size()) - 1;
    Matrix     A = Matrix::Zero(n, n);
    if (n > 1) {
        A.bottomLeftCorner(n - 1, n - 1) = Matrix::Identity(n - 1, n - 1);
    }
    Matrix B = Matrix::Zero(n, 1);
    if (n > 0) {
        B(0, 0) = 1.0;
    }
    Matrix C(1, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        C(0, i) = taps_[static_cast<std::size_t>(i) + 1];
    }
    Matrix D(1, 1);
    D(0, 0) = taps_[0];
    return {std::move(A), std::move(B), std::move(C), std::move(D), period_};
}

Complex FirFilter::response(double theta) const {
    Complex acc = 0.0;
    for (std::size_t n = 0; n < taps_.size(); ++n) {
        acc += taps_[n] * std::polar(1.0, -theta * static_cast<double>(n));
    }
    return acc;
}

namespace {

// G1, G2, G3 evaluated at one frequency. E(a, theta) = G1 + K_a(theta) g2 g3.
struct FrequencySample {
    double   theta = 0.0;
    CMatrix  G1;
    CVector  g2;
    CMatrix  g3;  // 1 x N
};

FrequencySample sample_plant(const GeneralizedPlant& plant, double theta) {
    FrequencySample fs;
    fs.theta = theta;
    fs.G1    = frequency_response(plant.G1, theta);
    fs.g2    = frequency_response(plant.G2, theta).col(0);
    fs.g3    = frequency_response(plant.G3, theta);
    return fs;
}

Complex tap_response(const Vector& a, double theta) {
    Complex acc = 0.0;
    for (Eigen::Index n = 0; n < a.size(); ++n) {
        acc += a(n) * std::polar(1.0, -theta * static_cast<double>(n));
    }
    return acc;
}

double sigma_of(const FrequencySample& fs, const Vector& a) {
    const CMatrix M = fs.G1 + tap_response(a, fs.theta) * (fs.g2 * fs.g3);
    return max_singular_value(M);
}

// Supporting cut of sigma_max(E(., theta)) at a: for the top singular pair (u, v),
// a -> |u^H E(a) v| is a lower bound on the objective that is tight at a. It is affine inside
// the modulus; the modulus is replaced by `phases` half-planes Re(e^{-j phi}(alpha + beta(a))) <= t.
struct CutGroup {
    double               theta = 0.0;
    Complex              alpha;
    std::vector<Complex> beta;  // coefficient of a_n
    double               phase0 = 0.0;
    int                  last_active = 0;
};

CutGroup make_cut(const FrequencySample& fs, const Vector& a, int iteration) {
    const Complex k = tap_response(a, fs.theta);
    const CMatrix M = fs.G1 + k * (fs.g2 * fs.g3);
    CVector       u, v;
    if (M.rows() == 1 && M.cols() == 1) {
        u = CVector::Ones(1);
        v = CVector::Ones(1);
    } else {
        Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU().col(0);
        v = svd.matrixV().col(0);
    }
    CutGroup cut;
    cut.theta = fs.theta;
    cut.alpha = (u.adjoint() * fs.G1 * v)(0, 0);
    const Complex b = (u.adjoint() * fs.g2)(0, 0) * (fs.g3 * v)(0, 0);
    cut.beta.resize(static_cast<std::size_t>(a.size()));
    for (Eigen::Index n = 0; n < a.size(); ++n) {
        cut.beta[static_cast<std::size_t>(n)] = b * std::polar(1.0, -fs.theta * static_cast<double>(n));
    }
    cut.phase0      = std::arg(cut.alpha + b * k);
    cut.last_active = iteration;
    return cut;
}

// Rows r . a <= rhs + t for every phase of every group (the t column is handled by the caller).
void append_cut_rows(const CutGroup& cut, int phases, int taps, Matrix& G, Vector& rhs, Eigen::Index& row) {
    for (int k = 0; k < phases; ++k) {
        const Complex rot = std::polar(1.0, -(cut.phase0 + 2.0 * std::numbers::pi * k / phases));
        for (int n = 0; n < taps; ++n) {
            G(row, n) = (rot * cut.beta[static_cast<std::size_t>(n)]).real();
        }
        rhs(row) = -(rot * cut.alpha).real();
        ++row;
    }
}

struct GridEvaluation {
    double           max_value = 0.0;
    std::vector<int> local_maxima;  // indices, best first
};

GridEvaluation evaluate_grid(const std::vector<FrequencySample>& grid, const Vector& a) {
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        vals[i] = sigma_of(grid[i], a);
    }
    GridEvaluation out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.max_value      = std::max(out.max_value, vals[i]);
        const bool left_ok  = i == 0 || vals[i] >= vals[i - 1];
        const bool right_ok = i + 1 == grid.size() || vals[i] >= vals[i + 1];
        if (left_ok && right_ok) {
            out.local_maxima.push_back(static_cast<int>(i));
        }
    }
    std::sort(out.local_maxima.begin(), out.local_maxima.end(),
              [&](int x, int y) { return vals[static_cast<std::size_t>(x)] > vals[static_cast<std::size_t>(y)]; });
    return out;
}

bool is_zero_system(const DiscreteStateSpace& sys) {
    return grid_lower_bound(sys, 256).value == 0.0 && (sys.states() < 256);
}

}  // namespace

SynthesisReport design_fir(const GeneralizedPlant& plant, int num_taps, const SynthesisOptions& opt) {
    if (num_taps < 1) {
        throw std::invalid_argument("design_fir: num_taps must be at least 1");
    }
    for (const auto* blk : {&plant.G1, &plant.G2, &plant.G3}) {
        if (classify(*blk) != Stability::stable) {
            throw UnstableSystem("design_fir: generalized plant blocks must be stable");
        }
    }
    const double h = plant.step();

    if (is_zero_system(plant.G2) || is_zero_system(plant.G3)) {
        const double g1 = hinf_norm(plant.G1, opt.norm_tol).value;
        SynthesisReport report{FirFilter::zeros(num_taps, h), g1, g1, 0, true, {}};
        report.log.push_back({0, g1, g1, g1});
        return report;
    }

    std::vector<FrequencySample> grid;
    grid.reserve(static_cast<std::size_t>(opt.grid_points));
    for (int i = 0; i < opt.grid_points; ++i) {
        grid.push_back(sample_plant(plant, std::numbers::pi * i / (opt.grid_points - 1)));
    }

    const int T = num_taps;
    std::vector<CutGroup> cuts;

    auto certify = [&](const Vector& a) {
        std::vector<double> taps(a.data(), a.data() + a.size());
        return hinf_norm(close_loop(plant, FirFilter(std::move(taps), h)), opt.norm_tol);
    };
    auto add_cuts = [&](const Vector& a, double certified_peak, const GridEvaluation& ge, int iteration) {
        cuts.push_back(make_cut(sample_plant(plant, certified_peak), a, iteration));
        int added = 0;
        for (int idx : ge.local_maxima) {
            if (added >= 3) {
                break;
            }
            const double theta = grid[static_cast<std::size_t>(idx)].theta;
            if (std::abs(theta - certified_peak) < 1e-9) {
                continue;
            }
            cuts.push_back(make_cut(grid[static_cast<std::size_t>(idx)], a, iteration));
            ++added;
        }
    };

    Vector     a_best = Vector::Zero(T);
    NormResult first  = certify(a_best);
    double     f_best = first.value;
    double     f_low  = 0.0;
    add_cuts(a_best, first.peak_theta, evaluate_grid(grid, a_best), 0);

    SynthesisReport report{FirFilter::zeros(T, h), f_best, 0.0, 0, false, {}};
    report.log.push_back({0, 0.0, f_best, f_best});

    const int box_rows = 2 * T;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        report.iterations = it;

        // Model rows shared by the LP and the level projection.
        const Eigen::Index cut_rows = static_cast<Eigen::Index>(cuts.size()) * opt.phases;
        Matrix             Gc(cut_rows, T);
        Vector             hc(cut_rows);
        Eigen::Index       row = 0;
        for (const auto& cut : cuts) {
            append_cut_rows(cut, opt.phases, T, Gc, hc, row);
        }

        // Lower model optimum: min t s.t. Gc a - t <= hc, |a_n| <= tap_bound.
        QuadraticProgram lp;
        lp.P = Matrix::Zero(T + 1, T + 1);
        lp.c = Vector::Zero(T + 1);
        lp.c(T) = 1.0;
        lp.G = Matrix::Zero(cut_rows + box_rows, T + 1);
        lp.h = Vector::Zero(cut_rows + box_rows);
        lp.G.topLeftCorner(cut_rows, T) = Gc;
        lp.G.block(0, T, cut_rows, 1).setConstant(-1.0);
        lp.h.head(cut_rows) = hc;
        lp.G.block(cut_rows, 0, T, T)     = Matrix::Identity(T, T);
        lp.G.block(cut_rows + T, 0, T, T) = -Matrix::Identity(T, T);
        lp.h.tail(box_rows).setConstant(opt.tap_bound);
        const QpResult lp_sol = solve_qp(lp, 200, 1e-11);
        const Vector   a_lp   = lp_sol.x.head(T);
        // The model value at a_lp, recomputed from the rows, is a valid lower bound for the boxed problem.
        double model_min = 0.0;
        if (cut_rows > 0) {
            model_min = std::max(0.0, (Gc * a_lp - hc).maxCoeff());
        }
        f_low = std::min(std::max(f_low, model_min), f_best);

        const double gap = f_best - f_low;
        report.log.push_back({it, f_low, report.log.back().certified, f_best});
        if (gap <= opt.tol * f_best + 1e-12) {
            report.converged = true;
            break;
        }

        // Level projection of the best point onto {model <= level}.
        const double     level = f_low + 0.3 * gap;
        QuadraticProgram proj;
        proj.P = Matrix::Identity(T, T);
        proj.c = -a_best;
        proj.G = Matrix(cut_rows + box_rows, T);
        proj.h = Vector(cut_rows + box_rows);
        proj.G.topRows(cut_rows) = Gc;
        proj.h.head(cut_rows)    = hc.array() + level;
        proj.G.middleRows(cut_rows, T)     = Matrix::Identity(T, T);
        proj.G.middleRows(cut_rows + T, T) = -Matrix::Identity(T, T);
        proj.h.tail(box_rows).setConstant(opt.tap_bound);
        const QpResult proj_sol = solve_qp(proj, 200, 1e-11);

        std::vector<Vector> candidates;
        candidates.push_back(proj_sol.x);
        const GridEvaluation lp_grid = evaluate_grid(grid, a_lp);
        if (lp_grid.max_value < f_best) {
            candidates.push_back(a_lp);
        }

        double last_certified = 0.0;
        for (const auto& cand : candidates) {
            const NormResult     nr = certify(cand);
            const GridEvaluation ge = evaluate_grid(grid, cand);
            add_cuts(cand, nr.peak_theta, ge, it);
            last_certified = nr.value;
            if (nr.value < f_best) {
                f_best = nr.value;
                a_best = cand;
            }
        }
        report.log.back().certified = last_certified;
        report.log.back().best      = f_best;

        // Track which groups are binding at the current model solution and prune stale ones.
        for (std::size_t gi = 0; gi < cuts.size(); ++gi) {
            const double slack =
                model_min - (Gc.middleRows(static_cast<Eigen::Index>(gi) * opt.phases, opt.phases) * a_lp -
                             hc.segment(static_cast<Eigen::Index>(gi) * opt.phases, opt.phases))
                                .maxCoeff();
            if (slack <= 1e-6 * std::max(1.0, f_best)) {
                cuts[gi].last_active = it;
            }
        }
        if (static_cast<int>(cuts.size()) > opt.max_frequencies) {
            std::stable_sort(cuts.begin(), cuts.end(),
                             [](const CutGroup& x, const CutGroup& y) { return x.last_active > y.last_active; });
            cuts.resize(static_cast<std::size_t>(opt.max_frequencies));
        }
    }

    std::vector<double> taps(a_best.data(), a_best.data() + a_best.size());
    report.filter        = FirFilter(std::move(taps), h);
    report.achieved_norm = f_best;
    report.lower_bound   = f_low;
    return report;
}

SynthesisReport design_fir(const GeneralizedPlant& plant, int num_taps, double tol) {
    SynthesisOptions opt;
    opt.tol = tol;
    return design_fir(plant, num_taps, opt);
}

double evaluate_J(const GeneralizedPlant& plant, const FirFilter& K, double norm_tol) {
    return hinf_norm(close_loop(plant, K), norm_tol).value;
}

double evaluate_J(const DesignProblem& problem, const FirFilter& K, double norm_tol) {
    if (std::abs(K.period() - problem.h) > 1e-9 * problem.h) {
        throw std::invalid_argument("evaluate_J: filter period differs from h");
    }
    return evaluate_J(build_generalized_plant(problem), K, norm_tol);
}

DiscreteStateSpace first_order_perturbation(double pole, double zero, double gamma, double step) {
    if (!(std::abs(pole) < 1.0)) {
        throw std::invalid_argument("perturbation pole must lie inside the unit circle");
    }
    if (!(gamma >= 0.0)) {
        throw std::invalid_argument("gamma must be nonnegative");
    }
    // |e^{j theta} - zero| / |e^{j theta} - pole| is monotone in cos(theta): the peak is at 0 or pi.
    const double peak  = std::max(std::abs(1.0 - zero) / std::abs(1.0 - pole), std::abs(1.0 + zero) / std::abs(1.0 + pole));
    const double kappa = peak > 0.0 ? gamma / peak : 0.0;
    Matrix       A(1, 1), B(1, 1), C(1, 1), D(1, 1);
    A(0, 0) = pole;
    B(0, 0) = 1.0;
    C(0, 0) = kappa * (pole - zero);
    D(0, 0) = kappa;
    return {A, B, C, D, step};
}

double perturbed_norm(const DesignProblem& problem, const FirFilter& K, const DiscreteStateSpace& one_plus_delta,
                      double norm_tol) {
    if (classify(one_plus_delta) != Stability::stable) {
        throw UnstableSystem("perturbation must be stable");
    }
    return evaluate_J(build_generalized_plant(problem, one_plus_delta), K, norm_tol);
}

RobustnessReport robustness_check(const DesignProblem& problem, const FirFilter& K, const UncertaintySpec& spec,
                                  std::uint64_t seed, double norm_tol) {
    if (!(spec.gamma >= 0.0) || spec.samples < 0) {
        throw std::invalid_argument("uncertainty spec needs gamma >= 0 and samples >= 0");
    }
    RobustnessReport report;
    report.nominal     = evaluate_J(problem, K, norm_tol);
    report.gamma_bound = spec.gamma * report.nominal;

    std::mt19937_64                        rng(seed);
    std::uniform_real_distribution<double> pole_dist(-0.9, 0.9);
    std::uniform_real_distribution<double> zero_dist(-1.5, 1.5);
    const double                           delta = problem.fast_step();
    for (int i = 0; i < spec.samples; ++i) {
        const double pole = pole_dist(rng);
        const double zero = zero_dist(rng);
        const double pn   = perturbed_norm(problem, K, first_order_perturbation(pole, zero, spec.gamma, delta), norm_tol);
        report.perturbed.push_back(pn);
        report.max_perturbed = std::max(report.max_perturbed, pn);
        if (report.nominal > 0.0) {
            report.worst_ratio = std::max(report.worst_ratio, pn / report.nominal);
        }
        if (pn > report.gamma_bound * (1.0 + 1e-6)) {
            report.bound_holds = false;
        }
    }
    return report;
}

}  // namespace yy
