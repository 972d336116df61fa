#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "yy/qp.hpp"
#include "yy/synthesis.hpp"

#include <numbers>

using namespace yy;

namespace {

Matrix M1(double v) { return Matrix::Constant(1, 1, v); }

ContinuousStateSpace lag(double a) { return {M1(-a), M1(1), M1(a), M1(0)}; }
ContinuousStateSpace unity() { return ContinuousStateSpace::gain(M1(1)); }

struct BruteResult {
    double a0 = 0.0, a1 = 0.0, value = 0.0;
};

/// Exhaustive 2-tap search on [-2, 2]^2 with step 0.01 for an N = 2 plant; frequency responses
/// on a fixed theta grid, sigma_max in closed form; the best grid point is then certified.
BruteResult brute_force_two_taps(const GeneralizedPlant& plant) {
    const int                         T = 256;
    std::vector<CMatrix>              G1(T);
    std::vector<CMatrix>              G23(T);
    std::vector<Complex>              zinv(T);
    for (int k = 0; k < T; ++k) {
        const double th = std::numbers::pi * k / (T - 1);
        G1[static_cast<std::size_t>(k)]   = frequency_response(plant.G1, th);
        G23[static_cast<std::size_t>(k)]  = frequency_response(plant.G2, th) * frequency_response(plant.G3, th);
        zinv[static_cast<std::size_t>(k)] = std::polar(1.0, -th);
    }
    BruteResult best{0, 0, std::numeric_limits<double>::infinity()};
    for (int i = -200; i <= 200; ++i) {
        for (int j = -200; j <= 200; ++j) {
            const double a0 = 0.01 * i, a1 = 0.01 * j;
            double       worst = 0.0;
            for (std::size_t k = 0; k < G1.size() && worst < best.value; ++k) {
                const Complex  K = a0 + a1 * zinv[k];
                const CMatrix& g = G1[k];
                const CMatrix& p = G23[k];
                worst = std::max(worst, oracle::sigma_max_2x2(g(0, 0) + K * p(0, 0), g(0, 1) + K * p(0, 1),
                                                              g(1, 0) + K * p(1, 0), g(1, 1) + K * p(1, 1)));
            }
            if (worst < best.value) {
                best = {a0, a1, worst};
            }
        }
    }
    best.value = evaluate_J(plant, FirFilter({best.a0, best.a1}, plant.step()), 1e-9);
    return best;
}

std::vector<double> randn(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double>              v(n);
    for (auto& x : v) {
        x = g(rng);
    }
    return v;
}

}  // namespace

TEST_CASE("FirFilter") {
    const FirFilter K({1.0, 2.0, 3.0}, 0.5);
    CHECK(K.size() == 3);
    CHECK(std::abs(K.response(0.0) - Complex(6.0, 0.0)) < 1e-14);
    CHECK(std::abs(K.response(std::numbers::pi) - Complex(2.0, 0.0)) < 1e-14);
    const auto R = K.realization();
    CHECK(R.states() == 2);
    const auto y = simulate(DiscreteStateSpace(R.A(), R.B(), R.C(), R.D(), 1.0), SignalGrid::scalar(1.0, 0.0, {1, 0, 0, 0})).channel(0);
    CHECK(y == std::vector<double>{1, 2, 3, 0});
    CHECK(FirFilter({4.0}, 1.0).realization().states() == 0);
    CHECK_THROWS_AS(FirFilter({}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(FirFilter({std::nan("")}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(FirFilter({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("solve_qp") {
    SUBCASE("box projection") {
        // min 0.5||x - c||^2  s.t.  x <= 0
        const Vector c  = (Vector(3) << 1.0, -2.0, 0.5).finished();
        const auto   r  = solve_qp({Matrix::Identity(3, 3), -c, Matrix::Identity(3, 3), Vector::Zero(3)});
        CHECK(r.status == QpStatus::optimal);
        CHECK(std::abs(r.x(0)) < 1e-8);
        CHECK(r.x(1) == doctest::Approx(-2.0).epsilon(1e-8));
        CHECK(std::abs(r.x(2)) < 1e-8);
    }
    SUBCASE("linear program") {
        // min -x - y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0  -> (8/5, 6/5)
        Matrix G(4, 2);
        G << 1, 2, 3, 1, -1, 0, 0, -1;
        const Vector h = (Vector(4) << 4, 6, 0, 0).finished();
        const auto   r = solve_qp({Matrix::Zero(2, 2), -Vector::Ones(2), G, h});
        CHECK(r.status == QpStatus::optimal);
        CHECK(r.x(0) == doctest::Approx(1.6).epsilon(1e-8));
        CHECK(r.x(1) == doctest::Approx(1.2).epsilon(1e-8));
        CHECK(r.objective == doctest::Approx(-2.8).epsilon(1e-9));
    }
    SUBCASE("random strictly convex QPs satisfy KKT") {
        std::mt19937_64                  rng(301);
        std::normal_distribution<double> g;
        for (int t = 0; t < 10; ++t) {
            const int    n = 6, m = 15;
            const Matrix L = Matrix::NullaryExpr(n, n, [&] { return g(rng); });
            const Matrix P = L * L.transpose() + 0.1 * Matrix::Identity(n, n);
            const Vector c = Vector::NullaryExpr(n, [&] { return g(rng); });
            const Matrix G = Matrix::NullaryExpr(m, n, [&] { return g(rng); });
            const Vector h = Vector::NullaryExpr(m, [&] { return std::abs(g(rng)) + 0.1; });
            const auto   r = solve_qp({P, c, G, h});
            REQUIRE(r.status == QpStatus::optimal);
            const Vector s = h - G * r.x;
            CHECK(s.minCoeff() > -1e-8);
            CHECK(r.z.minCoeff() > -1e-10);
            CHECK((P * r.x + c + G.transpose() * r.z).cwiseAbs().maxCoeff() < 1e-7);
            CHECK(std::abs(s.dot(r.z)) < 1e-7);
        }
    }
    SUBCASE("dimension errors") {
        CHECK_THROWS_AS(solve_qp({Matrix::Identity(2, 2), Vector::Zero(3), Matrix::Zero(1, 2), Vector::Zero(1)}),
                        std::invalid_argument);
    }
}

TEST_CASE("design_fir small cases") {
    SUBCASE("static cancellation") {
        const auto g     = DiscreteStateSpace::gain(M1(1), 1.0);
        const auto plant = GeneralizedPlant::from_blocks(g, g, g);
        const auto r     = design_fir(plant, 1, 1e-6);
        CHECK(r.converged);
        CHECK(r.filter.taps()[0] == doctest::Approx(-1.0).epsilon(1e-6));
        CHECK(r.achieved_norm < 1e-5);
    }
    SUBCASE("degenerate G2") {
        const DesignProblem p{lag(1.0), unity(), unity(), 1.0, 2, 0};
        auto                plant = build_generalized_plant(p);
        plant.G2                  = plant.G2.scaled_output(0.0);
        const auto r              = design_fir(plant, 3, 1e-4);
        for (double a : r.filter.taps()) {
            CHECK(a == 0.0);
        }
        CHECK(r.achieved_norm == doctest::Approx(hinf_norm(plant.G1).value).epsilon(1e-6));
    }
    SUBCASE("report invariants") {
        std::mt19937_64 rng(302);
        for (int t = 0; t < 4; ++t) {
            const auto plant = build_generalized_plant(oracle::random_problem(rng, 2));
            const auto r     = design_fir(plant, 4, 1e-4);
            CHECK(r.lower_bound <= r.achieved_norm * (1.0 + 1e-12));
            if (r.converged) {
                CHECK(r.achieved_norm - r.lower_bound <= 1e-4 * r.achieved_norm + 1e-12);
            }
            CHECK(r.achieved_norm == doctest::Approx(evaluate_J(plant, r.filter, 1e-9)).epsilon(1e-6));
            REQUIRE_FALSE(r.log.empty());
            CHECK(r.log.front().iteration == 0);
            for (std::size_t i = 1; i < r.log.size(); ++i) {
                CHECK(r.log[i].best <= r.log[i - 1].best);
                CHECK(r.log[i].lower_bound >= r.log[i - 1].lower_bound - 1e-12);
            }
        }
    }
    SUBCASE("iteration cap reports the best iterate") {
        SynthesisOptions opt;
        opt.max_iterations = 2;
        opt.tol            = 1e-12;
        const DesignProblem p{lag(1.0), unity(), unity(), 1.0, 4, 4};
        const auto          r = design_fir(build_generalized_plant(p), 8, opt);
        CHECK_FALSE(r.converged);
        CHECK(r.achieved_norm <= r.log.front().certified);
    }
}

TEST_CASE("design_fir matches exhaustive two-tap search") {
    std::mt19937_64 rng(303);
    int             done = 0;
    for (int attempt = 0; done < 3 && attempt < 30; ++attempt) {
        const auto plant = build_generalized_plant(oracle::random_problem(rng, 2, 2));
        const auto r     = design_fir(plant, 2, 1e-6);
        const auto& a    = r.filter.taps();
        if (std::abs(a[0]) > 1.95 || std::abs(a[1]) > 1.95) {
            continue;  // optimum outside the search box
        }
        ++done;
        const auto brute = brute_force_two_taps(plant);
        CHECK(r.converged);
        CHECK(r.achieved_norm <= brute.value + 1e-6);
        CHECK(std::abs(r.achieved_norm - brute.value) < 1e-2);
    }
    CHECK(done == 3);
}

TEST_CASE("objective structure") {
    std::mt19937_64 rng(304);
    SUBCASE("convex along segments") {
        const auto plant = build_generalized_plant(oracle::random_problem(rng, 2));
        for (int t = 0; t < 20; ++t) {
            const auto a = randn(3, rng), b = randn(3, rng);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const double        lam = u(rng);
            std::vector<double> mix(3);
            for (std::size_t i = 0; i < 3; ++i) {
                mix[i] = lam * a[i] + (1.0 - lam) * b[i];
            }
            const double Ja = evaluate_J(plant, FirFilter(a, 1.0), 1e-11);
            const double Jb = evaluate_J(plant, FirFilter(b, 1.0), 1e-11);
            const double Jm = evaluate_J(plant, FirFilter(mix, 1.0), 1e-11);
            CHECK(Jm <= lam * Ja + (1.0 - lam) * Jb + 1e-8);
        }
    }
    SUBCASE("more taps never hurt") {
        const DesignProblem p{lag(1.0), unity(), unity(), 1.0, 4, 4};
        const auto          plant = build_generalized_plant(p);
        double              prev  = std::numeric_limits<double>::infinity();
        for (int taps : {1, 2, 4, 6}) {
            const double v = design_fir(plant, taps, 1e-5).achieved_norm;
            CHECK(v <= prev + 1e-4 * prev);
            prev = v;
        }
    }
    SUBCASE("a delay budget helps") {
        const DesignProblem p0{lag(1.0), unity(), unity(), 1.0, 4, 0};
        const DesignProblem p1{lag(1.0), unity(), unity(), 1.0, 4, 4};
        const double        v0 = design_fir(build_generalized_plant(p0), 6, 1e-5).achieved_norm;
        const double        v1 = design_fir(build_generalized_plant(p1), 6, 1e-5).achieved_norm;
        CHECK(v1 <= v0 + 1e-5 * v0);
    }
}

TEST_CASE("evaluate_J") {
    const DesignProblem p{lag(1.0), unity(), unity(), 1.0, 8, 8};
    SUBCASE("zero filter equals the G1 norm") {
        CHECK(evaluate_J(p, FirFilter::zeros(4, 1.0), 1e-9) ==
              doctest::Approx(hinf_norm(build_generalized_plant(p).G1, 1e-9).value).epsilon(1e-8));
    }
    SUBCASE("re-certification is reproducible") {
        const auto   r  = design_fir(build_generalized_plant(p), 8, 1e-4);
        const double J1 = evaluate_J(p, r.filter, 1e-10);
        const double J2 = evaluate_J(p, r.filter, 1e-10);
        CHECK(std::abs(J1 - J2) <= 1e-8);
        CHECK(J1 == doctest::Approx(r.achieved_norm).epsilon(1e-6));
    }
    SUBCASE("period mismatch") { CHECK_THROWS_AS(evaluate_J(p, FirFilter({1.0}, 2.0)), std::invalid_argument); }
}

TEST_CASE("robustness") {
    const DesignProblem p{lag(1.0), unity(), unity(), 1.0, 4, 4};
    const FirFilter     K = design_fir(build_generalized_plant(p), 6, 1e-4).filter;
    const double        nominal = evaluate_J(p, K, 1e-10);
    SUBCASE("no perturbation") {
        const auto one = first_order_perturbation(0.3, 0.3, 1.0, p.fast_step());
        CHECK(perturbed_norm(p, K, one) == doctest::Approx(nominal).epsilon(1e-9));
    }
    SUBCASE("static scaling is the equality case") {
        for (double d : {-0.5, 0.2, 1.5}) {
            const auto g = DiscreteStateSpace::gain(M1(1.0 + d), p.fast_step());
            CHECK(std::abs(perturbed_norm(p, K, g) - std::abs(1.0 + d) * nominal) <= 1e-8 * nominal);
        }
    }
    SUBCASE("normalization of the first-order factor") {
        std::mt19937_64 rng(305);
        std::uniform_real_distribution<double> pole(-0.9, 0.9), zero(-1.5, 1.5);
        for (int t = 0; t < 10; ++t) {
            const auto f = first_order_perturbation(pole(rng), zero(rng), 1.2, 0.25);
            CHECK(hinf_norm(f, 1e-10).value == doctest::Approx(1.2).epsilon(1e-8));
        }
        CHECK_THROWS_AS(first_order_perturbation(1.0, 0.0, 1.0, 1.0), std::invalid_argument);
    }
    SUBCASE("random first-order perturbations respect the bound") {
        const auto rep = robustness_check(p, K, {1.2, 20}, 7);
        CHECK(rep.bound_holds);
        CHECK(rep.perturbed.size() == 20);
        CHECK(rep.worst_ratio <= 1.2 * (1.0 + 1e-6));
        CHECK(rep.max_perturbed <= rep.gamma_bound * (1.0 + 1e-6));
    }
}
