#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "yy/hinf.hpp"
#include "yy/lifting.hpp"
#include "yy/synthesis.hpp"

#include <numbers>

using namespace yy;

namespace {

Matrix M1(double v) { return Matrix::Constant(1, 1, v); }

ContinuousStateSpace lag(double a) { return {M1(-a), M1(1), M1(a), M1(0)}; }
ContinuousStateSpace unity() { return ContinuousStateSpace::gain(M1(1)); }

/// Blocks a fast scalar sequence into N-row columns.
Matrix block(const std::vector<double>& v, int N) {
    Matrix m(N, static_cast<Eigen::Index>(v.size()) / N);
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        for (int i = 0; i < N; ++i) {
            m(i, k) = v[static_cast<std::size_t>(k * N + i)];
        }
    }
    return m;
}

std::vector<double> randn(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<double>              v(n);
    for (auto& x : v) {
        x = g(rng);
    }
    return v;
}

}  // namespace

TEST_CASE("lift") {
    std::mt19937_64 rng(101);
    SUBCASE("N = 1 is the identity") {
        const auto sys = oracle::random_discrete(3, 2, 2, rng);
        const auto l   = lift(sys, 1);
        CHECK(l.A() == sys.A());
        CHECK(l.B() == sys.B());
        CHECK(l.D() == sys.D());
        CHECK(l.step() == sys.step());
    }
    SUBCASE("scalar delay by two") {
        const DiscreteStateSpace d(M1(0), M1(1), M1(1), M1(0), 0.5);
        const auto               l = lift(d, 2);
        CHECK(l.A()(0, 0) == 0.0);
        CHECK(l.B() == (Matrix(1, 2) << 0, 1).finished());
        CHECK(l.C() == (Matrix(2, 1) << 1, 0).finished());
        CHECK(l.D() == (Matrix(2, 2) << 0, 0, 1, 0).finished());
        CHECK(l.step() == 1.0);
    }
    SUBCASE("lifted simulation equals blocked fast simulation") {
        for (int t = 0; t < 5; ++t) {
            const auto sys = oracle::random_discrete(3, 1, 1, rng);
            const int  N   = 4;
            const auto u   = randn(50 * N, rng);
            const auto y   = simulate(sys, SignalGrid::scalar(1.0, 0.0, u)).channel(0);
            const auto yl  = simulate(lift(sys, N), SignalGrid(N, 0.0, block(u, N))).values();
            CHECK((yl - block(y, N)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SUBCASE("MIMO blocking") {
        const auto sys = oracle::random_discrete(2, 2, 3, rng);
        const auto l   = lift(sys, 3);
        CHECK(l.in_dim() == 6);
        CHECK(l.out_dim() == 9);
    }
    SUBCASE("composition of lifts") {
        const auto sys = oracle::random_discrete(3, 1, 1, rng);
        const auto a   = lift(lift(sys, 2), 2);
        const auto b   = lift(sys, 4);
        CHECK((a.A() - b.A()).norm() < 1e-12);
        CHECK((a.B() - b.B()).norm() < 1e-12);
        CHECK((a.C() - b.C()).norm() < 1e-12);
        CHECK((a.D() - b.D()).norm() < 1e-12);
    }
    SUBCASE("rejects N < 1") { CHECK_THROWS_AS(lift(oracle::random_discrete(1, 1, 1, rng), 0), std::invalid_argument); }
}

TEST_CASE("lifting preserves the H-infinity norm") {
    std::mt19937_64 rng(102);
    for (int t = 0; t < 8; ++t) {
        const auto sys = oracle::random_discrete(3, 1, 1, rng, 0.9);
        const double n0 = hinf_norm(sys, 1e-9).value;
        for (int N : {2, 3, 4}) {
            CHECK(hinf_norm(lift(sys, N), 1e-9).value == doctest::Approx(n0).epsilon(1e-6));
        }
    }
}

TEST_CASE("delay_line") {
    SUBCASE("m = 0 is a feedthrough") {
        const auto d = delay_line(0, 2, 0.1);
        CHECK(d.states() == 0);
        CHECK(d.D() == Matrix::Identity(2, 2));
    }
    SUBCASE("m = 1 impulse") {
        const auto y = simulate(delay_line(1, 1, 1.0), SignalGrid::scalar(1.0, 0.0, {1, 0, 0})).channel(0);
        CHECK(y == std::vector<double>{0, 1, 0});
    }
    SUBCASE("m = 3 shifts exactly") {
        std::mt19937_64 rng(103);
        const auto      u = randn(40, rng);
        const auto      y = simulate(delay_line(3, 1, 1.0), SignalGrid::scalar(1.0, 0.0, u)).channel(0);
        for (std::size_t i = 0; i < u.size(); ++i) {
            CHECK(y[i] == (i >= 3 ? u[i - 3] : 0.0));
        }
    }
    SUBCASE("multichannel") {
        const auto d = delay_line(2, 3, 1.0);
        CHECK(d.states() == 6);
        Matrix u = Matrix::Zero(3, 4);
        u.col(0) << 1, 2, 3;
        const auto y = simulate(d, SignalGrid(1.0, 0.0, u)).values();
        CHECK(y.col(2) == u.col(0));
        CHECK(y.col(1).isZero(0.0));
    }
    SUBCASE("errors") { CHECK_THROWS_AS(delay_line(-1, 1, 1.0), std::invalid_argument); }
}

TEST_CASE("problem validation") {
    DesignProblem p{lag(1.0), unity(), unity(), 1.0, 2, 0};
    CHECK_NOTHROW(p.validate());
    SUBCASE("unstable F") {
        p.F = ContinuousStateSpace(M1(1), M1(1), M1(1), M1(0));
        CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("stable"), std::invalid_argument);
    }
    SUBCASE("F with feedthrough") {
        p.F = ContinuousStateSpace(M1(-1), M1(1), M1(1), M1(1));
        CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("strictly proper"), std::invalid_argument);
    }
    SUBCASE("unstable H2") {
        p.H2 = ContinuousStateSpace(M1(0.5), M1(1), M1(1), M1(0));
        CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("H2"), std::invalid_argument);
    }
    SUBCASE("scalars") {
        p.h = 0.0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
        p.h = 1.0;
        p.N = 0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
        p.N           = 2;
        p.delay_steps = -1;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
}

TEST_CASE("generalized plant") {
    const DesignProblem p{lag(1.0), unity(), unity(), 1.0, 2, 0};
    const auto          plant = build_generalized_plant(p);
    SUBCASE("dimension contract") {
        CHECK(plant.G1.in_dim() == 2);
        CHECK(plant.G1.out_dim() == 2);
        CHECK(plant.G2.in_dim() == 1);
        CHECK(plant.G2.out_dim() == 2);
        CHECK(plant.G3.in_dim() == 2);
        CHECK(plant.G3.out_dim() == 1);
        CHECK(plant.step() == 1.0);
        CHECK(plant.block_size() == 2);
        CHECK(plant.problem.has_value());
        CHECK(spectral_radius(plant.G1) < 1.0);
    }
    SUBCASE("zero input gives zero error") {
        const auto E = close_loop(plant, FirFilter({0.3, -0.2, 0.1}, 1.0));
        CHECK(simulate(E, SignalGrid(1.0, 0.0, Matrix::Zero(2, 50))).values().isZero(0.0));
    }
    SUBCASE("closed loop equals the fast-rate interconnection") {
        std::mt19937_64            rng(104);
        std::normal_distribution<> g;
        const std::vector<double>  taps{g(rng), g(rng), g(rng)};
        const auto                 w  = randn(200 * 2, rng);
        const auto                 e  = oracle::fast_rate_error(p, taps, w);
        const auto                 el = simulate(close_loop(plant, FirFilter(taps, 1.0)), SignalGrid(1.0, 0.0, block(w, 2)));
        CHECK((el.values() - block(e, 2)).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("random problems against the fast-rate interconnection") {
        std::mt19937_64 rng(105);
        for (int t = 0; t < 10; ++t) {
            const int  N    = 1 << (t % 3 + 1);
            const auto prob = oracle::random_problem(rng, N);
            const auto taps = randn(4, rng);
            const auto w    = randn(static_cast<std::size_t>(100 * N), rng);
            const auto e    = oracle::fast_rate_error(prob, taps, w);
            const auto E    = close_loop(build_generalized_plant(prob), FirFilter(taps, 1.0));
            const auto el   = simulate(E, SignalGrid(1.0, 0.0, block(w, N))).values();
            CHECK((el - block(e, N)).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
    SUBCASE("delay path") {
        const DesignProblem pd{lag(2.0), unity(), unity(), 1.0, 4, 3};
        std::mt19937_64     rng(106);
        const auto          w  = randn(4 * 30, rng);
        const auto          e  = oracle::fast_rate_error(pd, {0.0}, w);
        const auto          el = simulate(build_generalized_plant(pd).G1, SignalGrid(1.0, 0.0, block(w, 4))).values();
        CHECK((el - block(e, 4)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("input shaping must run at the fast step") {
        const DiscreteStateSpace s(M1(0.2), M1(1), M1(1), M1(1), 1.0);
        CHECK_THROWS_AS(build_generalized_plant(p, s), std::invalid_argument);
        const DiscreteStateSpace ok(M1(0.2), M1(1), M1(1), M1(1), 0.5);
        CHECK_NOTHROW(build_generalized_plant(p, ok));
    }
}

TEST_CASE("close_loop") {
    std::mt19937_64 rng(107);
    SUBCASE("zero taps give G1") {
        const auto plant = build_generalized_plant(oracle::random_problem(rng, 2));
        const auto E     = close_loop(plant, FirFilter::zeros(3, 1.0));
        for (double th : {0.0, 0.7, 2.0}) {
            CHECK((frequency_response(E, th) - frequency_response(plant.G1, th)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("static cancellation") {
        const auto g     = DiscreteStateSpace::gain(M1(1), 1.0);
        const auto plant = GeneralizedPlant::from_blocks(g, g, g);
        const auto E     = close_loop(plant, FirFilter({-1.0}, 1.0));
        CHECK(std::abs(frequency_response(E, 0.4)(0, 0)) == 0.0);
    }
    SUBCASE("pointwise response of the affine map") {
        const auto          plant = build_generalized_plant(oracle::random_problem(rng, 4));
        const FirFilter     K(randn(4, rng), 1.0);
        const auto          E = close_loop(plant, K);
        for (int k = 0; k < 64; ++k) {
            const double  th     = std::numbers::pi * (k + 0.5) / 64.0;
            const CMatrix expect = frequency_response(plant.G1, th) +
                                   frequency_response(plant.G2, th) * K.response(th) * frequency_response(plant.G3, th);
            CHECK((frequency_response(E, th) - expect).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
    SUBCASE("affine in the taps") {
        const auto plant = build_generalized_plant(oracle::random_problem(rng, 2));
        const auto a = randn(3, rng), b = randn(3, rng);
        std::vector<double> mid(3);
        for (int i = 0; i < 3; ++i) {
            mid[static_cast<std::size_t>(i)] = 0.5 * (a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)]);
        }
        const auto Ea = close_loop(plant, FirFilter(a, 1.0));
        const auto Eb = close_loop(plant, FirFilter(b, 1.0));
        const auto Em = close_loop(plant, FirFilter(mid, 1.0));
        for (double th : {0.1, 1.0, 2.5}) {
            const CMatrix avg = 0.5 * (frequency_response(Ea, th) + frequency_response(Eb, th));
            CHECK((frequency_response(Em, th) - avg).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("period mismatch") {
        const auto plant = build_generalized_plant(oracle::random_problem(rng, 2));
        CHECK_THROWS_AS(close_loop(plant, FirFilter({1.0}, 0.5)), std::invalid_argument);
    }
}

TEST_CASE("norm sequence over N settles") {
    const FirFilter K({0.4, 0.4}, 1.0);
    std::vector<double> J;
    for (int N : {2, 4, 8, 16}) {
        const DesignProblem p{lag(1.0), unity(), unity(), 1.0, N, N};
        J.push_back(evaluate_J(p, K, 1e-10));
    }
    for (std::size_t i = 2; i < J.size(); ++i) {
        CHECK(std::abs(J[i] - J[i - 1]) < std::abs(J[i - 1] - J[i - 2]));
    }
}
