#include "yy/lifting.hpp"

#include "yy/synthesis.hpp"

#include <cmath>
#include <string>

namespace yy {

namespace {

void require_siso(const ContinuousStateSpace& sys, const char* name) {
    if (sys.inputs() != 1 || sys.outputs() != 1) {
        throw std::invalid_argument(std::string(name) + " must be single-input single-output");
    }
}

void require_stable(const ContinuousStateSpace& sys, const char* name) {
    switch (classify(sys)) {
        case Stability::stable:
            return;
        case Stability::marginal:
            throw std::invalid_argument(std::string(name) + " must be stable (pole on the imaginary axis)");
        case Stability::unstable:
            throw std::invalid_argument(std::string(name) + " must be stable (pole in the right half-plane)");
    }
}

}  // namespace

void DesignProblem::validate() const {
    require_siso(F, "F");
    require_siso(H1, "H1");
    require_siso(H2, "H2");
    require_stable(F, "F");
    require_stable(H1, "H1");
    require_stable(H2, "H2");
    if (!F.strictly_proper()) {
        throw std::invalid_argument("F must be strictly proper (D = 0)");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("h must be positive");
    }
    if (N < 1) {
        throw std::invalid_argument("N must be at least 1");
    }
    if (delay_steps < 0) {
        throw std::invalid_argument("delay_steps must be nonnegative");
    }
}

GeneralizedPlant GeneralizedPlant::from_blocks(DiscreteStateSpace G1, DiscreteStateSpace G2, DiscreteStateSpace G3) {
    const auto N = G1.in_dim();
    if (G1.out_dim() != N || G2.in_dim() != 1 || G2.out_dim() != N || G3.in_dim() != N || G3.out_dim() != 1) {
        throw std::invalid_argument("generalized plant blocks must be (N->N), (1->N), (N->1)");
    }
    const double h = G1.step();
    if (std::abs(G2.step() - h) > 1e-12 * h || std::abs(G3.step() - h) > 1e-12 * h) {
        throw std::invalid_argument("generalized plant blocks must share one step");
    }
    return GeneralizedPlant{std::move(G1), std::move(G2), std::move(G3), std::nullopt};
}

DiscreteStateSpace lift(const DiscreteStateSpace& sys, int N) {
    if (N < 1) {
        throw std::invalid_argument("lift: N must be at least 1");
    }
    if (N == 1) {
        return sys;
    }
    const auto n = sys.states();
    const auto m = sys.in_dim();
    const auto p = sys.out_dim();

    // powers[k] = A^k, k = 0..N
    std::vector<Matrix> powers(static_cast<std::size_t>(N) + 1);
    powers[0] = Matrix::Identity(n, n);
    for (int k = 1; k <= N; ++k) {
        powers[static_cast<std::size_t>(k)] = sys.A() * powers[static_cast<std::size_t>(k) - 1];
    }

    Matrix BL(n, m * N);
    Matrix CL(p * N, n);
    Matrix DL = Matrix::Zero(p * N, m * N);
    for (int j = 0; j < N; ++j) {
        BL.middleCols(j * m, m) = powers[static_cast<std::size_t>(N - 1 - j)] * sys.B();
        CL.middleRows(j * p, p) = sys.C() * powers[static_cast<std::size_t>(j)];
    }
    for (int i = 0; i < N; ++i) {
        DL.block(i * p, i * m, p, m) = sys.D();
        for (int j = 0; j < i; ++j) {
            DL.block(i * p, j * m, p, m) = sys.C() * powers[static_cast<std::size_t>(i - j - 1)] * sys.B();
        }
    }
    return {powers[static_cast<std::size_t>(N)], std::move(BL), std::move(CL), std::move(DL), sys.step() * N};
}

DiscreteStateSpace delay_line(int m, int dim, double step) {
    if (m < 0 || dim < 1) {
        throw std::invalid_argument("delay_line: need m >= 0 and dim >= 1");
    }
    if (m == 0) {
        return DiscreteStateSpace::gain(Matrix::Identity(dim, dim), step);
    }
    const int n = m * dim;
    Matrix    A = Matrix::Zero(n, n);
    A.bottomLeftCorner(n - dim, n - dim) = Matrix::Identity(n - dim, n - dim);
    Matrix B = Matrix::Zero(n, dim);
    B.topRows(dim) = Matrix::Identity(dim, dim);
    Matrix C = Matrix::Zero(dim, n);
    C.rightCols(dim) = Matrix::Identity(dim, dim);
    return {std::move(A), std::move(B), std::move(C), Matrix::Zero(dim, dim), step};
}

namespace {

GeneralizedPlant assemble(const DesignProblem& problem, const DiscreteStateSpace* shaping) {
    problem.validate();
    const int    N     = problem.N;
    const double delta = problem.fast_step();

    DiscreteStateSpace Fd  = c2d_zoh(problem.F, delta);
    DiscreteStateSpace HFd = c2d_zoh(series(problem.F, problem.H1), delta);
    if (shaping != nullptr) {
        if (shaping->in_dim() != 1 || shaping->out_dim() != 1) {
            throw std::invalid_argument("input shaping must be SISO");
        }
        if (std::abs(shaping->step() - delta) > 1e-12 * delta) {
            throw std::invalid_argument("input shaping must run at the fast step h/N");
        }
        Fd  = series(*shaping, Fd);
        HFd = series(*shaping, HFd);
    }
    const DiscreteStateSpace H2d = c2d_zoh(problem.H2, delta);

    DiscreteStateSpace G1 = lift(series(Fd, delay_line(problem.delay_steps, 1, delta)), N);

    // Ideal sampler at period h keeps the first fast sample of every block.
    const DiscreteStateSpace HFl = lift(HFd, N);
    DiscreteStateSpace G3{HFl.A(), HFl.B(), HFl.C().topRows(1), HFl.D().topRows(1), HFl.step()};

    // The hold repeats u over the N fast steps of a block; the minus sign is the error junction.
    const DiscreteStateSpace H2l  = lift(H2d, N);
    const Vector             ones = Vector::Ones(N);
    DiscreteStateSpace G2{H2l.A(), H2l.B() * ones, -H2l.C(), -(H2l.D() * ones), H2l.step()};

    GeneralizedPlant plant = GeneralizedPlant::from_blocks(std::move(G1), std::move(G2), std::move(G3));
    plant.problem          = problem;
    return plant;
}

}  // namespace

GeneralizedPlant build_generalized_plant(const DesignProblem& problem) { return assemble(problem, nullptr); }

GeneralizedPlant build_generalized_plant(const DesignProblem& problem, const DiscreteStateSpace& input_shaping) {
    return assemble(problem, &input_shaping);
}

DiscreteStateSpace close_loop(const GeneralizedPlant& plant, const FirFilter& K) {
    const double h = plant.step();
    if (std::abs(K.period() - h) > 1e-9 * h) {
        throw std::invalid_argument("close_loop: filter period differs from the plant step");
    }
    const DiscreteStateSpace R = K.realization();
    const DiscreteStateSpace Kd{R.A(), R.B(), R.C(), R.D(), h};
    return parallel(plant.G1, series(series(plant.G3, Kd), plant.G2));
}

}  // namespace yy
