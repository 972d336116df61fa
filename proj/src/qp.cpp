#include "yy/qp.hpp"

#include <algorithm>
#include <cmath>

namespace yy {

namespace {

// Largest alpha with v + alpha*dv >= 0 (capped at 1e300).
double step_to_boundary(const Vector& v, const Vector& dv) {
    double alpha = 1e300;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv(i) < 0.0) {
            alpha = std::min(alpha, -v(i) / dv(i));
        }
    }
    return alpha;
}

}  // namespace

QpResult solve_qp(const QuadraticProgram& qp, int max_iterations, double tol) {
    const auto n = qp.c.size();
    const auto m = qp.h.size();
    if (qp.P.rows() != n || qp.P.cols() != n || qp.G.rows() != m || qp.G.cols() != n) {
        throw std::invalid_argument("solve_qp: inconsistent dimensions");
    }
    QpResult result;
    if (m == 0) {
        // Unconstrained: P must be positive definite.
        Eigen::LDLT<Matrix> ldlt(qp.P);
        result.x         = ldlt.solve(-qp.c);
        result.z         = Vector(0);
        result.objective = 0.5 * result.x.dot(qp.P * result.x) + qp.c.dot(result.x);
        result.status    = ldlt.info() == Eigen::Success ? QpStatus::optimal : QpStatus::numerical_failure;
        return result;
    }

    const double hnorm = qp.h.cwiseAbs().maxCoeff();
    const double cnorm = qp.c.size() > 0 ? qp.c.cwiseAbs().maxCoeff() : 0.0;
    const Matrix GtG   = qp.G.transpose() * qp.G;
    const double reg   = 1e-13 * std::max(1.0, GtG.diagonal().maxCoeff());

    Vector x = (qp.P + GtG + reg * Matrix::Identity(n, n)).ldlt().solve(qp.G.transpose() * qp.h - qp.c);
    Vector s = qp.h - qp.G * x;
    const double smin = s.minCoeff();
    if (smin < 1.0) {
        s.array() += 1.0 - smin;
    }
    Vector z = Vector::Ones(m);

    for (int it = 0; it < max_iterations; ++it) {
        result.iterations = it + 1;
        const Vector rd  = qp.P * x + qp.c + qp.G.transpose() * z;
        const Vector rp  = qp.G * x + s - qp.h;
        const double gap = s.dot(z);
        const double mu  = gap / static_cast<double>(m);
        const double obj = 0.5 * x.dot(qp.P * x) + qp.c.dot(x);

        if (rp.cwiseAbs().maxCoeff() <= tol * (1.0 + hnorm) && rd.cwiseAbs().maxCoeff() <= tol * (1.0 + cnorm) &&
            gap <= tol * (1.0 + std::abs(obj))) {
            result.status = QpStatus::optimal;
            break;
        }

        const Vector w = z.cwiseQuotient(s);
        Matrix       K = qp.P + qp.G.transpose() * w.asDiagonal() * qp.G;
        K.diagonal().array() += reg;
        Eigen::LDLT<Matrix> ldlt(K);
        if (ldlt.info() != Eigen::Success) {
            result.status = QpStatus::numerical_failure;
            break;
        }

        auto newton = [&](const Vector& rc, Vector& dx, Vector& ds, Vector& dz) {
            dx = ldlt.solve(-rd - qp.G.transpose() * (w.cwiseProduct(rp) - rc.cwiseQuotient(s)));
            dz = w.cwiseProduct(qp.G * dx + rp) - rc.cwiseQuotient(s);
            ds = -rp - qp.G * dx;
        };

        Vector dx, ds, dz;
        newton(s.cwiseProduct(z), dx, ds, dz);
        const double alpha_aff = std::min({1.0, step_to_boundary(s, ds), step_to_boundary(z, dz)});
        const double mu_aff    = (s + alpha_aff * ds).dot(z + alpha_aff * dz) / static_cast<double>(m);
        const double sigma     = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);

        const Vector rc = s.cwiseProduct(z) + ds.cwiseProduct(dz) - Vector::Constant(m, sigma * mu);
        newton(rc, dx, ds, dz);
        const double alpha = std::min(1.0, 0.99 * std::min(step_to_boundary(s, ds), step_to_boundary(z, dz)));
        if (!(alpha > 0.0) || !dx.allFinite()) {
            result.status = QpStatus::numerical_failure;
            break;
        }
        x += alpha * dx;
        s += alpha * ds;
        z += alpha * dz;
        result.status = QpStatus::max_iterations;
    }

    result.x         = x;
    result.z         = z;
    result.objective = 0.5 * x.dot(qp.P * x) + qp.c.dot(x);
    return result;
}

}  // namespace yy
