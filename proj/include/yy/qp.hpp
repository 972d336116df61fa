#pragma once

#include "yy/lti.hpp"

namespace yy {

/// Dense convex quadratic program
///   minimize 0.5 x'Px + c'x  subject to  Gx <= h
/// solved by a Mehrotra predictor-corrector interior-point method. P may be zero (linear program).
struct QuadraticProgram {
    Matrix P;
    Vector c;
    Matrix G;
    Vector h;
};

enum class QpStatus { optimal, max_iterations, numerical_failure };

struct QpResult {
    Vector   x;
    Vector   z;  ///< multipliers of Gx <= h
    double   objective = 0.0;
    QpStatus status    = QpStatus::numerical_failure;
    int      iterations = 0;
};

QpResult solve_qp(const QuadraticProgram& qp, int max_iterations = 100, double tol = 1e-10);

}  // namespace yy
