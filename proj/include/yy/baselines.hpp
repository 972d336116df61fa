#pragma once

#include "yy/lti.hpp"

#include <string>
#include <vector>

namespace yy {

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

enum class KernelKind { sinc, bspline, impulse, table };

/// Sampling / synthesis kernel phi(t), used as phi(t - n*scale).
///
/// B-splines are centered: bspline(q) is the (q+1)-fold convolution of the unit box,
/// stretched by `scale`. `impulse` is the Dirac at 0 (the ideal sampler); it has no pointwise
/// value. `table` is the piecewise-linear interpolant of `samples` taken every `table_step`
/// seconds starting at `table_origin`, and zero outside.
struct Kernel {
    KernelKind          kind  = KernelKind::sinc;
    int                 order = 0;
    double              scale = 1.0;
    std::vector<double> samples;
    double              table_step   = 1.0;
    double              table_origin = 0.0;

    static Kernel sinc(double scale) { return {KernelKind::sinc, 0, scale, {}, 1.0, 0.0}; }
    static Kernel bspline(int order, double scale);
    static Kernel impulse(double scale) { return {KernelKind::impulse, 0, scale, {}, 1.0, 0.0}; }
    static Kernel table(std::vector<double> samples, double table_step, double table_origin, double scale);

    /// Parses "sinc", "impulse", or "bspline:q" (q in 0..7).
    static Kernel from_name(const std::string& name, double scale);
    std::string   name() const;

    bool   compact() const { return kind != KernelKind::sinc; }
    /// Support [lo, hi] in seconds for compact kernels.
    double support_lo() const;
    double support_hi() const;
};

/// Centered B-spline of order q at x (unit spacing).
double bspline_value(int q, double x);

double kernel_eval(const Kernel& k, double t);

// ---------------------------------------------------------------------------
// Sinc reconstruction
// ---------------------------------------------------------------------------

/// sum_n x(nh) sinc((t - nh)/h) over the `truncation` samples on each side of t.
///
/// Sample n sits at samples.time(n). The window is floor((t - t0)/h) - truncation + 1 through
/// floor((t - t0)/h) + truncation, clipped to the available samples.
double sinc_reconstruct(const SignalGrid& samples, double t, int truncation);

// ---------------------------------------------------------------------------
// Gram filter and its inverse
// ---------------------------------------------------------------------------

/// Two-sided sequence c[n], n = first .. first + coeffs.size() - 1, as A(z) = sum c[n] z^-n.
class LaurentFilter {
  public:
    LaurentFilter(int first_index, std::vector<double> coeffs, double period);

    int                        first_index() const { return first_; }
    int                        last_index() const { return first_ + static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double                     period() const { return period_; }
    /// c[n], zero outside the support.
    double operator[](int n) const;

  private:
    int                 first_;
    std::vector<double> coeffs_;
    double              period_;
};

/// c[n] = integral phi1(tau - n h) phi2(tau) d tau with the plain Lebesgue measure (no 1/h).
LaurentFilter gram_filter(const Kernel& phi1, const Kernel& phi2, int max_support = 1024);

struct RealizabilityReport {
    std::vector<Complex> roots;
    int                  inside_count    = 0;
    int                  outside_count   = 0;
    int                  on_circle_count = 0;
    bool                 invertible       = false;
    bool                 causal_stable    = false;
    bool                 noncausal_stable = false;
    /// Index shift of the inverse: positive means it needs that many samples of look-ahead
    /// even when every root is inside.
    int advance = 0;
};

struct GramInverse {
    /// Stable two-sided impulse response of 1/A(z) on n = -tail .. tail.
    LaurentFilter       response;
    RealizabilityReport report;
    double              decay_rate = 0.0;  ///< max geometric rate of the tails
    double              tail_bound = 0.0;  ///< bound on the sum of |k[n]| beyond the retained support
};

class NotInvertible : public std::domain_error {
  public:
    NotInvertible(const std::string& what, std::vector<Complex> roots)
        : std::domain_error(what), roots_(std::move(roots)) {}
    const std::vector<Complex>& on_circle_roots() const { return roots_; }

  private:
    std::vector<Complex> roots_;
};

/// Root classification of the Laurent polynomial (companion matrix + Newton polish).
RealizabilityReport classify_roots(const LaurentFilter& a12);

/// Stable inverse of a12 truncated to [-tail_length, tail_length]. Throws NotInvertible when a
/// root lies on the unit circle.
GramInverse invert_gram(const LaurentFilter& a12, int tail_length = 64);

/// Impulse response of 1/A(z) realized as a causal recursion (the naive causal realization).
/// Grows geometrically whenever A has roots outside the unit circle.
std::vector<double> causal_inverse_response(const LaurentFilter& a12, int length);

/// Two-sided convolution.
LaurentFilter convolve(const LaurentFilter& a, const LaurentFilter& b);

// ---------------------------------------------------------------------------
// Consistency
// ---------------------------------------------------------------------------

/// Integer-indexed sequence x[first], x[first + 1], ...
struct IndexedSequence {
    int                 first = 0;
    std::vector<double> values;

    int last() const { return first + static_cast<int>(values.size()) - 1; }
};

/// Generalized samples <y, phi1(. - n h)> of a dense grid signal for n in [first, last]; the
/// grid needs at least 16 points per h unless phi1 is the impulse. Gauss quadrature on a piecewise-cubic interpolant of y;
/// impulse kernels interpolate y.
IndexedSequence generalized_samples(const SignalGrid& y, const Kernel& phi1, int first, int last);

/// max_n |x_samples[n] - <y, phi1(. - n h)>| over the indices whose kernel support lies in the grid.
double consistency_residual(const IndexedSequence& x_samples, const SignalGrid& y, const Kernel& phi1);

/// y(t) = sum_n c[n] phi2(t - n h) on the grid times.
SignalGrid synthesize(const IndexedSequence& c, const Kernel& phi2, double step, double start, Eigen::Index length);

}  // namespace yy
