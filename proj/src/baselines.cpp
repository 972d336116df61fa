#include "yy/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace yy {

namespace {

constexpr double kRootCircleTol = 1e-9;

double sinc_unit(double x) {
    if (x == 0.0) {
        return 1.0;
    }
    // sin(pi x) through the nearest integer keeps integer arguments exactly zero.
    const double r   = std::nearbyint(x);
    const double f   = x - r;
    const double sgn = std::fmod(std::abs(r), 2.0) == 1.0 ? -1.0 : 1.0;
    return sgn * std::sin(std::numbers::pi * f) / (std::numbers::pi * x);
}

bool same_scale(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m   = 0.5 * (a + b);
    const double lm  = 0.5 * (a + m);
    const double rm  = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left  = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) {
        return 0.0;
    }
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Points where the kernel (shifted by `shift`) is not smooth.
void breakpoints(const Kernel& k, double shift, std::vector<double>& out) {
    switch (k.kind) {
        case KernelKind::bspline:
            for (int i = 0; i <= k.order + 1; ++i) {
                out.push_back(shift + (i - 0.5 * (k.order + 1)) * k.scale);
            }
            break;
        case KernelKind::table:
            for (std::size_t i = 0; i < k.samples.size(); ++i) {
                out.push_back(shift + k.table_origin + static_cast<double>(i) * k.table_step);
            }
            break;
        default:
            break;
    }
}

std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots, bool reciprocal) {
    // prod (1 - r w) when !reciprocal, prod (1 - w / r) otherwise; ascending powers of w.
    std::vector<Complex> p{1.0};
    for (const auto& r : roots) {
        const Complex        factor = reciprocal ? -1.0 / r : -r;
        std::vector<Complex> next(p.size() + 1, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            next[i] += p[i];
            next[i + 1] += p[i] * factor;
        }
        p = std::move(next);
    }
    return p;
}

// Impulse response of 1 / p(w) as a power series in w; p[0] must be nonzero.
std::vector<double> series_inverse(const std::vector<double>& p, std::size_t length) {
    std::vector<double> y(length, 0.0);
    for (std::size_t k = 0; k < length; ++k) {
        double acc = k == 0 ? 1.0 : 0.0;
        for (std::size_t i = 1; i < p.size() && i <= k; ++i) {
            acc -= p[i] * y[k - i];
        }
        y[k] = acc / p[0];
    }
    return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

Kernel Kernel::bspline(int order, double scale) {
    if (order < 0 || order > 7) {
        throw std::invalid_argument("B-spline order must be in 0..7");
    }
    return {KernelKind::bspline, order, scale, {}, 1.0, 0.0};
}

Kernel Kernel::table(std::vector<double> samples, double table_step, double table_origin, double scale) {
    if (samples.empty() || !(table_step > 0.0)) {
        throw std::invalid_argument("table kernel needs samples and a positive step");
    }
    return {KernelKind::table, 0, scale, std::move(samples), table_step, table_origin};
}

Kernel Kernel::from_name(const std::string& name, double scale) {
    if (name == "sinc") {
        return sinc(scale);
    }
    if (name == "impulse") {
        return impulse(scale);
    }
    const std::string prefix = "bspline:";
    if (name.rfind(prefix, 0) == 0 && name.size() == prefix.size() + 1 && std::isdigit(name.back()) != 0) {
        return bspline(name.back() - '0', scale);
    }
    throw std::invalid_argument("unknown kernel '" + name + "' (expected sinc, impulse or bspline:q)");
}

std::string Kernel::name() const {
    switch (kind) {
        case KernelKind::sinc:
            return "sinc";
        case KernelKind::impulse:
            return "impulse";
        case KernelKind::bspline:
            return "bspline:" + std::to_string(order);
        case KernelKind::table:
            return "table";
    }
    return "unknown";
}

double Kernel::support_lo() const {
    switch (kind) {
        case KernelKind::bspline:
            return -0.5 * (order + 1) * scale;
        case KernelKind::table:
            return table_origin;
        case KernelKind::impulse:
            return 0.0;
        case KernelKind::sinc:
            break;
    }
    return -std::numeric_limits<double>::infinity();
}

double Kernel::support_hi() const {
    switch (kind) {
        case KernelKind::bspline:
            return 0.5 * (order + 1) * scale;
        case KernelKind::table:
            return table_origin + static_cast<double>(samples.size() - 1) * table_step;
        case KernelKind::impulse:
            return 0.0;
        case KernelKind::sinc:
            break;
    }
    return std::numeric_limits<double>::infinity();
}

double bspline_value(int q, double x) {
    if (q < 0) {
        throw std::invalid_argument("bspline_value: negative order");
    }
    const double half = 0.5 * (q + 1);
    const double ax   = std::abs(x);
    if (ax > half) {
        return 0.0;
    }
    if (q == 0) {
        return ax < 0.5 ? 1.0 : 0.5;
    }
    // Cox-de Boor on the uniform knots 0..q+1, evaluated at y = x + (q+1)/2; symmetric so use -|x|.
    const double y = -ax + half;
    std::vector<double> Nd(static_cast<std::size_t>(q) + 1, 0.0);
    for (int j = 0; j <= q; ++j) {
        Nd[static_cast<std::size_t>(j)] = (y >= j && y < j + 1) ? 1.0 : 0.0;
    }
    for (int d = 1; d <= q; ++d) {
        for (int j = 0; j + d <= q; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            Nd[jj] = ((y - j) * Nd[jj] + (j + d + 1 - y) * Nd[jj + 1]) / d;
        }
    }
    return Nd[0];
}

double kernel_eval(const Kernel& k, double t) {
    switch (k.kind) {
        case KernelKind::sinc:
            return sinc_unit(t / k.scale);
        case KernelKind::bspline:
            return bspline_value(k.order, t / k.scale);
        case KernelKind::impulse:
            throw std::domain_error("the impulse kernel has no pointwise value");
        case KernelKind::table: {
            const double u = (t - k.table_origin) / k.table_step;
            if (u < 0.0 || u > static_cast<double>(k.samples.size() - 1)) {
                return 0.0;
            }
            const auto   i = std::min(static_cast<std::size_t>(u), k.samples.size() - 1);
            if (i + 1 >= k.samples.size()) {
                return k.samples.back();
            }
            const double f = u - static_cast<double>(i);
            return (1.0 - f) * k.samples[i] + f * k.samples[i + 1];
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Sinc reconstruction
// ---------------------------------------------------------------------------

double sinc_reconstruct(const SignalGrid& samples, double t, int truncation) {
    if (truncation < 1) {
        throw std::invalid_argument("sinc_reconstruct: truncation must be at least 1");
    }
    if (samples.length() == 0) {
        throw std::invalid_argument("sinc_reconstruct: empty sample sequence");
    }
    const double h   = samples.step();
    const double u   = (t - samples.start_time()) / h;
    const double ru  = std::nearbyint(u);
    const auto   len = samples.length();
    if (std::abs(u - ru) <= 1e-12 * std::max(1.0, std::abs(u))) {
        const auto n = static_cast<Eigen::Index>(ru);
        return (n >= 0 && n < len) ? samples.values()(0, n) : 0.0;
    }
    const auto   j  = static_cast<Eigen::Index>(std::floor(u));
    const auto   lo = std::max<Eigen::Index>(0, j - truncation + 1);
    const auto   hi = std::min<Eigen::Index>(len - 1, j + truncation);
    double       acc = 0.0;
    for (Eigen::Index n = lo; n <= hi; ++n) {
        acc += samples.values()(0, n) * sinc_unit(u - static_cast<double>(n));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Gram filter
// ---------------------------------------------------------------------------

LaurentFilter::LaurentFilter(int first_index, std::vector<double> coeffs, double period)
    : first_(first_index), coeffs_(std::move(coeffs)), period_(period) {
    if (coeffs_.empty()) {
        throw std::invalid_argument("Laurent filter needs coefficients");
    }
    bool any = false;
    for (double c : coeffs_) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("Laurent filter coefficients must be finite");
        }
        any = any || c != 0.0;
    }
    if (!any) {
        throw std::invalid_argument("Laurent filter needs a nonzero coefficient");
    }
}

double LaurentFilter::operator[](int n) const {
    if (n < first_ || n > last_index()) {
        return 0.0;
    }
    return coeffs_[static_cast<std::size_t>(n - first_)];
}

LaurentFilter gram_filter(const Kernel& phi1, const Kernel& phi2, int max_support) {
    if (!same_scale(phi1.scale, phi2.scale)) {
        throw std::invalid_argument("gram_filter: kernels must share the sampling period");
    }
    const double h = phi1.scale;
    if (phi1.kind == KernelKind::impulse && phi2.kind == KernelKind::impulse) {
        throw std::invalid_argument("gram_filter: divergent pairing (impulse with impulse)");
    }

    int n_lo = -max_support, n_hi = max_support;
    if (phi1.compact() && phi2.compact()) {
        // phi1(tau - n h) lives on [lo1 + n h, hi1 + n h].
        n_lo = static_cast<int>(std::ceil((phi2.support_lo() - phi1.support_hi()) / h - 1e-12));
        n_hi = static_cast<int>(std::floor((phi2.support_hi() - phi1.support_lo()) / h + 1e-12));
    }

    std::function<double(int)> coefficient;
    if (phi1.kind == KernelKind::impulse) {
        coefficient = [&](int n) { return kernel_eval(phi2, n * h); };
    } else if (phi2.kind == KernelKind::impulse) {
        coefficient = [&](int n) { return kernel_eval(phi1, -n * h); };
    } else if (phi1.kind == KernelKind::bspline && phi2.kind == KernelKind::bspline) {
        const int order = phi1.order + phi2.order + 1;
        coefficient     = [h, order](int n) { return h * bspline_value(order, static_cast<double>(n)); };
    } else if (phi1.kind == KernelKind::sinc && phi2.kind == KernelKind::sinc) {
        coefficient = [h](int n) { return n == 0 ? h : 0.0; };
        n_lo = n_hi = 0;
    } else {
        const int pieces_hint = 64;
        coefficient = [&, h](int n) {
            const double shift = n * h;
            double       a     = std::max(phi1.support_lo() + shift, phi2.support_lo());
            double       b     = std::min(phi1.support_hi() + shift, phi2.support_hi());
            if (!(b > a)) {
                return 0.0;
            }
            std::vector<double> bp{a, b};
            breakpoints(phi1, shift, bp);
            breakpoints(phi2, 0.0, bp);
            std::sort(bp.begin(), bp.end());
            auto f = [&](double tau) { return kernel_eval(phi1, tau - shift) * kernel_eval(phi2, tau); };
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
                const double lo = std::max(bp[i], a), hi = std::min(bp[i + 1], b);
                if (hi > lo) {
                    total += integrate(f, lo, hi, 1e-12 / pieces_hint);
                }
            }
            return total;
        };
    }

    std::vector<double> c;
    c.reserve(static_cast<std::size_t>(n_hi - n_lo + 1));
    for (int n = n_lo; n <= n_hi; ++n) {
        c.push_back(coefficient(n));
    }
    // Trim negligible tails.
    std::size_t first = 0, last = c.size();
    while (first < last && std::abs(c[first]) < 1e-14) {
        ++first;
    }
    while (last > first && std::abs(c[last - 1]) < 1e-14) {
        --last;
    }
    if (first == last) {
        throw std::invalid_argument("gram_filter: kernels are orthogonal at every shift");
    }
    return {n_lo + static_cast<int>(first), std::vector<double>(c.begin() + static_cast<long>(first),
                                                                 c.begin() + static_cast<long>(last)),
            h};
}

RealizabilityReport classify_roots(const LaurentFilter& a12) {
    RealizabilityReport rep;
    // P(z) = sum_n c[n] z^(nmax - n); descending coefficients c[nmin], ..., c[nmax].
    const auto& c      = a12.coeffs();
    const int   degree = static_cast<int>(c.size()) - 1;
    if (degree > 0) {
        Matrix companion = Matrix::Zero(degree, degree);
        for (int i = 0; i < degree; ++i) {
            companion(0, i) = -c[static_cast<std::size_t>(i) + 1] / c[0];
        }
        companion.bottomLeftCorner(degree - 1, degree - 1) = Matrix::Identity(degree - 1, degree - 1);
        const CVector eig = eigenvalues(companion);
        for (Eigen::Index i = 0; i < eig.size(); ++i) {
            Complex r = eig(i);
            // One Newton step on P.
            Complex p = 0.0, dp = 0.0;
            for (double coef : c) {
                dp = dp * r + p;
                p  = p * r + coef;
            }
            if (std::abs(dp) > 0.0) {
                const Complex polished = r - p / dp;
                if (std::isfinite(polished.real()) && std::isfinite(polished.imag())) {
                    r = polished;
                }
            }
            rep.roots.push_back(r);
        }
    }
    for (const auto& r : rep.roots) {
        const double mag = std::abs(r);
        if (mag < 1.0 - kRootCircleTol) {
            ++rep.inside_count;
        } else if (mag > 1.0 + kRootCircleTol) {
            ++rep.outside_count;
        } else {
            ++rep.on_circle_count;
        }
    }
    rep.invertible       = rep.on_circle_count == 0;
    rep.noncausal_stable = rep.invertible;
    rep.advance          = a12.last_index() - rep.inside_count;
    rep.causal_stable    = rep.invertible && rep.outside_count == 0 && rep.advance <= 0;
    return rep;
}

GramInverse invert_gram(const LaurentFilter& a12, int tail_length) {
    if (tail_length < 0) {
        throw std::invalid_argument("invert_gram: tail_length must be nonnegative");
    }
    RealizabilityReport rep = classify_roots(a12);
    if (!rep.invertible) {
        std::vector<Complex> on_circle;
        for (const auto& r : rep.roots) {
            if (std::abs(std::abs(r) - 1.0) <= kRootCircleTol) {
                on_circle.push_back(r);
            }
        }
        throw NotInvertible("Gram filter has a zero on the unit circle", on_circle);
    }

    std::vector<Complex> inside, outside;
    for (const auto& r : rep.roots) {
        (std::abs(r) < 1.0 ? inside : outside).push_back(r);
    }
    // A(z) = z^-nmax P(z),  P(z) = c_lead * prod_in (z - r) * prod_out (z - r)
    //      = c_lead * prod_out(-r) * z^n_in * Q(z^-1) * R(z).
    Complex gain = a12.coeffs().front();
    for (const auto& r : outside) {
        gain *= -r;
    }
    const double scale = 1.0 / gain.real();

    auto real_part = [](const std::vector<Complex>& p) {
        std::vector<double> out(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            out[i] = p[i].real();
        }
        return out;
    };
    const std::vector<double> Q = real_part(poly_from_roots(inside, false));
    const std::vector<double> R = real_part(poly_from_roots(outside, true));

    double rate = 0.0;
    for (const auto& r : inside) {
        rate = std::max(rate, std::abs(r));
    }
    for (const auto& r : outside) {
        rate = std::max(rate, 1.0 / std::abs(r));
    }
    std::size_t extra = rep.roots.size() + 8;
    if (rate > 0.0) {
        extra += static_cast<std::size_t>(std::min(1e6, std::ceil(std::log(1e-18) / std::log(rate))));
    }
    const std::size_t L       = static_cast<std::size_t>(tail_length) + static_cast<std::size_t>(std::abs(rep.advance)) + extra;
    const auto        causal  = series_inverse(Q, L);  // index k >= 0
    const auto        anti    = series_inverse(R, L);  // index -k <= 0

    // 1/A(z) = scale * z^advance * X_c(z) X_a(z):  k[m] = scale * v[m + advance].
    auto v = [&](long m) {
        double acc = 0.0;
        for (long k = std::max(0L, m); k < static_cast<long>(L); ++k) {
            const long j = k - m;  // anti index -j
            if (j >= static_cast<long>(L)) {
                break;
            }
            acc += causal[static_cast<std::size_t>(k)] * anti[static_cast<std::size_t>(j)];
        }
        return acc;
    };
    std::vector<double> response;
    response.reserve(2 * static_cast<std::size_t>(tail_length) + 1);
    for (int m = -tail_length; m <= tail_length; ++m) {
        response.push_back(scale * v(static_cast<long>(m) + rep.advance));
    }
    const double edge = std::max(std::abs(response.front()), std::abs(response.back()));
    GramInverse  out{LaurentFilter(-tail_length, response, a12.period()), rep, rate, 0.0};
    out.tail_bound = rate < 1.0 ? 2.0 * edge * rate / (1.0 - rate) : 0.0;
    return out;
}

std::vector<double> causal_inverse_response(const LaurentFilter& a12, int length) {
    if (length < 0) {
        throw std::invalid_argument("causal_inverse_response: negative length");
    }
    return series_inverse(a12.coeffs(), static_cast<std::size_t>(length));
}

LaurentFilter convolve(const LaurentFilter& a, const LaurentFilter& b) {
    std::vector<double> out(a.coeffs().size() + b.coeffs().size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
        for (std::size_t j = 0; j < b.coeffs().size(); ++j) {
            out[i + j] += a.coeffs()[i] * b.coeffs()[j];
        }
    }
    return {a.first_index() + b.first_index(), std::move(out), a.period()};
}

// ---------------------------------------------------------------------------
// Consistency
// ---------------------------------------------------------------------------

namespace {

double interpolate(const SignalGrid& y, double t) {
    const double u = (t - y.start_time()) / y.step();
    if (u < -1e-9 || u > static_cast<double>(y.length() - 1) + 1e-9) {
        return 0.0;
    }
    const double ru = std::nearbyint(u);
    if (std::abs(u - ru) <= 1e-9) {
        return y.values()(0, static_cast<Eigen::Index>(ru));
    }
    const auto   i = static_cast<Eigen::Index>(std::floor(u));
    const double f = u - static_cast<double>(i);
    return (1.0 - f) * y.values()(0, i) + f * y.values()(0, i + 1);
}

void require_density(const SignalGrid& y, const Kernel& phi1) {
    if (phi1.kind == KernelKind::impulse) {
        return;
    }
    if (y.step() > phi1.scale / 16.0 * (1.0 + 1e-12)) {
        throw std::invalid_argument("signal grid too coarse: need at least 16 points per sampling period");
    }
}

/// Cubic Lagrange interpolant of y through the four grid points around interval k.
double local_cubic(const SignalGrid& y, Eigen::Index k, double f) {
    const auto len = y.length();
    if (len < 4) {
        const Eigen::Index k1 = std::min(k + 1, len - 1);
        return (1.0 - f) * y.values()(0, k) + f * y.values()(0, k1);
    }
    const Eigen::Index s = std::clamp<Eigen::Index>(k - 1, 0, len - 4);
    const double       u = f + static_cast<double>(k - s);  // position relative to point s
    double             acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        double w = 1.0;
        for (int j = 0; j < 4; ++j) {
            if (j != i) {
                w *= (u - j) / (i - j);
            }
        }
        acc += w * y.values()(0, s + i);
    }
    return acc;
}

/// Points where the kernel stops being polynomial, relative to its center.
std::vector<double> kernel_breakpoints(const Kernel& k) {
    std::vector<double> out;
    if (k.kind == KernelKind::bspline) {
        for (int j = 0; j <= k.order + 1; ++j) {
            out.push_back((j - 0.5 * (k.order + 1)) * k.scale);
        }
    } else if (k.kind == KernelKind::table) {
        for (std::size_t j = 0; j < k.samples.size(); ++j) {
            out.push_back(k.table_origin + static_cast<double>(j) * k.table_step);
        }
    }
    return out;
}

/// integral y(t) phi1(t - n h) dt with y the piecewise-cubic interpolant of the grid.
double inner_product(const SignalGrid& y, const Kernel& phi1, int n) {
    const double h = phi1.scale;
    if (phi1.kind == KernelKind::impulse) {
        return interpolate(y, n * h);
    }
    static constexpr std::array<double, 5> gx{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                              0.9061798459386640};
    static constexpr std::array<double, 5> gw{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                              0.4786286704993665, 0.2369268850561891};
    const double dt  = y.step();
    const auto   len = y.length();
    if (len < 2) {
        return 0.0;
    }
    const double center = n * h;
    Eigen::Index lo = 0, hi = len - 1;
    if (phi1.compact()) {
        lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor((center + phi1.support_lo() - y.start_time()) / dt)));
        hi = std::min<Eigen::Index>(len - 1, static_cast<Eigen::Index>(std::ceil((center + phi1.support_hi() - y.start_time()) / dt)));
    }
    const auto breaks = kernel_breakpoints(phi1);
    double     acc    = 0.0;
    std::vector<double> cuts;
    for (Eigen::Index k = lo; k < hi; ++k) {
        const double a = y.time(k), b = y.time(k + 1);
        cuts.assign({a});
        for (double bp : breaks) {
            const double t = center + bp;
            if (t > a + 1e-12 * dt && t < b - 1e-12 * dt) {
                cuts.push_back(t);
            }
        }
        cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double mid = 0.5 * (cuts[c] + cuts[c + 1]), half = 0.5 * (cuts[c + 1] - cuts[c]);
            for (std::size_t g = 0; g < gx.size(); ++g) {
                const double t = mid + half * gx[g];
                acc += gw[g] * half * local_cubic(y, k, (t - a) / dt) * kernel_eval(phi1, t - center);
            }
        }
    }
    return acc;
}

}  // namespace

IndexedSequence generalized_samples(const SignalGrid& y, const Kernel& phi1, int first, int last) {
    require_density(y, phi1);
    IndexedSequence out{first, {}};
    for (int n = first; n <= last; ++n) {
        out.values.push_back(inner_product(y, phi1, n));
    }
    return out;
}

double consistency_residual(const IndexedSequence& x_samples, const SignalGrid& y, const Kernel& phi1) {
    require_density(y, phi1);
    const double h     = phi1.scale;
    const double t_lo  = y.start_time();
    const double t_hi  = y.time(y.length() - 1);
    const double s_lo  = phi1.compact() ? phi1.support_lo() : 0.0;
    const double s_hi  = phi1.compact() ? phi1.support_hi() : 0.0;
    double       worst = 0.0;
    bool         any   = false;
    for (int n = x_samples.first; n <= x_samples.last(); ++n) {
        if (n * h + s_lo < t_lo - 1e-9 * h || n * h + s_hi > t_hi + 1e-9 * h) {
            continue;
        }
        any = true;
        const double diff = x_samples.values[static_cast<std::size_t>(n - x_samples.first)] - inner_product(y, phi1, n);
        worst             = std::max(worst, std::abs(diff));
    }
    if (!any) {
        throw std::invalid_argument("consistency_residual: no sample index overlaps the grid");
    }
    return worst;
}

SignalGrid synthesize(const IndexedSequence& c, const Kernel& phi2, double step, double start, Eigen::Index length) {
    if (phi2.kind == KernelKind::impulse) {
        throw std::invalid_argument("synthesize: impulse kernel cannot synthesize a signal");
    }
    const double h = phi2.scale;
    Matrix       y = Matrix::Zero(1, length);
    for (Eigen::Index k = 0; k < length; ++k) {
        const double t  = start + static_cast<double>(k) * step;
        int          lo = c.first, hi = c.last();
        if (phi2.compact()) {
            lo = std::max(lo, static_cast<int>(std::ceil((t - phi2.support_hi()) / h - 1e-12)));
            hi = std::min(hi, static_cast<int>(std::floor((t - phi2.support_lo()) / h + 1e-12)));
        }
        double acc = 0.0;
        for (int n = lo; n <= hi; ++n) {
            acc += c.values[static_cast<std::size_t>(n - c.first)] * kernel_eval(phi2, t - n * h);
        }
        y(0, k) = acc;
    }
    return {step, start, std::move(y)};
}

}  // namespace yy
