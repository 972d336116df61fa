#include "yy/tf_parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace yy {

namespace {

using Poly = std::vector<double>;

void trim(Poly& p) {
    while (p.size() > 1 && p.back() == 0.0) {
        p.pop_back();
    }
}

Poly add(const Poly& a, const Poly& b, double sign) {
    Poly out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] += a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        out[i] += sign * b[i];
    }
    trim(out);
    return out;
}

Poly mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    trim(out);
    return out;
}

bool is_zero(const Poly& p) { return p.size() == 1 && p[0] == 0.0; }

struct Frac {
    Poly num{0.0};
    Poly den{1.0};
};

Frac add(const Frac& a, const Frac& b, double sign) {
    if (a.den == b.den) {
        return {add(a.num, b.num, sign), a.den};
    }
    return {add(mul(a.num, b.den), mul(b.num, a.den), sign), mul(a.den, b.den)};
}

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    Frac parse() {
        skip();
        if (pos_ == text_.size()) {
            throw TfParseError("empty expression", pos_);
        }
        Frac f = expr();
        skip();
        if (pos_ != text_.size()) {
            throw TfParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        }
        return f;
    }

  private:
    std::string_view text_;
    std::size_t      pos_ = 0;

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
            ++pos_;
        }
    }

    char peek() {
        skip();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Frac expr() {
        Frac f = term();
        for (char c = peek(); c == '+' || c == '-'; c = peek()) {
            ++pos_;
            f = add(f, term(), c == '+' ? 1.0 : -1.0);
        }
        return f;
    }

    Frac term() {
        Frac f = factor();
        for (char c = peek(); c == '*' || c == '/'; c = peek()) {
            const std::size_t at = ++pos_;
            Frac              g  = factor();
            if (c == '*') {
                f = {mul(f.num, g.num), mul(f.den, g.den)};
            } else {
                if (is_zero(g.num)) {
                    throw TfParseError("division by the zero polynomial", at);
                }
                f = {mul(f.num, g.den), mul(f.den, g.num)};
            }
        }
        return f;
    }

    Frac factor() {
        if (peek() == '-') {
            ++pos_;
            Frac f = factor();
            for (double& c : f.num) {
                c = -c;
            }
            trim(f.num);
            return f;
        }
        Frac b = base();
        if (peek() == '^') {
            ++pos_;
            skip();
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
                ++pos_;
            }
            if (start == pos_) {
                throw TfParseError("exponent must be an unsigned integer", start);
            }
            unsigned    k   = 0;
            const auto  res = std::from_chars(text_.data() + start, text_.data() + pos_, k);
            if (res.ec != std::errc{} || k > 64) {
                throw TfParseError("exponent out of range", start);
            }
            if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
                throw TfParseError("exponent must be an unsigned integer", start);
            }
            Frac r;
            r.num = {1.0};
            for (unsigned i = 0; i < k; ++i) {
                r = {mul(r.num, b.num), mul(r.den, b.den)};
            }
            if (k == 0 && is_zero(b.num)) {
                throw TfParseError("0^0 is undefined", start);
            }
            return r;
        }
        return b;
    }

    Frac base() {
        const char c = peek();
        if (c == '\0') {
            throw TfParseError("unexpected end of expression", pos_);
        }
        if (c == '(') {
            ++pos_;
            Frac f = expr();
            if (peek() != ')') {
                throw TfParseError("expected ')'", pos_);
            }
            ++pos_;
            return f;
        }
        if (c == 's') {
            const std::size_t at = pos_++;
            if (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0) {
                throw unsupported(at);
            }
            return {{0.0, 1.0}, {1.0}};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            throw unsupported(pos_);
        }
        throw TfParseError(std::string("unexpected '") + c + "'", pos_);
    }

    TfParseError unsupported(std::size_t at) {
        std::size_t end = at;
        while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) != 0 || text_[end] == '_')) {
            ++end;
        }
        return TfParseError("unsupported construct '" + std::string(text_.substr(at, end - at)) +
                                "' (only polynomial fractions in s)",
                            at);
    }

    Frac number() {
        const std::size_t start = pos_;
        std::size_t       p     = pos_;
        auto digits = [&] {
            const std::size_t s = p;
            while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p])) != 0) {
                ++p;
            }
            return p - s;
        };
        std::size_t nd = digits();
        if (p < text_.size() && text_[p] == '.') {
            ++p;
            nd += digits();
        }
        if (nd == 0) {
            throw TfParseError("malformed number", start);
        }
        if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
            ++p;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) {
                ++p;
            }
            if (digits() == 0) {
                throw TfParseError("malformed exponent", start);
            }
        }
        double     v   = 0.0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + p, v);
        if (res.ec != std::errc{} || res.ptr != text_.data() + p || !std::isfinite(v)) {
            throw TfParseError("malformed number", start);
        }
        pos_ = p;
        if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])) != 0) {
            throw TfParseError("unit suffixes are not supported", pos_);
        }
        Frac f{{v}, {1.0}};
        trim(f.num);
        return f;
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string print_poly(const Poly& p) {
    std::string out;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0.0 && !(p.size() == 1)) {
            continue;
        }
        const double c = p[k];
        if (out.empty()) {
            out += c < 0.0 ? "-" + fmt(-c) : fmt(c);
        } else {
            out += c < 0.0 ? " - " + fmt(-c) : " + " + fmt(c);
        }
        if (k == 1) {
            out += "*s";
        } else if (k > 1) {
            out += "*s^" + std::to_string(k);
        }
    }
    return out.empty() ? "0" : out;
}

}  // namespace

Complex RationalExpr::evaluate(Complex s) const {
    auto horner = [s](const Poly& p) {
        Complex acc = 0.0;
        for (auto it = p.rbegin(); it != p.rend(); ++it) {
            acc = acc * s + *it;
        }
        return acc;
    };
    return horner(num) / horner(den);
}

RationalExpr parse_tf(std::string_view text) {
    Frac f = Parser(text).parse();
    if (is_zero(f.den)) {
        throw TfParseError("division by the zero polynomial", 0);
    }
    RationalExpr out;
    const double lead = f.den.back();
    for (double& c : f.den) {
        c /= lead;
    }
    for (double& c : f.num) {
        c /= lead;
    }
    trim(f.num);
    if (is_zero(f.num)) {
        f.den = {1.0};
    }
    out.num = std::move(f.num);
    out.den = std::move(f.den);
    return out;
}

std::string print_tf(const RationalExpr& expr) { return "(" + print_poly(expr.num) + ")/(" + print_poly(expr.den) + ")"; }

ContinuousStateSpace realize(const RationalExpr& expr) {
    if (!expr.proper()) {
        throw std::invalid_argument("improper transfer function: numerator degree exceeds denominator degree");
    }
    const int    n    = expr.den_degree();
    const double lead = expr.den.back();
    Poly         a(expr.den.size());
    Poly         b(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = expr.den[i] / lead;
    }
    for (std::size_t i = 0; i < expr.num.size(); ++i) {
        b[i] = expr.num[i] / lead;
    }
    const double d = b[static_cast<std::size_t>(n)];
    Matrix       A = Matrix::Zero(n, n);
    Matrix       B = Matrix::Zero(n, 1);
    Matrix       C = Matrix::Zero(1, n);
    if (n > 0) {
        A.topRightCorner(n - 1, n - 1) = Matrix::Identity(n - 1, n - 1);
        for (int i = 0; i < n; ++i) {
            A(n - 1, i) = -a[static_cast<std::size_t>(i)];
            C(0, i)     = b[static_cast<std::size_t>(i)] - d * a[static_cast<std::size_t>(i)];
        }
        B(n - 1, 0) = 1.0;
    }
    return {std::move(A), std::move(B), std::move(C), Matrix::Constant(1, 1, d)};
}

}  // namespace yy
