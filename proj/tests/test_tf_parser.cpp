#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "yy/tf_parser.hpp"

#include <cstdio>
#include <random>

using namespace yy;

namespace {

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            c[i + j] += a[i] * b[j];
        }
    }
    return c;
}

Complex horner(const std::vector<double>& asc, Complex s) {
    Complex acc = 0.0;
    for (auto it = asc.rbegin(); it != asc.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

std::string poly_text(const std::vector<double>& asc) {
    std::string out;
    char        buf[64];
    for (std::size_t k = 0; k < asc.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%s%.17g*s^%zu", k == 0 ? "" : " + ", asc[k], k);
        out += buf;
    }
    return out;
}

Complex realization_response(const ContinuousStateSpace& sys, Complex s) {
    const auto n = sys.states();
    if (n == 0) {
        return sys.D()(0, 0);
    }
    const CMatrix M = s * CMatrix::Identity(n, n) - sys.A().cast<Complex>();
    const CMatrix X = M.partialPivLu().solve(sys.B().cast<Complex>());
    return (sys.C().cast<Complex>() * X)(0, 0) + sys.D()(0, 0);
}

std::size_t error_offset(std::string_view text) {
    try {
        parse_tf(text);
    } catch (const TfParseError& e) {
        return e.offset();
    }
    return std::string::npos;
}

}  // namespace

TEST_CASE("parse_tf reference expressions") {
    SUBCASE("first-order lag") {
        const auto r = parse_tf("1/(s+1)");
        CHECK(r.num == std::vector<double>{1.0});
        CHECK(r.den == std::vector<double>{1.0, 1.0});
        CHECK(r.strictly_proper());
    }
    SUBCASE("bare variable") {
        const auto r = parse_tf("s");
        CHECK(r.num == std::vector<double>{0.0, 1.0});
        CHECK(r.den == std::vector<double>{1.0});
        CHECK_FALSE(r.proper());
    }
    SUBCASE("products and powers") {
        const auto r = parse_tf("(s+1)*(s+2)/((s+3)^2)");
        CHECK(r.num == poly_mul({1, 1}, {2, 1}));
        CHECK(r.den == poly_mul({3, 1}, {3, 1}));
        CHECK(r.num == std::vector<double>{2, 3, 1});
        CHECK(r.den == std::vector<double>{9, 6, 1});
        CHECK(r.proper());
        CHECK_FALSE(r.strictly_proper());
    }
    SUBCASE("normalization to a monic denominator") {
        const auto r = parse_tf("4/(2*s^2 + 2*s + 8)");
        CHECK(r.num == std::vector<double>{2.0});
        CHECK(r.den == std::vector<double>{4.0, 1.0, 1.0});
    }
    SUBCASE("sums of fractions") {
        const auto r = parse_tf("1/(s+1) + 1/(s+2)");
        // (2s + 3) / (s^2 + 3s + 2)
        CHECK(r.num == std::vector<double>{3.0, 2.0});
        CHECK(r.den == std::vector<double>{2.0, 3.0, 1.0});
    }
    SUBCASE("unary minus, whitespace and exponents") {
        const auto r = parse_tf("  -2.5e-1 * s^ 0 / ( s - -1 ) ");
        CHECK(r.num == std::vector<double>{-0.25});
        CHECK(r.den == std::vector<double>{1.0, 1.0});
    }
    SUBCASE("zero numerator") {
        const auto r = parse_tf("0*s/(s+5)");
        CHECK(r.num == std::vector<double>{0.0});
        CHECK(r.den == std::vector<double>{1.0});
        CHECK(r.strictly_proper());
    }
    SUBCASE("evaluate") {
        const auto r = parse_tf("(s+1)/(s^2+1.4*s+1)");
        const Complex s(0.3, 2.0);
        const Complex expect = (s + 1.0) / (s * s + 1.4 * s + 1.0);
        CHECK(std::abs(r.evaluate(s) - expect) < 1e-14);
    }
}

TEST_CASE("parse_tf errors") {
    CHECK_THROWS_AS(parse_tf(""), TfParseError);
    CHECK_THROWS_AS(parse_tf("   "), TfParseError);
    CHECK(error_offset("1/(s+1") == 6);
    CHECK(error_offset("1/(s+)") == 5);
    CHECK(error_offset("s+1)") == 3);
    CHECK(error_offset("s^1.5") == 2);
    CHECK(error_offset("s^-1") == 2);
    CHECK(error_offset("1/(s-s)") == 2);  // points at the divisor
    CHECK(error_offset("exp(-s)/(s+1)") == 0);
    CHECK(error_offset("1/(s+x)") == 5);
    CHECK(error_offset("10ms") != std::string::npos);
    CHECK(error_offset("1.2.3") != std::string::npos);
    try {
        parse_tf("1/(s+1) $");
        FAIL("expected an error");
    } catch (const TfParseError& e) {
        CHECK(e.offset() == 8);
        CHECK(std::string(e.what()).find("offset 8") != std::string::npos);
    }
    try {
        parse_tf("exp(-s)/(s+1)");
    } catch (const TfParseError& e) {
        CHECK(std::string(e.what()).find("unsupported") != std::string::npos);
    }
    try {
        parse_tf("1/(s-s)");
    } catch (const TfParseError& e) {
        CHECK(std::string(e.what()).find("zero polynomial") != std::string::npos);
    }
}

TEST_CASE("print and re-parse") {
    std::mt19937_64                  rng(601);
    std::normal_distribution<double> g;
    for (const char* text : {"1/(s+1)", "s", "2", "(s+1)*(s+2)/((s+3)^2)", "-3/(s^3+0.1*s+7)", "0"}) {
        const auto a = parse_tf(text);
        const auto b = parse_tf(print_tf(a));
        CHECK(a == b);
        CHECK(print_tf(b) == print_tf(a));
    }
    for (int t = 0; t < 50; ++t) {
        std::vector<double> num(3), den(4);
        for (auto& c : num) {
            c = g(rng);
        }
        for (auto& c : den) {
            c = g(rng);
        }
        const auto a = parse_tf("(" + poly_text(num) + ")/(" + poly_text(den) + ")");
        const auto b = parse_tf(print_tf(a));
        CHECK(a == b);
    }
}

TEST_CASE("realize") {
    SUBCASE("constant") {
        const auto sys = realize(parse_tf("2"));
        CHECK(sys.states() == 0);
        CHECK(sys.D()(0, 0) == 2.0);
    }
    SUBCASE("first-order canonical form") {
        const auto sys = realize(parse_tf("1/(s+1)"));
        REQUIRE(sys.states() == 1);
        CHECK(sys.A()(0, 0) == -1.0);
        CHECK(sys.B()(0, 0) == 1.0);
        CHECK(sys.C()(0, 0) == 1.0);
        CHECK(sys.D()(0, 0) == 0.0);
    }
    SUBCASE("improper input") {
        CHECK_THROWS_AS(realize(parse_tf("s^2/(s+1)")), std::invalid_argument);
        CHECK_THROWS_AS(realize(parse_tf("s")), std::invalid_argument);
    }
    SUBCASE("transfer function preserved on the imaginary axis") {
        std::mt19937_64                        rng(602);
        std::normal_distribution<double>       g;
        std::uniform_real_distribution<double> freq(-20.0, 20.0);
        for (int t = 0; t < 20; ++t) {
            const int           n = 1 + t % 4;
            std::vector<double> den(static_cast<std::size_t>(n) + 1), num(static_cast<std::size_t>(n) + 1 - t % 2);
            for (auto& c : den) {
                c = g(rng);
            }
            den.back() = 1.0 + std::abs(den.back());
            for (auto& c : num) {
                c = g(rng);
            }
            const auto expr = parse_tf("(" + poly_text(num) + ")/(" + poly_text(den) + ")");
            const auto sys  = realize(expr);
            CHECK(sys.states() == n);
            for (int k = 0; k < 32; ++k) {
                const Complex s(0.0, freq(rng));
                const Complex expect = horner(num, s) / horner(den, s);
                CHECK(std::abs(realization_response(sys, s) - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
            }
        }
    }
}
