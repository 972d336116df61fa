#pragma once

#include "yy/lti.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace yy {

/// num(s) / den(s), coefficients in ascending powers of s; den is monic after parsing.
struct RationalExpr {
    std::vector<double> num{0.0};
    std::vector<double> den{1.0};

    int  num_degree() const { return static_cast<int>(num.size()) - 1; }
    int  den_degree() const { return static_cast<int>(den.size()) - 1; }
    bool proper() const { return num_degree() <= den_degree(); }
    bool strictly_proper() const { return num_degree() < den_degree() || (num.size() == 1 && num[0] == 0.0); }

    Complex evaluate(Complex s) const;

    bool operator==(const RationalExpr&) const = default;
};

class TfParseError : public std::invalid_argument {
  public:
    TfParseError(const std::string& what, std::size_t offset)
        : std::invalid_argument(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

/// Grammar (whitespace ignored):
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := '-' factor | base ('^' unsigned-int)?
///   base   := number | 's' | '(' expr ')'
RationalExpr parse_tf(std::string_view text);

/// Canonical text "(b0 + b1*s + ...)/(a0 + a1*s + ...)" with 17 significant digits.
std::string print_tf(const RationalExpr& expr);

/// Controllable canonical realization. Throws std::invalid_argument for improper input.
ContinuousStateSpace realize(const RationalExpr& expr);

}  // namespace yy
