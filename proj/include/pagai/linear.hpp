#pragma once

#include "pagai/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace pagai {

using VarId = std::uint32_t;

/// Ids at or above this value denote fresh existential symbols introduced by
/// path transfers (havoc results); they never name program variables.
inline constexpr VarId kFreshBase = 0x80000000u;

using NameFn = std::function<std::string(VarId)>;

/// Affine form  sum(coeff * var) + constant  with exact rational coefficients.
/// Terms are kept sorted by VarId and never store a zero coefficient.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(Rational constant) : constant_(std::move(constant)) {}
  static LinearExpr var(VarId v, Rational coeff = 1);

  const std::map<VarId, Rational>& terms() const { return terms_; }
  const Rational& constant() const { return constant_; }
  Rational coeff(VarId v) const;

  bool is_constant() const { return terms_.empty(); }
  bool mentions(VarId v) const { return terms_.count(v) != 0; }

  void add_term(VarId v, const Rational& c);
  void set_constant(Rational c) { constant_ = std::move(c); }

  LinearExpr& operator+=(const LinearExpr& o);
  LinearExpr& operator-=(const LinearExpr& o);
  LinearExpr& operator*=(const Rational& k);
  LinearExpr operator-() const;

  /// Replaces every variable v by sub(v).
  LinearExpr substitute(const std::function<LinearExpr(VarId)>& sub) const;
  Rational evaluate(const std::function<Rational(VarId)>& value) const;

  bool operator==(const LinearExpr& o) const {
    return constant_ == o.constant_ && terms_ == o.terms_;
  }
  bool operator!=(const LinearExpr& o) const { return !(*this == o); }

  /// "2*x - 1/2*y + 3"
  std::string str(const NameFn& name) const;

 private:
  std::map<VarId, Rational> terms_;
  Rational constant_ = 0;
};

inline LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
inline LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
inline LinearExpr operator*(LinearExpr a, const Rational& k) { return a *= k; }

enum class Rel { LE, LT, EQ };

/// expr rel 0
struct Constraint {
  LinearExpr expr;
  Rel rel = Rel::LE;

  static Constraint le(LinearExpr lhs, const LinearExpr& rhs) { return {lhs - rhs, Rel::LE}; }
  static Constraint lt(LinearExpr lhs, const LinearExpr& rhs) { return {lhs - rhs, Rel::LT}; }
  static Constraint eq(LinearExpr lhs, const LinearExpr& rhs) { return {lhs - rhs, Rel::EQ}; }
  static Constraint ge(const LinearExpr& lhs, LinearExpr rhs) { return {rhs - lhs, Rel::LE}; }
  static Constraint gt(const LinearExpr& lhs, LinearExpr rhs) { return {rhs - lhs, Rel::LT}; }
  static Constraint infeasible() { return {LinearExpr(Rational(1)), Rel::LE}; }

  bool holds(const std::function<Rational(VarId)>& value) const;

  /// Returns the constraint with the strict relation relaxed to <=.
  Constraint relaxed() const { return {expr, rel == Rel::LT ? Rel::LE : rel}; }

  /// Scales to a primitive integer-coefficient form (gcd 1, EQ with a positive
  /// leading coefficient). Used for deduplication and printing.
  Constraint normalized() const;

  bool is_trivially_true() const;
  bool is_trivially_false() const;

  /// Printed as  "a1*x + a2*y <= c"  with the constant on the right.
  std::string str(const NameFn& name) const;

  bool operator==(const Constraint& o) const { return rel == o.rel && expr == o.expr; }
};

using Conjunction = std::vector<Constraint>;

/// Negation of a single atom as a disjunction of atoms.
std::vector<Constraint> negate(const Constraint& c);

std::string default_name(VarId v);

/// Reads back the printed form ("2*x - 1/2*y <= 3", also ">=", ">", "=").
/// `var` maps a name to its variable. Throws std::invalid_argument.
Constraint parse_constraint(const std::string& text, const std::function<VarId(const std::string&)>& var);

}  // namespace pagai
