#include "pagai/linear.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace pagai {

LinearExpr LinearExpr::var(VarId v, Rational coeff) {
  LinearExpr e;
  e.add_term(v, coeff);
  return e;
}

Rational LinearExpr::coeff(VarId v) const {
  auto it = terms_.find(v);
  return it == terms_.end() ? Rational(0) : it->second;
}

void LinearExpr::add_term(VarId v, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(v, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& o) {
  for (const auto& [v, c] : o.terms_) add_term(v, c);
  constant_ += o.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& o) {
  for (const auto& [v, c] : o.terms_) add_term(v, -c);
  constant_ -= o.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator*=(const Rational& k) {
  if (k == 0) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& [v, c] : terms_) c *= k;
  constant_ *= k;
  return *this;
}

LinearExpr LinearExpr::operator-() const {
  LinearExpr r = *this;
  r *= Rational(-1);
  return r;
}

LinearExpr LinearExpr::substitute(const std::function<LinearExpr(VarId)>& sub) const {
  LinearExpr r(constant_);
  for (const auto& [v, c] : terms_) r += sub(v) * c;
  return r;
}

Rational LinearExpr::evaluate(const std::function<Rational(VarId)>& value) const {
  Rational r = constant_;
  for (const auto& [v, c] : terms_) r += c * value(v);
  return r;
}

namespace {

void append_term(std::ostringstream& os, bool first, const Rational& c, const std::string& name) {
  Rational a = abs(c);
  if (first) {
    if (c < 0) os << "-";
  } else {
    os << (c < 0 ? " - " : " + ");
  }
  if (a != 1) os << to_string(a) << "*";
  os << name;
}

}  // namespace

std::string LinearExpr::str(const NameFn& name) const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : terms_) {
    append_term(os, first, c, name(v));
    first = false;
  }
  if (first) return to_string(constant_);
  if (constant_ != 0) os << (constant_ < 0 ? " - " : " + ") << to_string(abs(constant_));
  return os.str();
}

bool Constraint::holds(const std::function<Rational(VarId)>& value) const {
  Rational v = expr.evaluate(value);
  switch (rel) {
    case Rel::LE: return v <= 0;
    case Rel::LT: return v < 0;
    case Rel::EQ: return v == 0;
  }
  return false;
}

Constraint Constraint::normalized() const {
  Integer l = 1;
  for (const auto& [v, c] : expr.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), expr.constant().get_den_mpz_t());
  LinearExpr e = expr * Rational(l);
  Integer g = 0;
  for (const auto& [v, c] : e.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.constant().get_num_mpz_t());
  if (g != 0 && g != 1) e *= Rational(1, g);
  if (rel == Rel::EQ && !e.terms().empty() && e.terms().begin()->second < 0) e *= Rational(-1);
  return {e, rel};
}

bool Constraint::is_trivially_true() const {
  if (!expr.is_constant()) return false;
  const Rational& k = expr.constant();
  switch (rel) {
    case Rel::LE: return k <= 0;
    case Rel::LT: return k < 0;
    case Rel::EQ: return k == 0;
  }
  return false;
}

bool Constraint::is_trivially_false() const { return expr.is_constant() && !is_trivially_true(); }

std::string Constraint::str(const NameFn& name) const {
  Constraint n = normalized();
  LinearExpr lhs = n.expr;
  Rational rhs = -lhs.constant();
  lhs.set_constant(0);
  const char* op = n.rel == Rel::LE ? " <= " : n.rel == Rel::LT ? " < " : " = ";
  return lhs.str(name) + op + to_string(rhs);
}

std::vector<Constraint> negate(const Constraint& c) {
  switch (c.rel) {
    case Rel::LE: return {{-c.expr, Rel::LT}};
    case Rel::LT: return {{-c.expr, Rel::LE}};
    case Rel::EQ: return {{c.expr, Rel::LT}, {-c.expr, Rel::LT}};
  }
  return {};
}

std::string default_name(VarId v) {
  if (v >= kFreshBase) return "_h" + std::to_string(v - kFreshBase);
  return "v" + std::to_string(v);
}

namespace {

struct ConstraintReader {
  const std::string& t;
  const std::function<VarId(const std::string&)>& var;
  std::size_t i = 0;

  [[noreturn]] void fail(const char* what) const {
    throw std::invalid_argument(std::string(what) + " at column " + std::to_string(i + 1) + " in '" + t + "'");
  }
  void skip() {
    while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
  }
  bool name_char(char c, bool first) const {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
           (!first && (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '@' || c == '#'));
  }
  Rational number() {
    std::size_t b = i;
    while (i < t.size() && (std::isdigit(static_cast<unsigned char>(t[i])) || t[i] == '/')) ++i;
    if (b == i) fail("number expected");
    Rational r(t.substr(b, i - b));
    r.canonicalize();
    return r;
  }
  LinearExpr sum() {
    LinearExpr e;
    bool first = true;
    for (;;) {
      skip();
      int sign = 1;
      if (i < t.size() && (t[i] == '+' || t[i] == '-')) {
        sign = t[i] == '-' ? -1 : 1;
        ++i;
        skip();
      } else if (!first) {
        return e;
      }
      first = false;
      Rational k = 1;
      bool has_k = false;
      if (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
        k = number();
        has_k = true;
        skip();
        if (i < t.size() && t[i] == '*') {
          ++i;
          skip();
        } else {
          e.set_constant(e.constant() + sign * k);
          continue;
        }
      }
      std::size_t b = i;
      while (i < t.size() && name_char(t[i], i == b)) ++i;
      if (b == i) fail(has_k ? "variable expected after '*'" : "term expected");
      e.add_term(var(t.substr(b, i - b)), sign * k);
    }
  }
};

}  // namespace

Constraint parse_constraint(const std::string& text, const std::function<VarId(const std::string&)>& var) {
  ConstraintReader r{text, var};
  LinearExpr lhs = r.sum();
  r.skip();
  std::string op;
  while (r.i < text.size() && std::string("<>=").find(text[r.i]) != std::string::npos) op += text[r.i++];
  LinearExpr rhs = r.sum();
  r.skip();
  if (r.i != text.size()) r.fail("trailing text");
  if (op == "<=") return Constraint::le(lhs, rhs);
  if (op == "<") return Constraint::lt(lhs, rhs);
  if (op == "=" || op == "==") return Constraint::eq(lhs, rhs);
  if (op == ">=") return Constraint::ge(lhs, rhs);
  if (op == ">") return Constraint::gt(lhs, rhs);
  r.fail("relation expected");
}

}  // namespace pagai
