#pragma once

#include "pagai/domains/abstract_value.hpp"

#include <string>

namespace pagai::testing {

inline std::string name_xyz(VarId v) {
  static const char* names[] = {"x", "y", "z", "w", "u", "t"};
  return v < 6 ? names[v] : default_name(v);
}

inline LinearExpr X(VarId v, Rational c = 1) { return LinearExpr::var(v, c); }
inline LinearExpr K(Rational c) { return LinearExpr(std::move(c)); }

/// Fourier-Motzkin elimination of `v` from a conjunction of <= / = atoms.
inline Conjunction fourier_motzkin(const Conjunction& cs, VarId v) {
  Conjunction le, keep;
  for (const auto& c : cs) {
    Constraint r = c.relaxed();
    if (r.rel == Rel::EQ) {
      le.push_back({r.expr, Rel::LE});
      le.push_back({-r.expr, Rel::LE});
    } else {
      le.push_back(r);
    }
  }
  Conjunction pos, neg;
  for (const auto& c : le) {
    Rational a = c.expr.coeff(v);
    if (a > 0)
      pos.push_back(c);
    else if (a < 0)
      neg.push_back(c);
    else
      keep.push_back(c);
  }
  for (const auto& p : pos)
    for (const auto& n : neg) {
      Rational ap = p.expr.coeff(v), an = -n.expr.coeff(v);
      keep.push_back({p.expr * an + n.expr * ap, Rel::LE});
    }
  return keep;
}

}  // namespace pagai::testing
