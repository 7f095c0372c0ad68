#include "pagai/domains/box.hpp"

#include <cassert>

namespace pagai {

Box Box::top(std::size_t n) { return Box(n); }

Box Box::bottom(std::size_t n) {
  Box b(n);
  b.empty_ = true;
  return b;
}

void Box::set(std::size_t i, std::optional<Rational> lo, std::optional<Rational> hi) {
  neg_lo_[i] = lo ? Bound::finite(-*lo) : Bound::inf();
  hi_[i] = hi ? Bound::finite(*hi) : Bound::inf();
  normalize_empty();
}

void Box::normalize_empty() {
  if (empty_) return;
  for (std::size_t i = 0; i < dims(); ++i) {
    if (!neg_lo_[i].infinite && !hi_[i].infinite && hi_[i].value < -neg_lo_[i].value) {
      *this = bottom(dims());
      return;
    }
  }
}

Bound Box::sup(const LinearExpr& f) const {
  Rational total = f.constant();
  for (const auto& [v, a] : f.terms()) {
    const Bound& b = a > 0 ? hi_[v] : neg_lo_[v];
    if (b.infinite) return Bound::inf();
    total += abs(a) * b.value;
  }
  return Bound::finite(total);
}

Box Box::join(const Box& o) const {
  assert(dims() == o.dims());
  if (empty_) return o;
  if (o.empty_) return *this;
  Box r(dims());
  for (std::size_t i = 0; i < dims(); ++i) {
    r.neg_lo_[i] = max_bound(neg_lo_[i], o.neg_lo_[i]);
    r.hi_[i] = max_bound(hi_[i], o.hi_[i]);
  }
  return r;
}

Box Box::meet(const Box& o) const {
  assert(dims() == o.dims());
  if (empty_ || o.empty_) return bottom(dims());
  Box r(dims());
  for (std::size_t i = 0; i < dims(); ++i) {
    r.neg_lo_[i] = min_bound(neg_lo_[i], o.neg_lo_[i]);
    r.hi_[i] = min_bound(hi_[i], o.hi_[i]);
  }
  r.normalize_empty();
  return r;
}

Box Box::meet_constraints(const Conjunction& cs) const {
  if (empty_) return *this;
  Conjunction atoms;
  for (const auto& c : cs) {
    Constraint r = c.relaxed();
    if (r.rel == Rel::EQ) {
      atoms.push_back({r.expr, Rel::LE});
      atoms.push_back({-r.expr, Rel::LE});
    } else {
      atoms.push_back(r);
    }
  }
  Box r = *this;
  for (const auto& c : atoms) {
    if (c.expr.is_constant()) {
      if (c.expr.constant() > 0) return bottom(dims());
      continue;
    }
    // a*v <= -(rest)  ==>  a*v <= sup(-rest)
    for (const auto& [v, a] : c.expr.terms()) {
      LinearExpr rest = c.expr;
      rest.add_term(v, -a);
      Bound s = r.sup(-rest);
      if (s.infinite) continue;
      Rational limit = s.value / abs(a);
      if (a > 0)
        r.hi_[v] = min_bound(r.hi_[v], Bound::finite(limit));
      else
        r.neg_lo_[v] = min_bound(r.neg_lo_[v], Bound::finite(limit));
    }
    r.normalize_empty();
    if (r.empty_) return r;
  }
  return r;
}

Box Box::widen(const Box& o) const {
  assert(dims() == o.dims());
  if (empty_) return o;
  Box next = join(o);
  Box r = *this;
  for (std::size_t i = 0; i < dims(); ++i) {
    if (!(next.neg_lo_[i] <= r.neg_lo_[i])) r.neg_lo_[i] = Bound::inf();
    if (!(next.hi_[i] <= r.hi_[i])) r.hi_[i] = Bound::inf();
  }
  return r;
}

bool Box::leq(const Box& o) const {
  assert(dims() == o.dims());
  if (empty_) return true;
  if (o.empty_) return false;
  for (std::size_t i = 0; i < dims(); ++i)
    if (!(neg_lo_[i] <= o.neg_lo_[i]) || !(hi_[i] <= o.hi_[i])) return false;
  return true;
}

Box Box::image(const std::vector<std::optional<LinearExpr>>& exprs) const {
  const std::size_t m = exprs.size();
  if (empty_) return bottom(m);
  Box r(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (!exprs[k]) continue;
    r.hi_[k] = sup(*exprs[k]);
    r.neg_lo_[k] = sup(-*exprs[k]);
  }
  return r;
}

Conjunction Box::to_constraints() const {
  if (empty_) return {Constraint::infeasible()};
  Conjunction out;
  for (std::size_t i = 0; i < dims(); ++i) {
    LinearExpr x = LinearExpr::var(static_cast<VarId>(i));
    const Bound& up = hi_[i];
    const Bound& down = neg_lo_[i];
    if (!up.infinite && !down.infinite && up.value == -down.value) {
      out.push_back(Constraint::eq(x, LinearExpr(up.value)));
      continue;
    }
    if (!down.infinite) out.push_back(Constraint::le(-x, LinearExpr(down.value)));
    if (!up.infinite) out.push_back(Constraint::le(x, LinearExpr(up.value)));
  }
  return out;
}

bool Box::contains(const std::vector<Rational>& point) const {
  if (empty_) return false;
  for (std::size_t i = 0; i < dims(); ++i) {
    if (!hi_[i].infinite && point[i] > hi_[i].value) return false;
    if (!neg_lo_[i].infinite && -point[i] > neg_lo_[i].value) return false;
  }
  return true;
}

}  // namespace pagai
