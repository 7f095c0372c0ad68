#include "pagai/domains/octagon.hpp"

#include <cassert>

namespace pagai {

void Dbm::tighten(std::size_t i, std::size_t j, const Bound& b) {
  if (b < at(i, j)) at(i, j) = b;
  if (b < at(bar(j), bar(i))) at(bar(j), bar(i)) = b;
}

bool oct_close(Dbm& m) {
  const std::size_t size = m.size();
  for (std::size_t k = 0; k < size; ++k) {
    for (std::size_t i = 0; i < size; ++i) {
      const Bound& ik = m.at(i, k);
      if (ik.infinite) continue;
      for (std::size_t j = 0; j < size; ++j) {
        const Bound& kj = m.at(k, j);
        if (kj.infinite) continue;
        Bound via = Bound::finite(ik.value + kj.value);
        if (via < m.at(i, j)) m.at(i, j) = via;
      }
    }
  }
  for (std::size_t i = 0; i < size; ++i)
    if (m.at(i, i).value < 0) return false;
  // Strengthening: form_j - form_i <= (2 form_j + (-2 form_i)) / 2.
  for (std::size_t i = 0; i < size; ++i) {
    const Bound& a = m.at(i, bar(i));
    if (a.infinite) continue;
    for (std::size_t j = 0; j < size; ++j) {
      const Bound& b = m.at(bar(j), j);
      if (b.infinite) continue;
      Bound s = Bound::finite((a.value + b.value) / 2);
      if (s < m.at(i, j)) m.at(i, j) = s;
    }
  }
  for (std::size_t i = 0; i < size; ++i) {
    if (m.at(i, i).value < 0) return false;
    m.at(i, i) = Bound::finite(0);
  }
  return true;
}

Octagon Octagon::top(std::size_t n) { return Octagon(n); }

Octagon Octagon::bottom(std::size_t n) {
  Octagon o(n);
  o.empty_ = true;
  return o;
}

Octagon Octagon::from_dbm(Dbm m) {
  Octagon o(m.vars());
  o.dbm_ = std::move(m);
  o.closed_ = false;
  o.close_in_place();
  return o;
}

void Octagon::close_in_place() {
  if (empty_ || closed_) return;
  if (!oct_close(dbm_)) {
    *this = bottom(dbm_.vars());
    return;
  }
  closed_ = true;
}

Octagon Octagon::closed() const {
  Octagon c = *this;
  c.close_in_place();
  return c;
}

std::pair<Bound, Bound> Octagon::interval(std::size_t i) const {
  auto half = [](const Bound& b) { return b.infinite ? b : Bound::finite(b.value / 2); };
  return {half(dbm_.at(2 * i, 2 * i + 1)), half(dbm_.at(2 * i + 1, 2 * i))};
}

Bound Octagon::sup(const LinearExpr& f) const {
  Rational total = f.constant();
  for (const auto& [v, a] : f.terms()) {
    auto [neg_lo, hi] = interval(v);
    const Bound& b = a > 0 ? hi : neg_lo;
    if (b.infinite) return Bound::inf();
    total += abs(a) * b.value;
  }
  return Bound::finite(total);
}

Octagon Octagon::join(const Octagon& o) const {
  assert(dims() == o.dims());
  if (empty_) return o.closed();
  if (o.empty_) return closed();
  Octagon a = closed(), b = o.closed();
  if (a.empty_) return b;
  if (b.empty_) return a;
  for (std::size_t i = 0; i < a.dbm_.size(); ++i)
    for (std::size_t j = 0; j < a.dbm_.size(); ++j) a.dbm_.at(i, j) = max_bound(a.dbm_.at(i, j), b.dbm_.at(i, j));
  return a;
}

Octagon Octagon::meet(const Octagon& o) const {
  assert(dims() == o.dims());
  if (empty_ || o.empty_) return bottom(dims());
  Octagon r = *this;
  for (std::size_t i = 0; i < r.dbm_.size(); ++i)
    for (std::size_t j = 0; j < r.dbm_.size(); ++j) r.dbm_.at(i, j) = min_bound(r.dbm_.at(i, j), o.dbm_.at(i, j));
  r.closed_ = false;
  r.close_in_place();
  return r;
}

namespace {

std::size_t form_of(VarId v, const Rational& coeff) { return 2 * v + (coeff > 0 ? 0 : 1); }

}  // namespace

Octagon Octagon::meet_constraints(const Conjunction& cs) const {
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
  Octagon cur = closed();
  if (cur.empty_) return cur;
  bool changed = false;
  for (const auto& c : atoms) {
    // sum a_k v_k + k0 <= 0
    const auto& terms = c.expr.terms();
    const Rational& k0 = c.expr.constant();
    if (terms.empty()) {
      if (k0 > 0) return bottom(dims());
      continue;
    }
    if (terms.size() == 1) {
      auto [v, a] = *terms.begin();
      std::size_t f = form_of(v, a);
      cur.dbm_.tighten(bar(f), f, Bound::finite(2 * (-k0) / abs(a)));
      changed = true;
      continue;
    }
    if (terms.size() == 2) {
      auto it = terms.begin();
      auto [v1, a1] = *it++;
      auto [v2, a2] = *it;
      if (abs(a1) == abs(a2)) {
        std::size_t f = form_of(v1, a1), g = form_of(v2, a2);
        cur.dbm_.tighten(bar(f), g, Bound::finite(-k0 / abs(a1)));
        changed = true;
        continue;
      }
    }
    // Not octagonal: derive unary and equal-magnitude pair bounds by interval
    // evaluation of the remaining terms.
    for (const auto& [v, a] : terms) {
      LinearExpr rest = c.expr;
      rest.add_term(v, -a);
      Bound s = cur.sup(-rest);  // a*v <= -rest <= sup(-rest)
      if (s.infinite) continue;
      std::size_t f = form_of(v, a);
      cur.dbm_.tighten(bar(f), f, Bound::finite(2 * s.value / abs(a)));
      changed = true;
    }
    for (auto i = terms.begin(); i != terms.end(); ++i) {
      for (auto j = std::next(i); j != terms.end(); ++j) {
        if (abs(i->second) != abs(j->second)) continue;
        LinearExpr rest = c.expr;
        rest.add_term(i->first, -i->second);
        rest.add_term(j->first, -j->second);
        Bound s = cur.sup(-rest);
        if (s.infinite) continue;
        std::size_t f = form_of(i->first, i->second), g = form_of(j->first, j->second);
        cur.dbm_.tighten(bar(f), g, Bound::finite(s.value / abs(i->second)));
        changed = true;
      }
    }
  }
  if (changed) {
    cur.closed_ = false;
    cur.close_in_place();
  }
  return cur;
}

Octagon Octagon::widen(const Octagon& o) const {
  assert(dims() == o.dims());
  if (empty_) return o.closed();
  Octagon next = join(o);
  if (next.empty_) return *this;
  Octagon r = *this;
  for (std::size_t i = 0; i < r.dbm_.size(); ++i)
    for (std::size_t j = 0; j < r.dbm_.size(); ++j)
      if (!(next.dbm_.at(i, j) <= r.dbm_.at(i, j))) r.dbm_.at(i, j) = Bound::inf();
  r.closed_ = false;
  return r;
}

bool Octagon::leq(const Octagon& o) const {
  assert(dims() == o.dims());
  Octagon a = closed();
  if (a.empty_) return true;
  if (o.empty_) return o.closed().empty_ ? false : a.leq(o.closed());
  for (std::size_t i = 0; i < a.dbm_.size(); ++i)
    for (std::size_t j = 0; j < a.dbm_.size(); ++j)
      if (!(a.dbm_.at(i, j) <= o.dbm_.at(i, j))) return false;
  return true;
}

Octagon Octagon::image(const std::vector<std::optional<LinearExpr>>& exprs) const {
  const std::size_t n = dims(), m = exprs.size();
  if (empty_) return bottom(m);
  Octagon src = closed();
  if (src.empty_) return bottom(m);

  // Work over n source dims followed by m target dims.
  Dbm w(n + m);
  for (std::size_t i = 0; i < 2 * n; ++i)
    for (std::size_t j = 0; j < 2 * n; ++j) w.at(i, j) = src.dbm_.at(i, j);
  Octagon work = from_dbm(w);
  auto target = [n](std::size_t k) { return static_cast<VarId>(n + k); };

  Dbm& d = work.dbm_;
  for (std::size_t k = 0; k < m; ++k) {
    if (!exprs[k]) continue;
    const LinearExpr& f = *exprs[k];
    VarId t = target(k);
    // t - f = 0 when f is constant or a unit-coefficient single variable.
    if (f.terms().size() <= 1 && (f.terms().empty() || abs(f.terms().begin()->second) == 1)) {
      LinearExpr diff = LinearExpr::var(t) - f;
      Constraint up{diff, Rel::LE}, down{-diff, Rel::LE};
      for (const auto& c : {up, down}) {
        const auto& terms = c.expr.terms();
        if (terms.size() == 1) {
          auto [v, a] = *terms.begin();
          std::size_t fv = form_of(v, a);
          d.tighten(bar(fv), fv, Bound::finite(2 * (-c.expr.constant()) / abs(a)));
        } else {
          auto it = terms.begin();
          auto [v1, a1] = *it++;
          auto [v2, a2] = *it;
          d.tighten(bar(form_of(v1, a1)), form_of(v2, a2), Bound::finite(-c.expr.constant()));
        }
      }
      continue;
    }
    // Interval / octagonal evaluation of f and f -+ v for each source v.
    auto bound_form = [&](const LinearExpr& g, std::size_t ft, std::optional<std::size_t> other) {
      Bound s = src.sup(g);
      if (s.infinite) return;
      if (other)
        d.tighten(bar(ft), *other, s);
      else
        d.tighten(bar(ft), ft, Bound::finite(2 * s.value));
    };
    bound_form(f, 2 * t, std::nullopt);
    bound_form(-f, 2 * t + 1, std::nullopt);
    for (VarId v = 0; v < n; ++v) {
      for (int sv : {1, -1}) {
        // t + sv*v <= sup(f + sv*v);  -t + sv*v <= sup(-f + sv*v)
        LinearExpr g = f + LinearExpr::var(v, sv);
        bound_form(g, 2 * t, form_of(v, sv));
        LinearExpr h = -f + LinearExpr::var(v, sv);
        bound_form(h, 2 * t + 1, form_of(v, sv));
      }
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = k + 1; l < m; ++l) {
      if (!exprs[k] || !exprs[l]) continue;
      for (int sk : {1, -1})
        for (int sl : {1, -1}) {
          LinearExpr g = *exprs[k] * Rational(sk) + *exprs[l] * Rational(sl);
          Bound s = src.sup(g);
          if (s.infinite) continue;
          d.tighten(bar(form_of(target(k), sk)), form_of(target(l), sl), s);
        }
    }
  }
  work.closed_ = false;
  work.close_in_place();
  if (work.empty_) return bottom(m);
  Dbm out(m);
  for (std::size_t i = 0; i < 2 * m; ++i)
    for (std::size_t j = 0; j < 2 * m; ++j) out.at(i, j) = work.dbm_.at(2 * n + i, 2 * n + j);
  Octagon r(m);
  r.dbm_ = std::move(out);
  r.closed_ = true;
  return r;
}

Conjunction Octagon::to_constraints() const {
  Octagon c = closed();
  if (c.empty_) return {Constraint::infeasible()};
  Conjunction out;
  const std::size_t n = dims();
  auto form_expr = [](std::size_t f) { return LinearExpr::var(static_cast<VarId>(f / 2), f % 2 ? -1 : 1); };
  // form_f + form_g <= at(bar f, g); f == g gives the unary bound times two.
  for (std::size_t i = 0; i < n; ++i) {
    const Bound& up = c.dbm_.at(2 * i + 1, 2 * i);
    const Bound& down = c.dbm_.at(2 * i, 2 * i + 1);
    LinearExpr x = LinearExpr::var(static_cast<VarId>(i));
    if (!up.infinite && !down.infinite && up.value == -down.value) {
      out.push_back(Constraint::eq(x, LinearExpr(up.value / 2)));
      continue;
    }
    if (!up.infinite) out.push_back(Constraint::le(x, LinearExpr(up.value / 2)));
    if (!down.infinite) out.push_back(Constraint::le(-x, LinearExpr(down.value / 2)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t f : {2 * i, 2 * i + 1}) {
        std::size_t g_plus = 2 * j;
        for (std::size_t g : {g_plus, g_plus + 1}) {
          const Bound& b = c.dbm_.at(bar(f), g);
          if (b.infinite) continue;
          LinearExpr e = form_expr(f) + form_expr(g);
          // Implied by the unary bounds?
          Bound unary = c.sup(e);
          if (!unary.infinite && unary.value <= b.value) continue;
          // Fold with the opposite direction into an equality.
          const Bound& opp = c.dbm_.at(f, bar(g));
          if (!opp.infinite && opp.value == -b.value) {
            if (f % 2 == 0) out.push_back(Constraint::eq(e, LinearExpr(b.value)));
            continue;
          }
          out.push_back(Constraint::le(e, LinearExpr(b.value)));
        }
      }
    }
  }
  return out;
}

bool Octagon::contains(const std::vector<Rational>& point) const {
  if (empty_) return false;
  std::vector<Rational> form(dbm_.size());
  for (std::size_t k = 0; k < point.size(); ++k) {
    form[2 * k] = point[k];
    form[2 * k + 1] = -point[k];
  }
  Rational d;
  for (std::size_t i = 0; i < dbm_.size(); ++i)
    for (std::size_t j = 0; j < dbm_.size(); ++j) {
      const Bound& b = dbm_.at(i, j);
      if (b.infinite || i == j) continue;
      mpq_sub(d.get_mpq_t(), form[j].get_mpq_t(), form[i].get_mpq_t());
      if (d > b.value) return false;
    }
  return true;
}

}  // namespace pagai
