#include "pagai/domains/polyhedron.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace pagai {
namespace dd {

Integer dot(const Vec& a, const Vec& b) {
  Integer s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
  return s;
}

void normalize(Vec& v, bool sign_free) {
  Integer g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g == 0) return;
  if (sign_free) {
    for (const auto& x : v) {
      if (x != 0) {
        if (x < 0) g = -g;
        break;
      }
    }
  }
  if (g != 1)
    for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
}

namespace {

// Fixed-width bitset over the processed-constraint list.
struct SatSet {
  std::vector<std::uint64_t> words;
  explicit SatSet(std::size_t bits = 0) : words((bits + 63) / 64, 0) {}
  void set(std::size_t i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool subset_of(const SatSet& o) const {
    for (std::size_t i = 0; i < words.size(); ++i)
      if (words[i] & ~o.words[i]) return false;
    return true;
  }
  SatSet operator&(const SatSet& o) const {
    SatSet r;
    r.words.resize(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) r.words[i] = words[i] & o.words[i];
    return r;
  }
};

SatSet saturation(const Vec& ray, const std::vector<Vec>& processed) {
  SatSet s(processed.size());
  for (std::size_t i = 0; i < processed.size(); ++i)
    if (dot(processed[i], ray) == 0) s.set(i);
  return s;
}

Vec combine(const Integer& a, const Vec& x, const Integer& b, const Vec& y) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + b * y[i];
  return r;
}

void add_one(Cone& cone, std::vector<Vec>& processed, const Vec& c, bool equality) {
  std::vector<Integer> line_s(cone.lines.size());
  std::size_t pivot = cone.lines.size();
  for (std::size_t i = 0; i < cone.lines.size(); ++i) {
    line_s[i] = dot(c, cone.lines[i]);
    if (pivot == cone.lines.size() && line_s[i] != 0) pivot = i;
  }

  if (pivot < cone.lines.size()) {
    // A line crosses the hyperplane: project every other generator onto it.
    Vec l = cone.lines[pivot];
    Integer sl = line_s[pivot];
    Integer abs_sl = abs(sl);
    int sign_l = sgn(sl);
    for (std::size_t i = 0; i < cone.lines.size(); ++i) {
      if (i == pivot || line_s[i] == 0) continue;
      cone.lines[i] = combine(sl, cone.lines[i], -line_s[i], l);
      normalize(cone.lines[i], true);
    }
    for (auto& r : cone.rays) {
      Integer sr = dot(c, r);
      if (sr == 0) continue;
      r = combine(abs_sl, r, -sign_l * sr, l);
      normalize(r, false);
    }
    cone.lines.erase(cone.lines.begin() + static_cast<std::ptrdiff_t>(pivot));
    if (!equality) {
      if (sign_l < 0)
        for (auto& x : l) x = -x;
      normalize(l, false);
      cone.rays.push_back(std::move(l));
      processed.push_back(c);
    }
    return;
  }

  std::vector<Integer> s(cone.rays.size());
  std::vector<std::size_t> pos, zero, neg;
  for (std::size_t i = 0; i < cone.rays.size(); ++i) {
    s[i] = dot(c, cone.rays[i]);
    int sg = sgn(s[i]);
    (sg > 0 ? pos : sg < 0 ? neg : zero).push_back(i);
  }
  if (!equality && neg.empty()) {
    processed.push_back(c);
    return;
  }
  if (equality && pos.empty() && neg.empty()) return;

  std::vector<SatSet> sats;
  sats.reserve(cone.rays.size());
  for (const auto& r : cone.rays) sats.push_back(saturation(r, processed));

  std::vector<Vec> next;
  if (!equality)
    for (auto i : pos) next.push_back(cone.rays[i]);
  for (auto i : zero) next.push_back(cone.rays[i]);

  for (auto p : pos) {
    for (auto q : neg) {
      SatSet common = sats[p] & sats[q];
      bool adjacent = true;
      for (std::size_t r = 0; r < cone.rays.size() && adjacent; ++r) {
        if (r == p || r == q) continue;
        if (common.subset_of(sats[r])) adjacent = false;
      }
      if (!adjacent) continue;
      Vec v = combine(s[p], cone.rays[q], -s[q], cone.rays[p]);
      normalize(v, false);
      if (!is_zero(v)) next.push_back(std::move(v));
    }
  }
  cone.rays = std::move(next);
  if (!equality) processed.push_back(c);
}

}  // namespace

void refine(Cone& cone, std::vector<Vec>& processed, const std::vector<Vec>& eqs,
            const std::vector<Vec>& ineqs) {
  for (const auto& e : eqs) add_one(cone, processed, e, true);
  for (const auto& i : ineqs) add_one(cone, processed, i, false);
}

Cone generators_of(std::size_t size, const std::vector<Vec>& eqs, const std::vector<Vec>& ineqs) {
  Cone cone;
  for (std::size_t i = 0; i < size; ++i) {
    Vec e(size, 0);
    e[i] = 1;
    cone.lines.push_back(std::move(e));
  }
  std::vector<Vec> processed;
  refine(cone, processed, eqs, ineqs);
  return cone;
}

}  // namespace dd

using dd::Vec;

namespace {

Vec positivity(std::size_t n) {
  Vec e(n + 1, 0);
  e[0] = 1;
  return e;
}

// Row of  r[0] + sum r[i+1] x_i  for a constraint over positions; the sense is
// ">= 0" (or "= 0" for equalities).
Vec constraint_row(std::size_t n, const Constraint& c) {
  Constraint k = c.normalized();
  Vec r(n + 1, 0);
  Integer sign = k.rel == Rel::EQ ? 1 : -1;
  r[0] = sign * k.expr.constant().get_num();
  for (const auto& [v, coeff] : k.expr.terms()) {
    assert(v < n);
    r[v + 1] = sign * coeff.get_num();
  }
  return r;
}

void sort_unique(std::vector<Vec>& vs) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
}

}  // namespace

void Polyhedron::check_dims(std::size_t n) {
  if (n > kMaxPolyDims)
    throw DimensionLimit("polyhedron with " + std::to_string(n) + " dimensions exceeds the limit of " +
                         std::to_string(kMaxPolyDims));
}

Polyhedron Polyhedron::top(std::size_t n) {
  check_dims(n);
  Polyhedron p(n);
  Vec origin(n + 1, 0);
  origin[0] = 1;
  p.rays_.push_back(std::move(origin));
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n + 1, 0);
    e[i + 1] = 1;
    p.lines_.push_back(std::move(e));
  }
  return p;
}

Polyhedron Polyhedron::bottom(std::size_t n) {
  check_dims(n);
  Polyhedron p(n);
  p.empty_ = true;
  return p;
}

void Polyhedron::set_from_cone(const dd::Cone& gens) {
  lines_ = gens.lines;
  rays_ = gens.rays;
  empty_ = std::none_of(rays_.begin(), rays_.end(), [](const Vec& g) { return g[0] > 0; });
  if (empty_) {
    lines_.clear();
    rays_.clear();
    eqs_.clear();
    ineqs_.clear();
    return;
  }
  sort_unique(lines_);
  sort_unique(rays_);
  minimize_constraints();
}

void Polyhedron::minimize_constraints() {
  dd::Cone dual = dd::generators_of(n_ + 1, lines_, rays_);
  eqs_ = std::move(dual.lines);
  ineqs_.clear();
  Vec pos = positivity(n_);
  for (auto& r : dual.rays)
    if (r != pos) ineqs_.push_back(std::move(r));
  sort_unique(eqs_);
  sort_unique(ineqs_);
}

Polyhedron Polyhedron::from_constraints(std::size_t n, const Conjunction& cs) {
  check_dims(n);
  std::vector<Vec> eqs, ineqs{positivity(n)};
  for (const auto& c : cs) {
    Constraint r = c.relaxed();
    if (r.is_trivially_true()) continue;
    if (r.is_trivially_false()) return bottom(n);
    (r.rel == Rel::EQ ? eqs : ineqs).push_back(constraint_row(n, r));
  }
  Polyhedron p(n);
  p.set_from_cone(dd::generators_of(n + 1, eqs, ineqs));
  return p;
}

Polyhedron Polyhedron::from_generators(std::size_t n, std::vector<Vec> points, std::vector<Vec> rays,
                                       std::vector<Vec> lines) {
  check_dims(n);
  if (points.empty()) return bottom(n);
  std::vector<Vec> all_rays;
  for (auto& v : points) {
    dd::normalize(v, false);
    all_rays.push_back(std::move(v));
  }
  for (auto& v : rays) {
    if (dd::is_zero(v)) continue;
    dd::normalize(v, false);
    all_rays.push_back(std::move(v));
  }
  std::vector<Vec> all_lines;
  for (auto& v : lines) {
    if (dd::is_zero(v)) continue;
    dd::normalize(v, true);
    all_lines.push_back(std::move(v));
  }
  // Constraints of the generated cone first, then minimal generators.
  dd::Cone dual = dd::generators_of(n + 1, all_lines, all_rays);
  std::vector<Vec> ineqs = dual.rays;
  ineqs.insert(ineqs.begin(), positivity(n));
  Polyhedron p(n);
  p.set_from_cone(dd::generators_of(n + 1, dual.lines, ineqs));
  return p;
}

Polyhedron Polyhedron::join(const Polyhedron& o) const {
  assert(n_ == o.n_);
  if (empty_) return o;
  if (o.empty_) return *this;
  std::vector<Vec> points, rays;
  for (const auto* src : {&rays_, &o.rays_})
    for (const auto& g : *src) (g[0] > 0 ? points : rays).push_back(g);
  std::vector<Vec> lines = lines_;
  lines.insert(lines.end(), o.lines_.begin(), o.lines_.end());
  return from_generators(n_, std::move(points), std::move(rays), std::move(lines));
}

Polyhedron Polyhedron::meet(const Polyhedron& o) const {
  assert(n_ == o.n_);
  if (empty_ || o.empty_) return bottom(n_);
  dd::Cone cone{lines_, rays_};
  std::vector<Vec> processed = ineqs_;
  processed.push_back(positivity(n_));
  dd::refine(cone, processed, o.eqs_, o.ineqs_);
  Polyhedron p(n_);
  p.set_from_cone(cone);
  return p;
}

Polyhedron Polyhedron::meet_constraints(const Conjunction& cs) const {
  if (empty_) return *this;
  std::vector<Vec> eqs, ineqs;
  for (const auto& c : cs) {
    Constraint r = c.relaxed();
    if (r.is_trivially_true()) continue;
    if (r.is_trivially_false()) return bottom(n_);
    (r.rel == Rel::EQ ? eqs : ineqs).push_back(constraint_row(n_, r));
  }
  if (eqs.empty() && ineqs.empty()) return *this;
  dd::Cone cone{lines_, rays_};
  std::vector<Vec> processed = ineqs_;
  processed.push_back(positivity(n_));
  dd::refine(cone, processed, eqs, ineqs);
  Polyhedron p(n_);
  p.set_from_cone(cone);
  return p;
}

namespace {

bool satisfies(const Vec& constraint, bool equality, const Vec& gen, bool is_line) {
  Integer d = dd::dot(constraint, gen);
  if (equality || is_line) return d == 0;
  return d >= 0;
}

}  // namespace

bool Polyhedron::leq(const Polyhedron& o) const {
  assert(n_ == o.n_);
  if (empty_) return true;
  if (o.empty_) return false;
  for (const auto& g : lines_) {
    for (const auto& c : o.eqs_)
      if (!satisfies(c, true, g, true)) return false;
    for (const auto& c : o.ineqs_)
      if (!satisfies(c, false, g, true)) return false;
  }
  for (const auto& g : rays_) {
    for (const auto& c : o.eqs_)
      if (!satisfies(c, true, g, false)) return false;
    for (const auto& c : o.ineqs_)
      if (!satisfies(c, false, g, false)) return false;
  }
  return true;
}

Polyhedron Polyhedron::widen(const Polyhedron& o) const {
  if (empty_) return o;
  Polyhedron next = join(o);
  // Inequalities of both sides, with equalities split into two halves.
  auto halves = [](const Polyhedron& p) {
    std::vector<Vec> out = p.ineqs_;
    for (const auto& e : p.eqs_) {
      out.push_back(e);
      Vec neg = e;
      for (auto& x : neg) x = -x;
      out.push_back(std::move(neg));
    }
    return out;
  };
  std::vector<Vec> mine = halves(*this);
  std::vector<Vec> theirs = halves(next);

  auto sat_signature = [this](const Vec& c) {
    std::vector<bool> sig;
    sig.reserve(rays_.size());
    for (const auto& g : rays_) sig.push_back(dd::dot(c, g) == 0);
    return sig;
  };

  std::vector<Vec> kept;
  std::set<std::vector<bool>> mine_sigs;
  for (const auto& c : mine) {
    mine_sigs.insert(sat_signature(c));
    bool stable = true;
    for (const auto& g : next.lines_)
      if (dd::dot(c, g) != 0) stable = false;
    for (const auto& g : next.rays_)
      if (dd::dot(c, g) < 0) stable = false;
    if (stable) kept.push_back(c);
  }
  // Constraints of the new value that play the role of one of ours on this
  // value's generators (makes the result independent of our representation).
  for (const auto& c : theirs)
    if (mine_sigs.count(sat_signature(c))) kept.push_back(c);

  std::vector<Vec> ineqs{positivity(n_)};
  ineqs.insert(ineqs.end(), kept.begin(), kept.end());
  Polyhedron p(n_);
  p.set_from_cone(dd::generators_of(n_ + 1, {}, ineqs));
  return p;
}

Polyhedron Polyhedron::image(const std::vector<std::optional<LinearExpr>>& exprs) const {
  std::size_t m = exprs.size();
  check_dims(m);
  if (empty_) return bottom(m);
  // Scale each output row to integers: out_k = (row_k . g) / den_k.
  std::vector<Vec> rows(m);
  std::vector<Integer> dens(m, 1);
  std::vector<Vec> fresh_lines;
  for (std::size_t k = 0; k < m; ++k) {
    if (!exprs[k]) {
      Vec e(m + 1, 0);
      e[k + 1] = 1;
      fresh_lines.push_back(std::move(e));
      continue;
    }
    const LinearExpr& f = *exprs[k];
    Integer l = f.constant().get_den();
    for (const auto& [v, c] : f.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    Vec row(n_ + 1, 0);
    row[0] = Rational(f.constant() * l).get_num();
    for (const auto& [v, c] : f.terms()) {
      assert(v < n_);
      row[v + 1] = Rational(c * l).get_num();
    }
    rows[k] = std::move(row);
    dens[k] = l;
  }
  Integer common = 1;
  for (const auto& d : dens) mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), d.get_mpz_t());

  auto transform = [&](const Vec& g) {
    Vec out(m + 1, 0);
    out[0] = g[0] * common;
    for (std::size_t k = 0; k < m; ++k) {
      if (!exprs[k]) continue;
      Integer scale = common / dens[k];
      out[k + 1] = dd::dot(rows[k], g) * scale;
    }
    return out;
  };

  std::vector<Vec> points, rays, lines = fresh_lines;
  for (const auto& g : rays_) (g[0] > 0 ? points : rays).push_back(transform(g));
  for (const auto& g : lines_) lines.push_back(transform(g));
  return from_generators(m, std::move(points), std::move(rays), std::move(lines));
}

Conjunction Polyhedron::to_constraints() const {
  if (empty_) return {Constraint::infeasible()};
  Conjunction out;
  auto to_expr = [](const Vec& r) {
    LinearExpr e{Rational(r[0])};
    for (std::size_t i = 1; i < r.size(); ++i) e.add_term(static_cast<VarId>(i - 1), Rational(r[i]));
    return e;
  };
  for (const auto& r : eqs_) out.push_back({to_expr(r), Rel::EQ});
  for (const auto& r : ineqs_) out.push_back({-to_expr(r), Rel::LE});
  return out;
}

bool Polyhedron::contains(const std::vector<Rational>& point) const {
  if (empty_) return false;
  // scale the point by the lcm of its denominators and stay in Z
  Integer l = 1;
  for (const auto& q : point)
    if (q.get_den() != 1) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  std::vector<Integer> z(n_);
  for (std::size_t i = 0; i < n_; ++i)
    z[i] = l == 1 ? point[i].get_num() : Integer(point[i].get_num() * (l / point[i].get_den()));
  Integer s;
  auto eval = [&](const Vec& r) -> const Integer& {
    s = l == 1 ? r[0] : Integer(r[0] * l);
    for (std::size_t i = 0; i < n_; ++i)
      if (r[i + 1] != 0) s += r[i + 1] * z[i];
    return s;
  };
  for (const auto& r : eqs_)
    if (sgn(eval(r)) != 0) return false;
  for (const auto& r : ineqs_)
    if (sgn(eval(r)) < 0) return false;
  return true;
}

bool Polyhedron::consistent() const {
  if (empty_) return lines_.empty() && rays_.empty();
  for (const auto& g : lines_) {
    for (const auto& c : eqs_)
      if (!satisfies(c, true, g, true)) return false;
    for (const auto& c : ineqs_)
      if (!satisfies(c, false, g, true)) return false;
  }
  for (const auto& g : rays_) {
    if (g[0] < 0) return false;
    for (const auto& c : eqs_)
      if (!satisfies(c, true, g, false)) return false;
    for (const auto& c : ineqs_)
      if (!satisfies(c, false, g, false)) return false;
  }
  return std::any_of(rays_.begin(), rays_.end(), [](const Vec& g) { return g[0] > 0; });
}

}  // namespace pagai
