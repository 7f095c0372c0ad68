#include "pagai/domains/abstract_value.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace pagai {

std::string to_string(DomainKind d) {
  switch (d) {
    case DomainKind::Box: return "box";
    case DomainKind::Octagon: return "oct";
    case DomainKind::Polyhedron: return "pk";
  }
  return "?";
}

std::optional<DomainKind> parse_domain(const std::string& s) {
  if (s == "box") return DomainKind::Box;
  if (s == "oct") return DomainKind::Octagon;
  if (s == "pk") return DomainKind::Polyhedron;
  return std::nullopt;
}

void check_dimension_guard(DomainKind kind, std::size_t n) {
  if (kind == DomainKind::Polyhedron && n > kMaxPolyDims)
    throw DimensionLimit("polyhedron with " + std::to_string(n) + " dimensions exceeds the limit of " +
                         std::to_string(kMaxPolyDims));
}

AbstractValue AbstractValue::top(DomainKind kind, Dims dims) {
  std::size_t n = dims.size();
  switch (kind) {
    case DomainKind::Box: return {kind, std::move(dims), Box::top(n)};
    case DomainKind::Octagon: return {kind, std::move(dims), Octagon::top(n)};
    case DomainKind::Polyhedron: return {kind, std::move(dims), Polyhedron::top(n)};
  }
  throw std::logic_error("unknown domain");
}

AbstractValue AbstractValue::bottom(DomainKind kind, Dims dims) {
  std::size_t n = dims.size();
  switch (kind) {
    case DomainKind::Box: return {kind, std::move(dims), Box::bottom(n)};
    case DomainKind::Octagon: return {kind, std::move(dims), Octagon::bottom(n)};
    case DomainKind::Polyhedron: return {kind, std::move(dims), Polyhedron::bottom(n)};
  }
  throw std::logic_error("unknown domain");
}

AbstractValue AbstractValue::from_constraints(DomainKind kind, Dims dims, const Conjunction& cs) {
  return top(kind, std::move(dims)).meet_constraints(cs);
}

bool AbstractValue::is_bottom() const {
  return std::visit([](const auto& p) { return p.is_bottom(); }, payload_);
}

bool AbstractValue::is_top() const {
  if (is_bottom()) return false;
  return to_constraints().empty();
}

AbstractValue AbstractValue::join(const AbstractValue& o) const {
  assert(kind_ == o.kind_ && dims_ == o.dims_);
  return std::visit(
      [&](const auto& p) -> AbstractValue {
        using T = std::decay_t<decltype(p)>;
        return {kind_, dims_, p.join(std::get<T>(o.payload_))};
      },
      payload_);
}

AbstractValue AbstractValue::meet(const AbstractValue& o) const {
  assert(kind_ == o.kind_ && dims_ == o.dims_);
  return std::visit(
      [&](const auto& p) -> AbstractValue {
        using T = std::decay_t<decltype(p)>;
        return {kind_, dims_, p.meet(std::get<T>(o.payload_))};
      },
      payload_);
}

AbstractValue AbstractValue::widen(const AbstractValue& o) const {
  assert(kind_ == o.kind_ && dims_ == o.dims_);
  return std::visit(
      [&](const auto& p) -> AbstractValue {
        using T = std::decay_t<decltype(p)>;
        return {kind_, dims_, p.widen(std::get<T>(o.payload_))};
      },
      payload_);
}

bool AbstractValue::leq(const AbstractValue& o) const {
  assert(kind_ == o.kind_ && dims_ == o.dims_);
  return std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        return p.leq(std::get<T>(o.payload_));
      },
      payload_);
}

bool AbstractValue::to_positions(const Dims& dims, const Conjunction& cs, Conjunction& out) {
  bool all = true;
  for (const auto& c : cs) {
    LinearExpr e(c.expr.constant());
    bool ok = true;
    for (const auto& [v, a] : c.expr.terms()) {
      auto it = std::lower_bound(dims.begin(), dims.end(), v);
      if (it == dims.end() || *it != v) {
        ok = false;
        break;
      }
      e.add_term(static_cast<VarId>(it - dims.begin()), a);
    }
    if (ok)
      out.push_back({std::move(e), c.rel});
    else
      all = false;
  }
  return all;
}

Conjunction AbstractValue::from_positions(const Conjunction& cs) const {
  Conjunction out;
  for (const auto& c : cs) {
    LinearExpr e(c.expr.constant());
    for (const auto& [p, a] : c.expr.terms()) e.add_term(dims_[p], a);
    out.push_back({std::move(e), c.rel});
  }
  return out;
}

AbstractValue AbstractValue::meet_constraints(const Conjunction& cs) const {
  // Constraints over non-coordinates are dropped: existential, hence sound.
  Conjunction pos;
  to_positions(dims_, cs, pos);
  return std::visit([&](const auto& p) -> AbstractValue { return {kind_, dims_, p.meet_constraints(pos)}; },
                    payload_);
}

AbstractValue AbstractValue::transfer(const ParallelAssign& pa) const {
  assert(pa.sources == dims_);
  assert(pa.targets.size() == pa.exprs.size());
  assert(std::is_sorted(pa.targets.begin(), pa.targets.end()));
  const std::size_t n = dims_.size(), f = pa.fresh.size();

  // Positions: sources first, then fresh symbols.
  auto position = [&](VarId v) -> VarId {
    auto it = std::lower_bound(dims_.begin(), dims_.end(), v);
    if (it != dims_.end() && *it == v) return static_cast<VarId>(it - dims_.begin());
    auto jt = std::find(pa.fresh.begin(), pa.fresh.end(), v);
    if (jt == pa.fresh.end()) throw std::logic_error("transfer: unknown symbol " + default_name(v));
    return static_cast<VarId>(n + (jt - pa.fresh.begin()));
  };
  auto translate = [&](const LinearExpr& e) {
    LinearExpr r(e.constant());
    for (const auto& [v, a] : e.terms()) r.add_term(position(v), a);
    return r;
  };

  std::vector<std::optional<LinearExpr>> extend(n + f);
  for (std::size_t i = 0; i < n; ++i) extend[i] = LinearExpr::var(static_cast<VarId>(i));
  Conjunction guards;
  for (const auto& g : pa.guards) guards.push_back({translate(g.expr), g.rel});
  std::vector<std::optional<LinearExpr>> out;
  out.reserve(pa.exprs.size());
  for (const auto& e : pa.exprs) out.emplace_back(translate(e));

  check_dimension_guard(kind_, n + f);
  return std::visit(
      [&](const auto& p) -> AbstractValue {
        auto widened = f == 0 ? p : p.image(extend);
        auto guarded = guards.empty() ? widened : widened.meet_constraints(guards);
        return {kind_, pa.targets, guarded.image(out)};
      },
      payload_);
}

AbstractValue AbstractValue::adapt_dims(const Dims& new_dims) const {
  if (new_dims == dims_) return *this;
  check_dimension_guard(kind_, new_dims.size());
  std::vector<std::optional<LinearExpr>> exprs(new_dims.size());
  for (std::size_t k = 0; k < new_dims.size(); ++k) {
    auto it = std::lower_bound(dims_.begin(), dims_.end(), new_dims[k]);
    if (it != dims_.end() && *it == new_dims[k])
      exprs[k] = LinearExpr::var(static_cast<VarId>(it - dims_.begin()));
  }
  return std::visit([&](const auto& p) -> AbstractValue { return {kind_, new_dims, p.image(exprs)}; },
                    payload_);
}

Conjunction AbstractValue::to_constraints() const {
  return from_positions(std::visit([](const auto& p) { return p.to_constraints(); }, payload_));
}

bool AbstractValue::contains_point(const std::vector<Rational>& point) const {
  return std::visit([&](const auto& p) { return p.contains(point); }, payload_);
}

bool AbstractValue::contains(const std::function<Rational(VarId)>& value) const {
  std::vector<Rational> pt;
  pt.reserve(dims_.size());
  for (VarId v : dims_) pt.push_back(value(v));
  return contains_point(pt);
}

std::string AbstractValue::str(const NameFn& name) const {
  if (is_bottom()) return "false";
  Conjunction cs = to_constraints();
  if (cs.empty()) return "true";
  std::ostringstream os;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) os << "; ";
    os << cs[i].str(name);
  }
  return os.str();
}

}  // namespace pagai
