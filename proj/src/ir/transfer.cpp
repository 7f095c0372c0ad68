#include "pagai/ir.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace pagai {

namespace {

struct SymState {
  const Dims* src = nullptr;
  std::map<VarId, LinearExpr> env;
  ParallelAssign* pa = nullptr;  // receives fresh symbols and guards
  bool gave_up = false;
  VarId next = kFreshBase;

  LinearExpr fresh() {
    VarId h = next++;
    if (pa) pa->fresh.push_back(h);
    return LinearExpr::var(h);
  }
};

bool in_dims(const Dims& d, VarId v) { return std::binary_search(d.begin(), d.end(), v); }

}  // namespace

PathTransfer::PathTransfer(const Cfg& cfg, const LiveByLinearity& lbl) : cfg_(cfg), lbl_(lbl) {
  def_of_.assign(cfg.vars.size(), nullptr);
  for (const auto& b : cfg.blocks)
    for (const auto& d : b.defs) def_of_[d.var] = &d;
}

namespace {

LinearExpr value_of(const std::vector<const Def*>& defs, SymState& st, VarId v);

LinearExpr subst(const std::vector<const Def*>& defs, SymState& st, const LinearExpr& e) {
  return e.substitute([&](VarId u) { return value_of(defs, st, u); });
}

LinearExpr value_of(const std::vector<const Def*>& defs, SymState& st, VarId v) {
  if (auto it = st.env.find(v); it != st.env.end()) return it->second;
  if (in_dims(*st.src, v)) return LinearExpr::var(v);
  LinearExpr r;
  if (v < defs.size() && defs[v] && defs[v]->rhs.kind == Rhs::Linear) {
    r = subst(defs, st, defs[v]->rhs.a);
  } else {
    st.gave_up = true;
    r = st.fresh();
  }
  st.env[v] = r;
  return r;
}

void exec_def(const std::vector<const Def*>& defs, SymState& st, const Def& d) {
  const Rhs& rhs = d.rhs;
  switch (rhs.kind) {
    case Rhs::Linear:
      st.env[d.var] = subst(defs, st, rhs.a);
      return;
    case Rhs::Div:
      if (rhs.integer && rhs.b.is_constant() && rhs.b.constant() != 0) {
        // truncating division by a constant: |n - q*d| <= |d| - 1
        LinearExpr n = subst(defs, st, rhs.a);
        LinearExpr q = st.fresh();
        Rational dv = rhs.b.constant();
        Rational ad = abs(dv);
        LinearExpr r = n - q * dv;
        LinearExpr slack(ad - 1);
        st.pa->guards.push_back(Constraint::le(r, slack));
        st.pa->guards.push_back(Constraint::le(-r, slack));
        st.env[d.var] = q;
        return;
      }
      break;
    default:
      break;
  }
  st.env[d.var] = st.fresh();
}

}  // namespace

ParallelAssign PathTransfer::along(BlockId from, const std::vector<EdgeId>& edges) const {
  BlockId to = edges.empty() ? from : cfg_.edges[edges.back()].dst;
  return along(from, edges, lbl_.dims[to]);
}

ParallelAssign PathTransfer::along(BlockId from, const std::vector<EdgeId>& edges, const Dims& out_dims) const {
  ParallelAssign pa;
  pa.sources = lbl_.dims[from];
  pa.targets = out_dims;
  SymState st;
  st.src = &pa.sources;
  st.pa = &pa;
  BlockId b = from;
  for (EdgeId e : edges) {
    const Edge& edge = cfg_.edges[e];
    if (edge.src != b) throw std::logic_error("PathTransfer: edge does not continue the path");
    for (const auto& d : cfg_.blocks[b].defs) exec_def(def_of_, st, d);
    if (edge.guard) {
      Constraint g = *edge.guard;
      g.expr = subst(def_of_, st, g.expr);
      pa.guards.push_back(g);
    }
    BlockId s = edge.dst;
    std::vector<std::pair<VarId, LinearExpr>> incoming;
    for (const auto& phi : cfg_.blocks[s].phis) {
      const LinearExpr* a = phi.arg_for(e);
      incoming.emplace_back(phi.var, a ? subst(def_of_, st, *a) : st.fresh());
    }
    for (auto& [v, x] : incoming) st.env[v] = std::move(x);
    b = s;
  }
  for (VarId v : out_dims) pa.exprs.push_back(value_of(def_of_, st, v));
  // constant guards: drop the true ones, keep a false one as is
  Conjunction kept;
  for (auto& g : pa.guards) {
    if (g.expr.is_constant()) {
      Rational c = g.expr.constant();
      bool ok = g.rel == Rel::LE ? c <= 0 : g.rel == Rel::LT ? c < 0 : c == 0;
      if (ok) continue;
    }
    kept.push_back(std::move(g));
  }
  pa.guards = std::move(kept);
  // unused symbols only cost dimensions
  std::set<VarId> used;
  for (const auto& e : pa.exprs)
    for (const auto& [v, c] : e.terms()) used.insert(v);
  for (const auto& g : pa.guards)
    for (const auto& [v, c] : g.expr.terms()) used.insert(v);
  std::vector<VarId> fresh;
  for (VarId h : pa.fresh)
    if (used.count(h)) fresh.push_back(h);
  pa.fresh = std::move(fresh);
  return pa;
}

std::optional<LinearExpr> PathTransfer::resolve_at(BlockId p, VarId v) const {
  ParallelAssign scratch;
  SymState st;
  st.src = &lbl_.dims[p];
  st.pa = &scratch;
  LinearExpr r = value_of(def_of_, st, v);
  if (st.gave_up) return std::nullopt;
  return r;
}

std::vector<std::pair<VarId, LinearExpr>> derived_equations(const PathTransfer& pt, BlockId p) {
  std::vector<std::pair<VarId, LinearExpr>> out;
  const auto& lbl = pt.lbl().lbl[p];
  const Dims& dims = pt.lbl().dims[p];
  for (VarId v : lbl) {
    if (in_dims(dims, v)) continue;
    if (auto e = pt.resolve_at(p, v)) out.emplace_back(v, *e);
  }
  return out;
}

}  // namespace pagai
