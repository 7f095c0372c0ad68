#include "pagai/dominators.hpp"
#include "pagai/frontend/passes.hpp"

#include <algorithm>
#include <set>

namespace pagai {

namespace {

using VarSet = std::vector<char>;

// Pre-SSA live-in sets (guards are read at the end of their source block,
// observed variables at exit).
std::vector<VarSet> live_in_sets(const Cfg& cfg) {
  const std::size_t nv = cfg.vars.size(), nb = cfg.blocks.size();
  std::vector<VarSet> gen(nb, VarSet(nv, 0)), kill(nb, VarSet(nv, 0)), in(nb, VarSet(nv, 0));
  for (BlockId b = 0; b < nb; ++b) {
    const Block& bl = cfg.blocks[b];
    for (const auto& d : bl.defs) {
      for (VarId u : d.rhs.uses())
        if (!kill[b][u]) gen[b][u] = 1;
      kill[b][d.var] = 1;
    }
    for (EdgeId e : bl.out)
      if (cfg.edges[e].guard)
        for (const auto& [u, c] : cfg.edges[e].guard->expr.terms())
          if (!kill[b][u]) gen[b][u] = 1;
    if (b == cfg.exit)
      for (const auto& [n, v] : cfg.observed)
        if (!kill[b][v]) gen[b][v] = 1;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (BlockId b = static_cast<BlockId>(nb); b-- > 0;) {
      VarSet out(nv, 0);
      for (BlockId s : cfg.successors(b))
        for (std::size_t v = 0; v < nv; ++v) out[v] |= in[s][v];
      for (std::size_t v = 0; v < nv; ++v) {
        char x = gen[b][v] || (out[v] && !kill[b][v]);
        if (x != in[b][v]) {
          in[b][v] = x;
          changed = true;
        }
      }
    }
  }
  return in;
}

class Renamer {
 public:
  Renamer(const Cfg& in, const Dominators& dom) : in_(in), dom_(dom) {}

  Cfg run(const std::vector<std::vector<VarId>>& phi_vars) {
    out_.function = in_.function;
    out_.assert_lines = in_.assert_lines;
    out_.edges = in_.edges;
    out_.blocks.resize(in_.blocks.size());
    for (BlockId b = 0; b < in_.blocks.size(); ++b) {
      out_.blocks[b].in = in_.blocks[b].in;
      out_.blocks[b].out = in_.blocks[b].out;
      out_.blocks[b].line = in_.blocks[b].line;
      for (VarId v : phi_vars[b]) {
        out_.blocks[b].phis.push_back({v, {}});  // var still the original id; renamed below
      }
    }
    out_.entry = in_.entry;
    out_.exit = in_.exit;
    out_.fail = in_.fail;
    out_.assume_exit = in_.assume_exit;
    out_.nonlinear = in_.nonlinear;
    out_.diagnostics = in_.diagnostics;
    out_.ssa = true;
    stacks_.assign(in_.vars.size(), {});
    counter_.assign(in_.vars.size(), 0);
    undef_.assign(in_.vars.size(), kNone);
    phi_orig_.resize(in_.blocks.size());
    for (BlockId b = 0; b < in_.blocks.size(); ++b) phi_orig_[b] = phi_vars[b];
    rename(in_.entry);
    // undefined reads get a version defined at entry
    std::vector<Def> pre;
    for (VarId v = 0; v < undef_.size(); ++v)
      if (undef_[v] != kNone) pre.push_back({undef_[v], Rhs::undef()});
    auto& ed = out_.blocks[in_.entry].defs;
    ed.insert(ed.begin(), pre.begin(), pre.end());
    tidy_names();
    return std::move(out_);
  }

 private:
  static constexpr VarId kNone = ~VarId{0};
  const Cfg& in_;
  const Dominators& dom_;
  Cfg out_;
  std::vector<std::vector<VarId>> stacks_;
  std::vector<int> counter_;
  std::vector<VarId> undef_;
  std::vector<std::vector<VarId>> phi_orig_;
  std::vector<VarId> versions_of_;  // new var -> original var

  VarId fresh(VarId v) {
    const VarInfo& info = in_.vars[v];
    VarId n = out_.add_var(info.name + "." + std::to_string(counter_[v]++), info.name, info.integer, info.line);
    versions_of_.push_back(v);
    stacks_[v].push_back(n);
    return n;
  }

  VarId current(VarId v) {
    if (!stacks_[v].empty()) return stacks_[v].back();
    if (undef_[v] == kNone) {
      const VarInfo& info = in_.vars[v];
      undef_[v] = out_.add_var(info.name + ".u", info.name, info.integer, info.line);
      versions_of_.push_back(v);
    }
    return undef_[v];
  }

  LinearExpr rename_expr(const LinearExpr& e) {
    return e.substitute([&](VarId v) { return LinearExpr::var(current(v)); });
  }

  void rename(BlockId root) {
    // explicit stack: (block, phase)
    std::vector<std::pair<BlockId, bool>> todo{{root, false}};
    std::vector<std::vector<VarId>> pushed_log;
    while (!todo.empty()) {
      auto [b, leaving] = todo.back();
      todo.pop_back();
      if (leaving) {
        for (VarId v : pushed_log.back()) stacks_[v].pop_back();
        pushed_log.pop_back();
        continue;
      }
      std::vector<VarId> pushed;
      Block& ob = out_.blocks[b];
      for (std::size_t k = 0; k < ob.phis.size(); ++k) {
        VarId orig = phi_orig_[b][k];
        ob.phis[k].var = fresh(orig);
        pushed.push_back(orig);
      }
      for (const Def& d : in_.blocks[b].defs) {
        Rhs r = d.rhs;
        r.substitute([&](VarId v) { return LinearExpr::var(current(v)); });
        VarId nv = fresh(d.var);
        pushed.push_back(d.var);
        ob.defs.push_back({nv, std::move(r)});
      }
      for (EdgeId e : in_.blocks[b].out) {
        if (in_.edges[e].guard) {
          const Constraint& g = *in_.edges[e].guard;
          out_.edges[e].guard = Constraint{rename_expr(g.expr), g.rel};
        }
        BlockId s = in_.edges[e].dst;
        for (std::size_t k = 0; k < phi_orig_[s].size(); ++k)
          out_.blocks[s].phis[k].args.emplace_back(e, LinearExpr::var(current(phi_orig_[s][k])));
      }
      if (b == in_.exit)
        for (const auto& [n, v] : in_.observed) out_.observed.emplace_back(n, current(v));
      pushed_log.push_back(std::move(pushed));
      todo.push_back({b, true});
      const auto& kids = dom_.children[b];
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) todo.push_back({*it, false});
    }
    // phi args in in-edge order
    for (BlockId b = 0; b < out_.blocks.size(); ++b)
      for (auto& phi : out_.blocks[b].phis) {
        const auto& ins = out_.blocks[b].in;
        std::stable_sort(phi.args.begin(), phi.args.end(), [&](const auto& x, const auto& y) {
          return std::find(ins.begin(), ins.end(), x.first) < std::find(ins.begin(), ins.end(), y.first);
        });
      }
  }

  // Temporaries defined once keep their plain name.
  void tidy_names() {
    std::vector<int> versions(in_.vars.size(), 0);
    for (VarId v : versions_of_) ++versions[v];
    for (VarId n = 0; n < out_.vars.size(); ++n) {
      VarId o = versions_of_[n];
      const std::string& base = in_.vars[o].name;
      if (versions[o] == 1 && !base.empty() && base[0] == '_') out_.vars[n].name = base;
    }
  }
};

}  // namespace

Cfg to_ssa(const Cfg& cfg) {
  Dominators dom = compute_dominators(cfg);
  auto live = live_in_sets(cfg);
  std::vector<std::vector<VarId>> phi_vars(cfg.blocks.size());
  std::vector<std::vector<BlockId>> defsites(cfg.vars.size());
  for (BlockId b = 0; b < cfg.blocks.size(); ++b) {
    if (!dom.reachable(b)) continue;
    for (const auto& d : cfg.blocks[b].defs) {
      auto& ds = defsites[d.var];
      if (ds.empty() || ds.back() != b) ds.push_back(b);
    }
  }
  for (VarId v = 0; v < cfg.vars.size(); ++v) {
    if (defsites[v].empty()) continue;
    for (BlockId b : iterated_frontier(dom, defsites[v]))
      if (live[b][v] && cfg.blocks[b].in.size() >= 2) phi_vars[b].push_back(v);
  }
  Renamer r(cfg, dom);
  return r.run(phi_vars);
}

Cfg build_ssa_cfg(const Program& p, const std::string& function, const FrontendOptions& opt) {
  Program inl = inline_calls(p, opt.inline_depth);
  const Function* f = inl.find(function);
  if (!f) throw std::runtime_error("no function named " + function);
  LowerOptions lo;
  lo.observe_exit = opt.observe_exit && function == "main";
  Cfg cfg = lower_function(*f, lo);
  if (opt.unroll) cfg = unroll_loops_once(cfg);
  return to_ssa(cfg);
}

}  // namespace pagai
