#include "pagai/ir.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace pagai {

namespace {

std::vector<BlockId> sorted_successors(const Cfg& cfg, BlockId b) {
  auto s = cfg.successors(b);
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

std::set<BlockId> compute_widening_points(const Cfg& cfg) {
  std::set<BlockId> pw;
  const std::size_t n = cfg.blocks.size();
  std::vector<char> color(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::pair<BlockId, std::size_t>> stack{{cfg.entry, 0}};
  std::vector<std::vector<BlockId>> succ(n);
  for (BlockId b = 0; b < n; ++b) succ[b] = sorted_successors(cfg, b);
  color[cfg.entry] = 1;
  while (!stack.empty()) {
    auto& [b, k] = stack.back();
    if (k < succ[b].size()) {
      BlockId s = succ[b][k++];
      if (color[s] == 1)
        pw.insert(s);
      else if (color[s] == 0) {
        color[s] = 1;
        stack.push_back({s, 0});
      }
    } else {
      color[b] = 2;
      stack.pop_back();
    }
  }
  return pw;
}

std::vector<std::vector<BlockId>> scc_topo_order(const Cfg& cfg) {
  const std::size_t n = cfg.blocks.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on(n, 0);
  std::vector<BlockId> stack;
  std::vector<std::vector<BlockId>> out;
  int counter = 0;
  std::function<void(BlockId)> strong = [&](BlockId v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = 1;
    for (BlockId w : sorted_successors(cfg, v)) {
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<BlockId> comp;
      BlockId w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = 0;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  strong(cfg.entry);
  std::reverse(out.begin(), out.end());
  // blocks unreachable from entry go last
  std::size_t reached = out.size();
  for (BlockId b = 0; b < n; ++b)
    if (index[b] < 0) strong(b);
  std::reverse(out.begin() + static_cast<long>(reached), out.end());
  return out;
}

bool acyclic_without(const Cfg& cfg, const std::set<BlockId>& cut) {
  const std::size_t n = cfg.blocks.size();
  std::vector<char> color(n, 0);
  std::function<bool(BlockId)> dfs = [&](BlockId b) {
    color[b] = 1;
    for (BlockId s : cfg.successors(b)) {
      if (cut.count(s)) continue;
      if (color[s] == 1) return false;
      if (color[s] == 0 && !dfs(s)) return false;
    }
    color[b] = 2;
    return true;
  };
  for (BlockId b = 0; b < n; ++b)
    if (!cut.count(b) && color[b] == 0 && !dfs(b)) return false;
  return true;
}

LiveByLinearity live_by_linearity_full(const Cfg& cfg) {
  const std::size_t nb = cfg.blocks.size(), nv = cfg.vars.size();
  std::vector<std::vector<char>> upward(nb, std::vector<char>(nv, 0)), defined(nb, std::vector<char>(nv, 0));
  std::vector<std::vector<char>> phidef(nb, std::vector<char>(nv, 0));
  std::vector<const Rhs*> linear_def(nv, nullptr);
  for (BlockId b = 0; b < nb; ++b) {
    const Block& bl = cfg.blocks[b];
    for (const auto& p : bl.phis) phidef[b][p.var] = 1;
    for (const auto& d : bl.defs) {
      for (VarId u : d.rhs.uses())
        if (!defined[b][u]) upward[b][u] = 1;
      defined[b][d.var] = 1;
      if (d.rhs.kind == Rhs::Linear) linear_def[d.var] = &d.rhs;
    }
    for (EdgeId e : bl.out)
      if (cfg.edges[e].guard)
        for (const auto& [u, c] : cfg.edges[e].guard->expr.terms())
          if (!defined[b][u]) upward[b][u] = 1;
    if (b == cfg.exit)
      for (const auto& [name, v] : cfg.observed) upward[b][v] = 1;
  }
  std::vector<std::vector<char>> in(nb, std::vector<char>(nv, 0));
  bool changed = true;
  while (changed) {
    changed = false;
    for (BlockId b = static_cast<BlockId>(nb); b-- > 0;) {
      std::vector<char> out(nv, 0);
      for (EdgeId e : cfg.blocks[b].out) {
        BlockId s = cfg.edges[e].dst;
        for (std::size_t v = 0; v < nv; ++v)
          if (in[s][v] && !phidef[s][v]) out[v] = 1;
        for (const auto& phi : cfg.blocks[s].phis)
          if (const LinearExpr* a = phi.arg_for(e))
            for (const auto& [u, c] : a->terms()) out[u] = 1;
      }
      for (std::size_t v = 0; v < nv; ++v) {
        char x = upward[b][v] || (out[v] && !defined[b][v]);
        if (x != in[b][v]) {
          in[b][v] = x;
          changed = true;
        }
      }
    }
  }
  LiveByLinearity r;
  r.live.resize(nb);
  r.lbl.resize(nb);
  r.dims.resize(nb);
  for (BlockId b = 0; b < nb; ++b) {
    std::vector<char> set = in[b];
    std::vector<VarId> work;
    for (VarId v = 0; v < nv; ++v)
      if (set[v]) {
        r.live[b].push_back(v);
        work.push_back(v);
      }
    while (!work.empty()) {
      VarId v = work.back();
      work.pop_back();
      if (!linear_def[v] || phidef[b][v]) continue;
      for (const auto& [u, c] : linear_def[v]->a.terms())
        if (!set[u]) {
          set[u] = 1;
          work.push_back(u);
        }
    }
    for (VarId v = 0; v < nv; ++v) {
      if (!set[v]) continue;
      r.lbl[b].push_back(v);
      if (!linear_def[v] || phidef[b][v]) r.dims[b].push_back(v);
    }
  }
  return r;
}

std::vector<Dims> live_by_linearity(const Cfg& cfg) { return live_by_linearity_full(cfg).dims; }

bool CfgAnalysisInfo::is_pr(BlockId b) const {
  return std::binary_search(analysis_points.begin(), analysis_points.end(), b);
}

CfgAnalysisInfo analyze_cfg(const Cfg& cfg) {
  CfgAnalysisInfo info;
  info.widening_points = compute_widening_points(cfg);
  info.analysis_points.assign(info.widening_points.begin(), info.widening_points.end());
  if (!info.widening_points.count(cfg.entry)) info.analysis_points.push_back(cfg.entry);
  std::sort(info.analysis_points.begin(), info.analysis_points.end());
  info.scc_order = scc_topo_order(cfg);
  info.scc_of.assign(cfg.blocks.size(), -1);
  for (std::size_t k = 0; k < info.scc_order.size(); ++k)
    for (BlockId b : info.scc_order[k]) info.scc_of[b] = static_cast<int>(k);
  info.lbl = live_by_linearity_full(cfg);
  return info;
}

std::string dump_cfg(const Cfg& cfg, const CfgAnalysisInfo& info) {
  NameFn name = cfg.namer();
  std::ostringstream head;
  head << "P_W {";
  bool first = true;
  for (BlockId b : info.widening_points) {
    head << (first ? "" : ", ") << cfg.block_name(b);
    first = false;
  }
  head << "}\nP_R {";
  first = true;
  for (BlockId b : info.analysis_points) {
    head << (first ? "" : ", ") << cfg.block_name(b);
    first = false;
  }
  head << "}\nSCC";
  for (const auto& comp : info.scc_order) {
    head << " {";
    for (std::size_t k = 0; k < comp.size(); ++k) head << (k ? " " : "") << cfg.block_name(comp[k]);
    head << "}";
  }
  head << "\n";
  std::string body = cfg.dump([&](BlockId b) {
    std::ostringstream os;
    if (info.is_pw(b)) os << " P_W";
    if (info.is_pr(b)) os << " P_R";
    os << " dims(";
    const Dims& d = info.dims(b);
    for (std::size_t k = 0; k < d.size(); ++k) os << (k ? ", " : "") << name(d[k]);
    os << ")";
    return os.str();
  });
  // keep the "function" line first
  auto nl = body.find('\n');
  return body.substr(0, nl + 1) + head.str() + body.substr(nl + 1);
}

}  // namespace pagai
