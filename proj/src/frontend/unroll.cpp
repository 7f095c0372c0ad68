#include "pagai/dominators.hpp"
#include "pagai/frontend/passes.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pagai {

namespace {

struct NaturalLoop {
  BlockId header;
  std::vector<BlockId> body;  // sorted, includes header
};

std::vector<NaturalLoop> natural_loops(const Cfg& cfg, const Dominators& dom, std::vector<std::string>& diags) {
  std::map<BlockId, std::set<BlockId>> by_header;
  for (const Edge& e : cfg.edges) {
    if (!dom.reachable(e.src)) continue;
    if (dom.dominates(e.dst, e.src)) {
      auto& body = by_header[e.dst];
      body.insert(e.dst);
      std::vector<BlockId> work;
      if (body.insert(e.src).second) work.push_back(e.src);
      while (!work.empty()) {
        BlockId b = work.back();
        work.pop_back();
        for (BlockId p : cfg.predecessors(b))
          if (dom.reachable(p) && body.insert(p).second) work.push_back(p);
      }
    } else if (dom.rpo_index[e.dst] <= dom.rpo_index[e.src]) {
      // retreating edge whose target does not dominate its source
      diags.push_back(cfg.function + ": irreducible region at " + cfg.block_name(e.dst) + ", not unrolled");
    }
  }
  std::vector<NaturalLoop> loops;
  for (auto& [h, body] : by_header) loops.push_back({h, {body.begin(), body.end()}});
  std::stable_sort(loops.begin(), loops.end(),
                   [](const NaturalLoop& a, const NaturalLoop& b) { return a.body.size() > b.body.size(); });
  return loops;
}

void peel(Cfg& cfg, const NaturalLoop& loop) {
  auto inside = [&](BlockId b) { return std::binary_search(loop.body.begin(), loop.body.end(), b); };
  std::map<BlockId, BlockId> copy;
  const BlockId first_copy = static_cast<BlockId>(cfg.blocks.size());
  for (BlockId b : loop.body) {
    BlockId c = cfg.add_block(cfg.blocks[b].line);
    cfg.blocks[c].defs = cfg.blocks[b].defs;
    copy[b] = c;
  }
  const std::size_t n_edges = cfg.edges.size();
  for (EdgeId e = 0; e < n_edges; ++e) {
    Edge ed = cfg.edges[e];
    if (!inside(ed.src)) continue;
    BlockId dst = ed.dst;
    if (inside(dst) && dst != loop.header) dst = copy[dst];
    EdgeId ne = cfg.add_edge(copy[ed.src], dst, ed.guard);
    cfg.edges[ne].line = ed.line;
  }
  std::vector<EdgeId> entering;
  for (EdgeId e : cfg.blocks[loop.header].in)
    if (!inside(cfg.edges[e].src) && cfg.edges[e].src < first_copy) entering.push_back(e);
  for (EdgeId e : entering) cfg.redirect(e, copy[loop.header]);
}

}  // namespace

Cfg unroll_loops_once(const Cfg& in) {
  Cfg cfg = in;
  Dominators dom = compute_dominators(cfg);
  auto loops = natural_loops(cfg, dom, cfg.diagnostics);
  for (const auto& loop : loops) peel(cfg, loop);
  if (!loops.empty()) cfg.prune();
  return cfg;
}

}  // namespace pagai
