#include "pagai/dominators.hpp"

#include <algorithm>

namespace pagai {

bool Dominators::dominates(BlockId a, BlockId b) const {
  if (!reachable(a) || !reachable(b)) return false;
  while (b != kNoBlock) {
    if (a == b) return true;
    b = idom[b];
  }
  return false;
}

Dominators compute_dominators(const Cfg& cfg) {
  const std::size_t n = cfg.blocks.size();
  Dominators d;
  d.idom.assign(n, kNoBlock);
  d.rpo_index.assign(n, -1);
  d.children.assign(n, {});
  d.frontier.assign(n, {});

  // iterative DFS, successors in block-id order
  std::vector<BlockId> post;
  std::vector<char> seen(n, 0);
  std::vector<std::pair<BlockId, std::size_t>> stack{{cfg.entry, 0}};
  seen[cfg.entry] = 1;
  std::vector<std::vector<BlockId>> succ(n);
  for (BlockId b = 0; b < n; ++b) {
    succ[b] = cfg.successors(b);
    std::sort(succ[b].begin(), succ[b].end());
  }
  while (!stack.empty()) {
    auto& [b, k] = stack.back();
    if (k < succ[b].size()) {
      BlockId s = succ[b][k++];
      if (!seen[s]) {
        seen[s] = 1;
        stack.push_back({s, 0});
      }
    } else {
      post.push_back(b);
      stack.pop_back();
    }
  }
  d.rpo.assign(post.rbegin(), post.rend());
  for (std::size_t i = 0; i < d.rpo.size(); ++i) d.rpo_index[d.rpo[i]] = static_cast<int>(i);

  auto intersect = [&](BlockId a, BlockId b) {
    while (a != b) {
      while (d.rpo_index[a] > d.rpo_index[b]) a = d.idom[a];
      while (d.rpo_index[b] > d.rpo_index[a]) b = d.idom[b];
    }
    return a;
  };
  d.idom[cfg.entry] = cfg.entry;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 1; i < d.rpo.size(); ++i) {
      BlockId b = d.rpo[i];
      BlockId nid = kNoBlock;
      for (BlockId p : cfg.predecessors(b)) {
        if (d.rpo_index[p] < 0 || d.idom[p] == kNoBlock) continue;
        nid = nid == kNoBlock ? p : intersect(p, nid);
      }
      if (nid != d.idom[b]) {
        d.idom[b] = nid;
        changed = true;
      }
    }
  }
  d.idom[cfg.entry] = kNoBlock;
  for (BlockId b : d.rpo)
    if (d.idom[b] != kNoBlock) d.children[d.idom[b]].push_back(b);
  for (auto& c : d.children) std::sort(c.begin(), c.end());

  for (BlockId b : d.rpo) {
    auto preds = cfg.predecessors(b);
    if (preds.size() < 2) continue;
    for (BlockId p : preds) {
      if (!d.reachable(p)) continue;
      BlockId runner = p;
      while (runner != kNoBlock && runner != d.idom[b]) {
        auto& f = d.frontier[runner];
        if (std::find(f.begin(), f.end(), b) == f.end()) f.push_back(b);
        runner = d.idom[runner];
      }
    }
  }
  return d;
}

std::vector<BlockId> iterated_frontier(const Dominators& dom, const std::vector<BlockId>& blocks) {
  std::vector<char> in(dom.idom.size(), 0), queued(dom.idom.size(), 0);
  std::vector<BlockId> work = blocks, out;
  for (BlockId b : blocks) queued[b] = 1;
  while (!work.empty()) {
    BlockId b = work.back();
    work.pop_back();
    for (BlockId f : dom.frontier[b]) {
      if (in[f]) continue;
      in[f] = 1;
      out.push_back(f);
      if (!queued[f]) {
        queued[f] = 1;
        work.push_back(f);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pagai
