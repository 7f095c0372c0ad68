#pragma once

#include "pagai/cfg.hpp"

#include <vector>

namespace pagai {

struct Dominators {
  std::vector<BlockId> idom;                   // kNoBlock for entry and unreachable blocks
  std::vector<BlockId> rpo;                    // reverse postorder of reachable blocks
  std::vector<int> rpo_index;                  // -1 when unreachable
  std::vector<std::vector<BlockId>> children;  // dominator tree
  std::vector<std::vector<BlockId>> frontier;

  bool reachable(BlockId b) const { return rpo_index[b] >= 0; }
  bool dominates(BlockId a, BlockId b) const;
};

/// Cooper-Harvey-Kennedy iteration over reverse postorder, then frontiers.
Dominators compute_dominators(const Cfg& cfg);

/// Iterated dominance frontier of a block set.
std::vector<BlockId> iterated_frontier(const Dominators& dom, const std::vector<BlockId>& blocks);

}  // namespace pagai
