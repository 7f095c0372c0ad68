#pragma once

#include "pagai/cfg.hpp"
#include "pagai/parallel_assign.hpp"

#include <set>
#include <string>
#include <vector>

namespace pagai {

/// Targets of retreating edges of a DFS from entry, successors visited in
/// block-id order.
std::set<BlockId> compute_widening_points(const Cfg& cfg);

/// Tarjan's SCCs listed so that every edge goes forward or stays inside.
std::vector<std::vector<BlockId>> scc_topo_order(const Cfg& cfg);

struct LiveByLinearity {
  std::vector<std::vector<VarId>> live;  // SSA liveness at block entry (after phis)
  std::vector<std::vector<VarId>> lbl;   // closure under operands of linear definitions
  std::vector<Dims> dims;                // lbl minus linearly defined variables
};

/// Dimensions per block; see LiveByLinearity.
std::vector<Dims> live_by_linearity(const Cfg& cfg);
LiveByLinearity live_by_linearity_full(const Cfg& cfg);

struct CfgAnalysisInfo {
  std::set<BlockId> widening_points;
  std::vector<BlockId> analysis_points;  // P_W plus entry, sorted
  std::vector<std::vector<BlockId>> scc_order;
  LiveByLinearity lbl;
  std::vector<int> scc_of;  // block -> index in scc_order

  const Dims& dims(BlockId b) const { return lbl.dims[b]; }
  bool is_pr(BlockId b) const;
  bool is_pw(BlockId b) const { return widening_points.count(b) != 0; }
};

CfgAnalysisInfo analyze_cfg(const Cfg& cfg);

/// True when the graph minus `cut` has no cycle.
bool acyclic_without(const Cfg& cfg, const std::set<BlockId>& cut);

/// --dump-cfg rendering: the Cfg stanzas plus P_W / P_R marks and dims.
std::string dump_cfg(const Cfg& cfg, const CfgAnalysisInfo& info);

/// Symbolic evaluation helper over an SSA Cfg.
class PathTransfer {
 public:
  PathTransfer(const Cfg& cfg, const LiveByLinearity& lbl);

  /// Transfer from the entry state of `from` along `edges` (a loop-free edge
  /// sequence starting at `from`) to the entry state of the last edge's
  /// target, mapping dims(from) to dims(target).
  ParallelAssign along(BlockId from, const std::vector<EdgeId>& edges) const;
  /// Same with explicit target dims.
  ParallelAssign along(BlockId from, const std::vector<EdgeId>& edges, const Dims& out_dims) const;

  /// Expression of `v` over dims(p) when v is a dim of p or linearly
  /// defined from them; nullopt otherwise.
  std::optional<LinearExpr> resolve_at(BlockId p, VarId v) const;

  const Cfg& cfg() const { return cfg_; }
  const LiveByLinearity& lbl() const { return lbl_; }

 private:
  const Cfg& cfg_;
  const LiveByLinearity& lbl_;
  std::vector<const Def*> def_of_;
};

/// Derived equalities `v = expr(dims(p))` for the linearly defined
/// variables live-by-linearity at p (printed alongside invariants).
std::vector<std::pair<VarId, LinearExpr>> derived_equations(const PathTransfer& pt, BlockId p);

}  // namespace pagai
