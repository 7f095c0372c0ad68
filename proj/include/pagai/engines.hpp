#pragma once

#include "pagai/domains/abstract_value.hpp"
#include "pagai/ir.hpp"
#include "pagai/smt.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pagai {

enum class Technique { S, G, PF, GPF, DIS };
std::string to_string(Technique t);
/// "s", "g", "pf", "gpf", "dis"
std::optional<Technique> parse_technique(const std::string& s);
/// Display names used in tables: S, G, PF, G+PF, DIS.
std::string display_name(Technique t);
bool uses_solver(Technique t);

struct EngineConfig {
  DomainKind domain = DomainKind::Polyhedron;
  int widening_delay = 2;
  int narrowing_passes = 2;
  int max_disjuncts = 5;
  std::size_t budget_factor = 1000;  // iteration budget = factor * block count
};

/// Invariants of one function: P_R points and exit. Every entry is a list of
/// disjuncts (exactly one except under DIS; an empty list is unreachable).
struct InvariantMap {
  std::string function;
  Technique technique = Technique::S;
  DomainKind domain = DomainKind::Polyhedron;
  std::map<BlockId, std::vector<AbstractValue>> values;
  double seconds = 0;
  bool downgraded = false;  // solver gave up; the classic engine was used
  std::vector<std::string> events;
  std::size_t iterations = 0;
  std::size_t queries = 0;

  /// Join of the disjuncts (bottom over dims when empty).
  AbstractValue collapsed(BlockId p, const Dims& dims) const;
  /// Constraint sets per disjunct, for SMT queries.
  std::vector<Conjunction> disjuncts(BlockId p) const;
  bool contains(BlockId p, const std::function<Rational(VarId)>& value) const;
};

/// Thrown when an engine exceeds its iteration budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Points reported by every engine: P_R plus exit.
std::vector<BlockId> reported_points(const Cfg& cfg, const CfgAnalysisInfo& info);

InvariantMap analyze_classic(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c);
InvariantMap analyze_guided(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c);
InvariantMap analyze_path_focusing(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c,
                                   smt::SolverSession& s);
InvariantMap analyze_combined(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c,
                              smt::SolverSession& s);
InvariantMap analyze_disjunctive(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c,
                                 smt::SolverSession& s);

/// Dispatch; `s` may be null for S and G.
InvariantMap analyze(const Cfg& cfg, const CfgAnalysisInfo& info, Technique t, const EngineConfig& c,
                     smt::SolverSession* s);

struct AssertStatus {
  int line = 0;
  bool proved = false;
  std::string reason;  // set when the solver was inconclusive
};

/// One entry per assert line, in line order.
std::vector<AssertStatus> check_assertions(const Cfg& cfg, const CfgAnalysisInfo& info, const InvariantMap& inv,
                                           smt::SolverSession& s);

/// Post-fixpoint sweep: no path from any source point in its invariant
/// escapes any reported point. Empty result when inductive, otherwise a
/// description of the first escaping path.
std::optional<std::string> verify_inductive(const Cfg& cfg, const CfgAnalysisInfo& info, const InvariantMap& inv,
                                            smt::SolverSession& s);

/// Source-level names for the variables visible at p: the base name, with
/// "@line" of the definition added when two versions of a base meet; values
/// observed at exit use their plain source name.
NameFn source_names(const Cfg& cfg, const CfgAnalysisInfo& info, BlockId p);

/// Invariant at p over source names, with linear relations of variables
/// that are not dimensions appended ("z = 0").
std::string render_invariant(const Cfg& cfg, const CfgAnalysisInfo& info, const InvariantMap& inv, BlockId p,
                             const NameFn& name);

}  // namespace pagai
