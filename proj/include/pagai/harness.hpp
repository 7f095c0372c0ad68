#pragma once

#include "pagai/engines.hpp"
#include "pagai/frontend/passes.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace pagai::harness {

enum class Verdict { LeftStronger, RightStronger, Equal, Uncomparable };
std::string to_string(Verdict v);
Verdict flip(Verdict v);

struct PointVerdict {
  Verdict verdict = Verdict::Uncomparable;
  bool inconclusive = false;  // the solver answered unknown
};

/// Inclusion both ways by SMT; disjunct lists, empty = bottom. Variables are
/// typed by `cfg`.
PointVerdict compare_point(smt::SolverSession& s, const Cfg& cfg, const std::vector<Conjunction>& a,
                           const std::vector<Conjunction>& b);

struct ComparisonReport {
  std::string left, right;
  std::size_t points = 0;
  std::size_t left_stronger = 0, right_stronger = 0, equal = 0, uncomparable = 0, inconclusive = 0;
  double pct_left = 0, pct_right = 0, pct_equal = 0, pct_uncomparable = 0;
  bool degenerate = false;
  double left_seconds = 0, right_seconds = 0;
};

ComparisonReport aggregate_report(const std::vector<PointVerdict>& verdicts, double left_seconds = 0,
                                  double right_seconds = 0);
/// Sums counts and recomputes percentages.
ComparisonReport merge(const std::vector<ComparisonReport>& parts);

/// Points compared in reports: P_R without entry.
std::vector<BlockId> compared_points(const Cfg& cfg, const CfgAnalysisInfo& info);

struct FuzzResult {
  std::size_t violations = 0;
  std::size_t crossings = 0;
  std::size_t truncated = 0;
  std::string first;  // description of the first violation
};

/// Concrete runs with nondeterministic values drawn from [-1000, 1000];
/// every crossing of a reported point is checked against `inv`.
FuzzResult soundness_fuzz(const Cfg& cfg, const CfgAnalysisInfo& info, const InvariantMap& inv, int trials,
                          unsigned seed, std::size_t step_cap = 100000);
/// Same runs checked against several invariant maps of one function at once.
std::vector<FuzzResult> soundness_fuzz(const Cfg& cfg, const CfgAnalysisInfo& info,
                                       const std::vector<const InvariantMap*>& invs, int trials, unsigned seed,
                                       std::size_t step_cap = 100000);

struct Benchmark {
  std::string name;
  std::string source;
  std::size_t loc = 0;
  struct Function {
    std::string name;
    Cfg cfg;
    CfgAnalysisInfo info;
  };
  std::vector<Function> functions;
  std::size_t pr_points() const;
};

Benchmark load_benchmark(const std::string& name, const std::string& source, const FrontendOptions& fo);

struct FunctionResult {
  std::string name;
  InvariantMap inv;
  std::vector<AssertStatus> asserts;
  std::string error;  // quarantined function
};

struct Cell {
  std::size_t benchmark = 0;
  Technique technique = Technique::S;
  DomainKind domain = DomainKind::Polyhedron;
  std::vector<FunctionResult> functions;
  double seconds = 0;
  bool quarantined = false;
  std::string error;
};

struct MatrixConfig {
  std::vector<Technique> techniques{Technique::S, Technique::G, Technique::PF, Technique::GPF, Technique::DIS};
  std::vector<DomainKind> domains{DomainKind::Polyhedron};
  EngineConfig engine;
  FrontendOptions frontend;
  smt::SolverConfig solver;
  unsigned seed = 1;
  int jobs = 0;  // 0: hardware concurrency
};

struct PairTable {
  std::string left, right;  // display names
  std::string fixed;        // the shared domain or technique
  std::vector<std::pair<std::string, ComparisonReport>> rows;  // per benchmark
  ComparisonReport total;
};

struct MatrixReport {
  MatrixConfig config;
  std::vector<Benchmark> benchmarks;
  std::vector<Cell> cells;
  std::vector<PairTable> technique_pairs;
  std::vector<PairTable> domain_pairs;

  const Cell* find(std::size_t b, Technique t, DomainKind d) const;
};

MatrixReport run_matrix(std::vector<Benchmark> corpus, const MatrixConfig& c);

/// Technique pairs (left, right) as in the precision table.
std::vector<std::pair<Technique, Technique>> technique_pairs();
std::vector<std::pair<DomainKind, DomainKind>> domain_pairs();

/// Structured report; `with_timing` false masks every timing field.
nlohmann::ordered_json to_json(const MatrixReport& r, bool with_timing = true);
std::string to_text(const MatrixReport& r);
std::string to_csv(const MatrixReport& r);

}  // namespace pagai::harness
