#pragma once

#include "pagai/cfg.hpp"
#include "pagai/ir.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pagai::smt {

struct SExpr {
  std::string atom;  // empty for lists
  std::vector<SExpr> list;
  bool is_list = false;

  bool is(std::string_view a) const { return !is_list && atom == a; }
  std::string str() const;
};

/// Parses every complete s-expression in `text` (comments skipped).
std::vector<SExpr> parse_sexprs(std::string_view text);

/// Value of a numeral term: 3, 2.0, (- 3), (/ 1 3), (- (/ 1.0 3.0)).
std::optional<Rational> sexpr_number(const SExpr& e);

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// The solver process exited or the pipe broke.
struct SolverCrashed : SolverError {
  using SolverError::SolverError;
};
/// Unexpected output; `raw` holds what was read.
struct ProtocolError : SolverError {
  ProtocolError(const std::string& what, std::string raw_text)
      : SolverError(what + ": " + raw_text), raw(std::move(raw_text)) {}
  std::string raw;
};
/// `unknown` or wall-clock timeout.
struct SolverInconclusive : SolverError {
  using SolverError::SolverError;
};

enum class Status { Sat, Unsat, Unknown };
std::string to_string(Status s);

struct Model {
  std::map<std::string, Rational> numbers;
  std::map<std::string, bool> bools;

  /// Missing symbols were unconstrained: any value works, 0 / false is used.
  Rational number(const std::string& name) const;
  bool boolean(const std::string& name) const;
};

struct SolveResult {
  Status status = Status::Unknown;
  Model model;
};

struct SolverConfig {
  /// Empty: $PAGAI_SOLVER, else "z3 -in".
  std::string command;
  int timeout_ms = 0;  // 0: none
  std::ostream* dump = nullptr;
  std::string logic = "QF_LIRA";
};

std::string default_solver_command();

class SolverSession {
 public:
  explicit SolverSession(SolverConfig cfg = {});
  ~SolverSession();
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  /// Sends one command and expects `success`.
  void command(const std::string& text);
  void declare(const std::string& name, const std::string& sort);
  void assert_formula(const std::string& formula);
  void push();
  void pop();
  int depth() const { return depth_; }

  Status check();
  Model get_model();

  /// (push) assertions (check-sat) [(get-model)] (pop)
  SolveResult solve(const std::vector<std::string>& assertions, bool want_model = true);

  /// Drops every assertion and declaration.
  void reset();

  const std::string& logic() const { return logic_; }
  std::size_t queries() const { return queries_; }
  double solver_seconds() const { return seconds_; }
  const SolverConfig& config() const { return cfg_; }

 private:
  SolverConfig cfg_;
  std::string logic_;
  int pid_ = -1;
  int to_ = -1, from_ = -1;
  std::string buffer_;
  int depth_ = 0;
  std::size_t queries_ = 0;
  double seconds_ = 0;

  void start();
  void stop();
  void init();
  void send(const std::string& text);
  SExpr read_response(int timeout_ms);
  std::string expect_atom(const std::string& text);
};

/// Loop-free section graph between analysis points, as a formula. P_R blocks
/// are split: the source copy keeps the out-edges and the block's
/// definitions, the sink copy takes the in-edges and the phis (bound to
/// separate sink symbols).
/// `expr rel 0` as an SMT-LIB term; integer-only sums are scaled to integers.
std::string render_constraint(const Constraint& c, const std::function<std::string(VarId)>& sym,
                              const std::function<bool(VarId)>& integer);

struct SectionFormula {
  const Cfg* cfg = nullptr;
  const CfgAnalysisInfo* info = nullptr;
  std::vector<std::string> declarations;  // full declare-const commands
  std::vector<std::string> assertions;    // formulas
  std::vector<BlockId> sources;           // P_R
  std::vector<BlockId> sinks;             // P_R, exit, fail, assume_exit
  std::map<VarId, std::string> aux;       // helper symbols (ids past cfg->vars)
  std::vector<std::vector<VarId>> sink_phis;  // per block: phi vars renamed at the sink copy

  std::string edge_bool(EdgeId e) const;
  std::string source_bool(BlockId p) const;
  std::string sink_bool(BlockId b) const;
  /// Value of v when leaving a source / arriving at `sink` (kNoBlock: plain).
  std::string value(VarId v, BlockId sink = kNoBlock) const;
  Rational model_value(const Model& m, VarId v, BlockId sink = kNoBlock) const;

  std::string term(const Constraint& c, BlockId sink = kNoBlock) const;
  std::string conjunction(const Conjunction& cs, BlockId sink = kNoBlock) const;
  /// not (d1 or d2 or ...); empty list means bottom, giving true.
  std::string not_any(const std::vector<Conjunction>& disjuncts, BlockId sink) const;

  bool is_pr(BlockId b) const;
  std::string script() const;
};

/// `enabled` (per edge, optional): disabled edges are forced off.
SectionFormula encode_section(const Cfg& cfg, const CfgAnalysisInfo& info,
                              const std::vector<char>* enabled = nullptr);

/// Resets the session and asserts the section at frame 0.
void load(SolverSession& s, const SectionFormula& rho);

struct PathModel {
  BlockId source = kNoBlock;
  BlockId sink = kNoBlock;
  std::vector<EdgeId> edges;
  Model model;
};

/// Reads the activated path off a model. Throws std::logic_error when the
/// activation Booleans do not form a single path from `source`.
PathModel model_to_path(const SectionFormula& rho, const Model& m, BlockId source);

/// Target value at a sink: list of disjuncts (empty = bottom).
using TargetMap = std::map<BlockId, std::vector<Conjunction>>;

/// Some path from src, starting in x_src, reaching a target t outside X_t.
/// Expects `rho` loaded. Throws SolverInconclusive on unknown.
std::optional<PathModel> check_growth(SolverSession& s, const SectionFormula& rho, BlockId src,
                                      const Conjunction& x_src, const TargetMap& targets,
                                      const std::vector<std::string>& extra = {});

/// Is `sink` reachable from some source p in X_p (one disjunct list per source)?
std::optional<PathModel> check_reach(SolverSession& s, const SectionFormula& rho,
                                     const std::map<BlockId, std::vector<Conjunction>>& sources, BlockId sink,
                                     const std::vector<std::string>& extra = {});

}  // namespace pagai::smt
