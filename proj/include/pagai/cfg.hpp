#pragma once

#include "pagai/linear.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pagai {

using BlockId = std::uint32_t;
using EdgeId = std::uint32_t;
inline constexpr BlockId kNoBlock = ~BlockId{0};

/// Right-hand side of a definition. Nonlinear forms keep their operands so
/// the simulator and the SMT encoder can see them; the abstract transfer
/// treats Mul and non-constant Div as havoc.
struct Rhs {
  enum Kind { Linear, Havoc, Undef, Mul, Div };
  Kind kind = Linear;
  LinearExpr a, b;
  bool integer = false;  // Div: truncating; Havoc: integer-valued

  static Rhs linear(LinearExpr e);
  static Rhs havoc(bool integer);
  static Rhs undef();
  static Rhs mul(LinearExpr a, LinearExpr b);
  static Rhs div(LinearExpr a, LinearExpr b, bool integer);

  bool is_linear() const { return kind == Linear; }
  std::vector<VarId> uses() const;
  void substitute(const std::function<LinearExpr(VarId)>& f);
  std::string str(const NameFn& name) const;
};

struct VarInfo {
  std::string name;  // readable, unique: "x", "x.1", "_t3"
  std::string base;  // source-level variable this one versions
  bool integer = true;
  int line = 0;
};

struct Def {
  VarId var;
  Rhs rhs;
};

struct Phi {
  VarId var;
  std::vector<std::pair<EdgeId, LinearExpr>> args;  // per incoming edge; a variable or a constant
  const LinearExpr* arg_for(EdgeId e) const;
};

struct Edge {
  BlockId src;
  BlockId dst;
  std::optional<Constraint> guard;
  int line = 0;  // source line of the assert / assume for edges into fail and assume_exit
};

struct Block {
  std::vector<Phi> phis;
  std::vector<Def> defs;
  std::vector<EdgeId> in, out;
  int line = 0;
};

class Cfg {
 public:
  std::string function;
  std::vector<VarInfo> vars;
  std::vector<Block> blocks;
  std::vector<Edge> edges;
  BlockId entry = kNoBlock, exit = kNoBlock, fail = kNoBlock, assume_exit = kNoBlock;
  /// Variables read at exit (source name, variable holding the value there).
  std::vector<std::pair<std::string, VarId>> observed;
  /// Source lines of every assert statement (also those folded to a constant).
  std::vector<int> assert_lines;
  bool ssa = false;
  bool nonlinear = false;  // some definition is nonlinear: precision was lost
  std::vector<std::string> diagnostics;

  BlockId add_block(int line = 0);
  EdgeId add_edge(BlockId src, BlockId dst, std::optional<Constraint> guard = std::nullopt);
  VarId add_var(std::string name, std::string base, bool integer, int line = 0);
  void redirect(EdgeId e, BlockId new_dst);

  std::vector<BlockId> successors(BlockId b) const;
  std::vector<BlockId> predecessors(BlockId b) const;
  std::size_t num_blocks() const { return blocks.size(); }
  bool is_special(BlockId b) const { return b == exit || b == fail || b == assume_exit; }

  NameFn namer() const;
  std::string block_name(BlockId b) const;

  /// Removes blocks unreachable from entry (special blocks are kept) and
  /// renumbers: entry first, specials last.
  void prune();

  /// Structural checks; returns a list of violations (empty when valid).
  std::vector<std::string> check() const;

  /// One stanza per block. `annotate` may add a suffix to the block header.
  std::string dump(const std::function<std::string(BlockId)>& annotate = {}) const;
};

}  // namespace pagai
