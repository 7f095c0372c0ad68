#pragma once

#include "pagai/cfg.hpp"
#include "pagai/frontend/ast.hpp"

#include <map>
#include <string>

namespace pagai {

struct LowerOptions {
  /// Treat main's top-level variables (and its return value) as read at exit.
  bool observe_exit = false;
};

std::map<std::string, Cfg> lower_to_cfg(const Program& p, const LowerOptions& opt = {});
Cfg lower_function(const Function& f, const LowerOptions& opt = {});

/// Peels the first iteration of every natural loop (pre-SSA).
Cfg unroll_loops_once(const Cfg& cfg);

/// Pruned SSA construction over dominance frontiers.
Cfg to_ssa(const Cfg& cfg);

struct FrontendOptions {
  int inline_depth = 4;
  bool unroll = true;
  bool observe_exit = false;
};

/// parse result -> inline -> lower -> unroll -> SSA for one function.
Cfg build_ssa_cfg(const Program& p, const std::string& function, const FrontendOptions& opt = {});

/// Indices of the function's parameters and of the variables declared
/// directly in its outermost block.
std::vector<int> top_level_vars(const Function& f);

/// Name given to the variable holding the function's return value.
inline const char* kReturnVar = "_ret";

}  // namespace pagai
