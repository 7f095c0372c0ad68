#pragma once

#include "pagai/cfg.hpp"
#include "pagai/frontend/ast.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace pagai {

/// Supplies the values of nondeterministic reads, in execution order.
using NondetSource = std::function<Rational(bool integer)>;

enum class Outcome { Exit, AssertFail, AssumeFail, StepLimit };
std::string to_string(Outcome o);

struct RunResult {
  Outcome outcome = Outcome::Exit;
  /// Final values of the observed variables that were defined.
  std::map<std::string, Rational> finals;
  std::size_t steps = 0;
};

/// Concrete semantics on mathematical integers and rationals; integer
/// division truncates toward zero and any division by zero yields 0.
Rational int_div(const Rational& a, const Rational& b);

/// Reference interpreter over the AST (calls are executed, not inlined).
/// Observes parameters and top-level variables of the function plus "_ret".
RunResult interpret(const Program& p, const std::string& function, const NondetSource& nondet,
                    std::size_t max_steps = 1000000);

using Env = std::vector<std::optional<Rational>>;

/// Called on entry of each block, after its phis are evaluated.
using BlockHook = std::function<void(BlockId, const Env&)>;

/// Cfg simulator (pre- or post-SSA).
RunResult simulate(const Cfg& cfg, const NondetSource& nondet, std::size_t max_steps = 1000000,
                   const BlockHook& hook = {});

}  // namespace pagai
