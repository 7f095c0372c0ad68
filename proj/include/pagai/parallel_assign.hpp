#pragma once

#include "pagai/linear.hpp"

#include <vector>

namespace pagai {

/// Sorted, duplicate-free list of abstract-domain coordinates.
using Dims = std::vector<VarId>;

/// Simultaneous assignment  (targets) := (exprs)  from the `sources`
/// coordinates, executed only when `guards` hold. Expressions and guards range
/// over sources plus the `fresh` symbols, which stand for unknown values
/// (havoc); a havoc target is simply assigned its own fresh symbol.
struct ParallelAssign {
  Dims sources;
  std::vector<VarId> fresh;
  Conjunction guards;
  Dims targets;
  std::vector<LinearExpr> exprs;

  static ParallelAssign identity(const Dims& dims);
  /// Identity on `dims` except that `v` receives an unknown value.
  static ParallelAssign havoc(const Dims& dims, VarId v);

  /// Concrete execution; returns false when a guard fails.
  bool evaluate(const std::function<Rational(VarId)>& source_and_fresh,
                std::vector<Rational>& out) const;
};

}  // namespace pagai
