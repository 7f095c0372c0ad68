#include "pagai/parallel_assign.hpp"

#include <algorithm>

namespace pagai {

ParallelAssign ParallelAssign::identity(const Dims& dims) {
  ParallelAssign pa;
  pa.sources = dims;
  pa.targets = dims;
  for (VarId v : dims) pa.exprs.push_back(LinearExpr::var(v));
  return pa;
}

ParallelAssign ParallelAssign::havoc(const Dims& dims, VarId v) {
  ParallelAssign pa = identity(dims);
  VarId h = kFreshBase;
  pa.fresh.push_back(h);
  auto it = std::lower_bound(pa.targets.begin(), pa.targets.end(), v);
  if (it != pa.targets.end() && *it == v) pa.exprs[static_cast<std::size_t>(it - pa.targets.begin())] = LinearExpr::var(h);
  return pa;
}

bool ParallelAssign::evaluate(const std::function<Rational(VarId)>& value, std::vector<Rational>& out) const {
  for (const auto& g : guards)
    if (!g.holds(value)) return false;
  out.clear();
  for (const auto& e : exprs) out.push_back(e.evaluate(value));
  return true;
}

}  // namespace pagai
