#pragma once

#include "pagai/linear.hpp"

#include <optional>
#include <vector>

namespace pagai {

/// Difference-bound matrix over the 2n forms  +v_i (index 2i)  and
/// -v_i (index 2i+1). Entry (i, j) bounds  form_j - form_i.
class Dbm {
 public:
  Dbm() = default;
  explicit Dbm(std::size_t n) : n_(n), m_(4 * n * n) {
    for (std::size_t i = 0; i < 2 * n; ++i) at(i, i) = Bound::finite(0);
  }

  std::size_t vars() const { return n_; }
  std::size_t size() const { return 2 * n_; }
  Bound& at(std::size_t i, std::size_t j) { return m_[i * 2 * n_ + j]; }
  const Bound& at(std::size_t i, std::size_t j) const { return m_[i * 2 * n_ + j]; }

  /// Tightens entry (i, j) and its coherent twin.
  void tighten(std::size_t i, std::size_t j, const Bound& b);

  bool operator==(const Dbm& o) const { return n_ == o.n_ && m_ == o.m_; }

 private:
  std::size_t n_ = 0;
  std::vector<Bound> m_;
};

inline std::size_t bar(std::size_t i) { return i ^ 1u; }

/// Tight closure over Q: Floyd-Warshall then one strengthening pass.
/// Returns false when the matrix is infeasible (negative cycle).
bool oct_close(Dbm& m);

/// Octagon abstract value over positional dims. The matrix is kept closed
/// except for results of widen(), which stay as computed so that a later
/// widening sees the non-closed left argument.
class Octagon {
 public:
  static Octagon top(std::size_t n);
  static Octagon bottom(std::size_t n);
  static Octagon from_dbm(Dbm m);

  std::size_t dims() const { return dbm_.vars(); }
  bool is_bottom() const { return empty_; }
  bool is_closed() const { return closed_; }
  const Dbm& matrix() const { return dbm_; }
  /// Closed copy (bottom stays bottom).
  Octagon closed() const;

  Octagon join(const Octagon& o) const;
  Octagon meet(const Octagon& o) const;
  Octagon meet_constraints(const Conjunction& cs) const;
  Octagon widen(const Octagon& o) const;
  bool leq(const Octagon& o) const;
  bool equals(const Octagon& o) const { return leq(o) && o.leq(*this); }
  Octagon image(const std::vector<std::optional<LinearExpr>>& exprs) const;

  Conjunction to_constraints() const;
  bool contains(const std::vector<Rational>& point) const;

  /// Bounds of +v_i: {lower, upper}; lower is returned negated (as -lo).
  std::pair<Bound, Bound> interval(std::size_t i) const;

 private:
  explicit Octagon(std::size_t n) : dbm_(n) {}
  void close_in_place();
  /// Upper bound of a linear form by interval evaluation on a closed value.
  Bound sup(const LinearExpr& f) const;

  Dbm dbm_;
  bool empty_ = false;
  bool closed_ = true;
};

}  // namespace pagai
