#pragma once

#include "pagai/linear.hpp"

#include <optional>
#include <vector>

namespace pagai {

/// Product of intervals. Lower bounds are stored negated so that both sides
/// share the Q u {+oo} bound type.
class Box {
 public:
  static Box top(std::size_t n);
  static Box bottom(std::size_t n);

  std::size_t dims() const { return hi_.size(); }
  bool is_bottom() const { return empty_; }
  const Bound& neg_lo(std::size_t i) const { return neg_lo_[i]; }
  const Bound& hi(std::size_t i) const { return hi_[i]; }
  /// Sets [lo, hi] for dim i; nullopt means unbounded on that side.
  void set(std::size_t i, std::optional<Rational> lo, std::optional<Rational> hi);

  Box join(const Box& o) const;
  Box meet(const Box& o) const;
  Box meet_constraints(const Conjunction& cs) const;
  Box widen(const Box& o) const;
  bool leq(const Box& o) const;
  bool equals(const Box& o) const { return leq(o) && o.leq(*this); }
  Box image(const std::vector<std::optional<LinearExpr>>& exprs) const;

  Conjunction to_constraints() const;
  bool contains(const std::vector<Rational>& point) const;

  /// Upper bound of a linear form over the box.
  Bound sup(const LinearExpr& f) const;

 private:
  explicit Box(std::size_t n) : neg_lo_(n), hi_(n) {}
  void normalize_empty();

  std::vector<Bound> neg_lo_;
  std::vector<Bound> hi_;
  bool empty_ = false;
};

}  // namespace pagai
