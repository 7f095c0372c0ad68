#pragma once

#include "pagai/linear.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace pagai {

/// Raised when a polyhedron would exceed the supported dimension count.
class DimensionLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxPolyDims = 24;

namespace dd {

/// Homogeneous integer vector; index 0 is the constant / xi coordinate.
using Vec = std::vector<Integer>;

Integer dot(const Vec& a, const Vec& b);
/// Divides by the gcd of all entries; when `sign_free`, also makes the first
/// nonzero entry positive (for lines and equalities).
void normalize(Vec& v, bool sign_free);
bool is_zero(const Vec& v);

/// Generators of a polyhedral cone: lines span the lineality space, rays are
/// the extreme rays modulo lines.
struct Cone {
  std::vector<Vec> lines;
  std::vector<Vec> rays;
};

/// Incremental Chernikova conversion. Refines `cone` (the generators of the
/// cone defined by `processed`, a list of inequalities) by the extra
/// equalities and inequalities, keeping the ray set irredundant through the
/// combinatorial adjacency test.
void refine(Cone& cone, std::vector<Vec>& processed, const std::vector<Vec>& eqs,
            const std::vector<Vec>& ineqs);

/// Generators of {y : E y = 0, I y >= 0} in dimension `size`.
Cone generators_of(std::size_t size, const std::vector<Vec>& eqs, const std::vector<Vec>& ineqs);

}  // namespace dd

/// Convex polyhedron over positional dimensions 0..n-1 in double description:
/// a minimal constraint system and a minimal generator system, kept in sync.
///
/// Constraint rows r read  r[0] + sum r[i+1]*x_i  (>= 0 | = 0).
/// Generators: points have g[0] > 0 (x_i = g[i+1]/g[0]); rays and lines have
/// g[0] == 0.
class Polyhedron {
 public:
  static Polyhedron top(std::size_t n);
  static Polyhedron bottom(std::size_t n);
  /// Builds from constraints over positions (strict constraints are relaxed).
  static Polyhedron from_constraints(std::size_t n, const Conjunction& cs);
  static Polyhedron from_generators(std::size_t n, std::vector<dd::Vec> points,
                                    std::vector<dd::Vec> rays, std::vector<dd::Vec> lines);

  std::size_t dims() const { return n_; }
  bool is_bottom() const { return empty_; }
  bool is_top() const { return !empty_ && eqs_.empty() && ineqs_.empty(); }

  Polyhedron join(const Polyhedron& o) const;
  Polyhedron meet(const Polyhedron& o) const;
  Polyhedron meet_constraints(const Conjunction& cs) const;
  Polyhedron widen(const Polyhedron& o) const;
  bool leq(const Polyhedron& o) const;
  bool equals(const Polyhedron& o) const { return leq(o) && o.leq(*this); }

  /// New polyhedron over exprs.size() dims; dim k is exprs[k] evaluated on the
  /// current dims, or unconstrained when exprs[k] is empty.
  Polyhedron image(const std::vector<std::optional<LinearExpr>>& exprs) const;

  Conjunction to_constraints() const;
  bool contains(const std::vector<Rational>& point) const;

  const std::vector<dd::Vec>& equalities() const { return eqs_; }
  const std::vector<dd::Vec>& inequalities() const { return ineqs_; }
  const std::vector<dd::Vec>& lines() const { return lines_; }
  /// Points and rays, homogeneous.
  const std::vector<dd::Vec>& rays() const { return rays_; }

  /// Checks that every generator satisfies every constraint.
  bool consistent() const;

 private:
  explicit Polyhedron(std::size_t n) : n_(n) {}
  void set_from_cone(const dd::Cone& gens);
  void minimize_constraints();
  static void check_dims(std::size_t n);

  std::size_t n_ = 0;
  bool empty_ = false;
  std::vector<dd::Vec> eqs_;
  std::vector<dd::Vec> ineqs_;
  std::vector<dd::Vec> lines_;
  std::vector<dd::Vec> rays_;
};

}  // namespace pagai
