#pragma once

#include "pagai/domains/box.hpp"
#include "pagai/domains/octagon.hpp"
#include "pagai/domains/polyhedron.hpp"
#include "pagai/parallel_assign.hpp"

#include <string>
#include <variant>

namespace pagai {

enum class DomainKind { Box, Octagon, Polyhedron };

std::string to_string(DomainKind d);
/// "box", "oct", "pk"
std::optional<DomainKind> parse_domain(const std::string& s);

/// A domain-tagged element over named coordinates. Values are immutable: every
/// operation returns a fresh value.
class AbstractValue {
 public:
  static AbstractValue top(DomainKind kind, Dims dims);
  static AbstractValue bottom(DomainKind kind, Dims dims);
  static AbstractValue from_constraints(DomainKind kind, Dims dims, const Conjunction& cs);

  DomainKind kind() const { return kind_; }
  const Dims& dims() const { return dims_; }
  bool is_bottom() const;
  bool is_top() const;

  AbstractValue join(const AbstractValue& o) const;
  AbstractValue meet(const AbstractValue& o) const;
  /// Standard widening; `o` need not contain this value (widens with the join).
  AbstractValue widen(const AbstractValue& o) const;
  bool leq(const AbstractValue& o) const;
  bool equals(const AbstractValue& o) const { return leq(o) && o.leq(*this); }

  AbstractValue meet_constraints(const Conjunction& cs) const;
  AbstractValue transfer(const ParallelAssign& pa) const;
  /// Projects out removed dims and adds unconstrained new ones.
  AbstractValue adapt_dims(const Dims& new_dims) const;

  /// Constraints over VarIds with exactly this value's concretization; bottom
  /// exports the single constraint 1 <= 0.
  Conjunction to_constraints() const;
  bool contains(const std::function<Rational(VarId)>& value) const;
  bool contains_point(const std::vector<Rational>& point) const;

  std::string str(const NameFn& name) const;

  const Box* box() const { return std::get_if<Box>(&payload_); }
  const Octagon* octagon() const { return std::get_if<Octagon>(&payload_); }
  const Polyhedron* polyhedron() const { return std::get_if<Polyhedron>(&payload_); }

 private:
  using Payload = std::variant<Box, Octagon, Polyhedron>;
  AbstractValue(DomainKind kind, Dims dims, Payload p)
      : kind_(kind), dims_(std::move(dims)), payload_(std::move(p)) {}

  /// Rewrites constraints over VarIds into positional form; returns false if
  /// some variable is not a coordinate of `dims`.
  static bool to_positions(const Dims& dims, const Conjunction& cs, Conjunction& out);
  Conjunction from_positions(const Conjunction& cs) const;

  DomainKind kind_;
  Dims dims_;
  Payload payload_;
};

/// Dimension-count check shared by engines before building values.
void check_dimension_guard(DomainKind kind, std::size_t n);

}  // namespace pagai
