#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace pagai {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p", "-p", "p/q" or a decimal literal such as "1.25".
std::optional<Rational> parse_rational(const std::string& text);

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

Integer floor_of(const Rational& q);
Integer ceil_of(const Rational& q);

// Bound in Q u {+oo}. Used for octagon entries and for the upper side of
// intervals; lower bounds are stored negated.
struct Bound {
  bool infinite = true;
  Rational value;

  static Bound inf() { return {}; }
  static Bound finite(Rational v) { return Bound{false, std::move(v)}; }

  bool operator==(const Bound& o) const {
    return infinite == o.infinite && (infinite || value == o.value);
  }
  bool operator<(const Bound& o) const {
    if (infinite) return false;
    if (o.infinite) return true;
    return value < o.value;
  }
  bool operator<=(const Bound& o) const { return !(o < *this); }
};

inline Bound operator+(const Bound& a, const Bound& b) {
  if (a.infinite || b.infinite) return Bound::inf();
  return Bound::finite(a.value + b.value);
}

inline const Bound& min_bound(const Bound& a, const Bound& b) { return b < a ? b : a; }
inline const Bound& max_bound(const Bound& a, const Bound& b) { return a < b ? b : a; }

std::string to_string(const Bound& b);

}  // namespace pagai
