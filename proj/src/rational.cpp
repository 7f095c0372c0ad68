#include "pagai/rational.hpp"

#include <cctype>

namespace pagai {

std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::string s = text;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  if (s.empty()) return std::nullopt;
  Rational result;
  auto dot = s.find('.');
  auto slash = s.find('/');
  auto all_digits = [](const std::string& d) {
    if (d.empty()) return false;
    for (char c : d)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  if (slash != std::string::npos) {
    std::string p = s.substr(0, slash), q = s.substr(slash + 1);
    if (!all_digits(p) || !all_digits(q)) return std::nullopt;
    Integer den(q);
    if (den == 0) return std::nullopt;
    result = Rational(Integer(p), den);
  } else if (dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (ip.empty()) ip = "0";
    if (!all_digits(ip) || (!fp.empty() && !all_digits(fp))) return std::nullopt;
    Integer den = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
    result = Rational(Integer(ip + fp), den);
  } else {
    if (!all_digits(s)) return std::nullopt;
    result = Rational(Integer(s));
  }
  result.canonicalize();
  if (neg) result = -result;
  return result;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil_of(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

std::string to_string(const Bound& b) { return b.infinite ? "+oo" : to_string(b.value); }

}  // namespace pagai
