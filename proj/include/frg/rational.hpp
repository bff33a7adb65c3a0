#pragma once

#include <gmpxx.h>

#include <string>

namespace frg {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational q{mpz_class(num), mpz_class(den)};
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace frg
