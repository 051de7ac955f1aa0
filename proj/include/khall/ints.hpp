#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace khall {

// All arithmetic in this library is exact.  Coefficients are arbitrary
// precision; exponents are machine integers with explicit range guards.
using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Exponent storage type.  +-30000 is far beyond anything the toolkit
// produces; the guard exists to turn silent wraparound into an error.
using Exp = std::int16_t;
inline constexpr int kExpLimit = 30000;

struct overflow_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Exp checked_exp(long v) {
  if (v < -kExpLimit || v > kExpLimit)
    throw overflow_error("exponent out of range: " + std::to_string(v));
  return static_cast<Exp>(v);
}

inline Exp exp_add(Exp a, Exp b) { return checked_exp(long(a) + long(b)); }

inline Exp exp_mul(Exp a, long k) { return checked_exp(long(a) * k); }

}  // namespace khall
