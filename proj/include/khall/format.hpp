#pragma once

#include <ostream>
#include <sstream>
#include <string>

#include "khall/laurent.hpp"

namespace khall {

// Human-readable expression forms.  Deterministic: terms appear in stored
// (lexicographic key) order, so parse(format(x)) == x is an identity on
// canonical elements.

inline void format_power(std::ostream& os, const char* name, int idx, long e, bool& lead) {
  if (e == 0) return;
  if (!lead) os << "*";
  lead = false;
  os << name;
  if (idx >= 0) os << idx;
  if (e != 1) os << "^" << e;
}

// Monomial in z (and q) from an exponent key; "1" when all exponents vanish.
inline std::string format_monomial(const ExpVec& key, int nz, int nq) {
  std::ostringstream os;
  bool lead = true;
  for (int i = 0; i < nq; ++i) format_power(os, "q", i + 1, key[nz + i], lead);
  for (int i = 0; i < nz; ++i) format_power(os, "z", i + 1, key[i], lead);
  if (lead) os << "1";
  return os.str();
}

inline std::string format_torus(const TorusElem& x) {
  if (x.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : x.terms()) {
    Int a = c < 0 ? Int(-c) : c;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    std::string mono = format_monomial(key, x.nz(), x.nq());
    if (a == 1) {
      os << mono;
    } else if (mono == "1") {
      os << a;
    } else {
      os << a << "*" << mono;
    }
  }
  return os.str();
}

inline std::string format_coords(const RingElem& c) {
  std::ostringstream os;
  os << "[";
  auto v = c.dense();
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "]";
  return os.str();
}

inline std::string format_surface(const SurfaceElem& x) {
  if (x.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : x.terms()) {
    if (!first) os << " + ";
    first = false;
    std::string mono = format_monomial(key, x.nz(), x.nq());
    os << format_coords(c);
    if (mono != "1") os << "*" << mono;
  }
  return os.str();
}

// "(1 - c*za/zb)" with the coefficient's q-part read off the delta tail.
inline std::string format_factor(const BinomialFactor<Int>& f, int nz, int nq) {
  std::ostringstream os;
  Int a = f.c < 0 ? Int(-f.c) : f.c;
  os << "(1 " << (f.c < 0 ? "+" : "-") << " ";
  if (a != 1) os << a << "*";
  bool lead = true;
  std::ostringstream mono;
  for (int i = 0; i < nq; ++i) format_power(mono, "q", i + 1, f.delta[nz + i], lead);
  std::string qs = mono.str();
  if (!qs.empty()) os << qs << "*";
  os << "z" << f.a + 1 << "/z" << f.b + 1 << ")";
  return os.str();
}

inline std::string format_factor(const BinomialFactor<RingElem>& f, int nz, int) {
  std::ostringstream os;
  os << "(1 - " << format_coords(f.c) << "*z" << f.a + 1 << "/z" << f.b + 1 << ")";
  return os.str();
}

// --- element file format ------------------------------------------------
// One term per line: `coeff ; z_exponents ; q_exponents` (torus) or
// `coord_vector ; z_exponents` (surface); denominator factors as
// `denom <coeff-field> ; a ; b` with 1-based variable indices.

inline void write_element(std::ostream& os, const Rat<Int>& x) {
  const int nz = x.num.nz(), nq = x.num.nq();
  for (const auto& [key, c] : x.num.terms()) {
    os << c << " ;";
    for (int i = 0; i < nz; ++i) os << " " << key[i];
    os << " ;";
    for (int i = 0; i < nq; ++i) os << " " << key[nz + i];
    os << "\n";
  }
  for (const auto& f : x.den) {
    os << "denom " << f.c;
    for (int i = 0; i < nq; ++i) os << " " << f.delta[nz + i];
    os << " ; " << f.a + 1 << " ; " << f.b + 1 << "\n";
  }
}

inline void write_element(std::ostream& os, const Rat<RingElem>& x) {
  const int nz = x.num.nz();
  auto coords = [&](const RingElem& c) {
    std::ostringstream s;
    auto v = c.dense();
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
    return s.str();
  };
  for (const auto& [key, c] : x.num.terms()) {
    os << coords(c) << " ;";
    for (int i = 0; i < nz; ++i) os << " " << key[i];
    os << "\n";
  }
  for (const auto& f : x.den)
    os << "denom " << coords(f.c) << " ; " << f.a + 1 << " ; " << f.b + 1 << "\n";
}

}  // namespace khall
