#pragma once

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <cstddef>
#include <vector>

#include "khall/ints.hpp"

namespace khall {

// Exponent vector of a Laurent monomial.  Inline storage covers keys up to
// 8 slots (z1..z6 plus the two q slots), which is everything the test and
// acceptance workloads touch; larger n spills to the heap transparently.
using ExpVec = boost::container::small_vector<Exp, 8>;

inline ExpVec zero_exps(std::size_t n) { return ExpVec(n, Exp{0}); }

inline int exp_cmp(const ExpVec& a, const ExpVec& b) {
  // Keys being compared always have equal length (same ambient ring).
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

inline bool exp_less(const ExpVec& a, const ExpVec& b) { return exp_cmp(a, b) < 0; }

inline ExpVec exp_sum(const ExpVec& a, const ExpVec& b) {
  ExpVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = exp_add(r[i], b[i]);
  return r;
}

inline void exp_add_in_place(ExpVec& a, const ExpVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = exp_add(a[i], b[i]);
}

// a += k*b, used by monomial substitution.
inline void exp_axpy(ExpVec& a, long k, const ExpVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    a[i] = checked_exp(long(a[i]) + k * long(b[i]));
}

// Applies sigma to the first nz slots: slot i of the result takes the value
// from slot perm[i].  Trailing slots (q exponents) are fixed.
inline ExpVec exp_permute(const ExpVec& e, const std::vector<int>& perm) {
  ExpVec r(e);
  for (std::size_t i = 0; i < perm.size(); ++i) r[i] = e[perm[i]];
  return r;
}

}  // namespace khall
