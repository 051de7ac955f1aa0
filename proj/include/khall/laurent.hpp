#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "khall/expvec.hpp"
#include "khall/ints.hpp"
#include "khall/ring_model.hpp"

namespace khall {

struct laurent_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Coefficient-ring glue.  Torus mode stores plain integers (the q-monomial
// part of a torus coefficient lives in the two trailing exponent slots);
// surface mode stores structure-constant ring elements.
template <class C>
struct CoeffOps;

template <>
struct CoeffOps<Int> {
  static bool is_zero(const Int& c) { return c == 0; }
  static Int add(const Int& a, const Int& b) { return a + b; }
  static Int mul(const Int& a, const Int& b) { return a * b; }
  static Int neg(const Int& a) { return -a; }
  static bool eq(const Int& a, const Int& b) { return a == b; }
  static int cmp(const Int& a, const Int& b) { return a < b ? -1 : (b < a ? 1 : 0); }
  static bool is_unit(const Int& c) { return c == 1 || c == -1; }
  static Int slot_permute(const Int& c, const std::vector<int>&) { return c; }
};

inline int coords_cmp(const Coords& a, const Coords& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i].first != b[i].first) return a[i].first < b[i].first ? -1 : 1;
    if (a[i].second != b[i].second) return a[i].second < b[i].second ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

template <>
struct CoeffOps<RingElem> {
  static bool is_zero(const RingElem& c) { return c.is_zero(); }
  static RingElem add(const RingElem& a, const RingElem& b) { return a + b; }
  static RingElem mul(const RingElem& a, const RingElem& b) { return a * b; }
  static RingElem neg(const RingElem& a) { return -a; }
  static bool eq(const RingElem& a, const RingElem& b) { return a == b; }
  static int cmp(const RingElem& a, const RingElem& b) {
    return coords_cmp(a.coords(), b.coords());
  }
  static bool is_unit(const RingElem& c) { return c.try_invert().has_value(); }
  static RingElem slot_permute(const RingElem& c, const std::vector<int>& perm) {
    return c.slot_permute(perm);
  }
};

// An invertible coefficient with its precomputed inverse, so negative powers
// never require an ambient solve (inverting inside a big tensor model would).
template <class C>
struct UnitCoeff {
  C c;
  C cinv;
};

// 1 - c * z^delta, where delta carries exponent +1 at var a, -1 at var b and
// possibly q-exponents (torus-mode coefficients are +-(q-monomial)).
template <class C>
struct BinomialFactor {
  int a = 0;
  int b = 0;
  ExpVec delta;
  C c;
};

template <class C>
int factor_cmp(const BinomialFactor<C>& x, const BinomialFactor<C>& y) {
  if (x.a != y.a) return x.a < y.a ? -1 : 1;
  if (x.b != y.b) return x.b < y.b ? -1 : 1;
  if (int k = exp_cmp(x.delta, y.delta)) return k;
  return CoeffOps<C>::cmp(x.c, y.c);
}

template <class C>
bool factor_less(const BinomialFactor<C>& x, const BinomialFactor<C>& y) {
  return factor_cmp(x, y) < 0;
}

template <class C>
bool factor_eq(const BinomialFactor<C>& x, const BinomialFactor<C>& y) {
  return factor_cmp(x, y) == 0;
}

// Multivariate Laurent polynomial in z_1..z_nz (exponent slots 0..nz-1)
// plus nq extra q-exponent slots (0 or 2).  Terms are kept as a flat vector
// sorted by exponent key with no zero coefficients; bulk operations are
// two-pointer merges, which is what makes the multi-million-term shuffle
// numerators tractable.
template <class C>
class Laurent {
 public:
  using Term = std::pair<ExpVec, C>;
  using Ops = CoeffOps<C>;

  Laurent() = default;
  Laurent(int nz, int nq) : nz_(nz), nq_(nq) {}

  static Laurent monomial(int nz, int nq, ExpVec key, C coeff) {
    Laurent r(nz, nq);
    if (!Ops::is_zero(coeff)) r.terms_.emplace_back(std::move(key), std::move(coeff));
    return r;
  }

  static Laurent from_terms(int nz, int nq, std::vector<Term> ts) {
    Laurent r(nz, nq);
    r.terms_ = normalize(std::move(ts));
    return r;
  }

  // Precondition: ts strictly increasing by key, no zero coefficients.  For
  // merge pipelines that already maintain the canonical order.
  static Laurent from_sorted_terms(int nz, int nq, std::vector<Term> ts) {
    Laurent r(nz, nq);
    r.terms_ = std::move(ts);
    return r;
  }

  int nz() const { return nz_; }
  int nq() const { return nq_; }
  int key_size() const { return nz_ + nq_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  friend bool operator==(const Laurent& x, const Laurent& y) {
    if (x.nz_ != y.nz_ || x.nq_ != y.nq_ || x.terms_.size() != y.terms_.size())
      return false;
    for (std::size_t i = 0; i < x.terms_.size(); ++i) {
      if (exp_cmp(x.terms_[i].first, y.terms_[i].first) != 0) return false;
      if (!Ops::eq(x.terms_[i].second, y.terms_[i].second)) return false;
    }
    return true;
  }

  friend Laurent operator+(const Laurent& x, const Laurent& y) {
    x.check_mode(y);
    Laurent r(x.nz_, x.nq_);
    r.terms_.reserve(x.terms_.size() + y.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < x.terms_.size() || j < y.terms_.size()) {
      int k = i == x.terms_.size()   ? 1
              : j == y.terms_.size() ? -1
                                     : exp_cmp(x.terms_[i].first, y.terms_[j].first);
      if (k < 0) {
        r.terms_.push_back(x.terms_[i++]);
      } else if (k > 0) {
        r.terms_.push_back(y.terms_[j++]);
      } else {
        C c = Ops::add(x.terms_[i].second, y.terms_[j].second);
        if (!Ops::is_zero(c)) r.terms_.emplace_back(x.terms_[i].first, std::move(c));
        ++i, ++j;
      }
    }
    return r;
  }

  Laurent operator-() const {
    Laurent r = *this;
    for (auto& t : r.terms_) t.second = Ops::neg(t.second);
    return r;
  }

  friend Laurent operator-(const Laurent& x, const Laurent& y) { return x + (-y); }

  // Schoolbook product; fine for the small operands the checkers multiply.
  // The shuffle hot path never calls this on two large inputs.
  friend Laurent operator*(const Laurent& x, const Laurent& y) {
    x.check_mode(y);
    if (x.terms_.empty() || y.terms_.empty()) return Laurent(x.nz_, x.nq_);
    if (x.terms_.size() == 1) return y.mul_monomial(x.terms_[0].first, x.terms_[0].second);
    if (y.terms_.size() == 1) return x.mul_monomial(y.terms_[0].first, y.terms_[0].second);
    std::vector<Term> acc;
    acc.reserve(x.terms_.size() * y.terms_.size());
    for (const auto& [xk, xc] : x.terms_)
      for (const auto& [yk, yc] : y.terms_) {
        C c = Ops::mul(xc, yc);
        if (!Ops::is_zero(c)) acc.emplace_back(exp_sum(xk, yk), std::move(c));
      }
    return from_terms(x.nz_, x.nq_, std::move(acc));
  }

  Laurent scale(const C& k) const {
    Laurent r(nz_, nq_);
    r.terms_.reserve(terms_.size());
    for (const auto& [key, c] : terms_) {
      C nc = Ops::mul(c, k);
      if (!Ops::is_zero(nc)) r.terms_.emplace_back(key, std::move(nc));
    }
    return r;
  }

  // x * coeff * z^delta: a key shift preserves lexicographic order.
  Laurent mul_monomial(const ExpVec& delta, const C& coeff) const {
    Laurent r(nz_, nq_);
    if (Ops::is_zero(coeff)) return r;
    r.terms_.reserve(terms_.size());
    for (const auto& [key, c] : terms_) {
      C nc = Ops::mul(c, coeff);
      if (!Ops::is_zero(nc)) r.terms_.emplace_back(exp_sum(key, delta), std::move(nc));
    }
    return r;
  }

  // x * (1 - c z^delta) as a single linear merge of x with its shift.
  Laurent mul_binomial(const BinomialFactor<C>& f) const {
    Laurent shifted = mul_monomial(f.delta, Ops::neg(f.c));
    return *this + shifted;
  }

  Laurent mul_binomials(const std::vector<BinomialFactor<C>>& fs) const {
    Laurent r = *this;
    for (const auto& f : fs) r = r.mul_binomial(f);
    return r;
  }

  // Exact quotient by (1 - c z^delta), or nullopt if x is not divisible.
  // View x as a polynomial in u = z_a/z_b: x = sum_e u^e A_e with the A_e
  // free of z_a.  Since the divisor's constant term is 1, the quotient is
  // forced degree-by-degree from the bottom: q_e = A_e + (c z^gamma) q_{e-1}
  // with gamma = delta - e_a + e_b; x is divisible iff the forced sequence
  // terminates at zero.  No coefficient division happens anywhere, so this
  // is correct over rings with nilpotents.
  std::optional<Laurent> divide_binomial(const BinomialFactor<C>& f) const {
    if (terms_.empty()) return *this;
    ExpVec gamma = f.delta;
    gamma[f.a] = exp_add(gamma[f.a], Exp(-1));
    gamma[f.b] = exp_add(gamma[f.b], Exp(1));
    long emin = terms_[0].first[f.a], emax = emin;
    for (const auto& [key, c] : terms_) {
      emin = std::min(emin, long(key[f.a]));
      emax = std::max(emax, long(key[f.a]));
    }
    // Bucket terms by u-exponent; residual keys zero the a-slot and absorb
    // it into the b-slot (u^e z_b^(m_a+m_b) = z_a^(m_a) z_b^(m_b) at e=m_a).
    std::vector<std::vector<Term>> buckets(emax - emin + 1);
    for (const auto& [key, c] : terms_) {
      long e = key[f.a];
      ExpVec rk = key;
      rk[f.b] = checked_exp(long(rk[f.b]) + e);
      rk[f.a] = 0;
      buckets[e - emin].emplace_back(std::move(rk), c);
    }
    Laurent prev(nz_, nq_);  // q_{e-1}
    std::vector<Term> quotient;
    for (long t = 0; t <= emax - emin; ++t) {
      Laurent a = from_terms(nz_, nq_, std::move(buckets[t]));
      Laurent qt = a + prev.mul_monomial(gamma, f.c);
      if (t == emax - emin) {
        if (!qt.is_zero()) return std::nullopt;
        break;
      }
      long e = emin + t;
      for (const auto& [rk, c] : qt.terms_) {
        ExpVec key = rk;
        key[f.a] = checked_exp(e);
        key[f.b] = checked_exp(long(key[f.b]) - e);
        quotient.emplace_back(std::move(key), c);
      }
      prev = std::move(qt);
    }
    return from_terms(nz_, nq_, std::move(quotient));
  }

  // Ring homomorphism z_a -> c * z^mkey (mkey must not involve var a; c a
  // unit, supplied with its inverse so negative exponents stay exact).
  Laurent substitute_monomial(int a, const UnitCoeff<C>& u, const ExpVec& mkey) const {
    if (mkey[a] != 0) throw laurent_error("substitution: replacement involves the variable");
    std::vector<Term> acc;
    acc.reserve(terms_.size());
    for (const auto& [key, c] : terms_) {
      long e = key[a];
      ExpVec nk = key;
      nk[a] = 0;
      exp_axpy(nk, e, mkey);
      C nc = c;
      const C& base = e >= 0 ? u.c : u.cinv;
      for (long i = 0; i < std::abs(e); ++i) nc = Ops::mul(nc, base);
      if (!Ops::is_zero(nc)) acc.emplace_back(std::move(nk), std::move(nc));
    }
    return from_terms(nz_, nq_, std::move(acc));
  }

  // Simultaneous permutation of z-exponent slots and coefficient tensor
  // slots: slot i of the result takes slot perm[i] of the input.
  Laurent apply_perm(const std::vector<int>& perm) const {
    std::vector<Term> acc;
    acc.reserve(terms_.size());
    for (const auto& [key, c] : terms_)
      acc.emplace_back(exp_permute(key, perm), Ops::slot_permute(c, perm));
    return from_terms(nz_, nq_, std::move(acc));
  }

  Laurent apply_transposition(int i) const {
    std::vector<int> perm(nz_);
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[i], perm[i + 1]);
    return apply_perm(perm);
  }

  // Full-group sum over S_nz (not averaged: keeps integrality).
  Laurent symmetrize() const {
    std::vector<int> perm(nz_);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Term> acc;
    do {
      for (const auto& [key, c] : terms_)
        acc.emplace_back(exp_permute(key, perm), Ops::slot_permute(c, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return from_terms(nz_, nq_, std::move(acc));
  }

  bool is_symmetric() const {
    for (int i = 0; i + 1 < nz_; ++i)
      if (!(apply_transposition(i) == *this)) return false;
    return true;
  }

  // Keys unchanged (so order is preserved); zero images are dropped.
  template <class F>
  Laurent transform_coeffs(F&& f) const {
    Laurent r(nz_, nq_);
    r.terms_.reserve(terms_.size());
    for (const auto& [key, c] : terms_) {
      C nc = f(c);
      if (!Ops::is_zero(nc)) r.terms_.emplace_back(key, std::move(nc));
    }
    return r;
  }

  // Reindex into a wider variable ring: z_i -> z_{i+offset}, q-slots kept.
  Laurent expand_vars(int new_nz, int offset) const {
    Laurent r(new_nz, nq_);
    r.terms_.reserve(terms_.size());
    for (const auto& [key, c] : terms_) {
      ExpVec nk = zero_exps(new_nz + nq_);
      for (int i = 0; i < nz_; ++i) nk[i + offset] = key[i];
      for (int i = 0; i < nq_; ++i) nk[new_nz + i] = key[nz_ + i];
      r.terms_.emplace_back(std::move(nk), c);
    }
    // Shifted reindexing is monotone on keys only when the moved block stays
    // contiguous in the same order, which it does; still normalize to be safe.
    return from_terms(new_nz, nq_, std::move(r.terms_));
  }

  static std::vector<Term> normalize(std::vector<Term> ts) {
    std::sort(ts.begin(), ts.end(),
              [](const Term& a, const Term& b) { return exp_less(a.first, b.first); });
    std::vector<Term> out;
    out.reserve(ts.size());
    for (auto& t : ts) {
      if (!out.empty() && exp_cmp(out.back().first, t.first) == 0) {
        out.back().second = Ops::add(out.back().second, t.second);
        if (Ops::is_zero(out.back().second)) out.pop_back();
      } else if (!Ops::is_zero(t.second)) {
        out.push_back(std::move(t));
      }
    }
    return out;
  }

 private:
  void check_mode(const Laurent& y) const {
    if (nz_ != y.nz_ || nq_ != y.nq_) throw laurent_error("laurent mode mismatch");
  }

  int nz_ = 0;
  int nq_ = 0;
  std::vector<Term> terms_;
};

using TorusElem = Laurent<Int>;     // coefficients Z[q1^, q2^] via 2 q-slots
using SurfaceElem = Laurent<RingElem>;

// Laurent numerator over a multiset of admissible binomial denominators.
template <class C>
struct Rat {
  Laurent<C> num;
  std::vector<BinomialFactor<C>> den;  // kept sorted (canonical multiset)

  static Rat from(Laurent<C> n, std::vector<BinomialFactor<C>> d = {}) {
    std::sort(d.begin(), d.end(), factor_less<C>);
    return Rat{std::move(n), std::move(d)};
  }
};

template <class C>
std::vector<BinomialFactor<C>> multiset_union_max(
    const std::vector<BinomialFactor<C>>& a, const std::vector<BinomialFactor<C>>& b) {
  std::vector<BinomialFactor<C>> r;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int k = i == a.size() ? 1 : j == b.size() ? -1 : factor_cmp(a[i], b[j]);
    if (k < 0)
      r.push_back(a[i++]);
    else if (k > 0)
      r.push_back(b[j++]);
    else
      r.push_back(a[i++]), ++j;
  }
  return r;
}

template <class C>
std::vector<BinomialFactor<C>> multiset_difference(
    const std::vector<BinomialFactor<C>>& a, const std::vector<BinomialFactor<C>>& b) {
  std::vector<BinomialFactor<C>> r;
  std::size_t i = 0, j = 0;
  while (i < a.size()) {
    if (j < b.size() && factor_cmp(a[i], b[j]) == 0) {
      ++i, ++j;
    } else if (j < b.size() && factor_cmp(b[j], a[i]) < 0) {
      ++j;
    } else {
      r.push_back(a[i++]);
    }
  }
  return r;
}

template <class C>
Rat<C> rat_mul(const Rat<C>& x, const Rat<C>& y) {
  std::vector<BinomialFactor<C>> d = x.den;
  d.insert(d.end(), y.den.begin(), y.den.end());
  std::sort(d.begin(), d.end(), factor_less<C>);
  return Rat<C>{x.num * y.num, std::move(d)};
}

template <class C>
Rat<C> rat_add(const Rat<C>& x, const Rat<C>& y) {
  auto u = multiset_union_max(x.den, y.den);
  Laurent<C> nx = x.num.mul_binomials(multiset_difference(u, x.den));
  Laurent<C> ny = y.num.mul_binomials(multiset_difference(u, y.den));
  return Rat<C>{nx + ny, std::move(u)};
}

template <class C>
Rat<C> rat_neg(const Rat<C>& x) {
  return Rat<C>{-x.num, x.den};
}

template <class C>
bool rat_equal(const Rat<C>& x, const Rat<C>& y) {
  auto u = multiset_union_max(x.den, y.den);
  return x.num.mul_binomials(multiset_difference(u, x.den)) ==
         y.num.mul_binomials(multiset_difference(u, y.den));
}

template <class C>
BinomialFactor<C> factor_apply_perm(const BinomialFactor<C>& f,
                                    const std::vector<int>& perm) {
  // perm moves slot perm[i] to slot i; variables move by the inverse map.
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = int(i);
  BinomialFactor<C> r;
  r.a = inv[f.a];
  r.b = inv[f.b];
  r.delta = zero_exps(f.delta.size());
  for (std::size_t i = 0; i < perm.size(); ++i) r.delta[inv[i]] = f.delta[i];
  for (std::size_t i = perm.size(); i < f.delta.size(); ++i) r.delta[i] = f.delta[i];
  r.c = CoeffOps<C>::slot_permute(f.c, perm);
  return r;
}

template <class C>
Rat<C> rat_apply_perm(const Rat<C>& x, const std::vector<int>& perm) {
  Rat<C> r;
  r.num = x.num.apply_perm(perm);
  r.den.reserve(x.den.size());
  for (const auto& f : x.den) r.den.push_back(factor_apply_perm(f, perm));
  std::sort(r.den.begin(), r.den.end(), factor_less<C>);
  return r;
}

// Symmetry of the underlying rational function: generators suffice, and each
// comparison cross-multiplies only the factors the two sides do not share.
template <class C>
bool rat_is_symmetric(const Rat<C>& x) {
  int n = x.num.nz();
  for (int i = 0; i + 1 < n; ++i) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[i], perm[i + 1]);
    if (!rat_equal(x, rat_apply_perm(x, perm))) return false;
  }
  return true;
}

}  // namespace khall
