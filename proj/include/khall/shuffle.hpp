#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "khall/laurent.hpp"
#include "khall/ring_model.hpp"

namespace khall {

// Kernel zeta(x) = prod(1 - c x) / prod(1 - c x) as factor lists; x gets
// instantiated as z_i/z_j for each cross pair.  The torus coefficients are
// +-(q-monomials): (coeff, q1-exp, q2-exp).
struct KernelFactor {
  Int c;
  Exp e1 = 0;
  Exp e2 = 0;
};

struct KernelSpec {
  std::vector<KernelFactor> num;
  std::vector<KernelFactor> den;
};

// zeta(x) = (1 - q1 x)(1 - q2 x) / ((1 - x)(1 - q1 q2 x)).
inline KernelSpec default_plane_kernel() {
  KernelSpec k;
  k.num = {{Int(1), 1, 0}, {Int(1), 0, 1}};
  k.den = {{Int(1), 0, 0}, {Int(1), 1, 1}};
  return k;
}

inline KernelSpec trivial_kernel() { return {}; }

// Mode-specific instantiation: fills the numerator/denominator factors of
// zeta(z_i/z_j) in an N-variable ring.
template <class C>
using KernelFn =
    std::function<void(int i, int j, int N, std::vector<BinomialFactor<C>>& num,
                       std::vector<BinomialFactor<C>>& den)>;

inline KernelFn<Int> torus_kernel_fn(const KernelSpec& spec, int nq = 2) {
  return [spec, nq](int i, int j, int N, std::vector<BinomialFactor<Int>>& num,
                    std::vector<BinomialFactor<Int>>& den) {
    auto inst = [&](const KernelFactor& f) {
      ExpVec delta = zero_exps(N + nq);
      delta[i] = 1;
      delta[j] = -1;
      if (nq == 2) {
        delta[N] = f.e1;
        delta[N + 1] = f.e2;
      }
      return BinomialFactor<Int>{i, j, std::move(delta), f.c};
    };
    for (const auto& f : spec.num) num.push_back(inst(f));
    for (const auto& f : spec.den) den.push_back(inst(f));
  };
}

template <class C>
KernelFn<C> trivial_kernel_fn() {
  return [](int, int, int, std::vector<BinomialFactor<C>>&, std::vector<BinomialFactor<C>>&) {};
}

// Surface coefficients carry no Chern-root slots, so only q-free kernel
// factors make sense here; the integer coefficient is scaled into the ring.
inline KernelFn<RingElem> surface_kernel_fn(const KernelSpec& spec, RingModelPtr base) {
  for (const auto& f : {std::cref(spec.num), std::cref(spec.den)})
    for (const auto& g : f.get())
      if (g.e1 != 0 || g.e2 != 0)
        throw laurent_error("surface kernel factors cannot carry q-exponents");
  return [spec, base](int i, int j, int N, std::vector<BinomialFactor<RingElem>>& num,
                      std::vector<BinomialFactor<RingElem>>& den) {
    auto model = RingModel::tensor_power(base, unsigned(N));
    auto inst = [&](const KernelFactor& f) {
      ExpVec delta = zero_exps(N);
      delta[i] = 1;
      delta[j] = -1;
      return BinomialFactor<RingElem>{i, j, std::move(delta), f.c * RingElem::unit(model)};
    };
    for (const auto& f : spec.num) num.push_back(inst(f));
    for (const auto& f : spec.den) den.push_back(inst(f));
  };
}

// Per-mode plumbing for building N-variable ambient rings and embedding a
// degree-n body into variables [offset, offset+n).
struct TorusMode {
  int nq = 2;

  Rat<Int> expand(const Rat<Int>& body, int old_n, int N, int offset) const {
    Rat<Int> r;
    r.num = body.num.expand_vars(N, offset);
    for (const auto& f : body.den) {
      BinomialFactor<Int> g;
      g.a = f.a + offset;
      g.b = f.b + offset;
      g.delta = zero_exps(N + nq);
      for (int i = 0; i < old_n; ++i) g.delta[i + offset] = f.delta[i];
      for (int i = 0; i < nq; ++i) g.delta[N + i] = f.delta[old_n + i];
      g.c = f.c;
      r.den.push_back(std::move(g));
    }
    std::sort(r.den.begin(), r.den.end(), factor_less<Int>);
    return r;
  }

  Laurent<Int> one(int N) const {
    return Laurent<Int>::monomial(N, nq, zero_exps(N + nq), Int(1));
  }
};

struct SurfaceMode {
  RingModelPtr base;
  int nq = 0;

  RingModelPtr model(int N) const {
    return N == 0 ? base : RingModel::tensor_power(base, unsigned(N));
  }

  RingElem embed(const RingElem& c, int old_n, int N, int offset) const {
    if (old_n == N) return c;
    auto src = c.model();
    auto dst = model(N);
    const Coords& u = base->unit_coords();
    Coords acc;
    for (const auto& [idx, v] : c.coords()) {
      auto dg = src->digits(idx);
      std::vector<Coords> singles(dg.size());
      std::vector<const Coords*> slots(N);
      for (int s = 0; s < N; ++s) {
        if (s >= offset && s < offset + old_n) {
          singles[s - offset] = {{dg[s - offset], Int(1)}};
          slots[s] = &singles[s - offset];
        } else {
          slots[s] = &u;
        }
      }
      for (auto& [k, w] : outer_coords(base->rank(), slots)) acc.emplace_back(k, v * w);
    }
    return RingElem(dst, coords_normalize(std::move(acc)));
  }

  Rat<RingElem> expand(const Rat<RingElem>& body, int old_n, int N, int offset) const {
    Rat<RingElem> r;
    r.num = body.num.expand_vars(N, offset).transform_coeffs(
        [&](const RingElem& c) { return embed(c, old_n, N, offset); });
    for (const auto& f : body.den) {
      BinomialFactor<RingElem> g;
      g.a = f.a + offset;
      g.b = f.b + offset;
      g.delta = zero_exps(N);
      for (int i = 0; i < old_n; ++i) g.delta[i + offset] = f.delta[i];
      g.c = embed(f.c, old_n, N, offset);
      r.den.push_back(std::move(g));
    }
    std::sort(r.den.begin(), r.den.end(), factor_less<RingElem>);
    return r;
  }

  Laurent<RingElem> one(int N) const {
    return Laurent<RingElem>::monomial(N, 0, zero_exps(N), RingElem::unit(model(N)));
  }
};

// Graded piece: a degree-n symmetric rational class.
template <class C>
struct GradedElem {
  int degree = 0;
  Rat<C> body;
};

template <class C, class Mode>
GradedElem<C> generator_element(Laurent<C> f, const Mode&) {
  return GradedElem<C>{1, Rat<C>::from(std::move(f))};
}

namespace detail {

// (n, N-n) shuffle coset representatives as slot permutations: for each
// n-subset S of positions, block-1 variables land on S in order and block-2
// variables on the complement in order.  perm[pos] = source variable.
inline std::vector<std::vector<int>> shuffle_cosets(int n, int N) {
  std::vector<std::vector<int>> out;
  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  for (;;) {
    std::vector<int> perm(N, -1);
    for (int t = 0; t < n; ++t) perm[comb[t]] = t;
    int next = n;
    for (int p = 0; p < N; ++p)
      if (perm[p] < 0) perm[p] = next++;
    out.push_back(std::move(perm));
    int i = n - 1;
    while (i >= 0 && comb[i] == i + N - n) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
  }
  return out;
}

template <class C>
bool multiset_invariant(const std::vector<BinomialFactor<C>>& U,
                        const std::vector<int>& perm) {
  auto img = U;
  for (auto& f : img) f = factor_apply_perm(f, perm);
  std::sort(img.begin(), img.end(), factor_less<C>);
  if (img.size() != U.size()) return false;
  for (std::size_t t = 0; t < U.size(); ++t)
    if (factor_cmp(img[t], U[t]) != 0) return false;
  return true;
}

// --- packed torus hot path --------------------------------------------------
// The degree-5 numerators run to millions of terms, and assembling them as
// ExpVec-keyed merges is dominated by key handling.  For integer coefficients
// the whole exponent key fits one machine word: slot 0 goes in the most
// significant field so unsigned comparison reproduces exp_cmp, every z-field
// shares one width and bias (coset permutations move values between z-slots),
// and widths come from exact support bounds over the full pipeline — inputs,
// every kernel and denominator factor — so no intermediate can leave its
// field.  Coefficients ride as overflow-checked int64.  Anything that does
// not fit makes the attempt return nullopt and the generic path runs instead.

struct PackedTerm {
  std::uint64_t key;
  long long c;
};

struct PackPlan {
  int nslots = 0;
  int used_bits = 0;
  std::uint64_t qmask = 0;      // q-fields in place, untouched by permutations
  std::uint64_t bias_word = 0;  // word(lo): subtracted once per packed key
  std::vector<int> shift;
  std::vector<std::uint64_t> mask;
  std::vector<long> lo;

  // Sum of d_s * 2^shift_s mod 2^64.  Packed keys are word(key) - bias_word;
  // sums and shifts of packed keys are plain word additions, and every value
  // whose true fields are in range (which the plan bounds guarantee for all
  // pipeline intermediates) decomposes back uniquely — borrows between fields
  // resolve themselves in the mod-2^64 arithmetic.
  std::uint64_t word(const ExpVec& d) const {
    std::uint64_t w = 0;
    for (int s = 0; s < nslots; ++s)
      w += std::uint64_t(std::int64_t(long(d[s]))) << shift[s];
    return w;
  }
  void unpack(std::uint64_t k, ExpVec& key) const {
    for (int s = 0; s < nslots; ++s)
      key[s] = Exp(long((k >> shift[s]) & mask[s]) + lo[s]);
  }
};

// Fields get slot 0 at the top so unsigned key order is lexicographic order;
// z-slots share one width and bias so permutations are plain field moves.
inline std::optional<PackPlan> plan_from_bounds(std::vector<long> lo, std::vector<long> hi,
                                                int N) {
  const int S = int(lo.size());
  for (int s = 1; s < N; ++s) {
    lo[0] = std::min(lo[0], lo[s]);
    hi[0] = std::max(hi[0], hi[s]);
  }
  for (int s = 1; s < N; ++s) {
    lo[s] = lo[0];
    hi[s] = hi[0];
  }
  PackPlan p;
  p.nslots = S;
  p.lo = std::move(lo);
  p.shift.assign(S, 0);
  p.mask.assign(S, 0);
  std::vector<int> w(S);
  int bits = 0;
  for (int s = 0; s < S; ++s) {
    w[s] = std::max(1, int(std::bit_width(std::uint64_t(hi[s] - p.lo[s]))));
    bits += w[s];
  }
  if (bits > 62) return std::nullopt;
  int sh = 0;
  for (int s = S - 1; s >= 0; --s) {
    p.shift[s] = sh;
    p.mask[s] = (std::uint64_t(1) << w[s]) - 1;
    sh += w[s];
  }
  p.used_bits = sh;
  for (int s = N; s < S; ++s) p.qmask |= p.mask[s] << p.shift[s];
  for (int s = 0; s < S; ++s)
    p.bias_word += std::uint64_t(std::int64_t(p.lo[s])) << p.shift[s];
  return p;
}

inline std::optional<PackPlan> make_pack_plan(const Laurent<Int>& F, const Laurent<Int>& G,
                                              const std::vector<BinomialFactor<Int>>& fs,
                                              int N) {
  const int S = F.key_size();
  auto scan = [&](const Laurent<Int>& x, std::vector<long>& xlo, std::vector<long>& xhi) {
    xlo.assign(S, std::numeric_limits<long>::max());
    xhi.assign(S, std::numeric_limits<long>::min());
    for (const auto& [key, c] : x.terms())
      for (int s = 0; s < S; ++s) {
        xlo[s] = std::min(xlo[s], long(key[s]));
        xhi[s] = std::max(xhi[s], long(key[s]));
      }
  };
  std::vector<long> flo, fhi, glo, ghi;
  scan(F, flo, fhi);
  scan(G, glo, ghi);
  std::vector<long> lo(S), hi(S);
  for (int s = 0; s < S; ++s) {
    lo[s] = flo[s] + glo[s];
    hi[s] = fhi[s] + ghi[s];
  }
  for (const auto& f : fs)
    for (int s = 0; s < S; ++s) {
      long d = long(f.delta[s]);
      (d < 0 ? lo[s] : hi[s]) += d;
    }
  return plan_from_bounds(std::move(lo), std::move(hi), N);
}

inline bool packed_coeff(const Int& v, long long& out) {
  static const Int kMax = std::numeric_limits<long long>::max();
  static const Int kMin = std::numeric_limits<long long>::min();
  if (v > kMax || v < kMin) return false;
  out = v.convert_to<long long>();
  return true;
}

// Sums runs of equal keys in a key-sorted vector; false on overflow.
inline bool collapse_sorted(std::vector<PackedTerm>& v) {
  std::size_t o = 0, i = 0;
  while (i < v.size()) {
    std::uint64_t k = v[i].key;
    long long s = v[i].c;
    for (++i; i < v.size() && v[i].key == k; ++i)
      if (__builtin_add_overflow(s, v[i].c, &s)) return false;
    if (s != 0) v[o++] = {k, s};
  }
  v.resize(o);
  return true;
}

// Sorts by key (LSD radix, digit width adapted so <=42-bit keys take two
// passes) and sums equal keys; false on coefficient overflow.
inline bool radix_collapse(std::vector<PackedTerm>& v, int used_bits) {
  if (v.size() > 4096) {
    const int passes = (used_bits + 20) / 21;
    const int db = (used_bits + passes - 1) / passes;
    std::vector<PackedTerm> tmp(v.size());
    std::vector<std::uint32_t> cnt(std::size_t(1) << db);
    const std::uint64_t dmask = cnt.size() - 1;
    for (int p = 0; p < passes; ++p) {
      const int sh = p * db;
      std::fill(cnt.begin(), cnt.end(), 0u);
      for (const auto& t : v) ++cnt[(t.key >> sh) & dmask];
      std::uint32_t run = 0;
      for (auto& c : cnt) {
        std::uint32_t k = c;
        c = run;
        run += k;
      }
      for (const auto& t : v) tmp[cnt[(t.key >> sh) & dmask]++] = t;
      v.swap(tmp);
    }
  } else {
    std::sort(v.begin(), v.end(),
              [](const PackedTerm& a, const PackedTerm& b) { return a.key < b.key; });
  }
  return collapse_sorted(v);
}

struct PackedPoly {
  PackPlan plan;
  std::vector<PackedTerm> terms;
};

inline Laurent<Int> unpack_terms(const PackPlan& plan, const std::vector<PackedTerm>& v,
                                 int N, int nq) {
  std::vector<Laurent<Int>::Term> ts;
  ts.reserve(v.size());
  ExpVec key = zero_exps(std::size_t(plan.nslots));
  for (const auto& t : v) {
    plan.unpack(t.key, key);
    ts.emplace_back(key, Int(t.c));
  }
  return Laurent<Int>::from_sorted_terms(N, nq, std::move(ts));
}

// F * G * prod factors as packed terms, sorted by key.  Empty inputs yield
// empty terms under a trivial plan; callers treat that as zero.
inline std::optional<PackedPoly> packed_summand(
    const Laurent<Int>& F, const Laurent<Int>& G,
    const std::vector<BinomialFactor<Int>>& factors) {
  constexpr std::size_t kProductCap = 8u << 20;
  const int N = F.nz();
  if (F.is_zero() || G.is_zero()) return PackedPoly{};
  auto plan_opt = make_pack_plan(F, G, factors, N);
  if (!plan_opt) return std::nullopt;
  const PackPlan& plan = *plan_opt;

  // Input keys are signed words; the bias rides on one side so a plain word
  // addition of an F-key and a G-key is the biased packing of their product.
  auto pack_poly = [&](const Laurent<Int>& x, std::uint64_t off,
                       std::vector<PackedTerm>& out) {
    out.reserve(x.term_count());
    for (const auto& [key, c] : x.terms()) {
      long long v;
      if (!packed_coeff(c, v)) return false;
      out.push_back({plan.word(key) - off, v});
    }
    return true;
  };
  std::vector<PackedTerm> a, b;
  if (!pack_poly(F, plan.bias_word, a) || !pack_poly(G, 0, b)) return std::nullopt;
  if (a.size() > b.size()) a.swap(b);

  bool ok = true;
  std::vector<PackedTerm> q;
  if (a.size() == 1) {
    q = std::move(b);
    for (auto& t : q) {
      t.key += a[0].key;
      ok &= !__builtin_mul_overflow(t.c, a[0].c, &t.c);
    }
  } else {
    if (a.size() * b.size() > kProductCap) return std::nullopt;
    q.reserve(a.size() * b.size());
    for (const auto& ta : a)
      for (const auto& tb : b) {
        long long c;
        ok &= !__builtin_mul_overflow(ta.c, tb.c, &c);
        q.push_back({ta.key + tb.key, c});
      }
    ok = ok && radix_collapse(q, plan.used_bits);
  }
  if (!ok) return std::nullopt;

  // Factors go in two at a time: (1 - c1 x^D1)(1 - c2 x^D2) applied to q is a
  // 4-way merge of q shifted by 0, D1, D2, D1+D2, which skips materializing
  // every other intermediate.  Keys stay below 2^62, so ~0 is a safe sentinel.
  std::size_t fi = 0;
  for (; fi + 1 < factors.size(); fi += 2) {
    long long c1, c2, sc[4] = {1, 0, 0, 0};
    if (!packed_coeff(factors[fi].c, c1) || !packed_coeff(factors[fi + 1].c, c2) ||
        __builtin_sub_overflow(0ll, c1, &sc[1]) ||
        __builtin_sub_overflow(0ll, c2, &sc[2]) ||
        __builtin_mul_overflow(c1, c2, &sc[3]))
      return std::nullopt;
    const std::uint64_t D1 = plan.word(factors[fi].delta);
    const std::uint64_t D2 = plan.word(factors[fi + 1].delta);
    const std::uint64_t off[4] = {0, D1, D2, D1 + D2};
    const std::size_t n = q.size();
    std::size_t idx[4] = {0, 0, 0, 0};
    std::uint64_t kk[4];
    for (int s = 0; s < 4; ++s) kk[s] = n ? q[0].key + off[s] : ~std::uint64_t(0);
    std::vector<PackedTerm> r;
    r.reserve(4 * n);
    while (true) {
      std::uint64_t best = std::min(std::min(kk[0], kk[1]), std::min(kk[2], kk[3]));
      if (best == ~std::uint64_t(0)) break;
      long long acc = 0;
      for (int s = 0; s < 4; ++s)
        if (kk[s] == best) {
          long long t;
          ok &= !__builtin_mul_overflow(q[idx[s]].c, sc[s], &t);
          ok &= !__builtin_add_overflow(acc, t, &acc);
          ++idx[s];
          kk[s] = idx[s] < n ? q[idx[s]].key + off[s] : ~std::uint64_t(0);
        }
      if (acc != 0) r.push_back({best, acc});
    }
    if (!ok) return std::nullopt;
    q = std::move(r);
  }
  for (; fi < factors.size(); ++fi) {
    long long fc, nfc;
    if (!packed_coeff(factors[fi].c, fc) || __builtin_sub_overflow(0ll, fc, &nfc))
      return std::nullopt;
    const std::uint64_t D = plan.word(factors[fi].delta);
    std::vector<PackedTerm> r;
    r.reserve(2 * q.size());
    std::size_t i = 0, j = 0;
    while (i < q.size() && j < q.size()) {
      std::uint64_t ki = q[i].key, kj = q[j].key + D;
      if (ki < kj) {
        r.push_back(q[i++]);
      } else {
        long long sc;
        ok &= !__builtin_mul_overflow(q[j].c, nfc, &sc);
        if (ki == kj) {
          long long s;
          ok &= !__builtin_add_overflow(q[i].c, sc, &s);
          if (s != 0) r.push_back({ki, s});
          ++i, ++j;
        } else {
          r.push_back({kj, sc});
          ++j;
        }
      }
    }
    for (; i < q.size(); ++i) r.push_back(q[i]);
    for (; j < q.size(); ++j) {
      long long sc;
      ok &= !__builtin_mul_overflow(q[j].c, nfc, &sc);
      r.push_back({q[j].key + D, sc});
    }
    if (!ok) return std::nullopt;
    q = std::move(r);
  }

  return PackedPoly{std::move(*plan_opt), std::move(q)};
}

// Repack to the measured support of the terms: the chain bounds above are
// much looser than the final support, and narrower fields keep radix digit
// tables cache-resident.  Field order is unchanged, so key order survives.
inline void tighten_plan(PackedPoly& p, int N) {
  if (p.terms.empty()) return;
  const PackPlan& plan = p.plan;
  std::vector<long> lo(plan.nslots, std::numeric_limits<long>::max());
  std::vector<long> hi(plan.nslots, std::numeric_limits<long>::min());
  for (const auto& t : p.terms)
    for (int s = 0; s < plan.nslots; ++s) {
      long v = long((t.key >> plan.shift[s]) & plan.mask[s]) + plan.lo[s];
      lo[s] = std::min(lo[s], v);
      hi[s] = std::max(hi[s], v);
    }
  auto tight = plan_from_bounds(std::move(lo), std::move(hi), N);
  if (!tight) return;
  for (auto& t : p.terms) {
    std::uint64_t k2 = 0;
    for (int s = 0; s < plan.nslots; ++s) {
      long v = long((t.key >> plan.shift[s]) & plan.mask[s]) + plan.lo[s];
      k2 |= std::uint64_t(v - tight->lo[s]) << tight->shift[s];
    }
    t.key = k2;
  }
  p.plan = std::move(*tight);
}

// Full invariant-denominator assembly in packed form:
//   sum over cosets sigma of sigma(F * G * prod factors).
inline std::optional<Laurent<Int>> packed_coset_sum(
    const Laurent<Int>& F, const Laurent<Int>& G,
    const std::vector<BinomialFactor<Int>>& factors,
    const std::vector<std::vector<int>>& cosets) {
  constexpr std::size_t kSumCap = 80u << 20;
  const int N = F.nz(), nq = F.nq();
  auto qp = packed_summand(F, G, factors);
  if (!qp) return std::nullopt;
  const std::size_t total = cosets.size() * qp->terms.size();
  if (total > kSumCap) return std::nullopt;
  if (total == 0) return Laurent<Int>(N, nq);
  tighten_plan(*qp, N);
  const PackPlan& plan = qp->plan;
  std::vector<PackedTerm>& q = qp->terms;

  // Coset permutations only move z-fields, the contiguous top bits of a key;
  // the q-field bits below them are coset-invariant.  So one counting pass by
  // q-bits on q before replication, plus one stable scatter by z-bits over the
  // replicated stream — generated term-outer/coset-inner so the low-bit order
  // carries into every bucket — is a complete LSD radix of the whole sum.
  if (total > 4096 && N >= 1 && N < 32) {
    const int qb = plan.shift[N - 1];
    const int zb = plan.used_bits - qb;
    if (qb <= 21 && zb <= 25) {
      {
        std::vector<PackedTerm> tmp(q.size());
        std::vector<std::uint32_t> cnt(std::size_t(1) << qb, 0u);
        const std::uint64_t m = cnt.size() - 1;
        for (const auto& t : q) ++cnt[t.key & m];
        std::uint32_t run = 0;
        for (auto& c : cnt) {
          std::uint32_t k = c;
          c = run;
          run += k;
        }
        for (const auto& t : q) tmp[cnt[t.key & m]++] = t;
        q.swap(tmp);
      }
      const int C = int(cosets.size());
      const std::uint64_t zmask = plan.mask[0];
      std::vector<int> src(std::size_t(C) * N);
      for (int ci = 0; ci < C; ++ci)
        for (int s = 0; s < N; ++s) src[std::size_t(ci) * N + s] = cosets[ci][s];
      std::vector<int> zshift(N);
      for (int s = 0; s < N; ++s) zshift[s] = plan.shift[s] - qb;
      std::uint64_t f[32];
      std::vector<std::uint32_t> cnt(std::size_t(1) << zb, 0u);
      for (const auto& t : q) {
        for (int s = 0; s < N; ++s) f[s] = (t.key >> plan.shift[s]) & zmask;
        for (int ci = 0; ci < C; ++ci) {
          const int* pp = &src[std::size_t(ci) * N];
          std::uint64_t zd = 0;
          for (int s = 0; s < N; ++s) zd |= f[pp[s]] << zshift[s];
          ++cnt[zd];
        }
      }
      std::uint32_t run = 0;
      for (auto& c : cnt) {
        std::uint32_t k = c;
        c = run;
        run += k;
      }
      auto big = std::make_unique_for_overwrite<PackedTerm[]>(total);
      for (const auto& t : q) {
        const std::uint64_t qpart = t.key & plan.qmask;
        for (int s = 0; s < N; ++s) f[s] = (t.key >> plan.shift[s]) & zmask;
        for (int ci = 0; ci < C; ++ci) {
          const int* pp = &src[std::size_t(ci) * N];
          std::uint64_t zd = 0;
          for (int s = 0; s < N; ++s) zd |= f[pp[s]] << zshift[s];
          big[cnt[zd]++] = {(zd << qb) | qpart, t.c};
        }
      }
      q.clear();
      q.shrink_to_fit();
      // collapse and unpack in one pass over the sorted buffer
      std::vector<Laurent<Int>::Term> ts;
      ExpVec key = zero_exps(std::size_t(plan.nslots));
      std::size_t i = 0;
      while (i < total) {
        const std::uint64_t k = big[i].key;
        long long s = big[i].c;
        for (++i; i < total && big[i].key == k; ++i)
          if (__builtin_add_overflow(s, big[i].c, &s)) return std::nullopt;
        if (s != 0) {
          plan.unpack(k, key);
          ts.emplace_back(key, Int(s));
        }
      }
      big.reset();
      return Laurent<Int>::from_sorted_terms(N, nq, std::move(ts));
    }
  }

  std::vector<PackedTerm> big;
  big.reserve(total);
  for (const auto& perm : cosets) {
    for (const auto& t : q) {
      std::uint64_t k = t.key & plan.qmask;
      for (int s = 0; s < N; ++s)
        k |= ((t.key >> plan.shift[perm[s]]) & plan.mask[perm[s]]) << plan.shift[s];
      big.push_back({k, t.c});
    }
  }
  q.clear();
  q.shrink_to_fit();
  if (!radix_collapse(big, plan.used_bits)) return std::nullopt;
  return unpack_terms(plan, big, N, nq);
}

// Restriction of the coset sum to keys with non-increasing z-fields.  Nothing
// is assumed here: every (term, coset) contribution is tested and kept iff
// its permuted key lands in the slice.  When the summand is invariant under
// within-block permutations the full sum is S_N-symmetric, and this slice —
// one sorted representative per variable orbit — determines it.
inline std::optional<PackedPoly> packed_coset_slice(
    const Laurent<Int>& F, const Laurent<Int>& G,
    const std::vector<BinomialFactor<Int>>& factors,
    const std::vector<std::vector<int>>& cosets) {
  constexpr std::size_t kScanCap = 256u << 20;
  const int N = F.nz();
  if (N < 1 || N >= 32) return std::nullopt;
  auto qp = packed_summand(F, G, factors);
  if (!qp) return std::nullopt;
  if (cosets.size() * qp->terms.size() > kScanCap) return std::nullopt;
  if (qp->terms.empty()) return PackedPoly{};
  tighten_plan(*qp, N);
  const PackPlan& plan = qp->plan;
  const int C = int(cosets.size());
  std::vector<int> src(std::size_t(C) * N);
  for (int ci = 0; ci < C; ++ci)
    for (int s = 0; s < N; ++s) src[std::size_t(ci) * N + s] = cosets[ci][s];
  const std::uint64_t zmask = plan.mask[0];
  std::vector<PackedTerm> kept;
  kept.reserve(qp->terms.size());
  std::uint64_t f[32];
  for (const auto& t : qp->terms) {
    for (int s = 0; s < N; ++s) f[s] = (t.key >> plan.shift[s]) & zmask;
    const std::uint64_t qpart = t.key & plan.qmask;
    for (int ci = 0; ci < C; ++ci) {
      const int* pp = &src[std::size_t(ci) * N];
      bool mono = true;
      for (int s = 1; s < N; ++s)
        if (f[pp[s - 1]] < f[pp[s]]) {
          mono = false;
          break;
        }
      if (!mono) continue;
      std::uint64_t k = qpart;
      for (int s = 0; s < N; ++s) k |= f[pp[s]] << plan.shift[s];
      kept.push_back({k, t.c});
    }
  }
  qp->terms = std::vector<PackedTerm>();
  if (!radix_collapse(kept, plan.used_bits)) return std::nullopt;
  return PackedPoly{std::move(qp->plan), std::move(kept)};
}

// Assembles the coset sum of a block-invariant summand from its slice: each
// slice term contributes its whole orbit — the distinct rearrangements of its
// z-fields, walked by prev_permutation from the sorted representative — so no
// two emitted keys collide and one radix sort finishes the job.  Orbit sizes
// are N!/prod(multiplicity!), needing N <= 20 to stay in 64 bits.
inline std::optional<Laurent<Int>> packed_symmetric_sum(
    const Laurent<Int>& F, const Laurent<Int>& G,
    const std::vector<BinomialFactor<Int>>& factors,
    const std::vector<std::vector<int>>& cosets) {
  constexpr std::size_t kSumCap = 80u << 20;
  const int N = F.nz(), nq = F.nq();
  if (N > 20) return std::nullopt;
  auto sl = packed_coset_slice(F, G, factors, cosets);
  if (!sl) return std::nullopt;
  if (sl->terms.empty()) return Laurent<Int>(N, nq);
  const PackPlan& plan = sl->plan;
  const std::uint64_t zmask = plan.mask[0];
  std::uint64_t fact[21] = {1};
  for (int i = 1; i <= N; ++i) fact[i] = fact[i - 1] * std::uint64_t(i);
  std::uint64_t f[32];
  std::size_t total = 0;
  for (const auto& t : sl->terms) {
    for (int s = 0; s < N; ++s) f[s] = (t.key >> plan.shift[s]) & zmask;
    std::uint64_t orb = fact[N];
    int run = 1;
    for (int s = 1; s < N; ++s) {
      if (f[s] == f[s - 1]) {
        ++run;
      } else {
        orb /= fact[run];
        run = 1;
      }
    }
    orb /= fact[run];
    total += orb;
    if (total > kSumCap) return std::nullopt;
  }
  std::vector<PackedTerm> out;
  out.reserve(total);
  for (const auto& t : sl->terms) {
    const std::uint64_t qpart = t.key & plan.qmask;
    for (int s = 0; s < N; ++s) f[s] = (t.key >> plan.shift[s]) & zmask;
    do {
      std::uint64_t k = qpart;
      for (int s = 0; s < N; ++s) k |= f[s] << plan.shift[s];
      out.push_back({k, t.c});
    } while (std::prev_permutation(f, f + N));
  }
  if (!radix_collapse(out, plan.used_bits)) return std::nullopt;
  return unpack_terms(plan, out, N, nq);
}

// Everything shuffle_product needs before numerator assembly: expanded
// bodies, kernel factor lists, coset representatives, per-coset denominators
// and their union, and whether that union is coset-invariant.
template <class C>
struct ShuffleParts {
  int n = 0, m = 0, N = 0;
  Rat<C> Fx, Gx;
  std::vector<BinomialFactor<C>> knum, den_pre, U;
  std::vector<std::vector<BinomialFactor<C>>> dens;
  std::vector<std::vector<int>> cosets;
  bool invariant = false;

  // numerator factors of the common-denominator summand Q
  std::vector<BinomialFactor<C>> summand_factors() const {
    auto fs = knum;
    auto diff = multiset_difference(U, den_pre);
    fs.insert(fs.end(), diff.begin(), diff.end());
    return fs;
  }
};

template <class C, class Mode>
ShuffleParts<C> shuffle_parts(const GradedElem<C>& F, const GradedElem<C>& G,
                              const KernelFn<C>& kernel, const Mode& mode) {
  ShuffleParts<C> P;
  P.n = F.degree;
  P.m = G.degree;
  P.N = P.n + P.m;
  P.Fx = mode.expand(F.body, P.n, P.N, 0);
  P.Gx = mode.expand(G.body, P.m, P.N, P.n);
  std::vector<BinomialFactor<C>> kden;
  for (int i = 0; i < P.n; ++i)
    for (int j = P.n; j < P.N; ++j) kernel(i, j, P.N, P.knum, kden);
  P.den_pre = P.Fx.den;
  P.den_pre.insert(P.den_pre.end(), P.Gx.den.begin(), P.Gx.den.end());
  P.den_pre.insert(P.den_pre.end(), kden.begin(), kden.end());
  std::sort(P.den_pre.begin(), P.den_pre.end(), factor_less<C>);
  P.cosets = shuffle_cosets(P.n, P.N);
  P.dens.reserve(P.cosets.size());
  for (const auto& perm : P.cosets) {
    auto d = P.den_pre;
    for (auto& f : d) f = factor_apply_perm(f, perm);
    std::sort(d.begin(), d.end(), factor_less<C>);
    P.U = multiset_union_max(P.U, d);
    P.dens.push_back(std::move(d));
  }
  P.invariant = true;
  for (const auto& perm : P.cosets)
    if (!multiset_invariant(P.U, perm)) {
      P.invariant = false;
      break;
    }
  return P;
}

// True when the common-denominator summand Fx*Gx*prod(fs) is invariant under
// every permutation preserving the blocks {0..n-1}, {n..N-1}.  The expanded
// bodies embed the original variables slot-uniformly, so symmetry of the
// unexpanded bodies covers them; the factor multiset is checked against each
// within-block adjacent transposition directly.  Invariance makes the coset
// sum fully S_N-symmetric, hence determined by its sorted-key slice.
template <class C>
bool block_invariant_summand(const GradedElem<C>& F, const GradedElem<C>& G,
                             std::vector<BinomialFactor<C>> fs, int N) {
  if (!F.body.num.is_symmetric() || !G.body.num.is_symmetric()) return false;
  std::sort(fs.begin(), fs.end(), factor_less<C>);
  std::vector<int> p(N);
  const int n = F.degree;
  for (int i = 0; i + 1 < N; ++i) {
    if (i + 1 == n) continue;
    std::iota(p.begin(), p.end(), 0);
    std::swap(p[i], p[i + 1]);
    if (!multiset_invariant(fs, p)) return false;
  }
  return true;
}

}  // namespace detail

// Sum over (n,m)-shuffle coset representatives sigma of
//   sigma( F(z_1..z_n) G(z_{n+1}..z_{n+m}) prod_{i<=n<j} zeta(z_i/z_j) ),
// assembled over the union denominator.  When that union is invariant under
// every coset permutation (it is for the homogeneous kernels used here), the
// cross-multiplied numerator is computed once and only permuted per coset;
// if the summand is moreover invariant within each variable block, the sum
// is rebuilt from its sorted-key slice by orbit expansion.
template <class C, class Mode>
GradedElem<C> shuffle_product(const GradedElem<C>& F, const GradedElem<C>& G,
                              const KernelFn<C>& kernel, const Mode& mode) {
  auto P = detail::shuffle_parts(F, G, kernel, mode);
  Laurent<C> num(P.Fx.num.nz(), P.Fx.num.nq());
  bool assembled = false;
  if constexpr (std::is_same_v<C, Int>) {
    if (P.invariant) {
      auto factors = P.summand_factors();
      if (detail::block_invariant_summand(F, G, factors, P.N)) {
        if (auto fast = detail::packed_symmetric_sum(P.Fx.num, P.Gx.num, factors, P.cosets)) {
          num = std::move(*fast);
          assembled = true;
        }
      }
      if (!assembled) {
        if (auto fast = detail::packed_coset_sum(P.Fx.num, P.Gx.num, factors, P.cosets)) {
          num = std::move(*fast);
          assembled = true;
        }
      }
    }
  }
  if (!assembled) {
    Laurent<C> base = (P.Fx.num * P.Gx.num).mul_binomials(P.knum);
    if (P.invariant) {
      Laurent<C> Q = base.mul_binomials(multiset_difference(P.U, P.den_pre));
      for (const auto& perm : P.cosets) num = num + Q.apply_perm(perm);
    } else {
      for (std::size_t t = 0; t < P.cosets.size(); ++t)
        num = num +
              base.apply_perm(P.cosets[t]).mul_binomials(multiset_difference(P.U, P.dens[t]));
    }
  }
  return GradedElem<C>{P.N, Rat<C>{std::move(num), std::move(P.U)}};
}

// Whether (F*G)*H == F*(G*H).  Both sides share the parenthesization-free
// denominator union, so for integer coefficients with symmetric operands and
// block-invariant summands the numerators are fully symmetric and can be
// compared slice against slice, skipping both full assemblies.
template <class C, class Mode>
bool associativity_check(const GradedElem<C>& F, const GradedElem<C>& G,
                         const GradedElem<C>& H, const KernelFn<C>& kernel,
                         const Mode& mode) {
  auto FG = shuffle_product(F, G, kernel, mode);
  auto GH = shuffle_product(G, H, kernel, mode);
  if constexpr (std::is_same_v<C, Int>) {
    auto PL = detail::shuffle_parts(FG, H, kernel, mode);
    auto PR = detail::shuffle_parts(F, GH, kernel, mode);
    if (PL.invariant && PR.invariant && PL.U.size() == PR.U.size()) {
      bool same_den = true;
      for (std::size_t t = 0; same_den && t < PL.U.size(); ++t)
        same_den = factor_cmp(PL.U[t], PR.U[t]) == 0;
      if (same_den) {
        auto fL = PL.summand_factors();
        auto fR = PR.summand_factors();
        if (detail::block_invariant_summand(FG, H, fL, PL.N) &&
            detail::block_invariant_summand(F, GH, fR, PR.N)) {
          auto sL = detail::packed_coset_slice(PL.Fx.num, PL.Gx.num, fL, PL.cosets);
          auto sR = detail::packed_coset_slice(PR.Fx.num, PR.Gx.num, fR, PR.cosets);
          if (sL && sR)
            return detail::unpack_terms(sL->plan, sL->terms, PL.N, PL.Fx.num.nq()) ==
                   detail::unpack_terms(sR->plan, sR->terms, PR.N, PR.Fx.num.nq());
        }
      }
    }
  }
  auto L = shuffle_product(FG, H, kernel, mode);
  auto R = shuffle_product(F, GH, kernel, mode);
  return L.degree == R.degree && rat_equal(L.body, R.body);
}

}  // namespace khall
