#pragma once

#include <cstdlib>
#include <optional>
#include <utility>
#include <vector>

#include "khall/laurent.hpp"
#include "khall/surface.hpp"

namespace khall {

enum class RatioOrientation { ji, ij };  // z_j/z_i (theorem) vs z_i/z_j

// Phi = prod over ordered pairs (i,j), i != j, of
//   sum_{k=0}^{r-1} (-1)^k ratio^k [wedge^k W in tensor slots (i,j)],
// the alternating-sum convention for [wedge W].
inline SurfaceElem multiplier_phi(int n, const KSurfaceModel& surf,
                                  RatioOrientation o = RatioOrientation::ji) {
  auto model = RingModel::tensor_power(surf.ring, n);
  SurfaceElem phi = SurfaceElem::monomial(n, 0, zero_exps(n), RingElem::unit(model));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<SurfaceElem::Term> ts;
      for (unsigned k = 0; k < surf.r; ++k) {
        ExpVec key = zero_exps(n);
        int hi = o == RatioOrientation::ji ? j : i;
        int lo = o == RatioOrientation::ji ? i : j;
        key[hi] = Exp(k);
        key[lo] = Exp(-int(k));
        RingElem c = embed_pair(model, surf.wedgeW[k], i, j);
        if (k % 2) c = -c;
        ts.emplace_back(std::move(key), std::move(c));
      }
      phi = phi * SurfaceElem::from_terms(n, 0, std::move(ts));
    }
  return phi;
}

template <class C>
struct PoleResult {
  std::optional<Laurent<C>> value;             // present iff the condition holds
  std::optional<BinomialFactor<C>> violation;  // first non-divisible factor
};

// Clears a denominator multiset by exact division, factor by factor in
// canonical multiset order.
template <class C>
PoleResult<C> clear_denominator(const Rat<C>& f) {
  Laurent<C> g = f.num;
  for (const auto& d : f.den) {
    auto q = g.divide_binomial(d);
    if (!q) return {std::nullopt, d};
    g = std::move(*q);
  }
  return {std::move(g), std::nullopt};
}

// Pole condition: Phi * F must be a genuine Laurent class.  Returns it, or
// the first denominator factor that does not divide.
inline PoleResult<RingElem> pole_check(const Rat<RingElem>& F, const KSurfaceModel& surf,
                                       RatioOrientation o = RatioOrientation::ji) {
  SurfaceElem phi = multiplier_phi(F.num.nz(), surf, o);
  return clear_denominator(Rat<RingElem>{phi * F.num, F.den});
}

// Restriction to the small diagonal s_i = s_j = s_k: coefficient tensor
// slots i,j,k are multiplied in K(S) and merged into slot min(i,j,k).  The
// z-variables are untouched; only the coefficient model shrinks.
inline SurfaceElem restrict_small_diagonal(const SurfaceElem& G, int i, int j, int k) {
  if (i == j || j == k || i == k) throw laurent_error("restrict: indices not distinct");
  const RingModelPtr model = G.terms().empty() ? nullptr : G.terms()[0].second.model();
  if (!model) return SurfaceElem(G.nz(), 0);
  unsigned n = model->tensor_degree();
  auto base = model->tensor_base() ? model->tensor_base() : model;
  auto small = RingModel::tensor_power(base, n - 2);
  int lo = std::min({i, j, k});
  std::vector<int> kept;  // old slots surviving in order, merged slot at lo
  for (unsigned s = 0; s < n; ++s)
    if (int(s) == lo || (int(s) != i && int(s) != j && int(s) != k)) kept.push_back(int(s));

  return G.transform_coeffs([&](const RingElem& c) {
    Coords acc;
    for (const auto& [idx, v] : c.coords()) {
      auto dg = model->digits(idx);
      RingElem merged = RingElem::basis(base, dg[i]) * RingElem::basis(base, dg[j]) *
                        RingElem::basis(base, dg[k]);
      for (const auto& [mb, mc] : merged.coords()) {
        std::vector<std::uint32_t> nd;
        nd.reserve(kept.size());
        for (int s : kept) nd.push_back(s == lo ? mb : dg[s]);
        acc.emplace_back(small->index_of_digits(nd), v * mc);
      }
    }
    return RingElem(small, coords_normalize(std::move(acc)));
  });
}

// Inputs the generic wheel reduction needs: omega as an invertible monomial
// (coefficient plus exponent-key part) and the symmetric classes c1, c2 of
// the quadratic generator, as ambient Laurent elements free of z_i, z_j, z_k.
template <class C>
struct WheelIdeal {
  UnitCoeff<C> omega;
  ExpVec omega_key;
  Laurent<C> c1, c2;
};

// Membership in (1 - (z_i/z_k) omega, 1 - c1 (z_j/z_k) + c2 (z_j/z_k)^2).
// Change variables to u = z_i/z_k, v = z_j/z_k; the first generator forces
// u -> omega^{-1} (a substitution, since its u-coefficient is the unit
// omega); then reduce mod g(v) = 1 - c1 v + c2 v^2 from the bottom.  Both
// extreme coefficients of g are units (1 and c2 = omega), so any nonzero
// multiple of g spans at least three v-degrees, making the two-degree
// remainder unique: member iff it vanishes.
template <class C>
bool wheel_membership(const Laurent<C>& x, int i, int j, int k, const WheelIdeal<C>& W) {
  if (i == j || j == k || i == k) throw laurent_error("wheel_membership: indices not distinct");
  using Ops = CoeffOps<C>;
  // Step 1: monomial change of variables plus u -> omega^{-1}.  Slot j keeps
  // the v-exponent, slot k the total z-degree of the (i,j,k) block.
  std::vector<typename Laurent<C>::Term> ts;
  ts.reserve(x.terms().size());
  for (const auto& [key, c] : x.terms()) {
    long e = key[i];
    ExpVec nk = key;
    nk[k] = checked_exp(long(nk[k]) + long(nk[i]) + long(nk[j]));
    nk[i] = 0;
    exp_axpy(nk, -e, W.omega_key);
    C nc = c;
    const C& base = e >= 0 ? W.omega.cinv : W.omega.c;
    for (long t = 0; t < std::abs(e); ++t) nc = Ops::mul(nc, base);
    if (!Ops::is_zero(nc)) ts.emplace_back(std::move(nk), std::move(nc));
  }
  Laurent<C> y = Laurent<C>::from_terms(x.nz(), x.nq(), std::move(ts));
  if (y.is_zero()) return true;

  // Step 2: bucket by v-exponent (slot j) and clear from the bottom.
  long emin = y.terms()[0].first[j], emax = emin;
  for (const auto& [key, c] : y.terms()) {
    emin = std::min(emin, long(key[j]));
    emax = std::max(emax, long(key[j]));
  }
  long D = emax - emin;
  std::vector<std::vector<typename Laurent<C>::Term>> buckets(D + 1);
  for (const auto& [key, c] : y.terms()) buckets[key[j] - emin].emplace_back(key, c);
  auto slice = [&](long t) {
    // v-exponent normalized away: slot j of each bucket key is rewritten to
    // zero so slices live in the coefficient ring of the remaining variables.
    std::vector<typename Laurent<C>::Term> s = std::move(buckets[t]);
    for (auto& [key, c] : s) key[j] = 0;
    return Laurent<C>::from_terms(y.nz(), y.nq(), std::move(s));
  };
  std::vector<Laurent<C>> B;
  B.reserve(D + 1);
  for (long t = 0; t <= D; ++t) B.push_back(slice(t));
  ExpVec vkey1 = zero_exps(y.key_size());
  vkey1[j] = 1;
  ExpVec vkey2 = zero_exps(y.key_size());
  vkey2[j] = 2;
  for (long t = 0; t + 2 <= D; ++t) {
    if (B[t].is_zero()) continue;
    // Subtract B_t * v^t * g: clears degree t, corrects t+1 and t+2.
    B[t + 1] = B[t + 1] + (B[t] * W.c1);
    B[t + 2] = B[t + 2] - (B[t] * W.c2);
    B[t] = Laurent<C>(y.nz(), y.nq());
  }
  return (D < 1 || B[D - 1].is_zero()) && B[D].is_zero();
}

// Surface instantiation over a K(S) model: coefficients sit in the tensor
// power whose merged slot (after restrict_small_diagonal) is merged_slot.
inline bool surface_wheel_membership(const SurfaceElem& G, int i, int j, int k,
                                     const KSurfaceModel& surf, unsigned merged_slot = 0) {
  if (G.is_zero()) return true;
  const RingModelPtr model = G.terms()[0].second.model();
  WheelIdeal<RingElem> W{
      {embed_at_slot(model, surf.omega, merged_slot),
       embed_at_slot(model, surf.omega_inv, merged_slot)},
      zero_exps(G.key_size()),
      SurfaceElem::monomial(G.nz(), 0, zero_exps(G.key_size()),
                            embed_at_slot(model, surf.c_omega, merged_slot)),
      SurfaceElem::monomial(G.nz(), 0, zero_exps(G.key_size()),
                            embed_at_slot(model, surf.omega, merged_slot)),
  };
  return wheel_membership(G, i, j, k, W);
}

// Torus instantiation: K(S) replaced by Z[q1^,q2^] with omega = q1 q2,
// c1 = q1 + q2, c2 = q1 q2 (the Chern-root specialization).
inline WheelIdeal<Int> torus_wheel_ideal(int n) {
  ExpVec omega_key = zero_exps(n + 2);
  omega_key[n] = 1;
  omega_key[n + 1] = 1;
  ExpVec q1 = zero_exps(n + 2), q2 = zero_exps(n + 2);
  q1[n] = 1;
  q2[n + 1] = 1;
  TorusElem c1 = TorusElem::monomial(n, 2, q1, Int(1)) + TorusElem::monomial(n, 2, q2, Int(1));
  TorusElem c2 = TorusElem::monomial(n, 2, omega_key, Int(1));
  return WheelIdeal<Int>{{Int(1), Int(1)}, std::move(omega_key), std::move(c1), std::move(c2)};
}

inline bool torus_wheel_membership(const TorusElem& x, int i, int j, int k) {
  return wheel_membership(x, i, j, k, torus_wheel_ideal(x.nz()));
}

}  // namespace khall
