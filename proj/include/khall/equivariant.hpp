#pragma once

#include <algorithm>
#include <functional>
#include <iterator>
#include <utility>
#include <vector>

#include "khall/laurent.hpp"

namespace khall {

// A T-stable coordinate subspace of gl_n + gl_n: setA lists the elementary
// matrices E_{ab} present on the X side, setB on the Y side.  Indices are
// 0-based here; the CLI surface is 1-based.
struct CoordSubspace {
  int n = 0;
  std::vector<std::pair<int, int>> setA;
  std::vector<std::pair<int, int>> setB;

  static CoordSubspace make(int n, std::vector<std::pair<int, int>> a,
                            std::vector<std::pair<int, int>> b) {
    CoordSubspace s{n, std::move(a), std::move(b)};
    auto dedup = [n](std::vector<std::pair<int, int>>& v) {
      for (auto& [x, y] : v)
        if (x < 0 || x >= n || y < 0 || y >= n) throw laurent_error("coordinate out of range");
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedup(s.setA);
    dedup(s.setB);
    return s;
  }

  static CoordSubspace full(int n) {
    CoordSubspace s;
    s.n = n;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) s.setA.emplace_back(a, b), s.setB.emplace_back(a, b);
    return s;
  }

  // X <-> Y swap; matches the q1 <-> q2 symmetry of the commuting variety.
  CoordSubspace mirrored() const { return CoordSubspace{n, setB, setA}; }

  friend bool operator==(const CoordSubspace& x, const CoordSubspace& y) {
    return x.n == y.n && x.setA == y.setA && x.setB == y.setB;
  }
};

// The character by which the torus scales one coordinate: q1^{e1} q2^{e2}
// times a z-monomial, stored as a torus-mode exponent key (coefficient +1).
struct WeightMonomial {
  ExpVec key;  // length n + 2
};

inline ExpVec weight_key(int n, int var_a, int var_b, int q_slot) {
  ExpVec k = zero_exps(n + 2);
  k[var_a] = exp_add(k[var_a], Exp(1));
  k[var_b] = exp_add(k[var_b], Exp(-1));
  k[n + q_slot] = 1;
  return k;
}

// Coordinate (E_ab, 0) scales by q1 z_a/z_b, (0, E_cd) by q2 z_c/z_d.
// X coordinates first, row-major, then Y coordinates.
inline std::vector<WeightMonomial> weights_of_glpair(int n) {
  std::vector<WeightMonomial> w;
  w.reserve(2 * n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) w.push_back({weight_key(n, a, b, 0)});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) w.push_back({weight_key(n, a, b, 1)});
  return w;
}

// [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb; zero iff neither delta fires
// or both fire with E_ad = E_cb, which forces a=b=c=d.  Distinct coordinate
// monomials cannot cancel across pairs, so the generic element of L commutes
// iff every (A,B) pair does.
inline bool pair_commutes(std::pair<int, int> ab, std::pair<int, int> cd) {
  auto [a, b] = ab;
  auto [c, d] = cd;
  if (b != c && d != a) return true;
  return a == b && b == c && c == d;
}

inline bool is_commuting_subspace(const CoordSubspace& L) {
  for (auto& ab : L.setA)
    for (auto& cd : L.setB)
      if (!pair_commutes(ab, cd)) return false;
  return true;
}

inline bool subspace_contains(const CoordSubspace& outer, const CoordSubspace& inner) {
  auto sub = [](const std::vector<std::pair<int, int>>& big,
                const std::vector<std::pair<int, int>>& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
  };
  return outer.n == inner.n && sub(outer.setA, inner.setA) && sub(outer.setB, inner.setB);
}

inline CoordSubspace subspace_intersect(const CoordSubspace& x, const CoordSubspace& y) {
  CoordSubspace r;
  r.n = x.n;
  std::set_intersection(x.setA.begin(), x.setA.end(), y.setA.begin(), y.setA.end(),
                        std::back_inserter(r.setA));
  std::set_intersection(x.setB.begin(), x.setB.end(), y.setB.begin(), y.setB.end(),
                        std::back_inserter(r.setB));
  return r;
}

// Restriction class of L inside M: the Koszul product over the complementary
// weights, prod_{w in wt(M\L)} (1 - w^{-1}).
inline TorusElem koszul_restrict_class(const CoordSubspace& L, const CoordSubspace& M) {
  if (!subspace_contains(M, L)) throw laurent_error("koszul_restrict_class: L not inside M");
  int n = M.n;
  ExpVec one_key = zero_exps(n + 2);
  TorusElem r = TorusElem::monomial(n, 2, one_key, Int(1));
  auto apply_side = [&](const std::vector<std::pair<int, int>>& big,
                        const std::vector<std::pair<int, int>>& small, int q_slot) {
    for (auto& ab : big) {
      if (std::binary_search(small.begin(), small.end(), ab)) continue;
      ExpVec w = weight_key(n, ab.first, ab.second, q_slot);
      for (auto& e : w) e = Exp(-e);  // 1 - w^{-1}
      BinomialFactor<Int> f{0, 0, std::move(w), Int(1)};
      r = r.mul_binomial(f);
    }
  };
  apply_side(M.setA, L.setA, 0);
  apply_side(M.setB, L.setB, 1);
  return r;
}

// Inclusion-exclusion class of a union of coordinate subspaces inside M.
inline TorusElem union_class(const std::vector<CoordSubspace>& parts, const CoordSubspace& M) {
  if (parts.size() > 20) throw laurent_error("union_class: too many parts");
  TorusElem acc(M.n, 2);
  for (unsigned mask = 1; mask < (1u << parts.size()); ++mask) {
    CoordSubspace cap;
    bool first = true;
    for (unsigned t = 0; t < parts.size(); ++t) {
      if (!(mask >> t & 1)) continue;
      cap = first ? parts[t] : subspace_intersect(cap, parts[t]);
      first = false;
    }
    TorusElem cls = koszul_restrict_class(cap, M);
    acc = __builtin_popcount(mask) % 2 ? acc + cls : acc - cls;
  }
  return acc;
}

// q1 <-> q2 swap on coefficients; the image of the X <-> Y mirror on classes.
inline TorusElem mirror_q(const TorusElem& x) {
  const int n = x.nz();
  std::vector<TorusElem::Term> ts(x.terms().begin(), x.terms().end());
  for (auto& [key, c] : ts) std::swap(key[n], key[n + 1]);
  return TorusElem::from_terms(n, 2, std::move(ts));
}

enum class QOrdering { q1q2, q2q1 };

inline QOrdering mirrored(QOrdering o) {
  return o == QOrdering::q1q2 ? QOrdering::q2q1 : QOrdering::q1q2;
}

// Membership in (z_k - q_x z_j, z_j - q_y z_i) by triangular elimination:
// substitute z_k -> q_x z_j, then z_j -> q_y z_i, and test zero.  Exact: the
// generators eliminate z_k and z_j, leaving the Laurent ring in the rest.
inline bool comm_wheel_membership(const TorusElem& x, int i, int j, int k, QOrdering ord) {
  if (i == j || j == k || i == k) throw laurent_error("comm_wheel_membership: indices not distinct");
  int n = x.nz();
  int qx = ord == QOrdering::q1q2 ? 0 : 1;
  int qy = 1 - qx;
  UnitCoeff<Int> one{Int(1), Int(1)};
  ExpVec rep1 = zero_exps(n + 2);
  rep1[j] = 1;
  rep1[n + qx] = 1;  // z_k -> q_x z_j
  ExpVec rep2 = zero_exps(n + 2);
  rep2[i] = 1;
  rep2[n + qy] = 1;  // z_j -> q_y z_i
  return x.substitute_monomial(k, one, rep1).substitute_monomial(j, one, rep2).is_zero();
}

// All commuting coordinate subspaces with |setA| + |setB| <= size_bound,
// via backtracking over the X/Y compatibility graph.  X items are mutually
// compatible, as are Y items, so the only pruning edges run across sides.
// Deterministic order: subsets are emitted in lexicographic item order.
inline std::vector<CoordSubspace> enumerate_comm_subspaces(int n, int size_bound) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) pairs.emplace_back(a, b);
  const int m = int(pairs.size());
  std::vector<CoordSubspace> out;
  std::vector<int> chosenA, chosenB;

  // Items 0..m-1 are X coordinates, m..2m-1 are Y coordinates.
  auto compatible = [&](int item) {
    if (item < m) {
      for (int y : chosenB)
        if (!pair_commutes(pairs[item], pairs[y])) return false;
    } else {
      for (int x : chosenA)
        if (!pair_commutes(pairs[x], pairs[item - m])) return false;
    }
    return true;
  };
  std::function<void(int)> rec = [&](int next) {
    CoordSubspace s;
    s.n = n;
    for (int x : chosenA) s.setA.push_back(pairs[x]);
    for (int y : chosenB) s.setB.push_back(pairs[y]);
    out.push_back(std::move(s));
    if (int(chosenA.size() + chosenB.size()) >= size_bound) return;
    for (int item = next; item < 2 * m; ++item) {
      if (!compatible(item)) continue;
      (item < m ? chosenA : chosenB).push_back(item < m ? item : item - m);
      rec(item + 1);
      (item < m ? chosenA : chosenB).pop_back();
    }
  };
  rec(0);
  return out;
}

// Membership in the symmetrized intersection ideal I_n^Sym: symmetric, and
// in every wheel ideal for every ordered distinct triple and both orderings.
inline bool symmetric_wheel_check(const TorusElem& x, int n) {
  if (!x.is_symmetric()) return false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        if (!comm_wheel_membership(x, i, j, k, QOrdering::q1q2)) return false;
        if (!comm_wheel_membership(x, i, j, k, QOrdering::q2q1)) return false;
      }
  return true;
}

}  // namespace khall
