#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "khall/laurent.hpp"

namespace khall {

// Per-slot inclusive exponent bounds for oracle ansatz supports.
struct SupportBox {
  std::vector<std::pair<int, int>> range;

  std::size_t size() const {
    std::size_t s = 1;
    for (auto [lo, hi] : range) s *= std::size_t(hi - lo + 1);
    return s;
  }

  template <class F>
  void for_each_key(F&& f) const {
    ExpVec key(range.size());
    for (std::size_t i = 0; i < range.size(); ++i) key[i] = checked_exp(range[i].first);
    for (;;) {
      f(key);
      std::size_t i = 0;
      while (i < range.size()) {
        if (key[i] < range[i].second) {
          ++key[i];
          for (std::size_t j = 0; j < i; ++j) key[j] = checked_exp(range[j].first);
          break;
        }
        ++i;
      }
      if (i == range.size()) return;
    }
  }
};

// Slot-wise bounds such that a generator shifted by any in-box key can still
// reach the support of x, plus a pad for cancellation room.
template <class C>
SupportBox suggest_box(const Laurent<C>& x, const std::vector<Laurent<C>>& gens, int pad) {
  const std::size_t ks = x.key_size();
  std::vector<int> xlo(ks, 0), xhi(ks, 0), glo(ks, 0), ghi(ks, 0);
  if (!x.terms().empty())
    for (std::size_t i = 0; i < ks; ++i) xlo[i] = xhi[i] = int(x.terms()[0].first[i]);
  for (const auto& [key, c] : x.terms())
    for (std::size_t i = 0; i < ks; ++i) {
      xlo[i] = std::min(xlo[i], int(key[i]));
      xhi[i] = std::max(xhi[i], int(key[i]));
    }
  for (const auto& g : gens)
    for (const auto& [key, c] : g.terms())
      for (std::size_t i = 0; i < ks; ++i) {
        glo[i] = std::min(glo[i], int(key[i]));
        ghi[i] = std::max(ghi[i], int(key[i]));
      }
  SupportBox box;
  box.range.resize(ks);
  for (std::size_t i = 0; i < ks; ++i)
    box.range[i] = {xlo[i] - ghi[i] - pad, xhi[i] - glo[i] + pad};
  return box;
}

struct OracleResult {
  bool member = false;
  bool integer_certificate = false;
};

struct oracle_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Scalar expansion of (basis t of the coefficient ring) * gc as a list of
// (basis index, integer).  Torus coefficients are rank 1.
inline std::vector<std::pair<std::uint32_t, Int>> coeff_expand(const Int& gc, std::uint32_t) {
  return {{0u, gc}};
}
inline std::vector<std::pair<std::uint32_t, Int>> coeff_expand(const RingElem& gc,
                                                               std::uint32_t t) {
  Coords r;
  for (const auto& [gi, gv] : gc.coords())
    for (const auto& [k, ck] : gc.model()->mul_basis(t, gi)) r.emplace_back(k, gv * ck);
  return coords_normalize(std::move(r));
}

inline std::vector<std::pair<std::uint32_t, Int>> coeff_coords(const Int& c) {
  return {{0u, c}};
}
inline std::vector<std::pair<std::uint32_t, Int>> coeff_coords(const RingElem& c) {
  return c.coords();
}

inline std::uint32_t coeff_rank(const Laurent<Int>&) { return 1; }
inline std::uint32_t coeff_rank(const Laurent<RingElem>& x) {
  return x.terms().empty() ? 1 : x.terms()[0].second.model()->rank();
}

struct RowKeyLess {
  bool operator()(const std::pair<ExpVec, std::uint32_t>& a,
                  const std::pair<ExpVec, std::uint32_t>& b) const {
    if (int k = exp_cmp(a.first, b.first)) return k < 0;
    return a.second < b.second;
  }
};

}  // namespace detail

// Decides whether x = sum_m a_m g_m is solvable with each a_m supported in
// the box, by exact rational elimination.  `member` is certified: the
// solution is re-expanded and compared with x before returning.  A false
// only means "no combination within this box".  Pivoting prefers short rows
// and unit entries, which on unit-coefficient generators tends to produce
// integer certificates.
template <class C>
OracleResult membership_oracle(const Laurent<C>& x, const std::vector<Laurent<C>>& gens,
                               const SupportBox& box, std::size_t max_unknowns = 50000) {
  const std::uint32_t d = detail::coeff_rank(gens.empty() ? x : gens[0]);
  if (gens.size() * box.size() * d > max_unknowns)
    throw oracle_error("membership oracle: box too large");
  if (x.is_zero()) return {true, true};
  if (gens.empty()) return {false, false};

  using RowKey = std::pair<ExpVec, std::uint32_t>;
  std::map<RowKey, std::size_t, detail::RowKeyLess> row_of;
  auto row_id = [&](const ExpVec& key, std::uint32_t t) {
    return row_of.try_emplace({key, t}, row_of.size()).first->second;
  };

  struct UnknownMeta {
    std::size_t gen;
    ExpVec key;
    std::uint32_t basis;
  };
  std::vector<UnknownMeta> meta;
  std::vector<std::map<std::size_t, Rational>> cols;
  for (std::size_t m = 0; m < gens.size(); ++m) {
    box.for_each_key([&](const ExpVec& bkey) {
      for (std::uint32_t t = 0; t < d; ++t) {
        std::map<std::size_t, Rational> col;
        for (const auto& [gk, gc] : gens[m].terms()) {
          ExpVec rk = exp_sum(bkey, gk);
          for (const auto& [tb, tv] : detail::coeff_expand(gc, t)) {
            Rational& v = col[row_id(rk, tb)];
            v += Rational(tv);
          }
        }
        std::erase_if(col, [](const auto& kv) { return kv.second == 0; });
        if (!col.empty()) {
          cols.push_back(std::move(col));
          meta.push_back({m, bkey, t});
        }
      }
    });
  }

  std::vector<std::pair<std::size_t, Rational>> rhs_entries;
  for (const auto& [key, c] : x.terms())
    for (const auto& [t, v] : detail::coeff_coords(c))
      if (v != 0) rhs_entries.emplace_back(row_id(key, t), Rational(v));

  const std::size_t n_rows = row_of.size();
  std::vector<Rational> rhs(n_rows, Rational(0));
  for (auto& [r, v] : rhs_entries) rhs[r] = v;
  std::vector<std::map<std::size_t, Rational>> rows(n_rows);
  for (std::size_t u = 0; u < cols.size(); ++u)
    for (const auto& [r, v] : cols[u]) rows[r][u] = v;

  std::vector<char> row_done(n_rows, 0);
  std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, col)
  for (;;) {
    std::size_t best = n_rows;
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (row_done[r] || rows[r].empty()) continue;
      if (best == n_rows || rows[r].size() < rows[best].size()) best = r;
    }
    if (best == n_rows) break;
    std::size_t pc = rows[best].begin()->first;
    for (const auto& [c, v] : rows[best])
      if (v == 1 || v == -1) {
        pc = c;
        break;
      }
    const Rational pv = rows[best][pc];
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (r == best) continue;
      auto it = rows[r].find(pc);
      if (it == rows[r].end()) continue;
      Rational f = it->second / pv;
      rhs[r] -= f * rhs[best];
      for (const auto& [c, v] : rows[best]) {
        auto jt = rows[r].find(c);
        Rational nv = (jt == rows[r].end() ? Rational(0) : jt->second) - f * v;
        if (nv == 0) {
          if (jt != rows[r].end()) rows[r].erase(jt);
        } else {
          rows[r][c] = std::move(nv);
        }
      }
    }
    row_done[best] = 1;
    pivots.emplace_back(best, pc);
  }
  for (std::size_t r = 0; r < n_rows; ++r)
    if (!row_done[r] && rows[r].empty() && rhs[r] != 0) return {false, false};

  // Free unknowns stay zero; with full cross-row elimination each pivot row
  // determines its unknown directly.
  std::vector<Rational> sol(cols.size(), Rational(0));
  for (const auto& [r, c] : pivots) sol[c] = rhs[r] / rows[r][c];

  // Defensive exactness: re-expand the certificate and compare against x.
  std::map<RowKey, Rational, detail::RowKeyLess> expansion, target;
  bool integral = true;
  for (std::size_t u = 0; u < cols.size(); ++u) {
    if (sol[u] == 0) continue;
    if (boost::multiprecision::denominator(sol[u]) != 1) integral = false;
    for (const auto& [gk, gc] : gens[meta[u].gen].terms()) {
      ExpVec rk = exp_sum(meta[u].key, gk);
      for (const auto& [tb, tv] : detail::coeff_expand(gc, meta[u].basis))
        expansion[{rk, tb}] += sol[u] * Rational(tv);
    }
  }
  for (const auto& [key, c] : x.terms())
    for (const auto& [t, v] : detail::coeff_coords(c))
      if (v != 0) target[{key, t}] = Rational(v);
  std::erase_if(expansion, [](const auto& kv) { return kv.second == 0; });
  if (expansion.size() != target.size()) return {false, false};
  for (auto it = expansion.begin(), jt = target.begin(); it != expansion.end(); ++it, ++jt)
    if (detail::RowKeyLess{}(it->first, jt->first) ||
        detail::RowKeyLess{}(jt->first, it->first) || it->second != jt->second)
      return {false, false};
  return {true, integral};
}

}  // namespace khall
