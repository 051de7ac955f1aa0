#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "khall/ints.hpp"

namespace khall {

// Sparse coordinate vector over a model basis: sorted by index, no zeros.
using Coords = std::vector<std::pair<std::uint32_t, Int>>;

inline Coords coords_normalize(Coords v) {
  std::sort(v.begin(), v.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Coords out;
  out.reserve(v.size());
  for (auto& [i, c] : v) {
    if (!out.empty() && out.back().first == i)
      out.back().second += c;
    else
      out.emplace_back(i, std::move(c));
    if (!out.empty() && out.back().second == 0) out.pop_back();
  }
  return out;
}

inline Coords coords_add(const Coords& a, const Coords& b) {
  Coords r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      r.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      r.push_back(b[j++]);
    } else {
      Int c = a[i].second + b[j].second;
      if (c != 0) r.emplace_back(a[i].first, std::move(c));
      ++i, ++j;
    }
  }
  return r;
}

struct model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class RingModel;
using RingModelPtr = std::shared_ptr<const RingModel>;

// Finite free Z-module with a commutative multiplication table.  Two
// representations share the interface: explicit tables (builtins and model
// files) and lazy tensor powers, whose basis products are computed by digit
// decomposition so the d^n x d^n table is never materialized.
class RingModel {
 public:
  static RingModelPtr make_explicit(std::string name, std::uint32_t rank,
                                    std::vector<std::string> basis_names,
                                    std::vector<Coords> upper_table,
                                    Coords unit) {
    auto m = std::make_shared<RingModel>(Private{});
    m->name_ = std::move(name);
    m->rank_ = rank;
    m->basis_names_ = std::move(basis_names);
    m->unit_ = std::move(unit);
    if (m->basis_names_.size() != rank) throw model_error("basis name count != rank");
    // Callers supply products for i <= j only; mirror to a full flat table.
    if (upper_table.size() != std::size_t(rank) * (rank + 1) / 2)
      throw model_error("structure constant count mismatch");
    m->table_.resize(std::size_t(rank) * rank);
    std::size_t pos = 0;
    for (std::uint32_t i = 0; i < rank; ++i)
      for (std::uint32_t j = i; j < rank; ++j) {
        m->table_[std::size_t(i) * rank + j] = upper_table[pos];
        m->table_[std::size_t(j) * rank + i] = upper_table[pos];
        ++pos;
      }
    return m;
  }

  // Rank d^n model of slot-wise products.  Slot 0 is the most significant
  // digit of a basis index (row-major product basis).  Powers are memoized
  // per base instance: elements compare models by pointer identity, so equal
  // (base, n) requests must return the same model.  Single-threaded.
  static RingModelPtr tensor_power(const RingModelPtr& base, unsigned n) {
    if (n < 1) throw model_error("tensor_power: n must be >= 1");
    const RingModelPtr& b = base->base_ ? base->base_ : base;
    unsigned total = (base->base_ ? base->power_ : 1) * n;
    if (total == 1) return b;
    static std::map<std::pair<const RingModel*, unsigned>, RingModelPtr> cache;
    auto& slot = cache[{b.get(), total}];
    if (slot) return slot;
    std::uint64_t r = 1;
    for (unsigned i = 0; i < total; ++i) {
      r *= b->rank_;
      if (r > kMaxTensorRank) throw model_error("tensor_power: rank overflow");
    }
    auto m = std::make_shared<RingModel>(Private{});
    m->name_ = b->name_ + "^" + std::to_string(total);
    m->rank_ = std::uint32_t(r);
    m->base_ = b;  // keeps the cache key's address pinned
    m->power_ = total;
    m->unit_ = unit_outer(b->unit_, total, b->rank_);
    slot = m;
    return m;
  }

  std::uint32_t rank() const { return rank_; }
  const std::string& name() const { return name_; }
  const Coords& unit_coords() const { return unit_; }
  bool is_tensor() const { return base_ != nullptr; }
  unsigned tensor_degree() const { return base_ ? power_ : 1; }
  RingModelPtr tensor_base() const { return base_; }
  const std::vector<std::string>& basis_names() const { return basis_names_; }

  Coords mul_basis(std::uint32_t i, std::uint32_t j) const {
    if (!base_) return table_[std::size_t(i) * rank_ + j];
    // Tensor case: combine per-slot base products, most significant first.
    std::uint32_t br = base_->rank_;
    std::vector<std::pair<std::uint32_t, Int>> acc{{0u, Int(1)}};
    std::vector<std::pair<std::uint32_t, Int>> next;
    std::uint32_t div = rank_;
    std::uint32_t ii = i, jj = j;
    for (unsigned s = 0; s < power_; ++s) {
      div /= br;
      const Coords& f = base_->mul_basis(ii / div, jj / div);
      ii %= div;
      jj %= div;
      next.clear();
      next.reserve(acc.size() * f.size());
      for (const auto& [ai, ac] : acc)
        for (const auto& [fi, fc] : f) next.emplace_back(ai * br + fi, ac * fc);
      acc.swap(next);
    }
    return acc;  // sorted: outer loop nests most significant slot outermost
  }

  // Digits of a tensor basis index, slot 0 first.
  std::vector<std::uint32_t> digits(std::uint32_t idx) const {
    std::vector<std::uint32_t> d(tensor_degree());
    std::uint32_t br = base_ ? base_->rank_ : rank_;
    for (unsigned s = tensor_degree(); s-- > 0;) {
      d[s] = idx % br;
      idx /= br;
    }
    return d;
  }

  std::uint32_t index_of_digits(const std::vector<std::uint32_t>& d) const {
    std::uint32_t br = base_ ? base_->rank_ : rank_;
    std::uint32_t idx = 0;
    for (auto x : d) idx = idx * br + x;
    return idx;
  }

  struct Private {};  // make_shared access token
  explicit RingModel(Private) {}

  static constexpr std::uint64_t kMaxTensorRank = 1u << 20;

 private:
  static Coords unit_outer(const Coords& u, unsigned n, std::uint32_t br) {
    Coords acc{{0u, Int(1)}};
    for (unsigned s = 0; s < n; ++s) {
      Coords next;
      next.reserve(acc.size() * u.size());
      for (const auto& [ai, ac] : acc)
        for (const auto& [ui, uc] : u) next.emplace_back(ai * br + ui, ac * uc);
      acc.swap(next);
    }
    return acc;
  }

  std::string name_;
  std::uint32_t rank_ = 0;
  std::vector<std::string> basis_names_;
  std::vector<Coords> table_;  // full d*d, explicit models only
  Coords unit_;
  RingModelPtr base_;    // set iff tensor power
  unsigned power_ = 0;
};

class RingElem {
 public:
  RingElem() = default;
  RingElem(RingModelPtr model, Coords coords)
      : model_(std::move(model)), coords_(std::move(coords)) {}

  static RingElem zero(RingModelPtr m) { return RingElem(std::move(m), {}); }
  static RingElem unit(RingModelPtr m) {
    Coords u = m->unit_coords();
    return RingElem(std::move(m), std::move(u));
  }
  static RingElem basis(RingModelPtr m, std::uint32_t i) {
    return RingElem(std::move(m), {{i, Int(1)}});
  }
  static RingElem from_dense(RingModelPtr m, const std::vector<Int>& v) {
    if (v.size() != m->rank()) throw model_error("dense coords length != rank");
    Coords c;
    for (std::uint32_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) c.emplace_back(i, v[i]);
    return RingElem(std::move(m), std::move(c));
  }

  const RingModelPtr& model() const { return model_; }
  const Coords& coords() const { return coords_; }
  bool is_zero() const { return coords_.empty(); }

  std::vector<Int> dense() const {
    std::vector<Int> v(model_->rank(), Int(0));
    for (const auto& [i, c] : coords_) v[i] = c;
    return v;
  }

  friend bool operator==(const RingElem& a, const RingElem& b) {
    return a.coords_ == b.coords_;
  }

  friend RingElem operator+(const RingElem& a, const RingElem& b) {
    a.check_same(b);
    return RingElem(a.model_, coords_add(a.coords_, b.coords_));
  }
  friend RingElem operator-(const RingElem& a, const RingElem& b) { return a + (-b); }
  RingElem operator-() const {
    Coords c = coords_;
    for (auto& [i, x] : c) x = -x;
    return RingElem(model_, std::move(c));
  }
  friend RingElem operator*(const Int& k, const RingElem& a) {
    if (k == 0) return RingElem(a.model_, {});
    Coords c = a.coords_;
    for (auto& [i, x] : c) x *= k;
    return RingElem(a.model_, std::move(c));
  }
  friend RingElem operator*(const RingElem& a, const RingElem& b) {
    a.check_same(b);
    Coords acc;
    for (const auto& [i, ci] : a.coords_)
      for (const auto& [j, cj] : b.coords_) {
        Coords f = a.model_->mul_basis(i, j);
        for (auto& [k, ck] : f) acc.emplace_back(k, ci * cj * ck);
      }
    return RingElem(a.model_, coords_normalize(std::move(acc)));
  }

  RingElem pow(unsigned e) const {
    RingElem r = unit(model_);
    for (unsigned i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  // Moves the tensor factor at slot perm[i] to slot i (same convention as
  // the exponent-slot permutation).
  RingElem slot_permute(const std::vector<int>& perm) const {
    if (model_->tensor_degree() != perm.size())
      throw model_error("slot_permute: arity mismatch");
    if (!model_->is_tensor()) return *this;  // degree-1 tensor, identity only
    Coords c;
    c.reserve(coords_.size());
    for (const auto& [i, x] : coords_) {
      auto d = model_->digits(i);
      std::vector<std::uint32_t> nd(d.size());
      for (std::size_t s = 0; s < d.size(); ++s) nd[s] = d[perm[s]];
      c.emplace_back(model_->index_of_digits(nd), x);
    }
    return RingElem(model_, coords_normalize(std::move(c)));
  }

  // Exact inverse over Z via dense rational solve; guarded to small ranks.
  std::optional<RingElem> try_invert() const;

 private:
  void check_same(const RingElem& b) const {
    if (model_ != b.model_) throw model_error("ring element model mismatch");
  }

  RingModelPtr model_;
  Coords coords_;
};

// Coordinates of the outer product of per-slot coordinate vectors, most
// significant slot first.  Sorted because each input is.
inline Coords outer_coords(std::uint32_t base_rank, const std::vector<const Coords*>& slots) {
  Coords acc{{0u, Int(1)}};
  for (const Coords* f : slots) {
    Coords next;
    next.reserve(acc.size() * f->size());
    for (const auto& [ai, ac] : acc)
      for (const auto& [fi, fc] : *f) next.emplace_back(ai * base_rank + fi, ac * fc);
    acc.swap(next);
  }
  return acc;
}

// a (x) b in tensor_power(base, 2) (and the general outer product).
inline RingElem tensor_outer(const RingModelPtr& product_model,
                             const std::vector<RingElem>& factors) {
  std::vector<const Coords*> slots;
  slots.reserve(factors.size());
  for (const auto& f : factors) slots.push_back(&f.coords());
  return RingElem(product_model, outer_coords(product_model->tensor_base()->rank(), slots));
}

// x placed in one tensor slot, unit coordinates elsewhere.
inline RingElem embed_at_slot(const RingModelPtr& product_model, const RingElem& x,
                              unsigned slot) {
  if (!product_model->is_tensor()) return x;
  auto base = product_model->tensor_base();
  std::vector<RingElem> fs;
  for (unsigned s = 0; s < product_model->tensor_degree(); ++s)
    fs.push_back(s == slot ? x : RingElem::unit(base));
  return tensor_outer(product_model, fs);
}

// A tensor-square class placed in slots (i, j) of an n-fold power.
inline RingElem embed_pair(const RingModelPtr& product_model, const RingElem& sq,
                           unsigned slot_i, unsigned slot_j) {
  auto base = product_model->tensor_base();
  std::uint32_t br = base->rank();
  const Coords& u = base->unit_coords();
  Coords acc;
  for (const auto& [idx, c] : sq.coords()) {
    Coords bi{{idx / br, Int(1)}}, bj{{idx % br, Int(1)}};
    std::vector<const Coords*> slots;
    for (unsigned s = 0; s < product_model->tensor_degree(); ++s)
      slots.push_back(s == slot_i ? &bi : s == slot_j ? &bj : &u);
    for (auto& [k, v] : outer_coords(br, slots)) acc.emplace_back(k, c * v);
  }
  return RingElem(product_model, coords_normalize(std::move(acc)));
}

inline std::optional<RingElem> RingElem::try_invert() const {
  const std::uint32_t d = model_->rank();
  if (d > 128) throw model_error("try_invert: rank too large for dense solve");
  // Solve M y = unit where M is multiplication by *this.
  std::vector<std::vector<Rational>> m(d, std::vector<Rational>(d + 1, Rational(0)));
  for (std::uint32_t j = 0; j < d; ++j)
    for (const auto& [i, ci] : coords_)
      for (const auto& [k, ck] : model_->mul_basis(i, j)) m[k][j] += Rational(ci * ck);
  for (const auto& [i, c] : model_->unit_coords()) m[i][d] = Rational(c);

  std::uint32_t row = 0;
  std::vector<int> pivot_col(d, -1);
  for (std::uint32_t col = 0; col < d && row < d; ++col) {
    std::uint32_t p = row;
    while (p < d && m[p][col] == 0) ++p;
    if (p == d) continue;
    std::swap(m[p], m[row]);
    for (std::uint32_t r = 0; r < d; ++r) {
      if (r == row || m[r][col] == 0) continue;
      Rational f = m[r][col] / m[row][col];
      for (std::uint32_t c = col; c <= d; ++c) m[r][c] -= f * m[row][c];
    }
    pivot_col[row] = int(col);
    ++row;
  }
  for (std::uint32_t r = row; r < d; ++r)
    if (m[r][d] != 0) return std::nullopt;  // inconsistent: not invertible
  Coords y;
  for (std::uint32_t r = 0; r < row; ++r) {
    if (pivot_col[r] < 0) continue;
    Rational v = m[r][d] / m[r][pivot_col[r]];
    if (v == 0) continue;
    if (boost::multiprecision::denominator(v) != 1) return std::nullopt;  // no integer inverse
    y.emplace_back(std::uint32_t(pivot_col[r]), Int(boost::multiprecision::numerator(v)));
  }
  std::sort(y.begin(), y.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return RingElem(model_, std::move(y));
}

// Exhaustive axiom check on basis vectors: d^3 associativity triples, d^2
// commutativity pairs, d unit products.  For explicit models symmetry is
// structural; for tensor powers it exercises the digit-combine path.
inline std::vector<std::string> ring_validate(const RingModelPtr& m) {
  std::vector<std::string> report;
  const std::uint32_t d = m->rank();
  RingElem unit = RingElem::unit(m);
  for (std::uint32_t i = 0; i < d; ++i) {
    RingElem e = RingElem::basis(m, i);
    if (!(unit * e == e)) report.push_back("unit*e_" + std::to_string(i) + " != e_" + std::to_string(i));
  }
  for (std::uint32_t i = 0; i < d; ++i)
    for (std::uint32_t j = 0; j < d; ++j) {
      RingElem ei = RingElem::basis(m, i), ej = RingElem::basis(m, j);
      if (!(ei * ej == ej * ei))
        report.push_back("comm(e_" + std::to_string(i) + ",e_" + std::to_string(j) + ") fails");
    }
  for (std::uint32_t i = 0; i < d; ++i)
    for (std::uint32_t j = 0; j < d; ++j)
      for (std::uint32_t k = 0; k < d; ++k) {
        RingElem ei = RingElem::basis(m, i), ej = RingElem::basis(m, j),
                 ek = RingElem::basis(m, k);
        if (!((ei * ej) * ek == ei * (ej * ek)))
          report.push_back("assoc(e_" + std::to_string(i) + ",e_" + std::to_string(j) +
                           ",e_" + std::to_string(k) + ") fails");
      }
  return report;
}

inline std::size_t ring_validate_check_count(const RingModelPtr& m) {
  std::size_t d = m->rank();
  return d * d * d + d * d + d;
}

}  // namespace khall
