#pragma once

#include <cctype>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "khall/laurent.hpp"
#include "khall/shuffle.hpp"
#include "khall/surface.hpp"

namespace khall {

struct parse_error : std::runtime_error {
  std::size_t pos;
  parse_error(const std::string& msg, std::size_t p)
      : std::runtime_error(msg + " (at position " + std::to_string(p) + ")"), pos(p) {}
};

namespace detail {

struct Token {
  enum Kind { Num, Ident, Op, End } kind = End;
  std::string text;
  Int value;
  std::size_t pos = 0;
};

inline std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> ts;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      ts.push_back({Token::Num, s.substr(i, j - i), Int(s.substr(i, j - i)), i});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      ts.push_back({Token::Ident, s.substr(i, j - i), Int(0), i});
      i = j;
    } else if (std::string("+-*/^()").find(c) != std::string::npos) {
      ts.push_back({Token::Op, std::string(1, c), Int(0), i});
      ++i;
    } else {
      throw parse_error(std::string("unexpected character '") + c + "'", i);
    }
  }
  ts.push_back({Token::End, "", Int(0), s.size()});
  return ts;
}

// Shared recursive-descent core over both coefficient modes.  A Symbols
// policy resolves identifiers and the unit coefficient.
template <class C, class Symbols>
class ExprParser {
 public:
  ExprParser(std::vector<Token> ts, int nz, int nq, const Symbols& sym)
      : ts_(std::move(ts)), nz_(nz), nq_(nq), sym_(sym) {}

  Rat<C> parse() {
    Rat<C> v = expr();
    if (cur().kind != Token::End) throw parse_error("trailing input", cur().pos);
    return v;
  }

 private:
  const Token& cur() const { return ts_[i_]; }
  void advance() { ++i_; }
  bool eat_op(const char* t) {
    if (cur().kind == Token::Op && cur().text == t) {
      advance();
      return true;
    }
    return false;
  }

  Rat<C> expr() {
    bool neg = false;
    if (eat_op("-"))
      neg = true;
    else
      eat_op("+");
    Rat<C> acc = term();
    if (neg) acc = rat_neg(acc);
    for (;;) {
      if (eat_op("+"))
        acc = rat_add(acc, term());
      else if (eat_op("-"))
        acc = rat_add(acc, rat_neg(term()));
      else
        return acc;
    }
  }

  Rat<C> term() {
    Rat<C> acc = factor();
    for (;;) {
      if (eat_op("*")) {
        acc = rat_mul(acc, factor());
      } else if (eat_op("/")) {
        std::size_t p = cur().pos;
        acc = divide(std::move(acc), factor(), p);
      } else {
        return acc;
      }
    }
  }

  Rat<C> factor() {
    Rat<C> base = primary();
    if (!eat_op("^")) return base;
    bool neg = eat_op("-");
    if (cur().kind != Token::Num) throw parse_error("exponent expected", cur().pos);
    long e = long(cur().value);
    std::size_t p = cur().pos;
    advance();
    if (e > 64) throw parse_error("exponent too large", p);
    if (!neg) {
      Rat<C> acc = one();
      for (long t = 0; t < e; ++t) acc = rat_mul(acc, base);
      return acc;
    }
    Rat<C> acc = one();
    for (long t = 0; t < e; ++t) acc = divide(std::move(acc), base, p);
    return acc;
  }

  Rat<C> primary() {
    const Token& t = cur();
    if (t.kind == Token::Num) {
      advance();
      C c = sym_.unit();
      return Rat<C>::from(Laurent<C>::monomial(nz_, nq_, zero_exps(nz_ + nq_),
                                               CoeffOps<C>::mul(c, sym_.from_int(t.value))));
    }
    if (t.kind == Token::Ident) {
      advance();
      return sym_.resolve(t, nz_, nq_);
    }
    if (t.kind == Token::Op && t.text == "(") {
      advance();
      Rat<C> v = expr();
      if (!eat_op(")")) throw parse_error("')' expected", cur().pos);
      return v;
    }
    throw parse_error("value expected", t.pos);
  }

  Rat<C> one() const {
    return Rat<C>::from(Laurent<C>::monomial(nz_, nq_, zero_exps(nz_ + nq_), sym_.unit()));
  }

  // x / y: y must be a unit monomial or a binomial factor 1 - c z_a/z_b.
  Rat<C> divide(Rat<C> x, const Rat<C>& y, std::size_t pos) {
    if (!y.den.empty()) throw parse_error("nested denominator", pos);
    auto f = classify(y.num, pos);
    if (f.first) {  // unit monomial: multiply by its inverse
      ExpVec inv = f.second.delta;
      for (auto& e : inv) e = Exp(-e);
      x.num = x.num.mul_monomial(inv, f.second.c);
      return x;
    }
    x.den.push_back(f.second);
    std::sort(x.den.begin(), x.den.end(), factor_less<C>);
    return x;
  }

  // Returns (is_monomial, payload): for a monomial the payload's delta/c hold
  // the monomial key and the coefficient's inverse; otherwise the payload is
  // the denominator factor for the binomial shape 1 - c z_a/z_b.
  std::pair<bool, BinomialFactor<C>> classify(const Laurent<C>& y, std::size_t pos) {
    if (y.term_count() == 1) {
      const auto& [key, c] = y.terms()[0];
      auto cinv = sym_.invert(c);
      if (!cinv) throw parse_error("division by a non-unit coefficient", pos);
      return {true, BinomialFactor<C>{0, 0, key, *cinv}};
    }
    if (y.term_count() == 2) {
      const auto& t0 = y.terms()[0];
      const auto& t1 = y.terms()[1];
      const auto* unit_term = &t0;
      const auto* other = &t1;
      ExpVec zero = zero_exps(nz_ + nq_);
      if (exp_cmp(t0.first, zero) != 0) std::swap(unit_term, other);
      if (exp_cmp(unit_term->first, zero) == 0 &&
          CoeffOps<C>::eq(unit_term->second, sym_.unit())) {
        int a = -1, b = -1;
        bool shape = true;
        for (int i = 0; i < nz_; ++i) {
          if (other->first[i] == 1 && a < 0)
            a = i;
          else if (other->first[i] == -1 && b < 0)
            b = i;
          else if (other->first[i] != 0)
            shape = false;
        }
        if (shape && a >= 0 && b >= 0)
          return {false,
                  BinomialFactor<C>{a, b, other->first, CoeffOps<C>::neg(other->second)}};
      }
    }
    throw parse_error("denominator is neither a unit monomial nor a binomial factor", pos);
  }

  std::vector<Token> ts_;
  std::size_t i_ = 0;
  int nz_, nq_;
  const Symbols& sym_;
};

inline int z_index(const std::string& name) {
  if (name.size() == 2 && name[0] == 'z' && name[1] >= '1' && name[1] <= '9')
    return name[1] - '1';
  return -1;
}

struct TorusSymbols {
  Int unit() const { return Int(1); }
  Int from_int(const Int& v) const { return v; }
  std::optional<Int> invert(const Int& c) const {
    if (c == 1 || c == -1) return c;
    return std::nullopt;
  }
  Rat<Int> resolve(const Token& t, int nz, int nq) const {
    ExpVec key = zero_exps(nz + nq);
    if (int zi = z_index(t.text); zi >= 0) {
      if (zi >= nz) throw parse_error("variable beyond declared count", t.pos);
      key[zi] = 1;
    } else if (t.text == "q1" && nq == 2) {
      key[nz] = 1;
    } else if (t.text == "q2" && nq == 2) {
      key[nz + 1] = 1;
    } else {
      throw parse_error("unknown symbol '" + t.text + "'", t.pos);
    }
    return Rat<Int>::from(TorusElem::monomial(nz, nq, std::move(key), Int(1)));
  }
};

struct SurfaceSymbols {
  RingModelPtr model;  // ambient tensor power
  RingModelPtr base;

  RingElem unit() const { return RingElem::unit(model); }
  RingElem from_int(const Int& v) const { return v * RingElem::unit(model); }
  std::optional<RingElem> invert(const RingElem& c) const {
    if (c == RingElem::unit(model)) return c;
    if (model->rank() > 128) return std::nullopt;
    return c.try_invert();
  }
  Rat<RingElem> resolve(const Token& t, int nz, int nq) const {
    ExpVec key = zero_exps(nz + nq);
    if (int zi = z_index(t.text); zi >= 0) {
      if (zi >= nz) throw parse_error("variable beyond declared count", t.pos);
      key[zi] = 1;
      return Rat<RingElem>::from(SurfaceElem::monomial(nz, nq, std::move(key), unit()));
    }
    for (std::uint32_t i = 0; i < base->basis_names().size(); ++i)
      if (base->basis_names()[i] == t.text)
        return Rat<RingElem>::from(SurfaceElem::monomial(
            nz, nq, std::move(key), embed_at_slot(model, RingElem::basis(base, i), 0)));
    throw parse_error("unknown symbol '" + t.text + "'", t.pos);
  }
};

}  // namespace detail

// Expression grammar: integers; z1..z9, q1, q2 (torus) or basis names
// (surface, placed in tensor slot 1); + - * ^ ( ); '/' only against unit
// monomials or binomial factors.  n = 0 infers the variable count from the
// highest z-index used.
inline int infer_nvars(const std::vector<detail::Token>& ts, int n) {
  for (const auto& t : ts)
    if (t.kind == detail::Token::Ident)
      if (int zi = detail::z_index(t.text); zi >= 0) n = std::max(n, zi + 1);
  return n;
}

inline Rat<Int> parse_expression(const std::string& text, int n = 0) {
  auto ts = detail::tokenize(text);
  int nz = std::max(1, infer_nvars(ts, n));
  detail::TorusSymbols sym;
  return detail::ExprParser<Int, detail::TorusSymbols>(std::move(ts), nz, 2, sym).parse();
}

inline Rat<RingElem> parse_expression_surface(const std::string& text, const RingModelPtr& base,
                                              int n = 0) {
  auto ts = detail::tokenize(text);
  int nz = std::max(1, infer_nvars(ts, n));
  detail::SurfaceSymbols sym{RingModel::tensor_power(base, unsigned(nz)), base};
  return detail::ExprParser<RingElem, detail::SurfaceSymbols>(std::move(ts), nz, 0, sym).parse();
}

// --- line-oriented file formats ------------------------------------------

struct file_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields(1);
  for (char c : line) {
    if (c == ';')
      fields.emplace_back();
    else
      fields.back() += c;
  }
  return fields;
}

inline std::vector<Int> parse_ints(const std::string& s) {
  std::istringstream is(s);
  std::vector<Int> v;
  std::string tok;
  while (is >> tok) v.emplace_back(tok);
  return v;
}

}  // namespace detail

// Element files: `coeff ; z_exponents ; q_exponents` per term (torus mode).
inline Rat<Int> read_element_torus(std::istream& in, int n) {
  std::vector<TorusElem::Term> terms;
  std::vector<BinomialFactor<Int>> den;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = detail::split_fields(line);
    std::istringstream head(fields[0]);
    std::string first;
    head >> first;
    if (first == "denom") {
      if (fields.size() != 3) throw file_error("denom line needs 'denom c ; a ; b'");
      std::vector<Int> cf;
      std::string tok;
      while (head >> tok) cf.emplace_back(tok);
      if (cf.size() != 3) throw file_error("torus denom coefficient needs 'c e1 e2'");
      auto a = detail::parse_ints(fields[1]), b = detail::parse_ints(fields[2]);
      if (a.size() != 1 || b.size() != 1) throw file_error("denom indices malformed");
      BinomialFactor<Int> f;
      f.a = int(a[0]) - 1;
      f.b = int(b[0]) - 1;
      if (f.a < 0 || f.a >= n || f.b < 0 || f.b >= n || f.a == f.b)
        throw file_error("denom variable index out of range");
      f.c = cf[0];
      if (f.c != 1 && f.c != -1) throw file_error("denom coefficient must be a unit");
      f.delta = zero_exps(n + 2);
      f.delta[f.a] = 1;
      f.delta[f.b] = -1;
      f.delta[n] = checked_exp(long(cf[1]));
      f.delta[n + 1] = checked_exp(long(cf[2]));
      den.push_back(std::move(f));
      continue;
    }
    if (fields.size() != 3) throw file_error("torus term needs 'coeff ; z_exps ; q_exps'");
    auto c = detail::parse_ints(fields[0]);
    auto ze = detail::parse_ints(fields[1]);
    auto qe = detail::parse_ints(fields[2]);
    if (c.size() != 1 || int(ze.size()) != n || qe.size() != 2)
      throw file_error("torus term field widths wrong");
    ExpVec key = zero_exps(n + 2);
    for (int i = 0; i < n; ++i) key[i] = checked_exp(long(ze[i]));
    key[n] = checked_exp(long(qe[0]));
    key[n + 1] = checked_exp(long(qe[1]));
    terms.emplace_back(std::move(key), c[0]);
  }
  return Rat<Int>::from(TorusElem::from_terms(n, 2, std::move(terms)), std::move(den));
}

// Surface mode: `coord_vector ; z_exponents` per term over tensor_power^n.
inline Rat<RingElem> read_element_surface(std::istream& in, int n, const RingModelPtr& base) {
  auto model = RingModel::tensor_power(base, unsigned(std::max(1, n)));
  std::vector<SurfaceElem::Term> terms;
  std::vector<BinomialFactor<RingElem>> den;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = detail::split_fields(line);
    std::istringstream head(fields[0]);
    std::string first;
    head >> first;
    if (first == "denom") {
      if (fields.size() != 3) throw file_error("denom line needs 'denom c ; a ; b'");
      std::vector<Int> cf;
      std::string tok;
      while (head >> tok) cf.emplace_back(tok);
      if (cf.size() != model->rank()) throw file_error("denom coord vector width wrong");
      auto a = detail::parse_ints(fields[1]), b = detail::parse_ints(fields[2]);
      if (a.size() != 1 || b.size() != 1) throw file_error("denom indices malformed");
      BinomialFactor<RingElem> f;
      f.a = int(a[0]) - 1;
      f.b = int(b[0]) - 1;
      if (f.a < 0 || f.a >= n || f.b < 0 || f.b >= n || f.a == f.b)
        throw file_error("denom variable index out of range");
      f.c = RingElem::from_dense(model, cf);
      f.delta = zero_exps(n);
      f.delta[f.a] = 1;
      f.delta[f.b] = -1;
      den.push_back(std::move(f));
      continue;
    }
    if (fields.size() != 2) throw file_error("surface term needs 'coords ; z_exps'");
    auto c = detail::parse_ints(fields[0]);
    auto ze = detail::parse_ints(fields[1]);
    if (c.size() != model->rank() || int(ze.size()) != n)
      throw file_error("surface term field widths wrong");
    ExpVec key = zero_exps(n);
    for (int i = 0; i < n; ++i) key[i] = checked_exp(long(ze[i]));
    terms.emplace_back(std::move(key), RingElem::from_dense(model, c));
  }
  return Rat<RingElem>::from(SurfaceElem::from_terms(n, 0, std::move(terms)), std::move(den));
}

// Ring-model files: `rank d`, `basis ...`, `mul i j : c_0 ... c_{d-1}` for
// i <= j, then optional surface data (omega:, comega:, hyperplane:,
// `wedgeW k : ...` over the tensor square, `r: <int>`).  Unknown keys are
// an error.  The unit is the basis vector named by convention first, e_0.
struct LoadedModel {
  RingModelPtr ring;
  std::optional<KSurfaceModel> surface;
};

inline LoadedModel read_ring_model(std::istream& in) {
  std::uint32_t d = 0;
  std::vector<std::string> names;
  std::vector<std::optional<Coords>> upper;
  std::optional<std::vector<Int>> omega, comega, hyper;
  std::vector<std::pair<unsigned, std::vector<Int>>> wedge;
  std::optional<unsigned> rr;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream is(line);
    std::string key;
    is >> key;
    auto rest_ints = [&is] {
      std::vector<Int> v;
      std::string tok;
      while (is >> tok) {
        if (tok == ":") continue;
        v.emplace_back(tok);
      }
      return v;
    };
    if (key == "rank") {
      long v;
      is >> v;
      d = std::uint32_t(v);
      upper.assign(d * (d + 1) / 2, std::nullopt);
    } else if (key == "basis") {
      std::string nm;
      while (is >> nm) names.push_back(nm);
    } else if (key == "mul") {
      std::uint32_t i, j;
      is >> i >> j;
      auto v = rest_ints();
      if (d == 0 || i > j || j >= d || v.size() != d) throw file_error("mul line malformed");
      Coords c;
      for (std::uint32_t t = 0; t < d; ++t)
        if (v[t] != 0) c.emplace_back(t, v[t]);
      // upper-triangle position of (i, j), i <= j
      std::size_t pos = std::size_t(i) * d - std::size_t(i) * (i + 1) / 2 + j;
      upper[pos] = std::move(c);
    } else if (key == "omega:") {
      omega = rest_ints();
    } else if (key == "comega:") {
      comega = rest_ints();
    } else if (key == "hyperplane:") {
      hyper = rest_ints();
    } else if (key == "wedgeW") {
      unsigned k;
      is >> k;
      wedge.emplace_back(k, rest_ints());
    } else if (key == "r:") {
      long v;
      is >> v;
      rr = unsigned(v);
    } else {
      throw file_error("unknown key '" + key + "' in ring model file");
    }
  }
  if (d == 0) throw file_error("ring model missing rank");
  if (names.size() != d) throw file_error("ring model basis name count != rank");
  std::vector<Coords> table;
  table.reserve(upper.size());
  for (auto& c : upper) {
    if (!c) throw file_error("ring model missing a mul line");
    table.push_back(std::move(*c));
  }
  LoadedModel out;
  out.ring = RingModel::make_explicit("file-model", d, names, std::move(table), {{0u, Int(1)}});
  if (omega || comega || rr || !wedge.empty()) {
    if (!omega || !comega || !rr) throw file_error("surface data incomplete");
    KSurfaceModel s;
    s.ring = out.ring;
    s.square = RingModel::tensor_power(out.ring, 2);
    if (omega->size() != d || comega->size() != d) throw file_error("surface vector width wrong");
    s.omega = RingElem::from_dense(out.ring, *omega);
    auto oinv = s.omega.try_invert();
    if (!oinv) throw file_error("omega is not invertible");
    s.omega_inv = *oinv;
    s.c_omega = RingElem::from_dense(out.ring, *comega);
    if (hyper) {
      if (hyper->size() != d) throw file_error("surface vector width wrong");
      s.hyperplane = RingElem::from_dense(out.ring, *hyper);
    }
    s.r = *rr;
    s.wedgeW.assign(*rr, RingElem::zero(s.square));
    std::vector<bool> seen(*rr, false);
    for (auto& [k, v] : wedge) {
      if (k >= *rr || v.size() != std::size_t(d) * d) throw file_error("wedgeW line malformed");
      s.wedgeW[k] = RingElem::from_dense(s.square, v);
      seen[k] = true;
    }
    for (unsigned k = 0; k < *rr; ++k)
      if (!seen[k]) throw file_error("wedgeW entry missing");
    out.surface = std::move(s);
  }
  return out;
}

// Kernel files: `zeta num: c e1 e2` / `zeta den: c e1 e2`, one factor per
// line; an empty file is the trivial kernel zeta = 1.
inline KernelSpec read_kernel(std::istream& in) {
  KernelSpec spec;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream is(line);
    std::string w1, w2;
    is >> w1 >> w2;
    if (w1 != "zeta" || (w2 != "num:" && w2 != "den:"))
      throw file_error("kernel line must start with 'zeta num:' or 'zeta den:'");
    KernelFactor f;
    long e1, e2;
    std::string ctok;
    if (!(is >> ctok >> e1 >> e2)) throw file_error("kernel factor needs 'c e1 e2'");
    f.c = Int(ctok);
    f.e1 = checked_exp(e1);
    f.e2 = checked_exp(e2);
    std::string extra;
    if (is >> extra) throw file_error("trailing data on kernel line");
    (w2 == "num:" ? spec.num : spec.den).push_back(f);
  }
  return spec;
}

}  // namespace khall
