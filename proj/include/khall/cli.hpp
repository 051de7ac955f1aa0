#pragma once

#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "khall/conditions.hpp"
#include "khall/equivariant.hpp"
#include "khall/format.hpp"
#include "khall/linsolve.hpp"
#include "khall/parse.hpp"
#include "khall/shuffle.hpp"
#include "khall/surface.hpp"

namespace khall::cli {

// Exit 2: caller mistakes (bad files, bad expressions, out-of-range flags).
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Variable count of an element file: width of the z-exponent field of the
// first term line.  Both modes keep z-exponents in the second field.
inline int sniff_element_n(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = khall::detail::split_fields(line);
    std::istringstream head(fields[0]);
    std::string first;
    head >> first;
    if (first == "denom") continue;
    if (fields.size() < 2) throw input_error("element term line has no z-exponent field");
    return int(khall::detail::parse_ints(fields[1]).size());
  }
  throw input_error("element file has no term lines");
}

// `kp2` names the builtin model; anything else is a model file path.
inline LoadedModel load_model_spec(const std::string& spec) {
  if (spec == "kp2") {
    KSurfaceModel s = builtin_kp2();
    return LoadedModel{s.ring, std::move(s)};
  }
  std::ifstream in(spec);
  if (!in) throw input_error("cannot open model '" + spec + "'");
  return read_ring_model(in);
}

inline const KSurfaceModel& need_surface(const LoadedModel& lm, const char* verb) {
  if (!lm.surface)
    throw input_error(std::string(verb) + " needs surface data (omega/comega/wedgeW/r)");
  return *lm.surface;
}

inline Rat<Int> torus_input(const std::string& expr, const std::string& elem, int n_flag,
                            int n_min) {
  if (!expr.empty() && !elem.empty()) throw input_error("give --expr or --element, not both");
  if (n_flag > 0 && n_flag < n_min)
    throw input_error("--n is smaller than the triple requires");
  if (!expr.empty()) {
    Rat<Int> r = parse_expression(expr, std::max(n_flag, n_min));
    if (r.num.nz() < n_min) throw input_error("expression uses fewer variables than the triple");
    return r;
  }
  if (elem.empty()) throw input_error("need --expr or --element");
  std::string text = slurp(elem);
  int n = n_flag > 0 ? n_flag : sniff_element_n(text);
  if (n < n_min) throw input_error("element has fewer variables than the triple");
  std::istringstream in(text);
  return read_element_torus(in, n);
}

inline Rat<RingElem> surface_input(const std::string& expr, const std::string& elem, int n_flag,
                                   int n_min, const RingModelPtr& base) {
  if (!expr.empty() && !elem.empty()) throw input_error("give --expr or --element, not both");
  if (n_flag > 0 && n_flag < n_min)
    throw input_error("--n is smaller than the triple requires");
  if (!expr.empty()) {
    Rat<RingElem> r = parse_expression_surface(expr, base, std::max(n_flag, n_min));
    if (r.num.nz() < n_min) throw input_error("expression uses fewer variables than the triple");
    return r;
  }
  if (elem.empty()) throw input_error("need --expr or --element");
  std::string text = slurp(elem);
  int n = n_flag > 0 ? n_flag : sniff_element_n(text);
  if (n < n_min) throw input_error("element has fewer variables than the triple");
  std::istringstream in(text);
  return read_element_surface(in, n, base);
}

// Checkers take honest Laurent classes; rational inputs are admitted only
// when the denominator divides out exactly.
template <class C>
Laurent<C> as_laurent(const Rat<C>& r) {
  if (r.den.empty()) return r.num;
  auto c = clear_denominator(r);
  if (!c.value) throw input_error("element denominator does not divide the numerator");
  return *c.value;
}

// Shape check before the element is loaded; range against n happens inside
// the input loaders (n_min).
inline int check_triple(const std::vector<int>& t) {
  if (t.size() != 3) throw input_error("--triple needs exactly three indices");
  for (int v : t)
    if (v < 1) throw input_error("triple indices are 1-based");
  if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
    throw input_error("triple indices must be distinct");
  return std::max({t[0], t[1], t[2]});
}

struct Counter {
  long total = 0, pass = 0, fail = 0;
};

inline void report(std::ostream& out, Counter& c, const std::string& label, bool ok) {
  ++c.total;
  ++(ok ? c.pass : c.fail);
  out << label << (ok ? " PASS" : " FAIL") << "\n";
}

inline void summary(std::ostream& out, const Counter& c) {
  out << "total=" << c.total << " pass=" << c.pass << " fail=" << c.fail << "\n";
}

// --- randomized element builders for the campaigns -----------------------

inline RingElem random_ring_elem(std::mt19937_64& rng, const RingModelPtr& m, int cmax) {
  std::uniform_int_distribution<int> coeff(-cmax, cmax);
  std::uniform_int_distribution<std::uint32_t> slot(0, m->rank() - 1);
  Coords c;
  int k = 1 + int(rng() % 2);
  for (int t = 0; t < k; ++t) c.emplace_back(slot(rng), Int(coeff(rng)));
  return RingElem(m, coords_normalize(std::move(c)));
}

inline SurfaceElem random_surface_elem(std::mt19937_64& rng, const RingModelPtr& m, int n,
                                       int emax, int terms) {
  std::uniform_int_distribution<int> e(0, emax);
  std::vector<SurfaceElem::Term> ts;
  int k = 1 + int(rng() % unsigned(terms));
  for (int t = 0; t < k; ++t) {
    ExpVec key = zero_exps(n);
    for (int i = 0; i < n; ++i) key[i] = Exp(e(rng));
    ts.emplace_back(std::move(key), random_ring_elem(rng, m, 3));
  }
  return SurfaceElem::from_terms(n, 0, std::move(ts));
}

inline TorusElem random_torus_elem(std::mt19937_64& rng, int n, int emax, int terms,
                                   int qmax = 0) {
  std::uniform_int_distribution<int> e(0, emax), q(0, qmax), coeff(-3, 3);
  std::vector<TorusElem::Term> ts;
  int k = 1 + int(rng() % unsigned(terms));
  for (int t = 0; t < k; ++t) {
    ExpVec key = zero_exps(n + 2);
    for (int i = 0; i < n; ++i) key[i] = Exp(e(rng));
    key[n] = Exp(q(rng));
    key[n + 1] = Exp(q(rng));
    ts.emplace_back(std::move(key), Int(coeff(rng)));
  }
  return TorusElem::from_terms(n, 2, std::move(ts));
}

// Box covering the supports of known multipliers, padded by one: sufficient
// for oracle runs on elements constructed as sum(mult * gen).
template <class C>
SupportBox known_multiplier_box(const std::vector<Laurent<C>>& mults) {
  SupportBox box;
  std::size_t ks = mults.at(0).key_size();
  box.range.assign(ks, {0, 0});
  for (const auto& m : mults)
    for (const auto& [key, c] : m.terms())
      for (std::size_t i = 0; i < ks; ++i) {
        box.range[i].first = std::min(box.range[i].first, int(key[i]));
        box.range[i].second = std::max(box.range[i].second, int(key[i]));
      }
  for (auto& [lo, hi] : box.range) {
    --lo;
    ++hi;
  }
  return box;
}

// Wheel-ideal generators over a K(S) model, in the post-restriction picture:
// n z-variables, coefficients in the model itself (merged slot 0 of the
// degree n-2 tensor power when n > 2; the model itself at n = 3 means the
// power of degree 1).
inline std::pair<SurfaceElem, SurfaceElem> wheel_ideal_generators(const KSurfaceModel& surf,
                                                                  int n, int i, int j, int k) {
  const RingModelPtr& m = surf.ring;
  RingElem one = RingElem::unit(m);
  ExpVec ik = zero_exps(n);
  ik[i] = 1;
  ik[k] = -1;
  SurfaceElem f = SurfaceElem::monomial(n, 0, zero_exps(n), one) -
                  SurfaceElem::monomial(n, 0, ik, surf.omega);
  ExpVec jk = zero_exps(n), jk2 = zero_exps(n);
  jk[j] = 1;
  jk[k] = -1;
  jk2[j] = 2;
  jk2[k] = -2;
  SurfaceElem g = SurfaceElem::monomial(n, 0, zero_exps(n), one) -
                  SurfaceElem::monomial(n, 0, jk, surf.c_omega) +
                  SurfaceElem::monomial(n, 0, jk2, surf.omega);
  return {f, g};
}

// --- campaign bodies ------------------------------------------------------

inline int run_comm3(std::ostream& out, int size_bound, std::uint64_t seed, int unions) {
  const int n = 3;
  auto subs = enumerate_comm_subspaces(n, size_bound);
  CoordSubspace M = CoordSubspace::full(n);
  Counter c;
  static const int T[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto check_class = [&](const TorusElem& cls, const std::string& tag) {
    TorusElem mir = mirror_q(cls);
    for (const auto& t : T)
      for (QOrdering o : {QOrdering::q1q2, QOrdering::q2q1}) {
        bool ok = comm_wheel_membership(cls, t[0], t[1], t[2], o) &&
                  comm_wheel_membership(mir, t[0], t[1], t[2], mirrored(o));
        std::ostringstream label;
        label << tag << " triple=(" << t[0] + 1 << "," << t[1] + 1 << "," << t[2] + 1
              << ") ord=" << (o == QOrdering::q1q2 ? "q1q2" : "q2q1");
        report(out, c, label.str(), ok);
      }
  };
  for (std::size_t s = 0; s < subs.size(); ++s) {
    std::ostringstream tag;
    tag << "comm3 sub=" << s << " size=" << subs[s].setA.size() + subs[s].setB.size();
    check_class(koszul_restrict_class(subs[s], M), tag.str());
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, subs.size() - 1);
  for (int u = 0; u < unions; ++u) {
    std::size_t a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    std::ostringstream tag;
    tag << "comm3 union=(" << a << "," << b << ")";
    check_class(union_class({subs[a], subs[b]}, M), tag.str());
  }
  summary(out, c);
  return c.fail == 0 ? 0 : 1;
}

inline int run_kp2_wheel(std::ostream& out, std::uint64_t seed, int trials) {
  KSurfaceModel surf = builtin_kp2();
  const int n = 3, i = 0, j = 1, k = 2;
  auto [f, g] = wheel_ideal_generators(surf, n, i, j, k);
  std::vector<SurfaceElem> gens = {f, g};
  Counter c;
  report(out, c, "kp2-wheel gen-omega", surface_wheel_membership(f, i, j, k, surf));
  report(out, c, "kp2-wheel gen-quadratic", surface_wheel_membership(g, i, j, k, surf));
  SurfaceElem one =
      SurfaceElem::monomial(n, 0, zero_exps(n), RingElem::unit(surf.ring));
  report(out, c, "kp2-wheel const-1-rejected", !surface_wheel_membership(one, i, j, k, surf));

  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    SurfaceElem a = random_surface_elem(rng, surf.ring, n, 1, 2);
    SurfaceElem b = random_surface_elem(rng, surf.ring, n, 1, 2);
    SurfaceElem x = a * f + b * g;
    bool chk = surface_wheel_membership(x, i, j, k, surf);
    auto orc = membership_oracle(x, gens, known_multiplier_box<RingElem>({a, b}));
    std::ostringstream tag;
    tag << "kp2-wheel member=" << t;
    report(out, c, tag.str() + " checker", chk);
    report(out, c, tag.str() + " oracle", orc.member);
  }
  for (int t = 0; t < trials; ++t) {
    SurfaceElem x = random_surface_elem(rng, surf.ring, n, 1, 3);
    bool chk = surface_wheel_membership(x, i, j, k, surf);
    SupportBox box;
    box.range.assign(x.key_size(), {-2, 2});
    auto orc = membership_oracle(x, gens, box);
    // The checker is exact, so an oracle certificate must be confirmed; a
    // miss in the fixed box only counts against a checker MEMBER verdict.
    bool agree = orc.member ? chk : true;
    if (chk && !orc.member) agree = membership_oracle(x, gens, suggest_box(x, gens, 2)).member;
    std::ostringstream tag;
    tag << "kp2-wheel random=" << t << " agree";
    report(out, c, tag.str(), agree);
  }
  for (int t = 0; t < trials; ++t) {
    SurfaceElem a = random_surface_elem(rng, surf.ring, n, 1, 2);
    SurfaceElem x = a * (t % 2 ? g : f);
    SurfaceElem y = random_surface_elem(rng, surf.ring, n, 1, 2);
    std::ostringstream tag;
    tag << "kp2-wheel closure=" << t;
    report(out, c, tag.str(), surface_wheel_membership(x * y, i, j, k, surf));
  }
  summary(out, c);
  return c.fail == 0 ? 0 : 1;
}

inline int run_wheel_campaign(std::ostream& out, const LoadedModel& lm, std::uint64_t seed,
                              int trials, const KernelSpec& kspec) {
  const KSurfaceModel& surf = need_surface(lm, "wheel --campaign");
  SurfaceMode mode{surf.ring};
  KernelFn<RingElem> kernel = surface_kernel_fn(kspec, surf.ring);
  std::mt19937_64 rng(seed);
  int recorded = 0;
  for (int t = 0; t < trials; ++t) {
    auto gen = [&] {
      return generator_element(random_surface_elem(rng, surf.ring, 1, 1, 2), mode);
    };
    auto prod = shuffle_product(shuffle_product(gen(), gen(), kernel, mode), gen(), kernel, mode);
    out << "wheel-campaign trial=" << t;
    auto pole = pole_check(prod.body, surf);
    if (!pole.value) {
      out << " pole=POLE-VIOLATION factor=" << format_factor(*pole.violation, 3, 0)
          << " wheel=SKIPPED\n";
      ++recorded;
      continue;
    }
    out << " pole=MEMBER";
    SurfaceElem G = restrict_small_diagonal(*pole.value, 0, 1, 2);
    bool member = surface_wheel_membership(G, 0, 1, 2, surf, 0);
    out << " wheel=" << (member ? "MEMBER" : "NOT-MEMBER") << "\n";
    ++recorded;
  }
  out << "recorded=" << recorded << "\n";
  return 0;
}

}  // namespace detail

// Driver behind the binary: parses args (program name excluded), writes the
// report to `out` and complaints to `err`.  Exit status: 0 all checks
// passed, 1 at least one violation, 2 bad input.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact checkers for shuffle-algebra pole and wheel conditions"};
  app.require_subcommand(1);

  std::string expr, elem, model_spec = "kp2", kernel_path, campaign_name;
  std::vector<std::string> inputs_elem, inputs_expr;
  std::vector<int> triple;
  std::string ordering = "q1q2", orientation = "ji";
  int nflag = 0, max_size = 0;
  std::uint64_t seed = 12345;
  bool wheel_campaign = false;

  auto add_common = [&](CLI::App* sub, bool with_triple) {
    sub->add_option("--n", nflag, "variable count (inferred when omitted)");
    sub->add_option("--expr", expr, "element as an expression");
    sub->add_option("--element", elem, "element file");
    if (with_triple)
      sub->add_option("--triple", triple, "variable triple i j k (1-based)")->expected(3);
  };

  CLI::App* vr = app.add_subcommand("validate-ring", "check ring-model axioms");
  vr->add_option("--model", model_spec, "model file, or 'kp2' for the builtin");

  CLI::App* cw = app.add_subcommand("comm-wheel", "torus wheel membership for a triple");
  add_common(cw, true);
  cw->add_option("--ordering", ordering, "q1q2 | q2q1")
      ->check(CLI::IsMember({"q1q2", "q2q1"}));

  CLI::App* po = app.add_subcommand("pole", "clear denominators of Phi * F");
  add_common(po, false);
  po->add_option("--model", model_spec, "model file, or 'kp2' for the builtin");
  po->add_option("--orientation", orientation, "ratio orientation ji | ij")
      ->check(CLI::IsMember({"ji", "ij"}));

  CLI::App* wh = app.add_subcommand("wheel", "surface wheel membership for a triple");
  add_common(wh, true);
  wh->add_option("--model", model_spec, "model file, or 'kp2' for the builtin");
  wh->add_flag("--campaign", wheel_campaign, "record shuffle-product outcomes instead");
  wh->add_option("--seed", seed, "campaign RNG seed");
  wh->add_option("--max-size", max_size, "campaign trial count");
  wh->add_option("--kernel", kernel_path, "campaign kernel file");

  CLI::App* sh = app.add_subcommand("shuffle", "shuffle product of two elements");
  sh->add_option("--element", inputs_elem, "element file (give twice)");
  sh->add_option("--expr", inputs_expr, "element as an expression (alternative)");
  // Passing --model switches shuffle into surface mode.
  auto* sh_model = sh->add_option("--model", model_spec, "surface mode: model file or 'kp2'");
  sh->add_option("--kernel", kernel_path, "kernel file (default: plane kernel, torus mode)");
  sh->add_option("--n", nflag, "variable count of the element files");

  CLI::App* ca = app.add_subcommand("campaign", "built-in verification campaigns");
  ca->add_option("name", campaign_name, "comm3 | kp2-wheel")->required();
  ca->add_option("--seed", seed, "RNG seed");
  ca->add_option("--max-size", max_size, "enumeration bound / trial count");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (vr->parsed()) {
      LoadedModel lm = detail::load_model_spec(model_spec);
      detail::Counter c;
      out << "model " << (model_spec == "kp2" ? "kp2" : model_spec)
          << " rank=" << lm.ring->rank() << "\n";
      auto fails = ring_validate(lm.ring);
      c.total += long(ring_validate_check_count(lm.ring));
      c.fail += long(fails.size());
      for (const auto& f : fails) out << "FAIL " << f << "\n";
      if (lm.ring->rank() <= 5) {
        auto sq = RingModel::tensor_power(lm.ring, 2);
        auto sfails = ring_validate(sq);
        out << "square rank=" << sq->rank() << "\n";
        c.total += long(ring_validate_check_count(sq));
        c.fail += long(sfails.size());
        for (const auto& f : sfails) out << "FAIL square " << f << "\n";
      }
      if (lm.surface) {
        const auto& s = *lm.surface;
        bool oinv = s.omega * s.omega_inv == RingElem::unit(lm.ring);
        ++c.total;
        if (!oinv) ++c.fail;
        out << "surface omega-inverse " << (oinv ? "PASS" : "FAIL") << "\n";
        if (s.hyperplane) {
          RingElem nil = *s.hyperplane - RingElem::unit(lm.ring);
          bool ok = nil.pow(lm.ring->rank()).is_zero();
          ++c.total;
          if (!ok) ++c.fail;
          out << "surface nilpotent-hyperplane " << (ok ? "PASS" : "FAIL") << "\n";
        }
      }
      c.pass = c.total - c.fail;
      detail::summary(out, c);
      return c.fail == 0 ? 0 : 1;
    }

    if (cw->parsed()) {
      int nmin = detail::check_triple(triple);
      TorusElem x = detail::as_laurent(detail::torus_input(expr, elem, nflag, nmin));
      QOrdering o = ordering == "q1q2" ? QOrdering::q1q2 : QOrdering::q2q1;
      bool member = comm_wheel_membership(x, triple[0] - 1, triple[1] - 1, triple[2] - 1, o);
      out << (member ? "MEMBER" : "NOT-MEMBER") << "\n";
      return member ? 0 : 1;
    }

    if (po->parsed()) {
      LoadedModel lm = detail::load_model_spec(model_spec);
      const KSurfaceModel& surf = detail::need_surface(lm, "pole");
      Rat<RingElem> F = detail::surface_input(expr, elem, nflag, 1, lm.ring);
      RatioOrientation o = orientation == "ji" ? RatioOrientation::ji : RatioOrientation::ij;
      auto r = pole_check(F, surf, o);
      if (r.value) {
        out << "MEMBER\n";
        return 0;
      }
      out << "POLE-VIOLATION factor=" << format_factor(*r.violation, F.num.nz(), 0) << "\n";
      return 1;
    }

    if (wh->parsed()) {
      LoadedModel lm = detail::load_model_spec(model_spec);
      if (wheel_campaign) {
        KernelSpec ks = trivial_kernel();
        if (!kernel_path.empty()) {
          std::ifstream in(kernel_path);
          if (!in) throw input_error("cannot open kernel '" + kernel_path + "'");
          ks = read_kernel(in);
        }
        return detail::run_wheel_campaign(out, lm, seed, max_size > 0 ? max_size : 5, ks);
      }
      const KSurfaceModel& surf = detail::need_surface(lm, "wheel");
      int nmin = detail::check_triple(triple);
      SurfaceElem x = detail::as_laurent(detail::surface_input(expr, elem, nflag, nmin, lm.ring));
      int i = triple[0] - 1, j = triple[1] - 1, k = triple[2] - 1;
      SurfaceElem G = restrict_small_diagonal(x, i, j, k);
      bool member = surface_wheel_membership(G, i, j, k, surf, unsigned(std::min({i, j, k})));
      out << (member ? "MEMBER" : "NOT-MEMBER") << "\n";
      return member ? 0 : 1;
    }

    if (sh->parsed()) {
      std::vector<std::pair<bool, std::string>> ins;  // (is_file, payload)
      for (const auto& f : inputs_elem) ins.emplace_back(true, f);
      for (const auto& e : inputs_expr) ins.emplace_back(false, e);
      if (ins.size() != 2)
        throw input_error("shuffle needs exactly two inputs (--element/--expr)");
      const bool surface_mode = sh_model->count() > 0;
      KernelSpec ks = default_plane_kernel();
      if (!kernel_path.empty()) {
        std::ifstream in(kernel_path);
        if (!in) throw input_error("cannot open kernel '" + kernel_path + "'");
        ks = read_kernel(in);
      }
      if (!surface_mode) {
        auto load = [&](const std::pair<bool, std::string>& in) {
          return in.first ? detail::torus_input("", in.second, 0, 1)
                          : detail::torus_input(in.second, "", 0, 1);
        };
        Rat<Int> A = load(ins[0]), B = load(ins[1]);
        TorusMode mode;
        auto P = shuffle_product(GradedElem<Int>{A.num.nz(), A}, GradedElem<Int>{B.num.nz(), B},
                                 torus_kernel_fn(ks), mode);
        out << "# degree " << P.degree << "\n";
        write_element(out, P.body);
        return 0;
      }
      LoadedModel lm = detail::load_model_spec(model_spec);
      auto load = [&](const std::pair<bool, std::string>& in) {
        return in.first ? detail::surface_input("", in.second, 0, 1, lm.ring)
                        : detail::surface_input(in.second, "", 0, 1, lm.ring);
      };
      Rat<RingElem> A = load(ins[0]), B = load(ins[1]);
      SurfaceMode mode{lm.ring};
      KernelSpec sks = kernel_path.empty() ? trivial_kernel() : ks;
      auto P = shuffle_product(GradedElem<RingElem>{A.num.nz(), A},
                               GradedElem<RingElem>{B.num.nz(), B},
                               surface_kernel_fn(sks, lm.ring), mode);
      out << "# degree " << P.degree << "\n";
      write_element(out, P.body);
      return 0;
    }

    if (ca->parsed()) {
      if (campaign_name == "comm3")
        return detail::run_comm3(out, max_size > 0 ? std::min(max_size, 18) : 18, seed, 500);
      if (campaign_name == "kp2-wheel")
        return detail::run_kp2_wheel(out, seed, max_size > 0 ? max_size : 20);
      throw input_error("unknown campaign '" + campaign_name + "'");
    }
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace khall::cli
