// Acceptance sweep: the eight go/no-go checks, each timed against its pinned
// budget.  Prints one line per criterion and exits nonzero on any failure.
#include <chrono>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "khall/cli.hpp"
#include "khall/khall.hpp"

using namespace khall;
using Clock = std::chrono::steady_clock;

namespace {

struct Gate {
  int failures = 0;

  // Runs one criterion, enforces the budget, prints the verdict line.
  void run(int index, const std::string& name, double budget_s,
           const std::function<bool(std::string&)>& body) {
    std::string detail;
    auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool in_budget = secs < budget_s;
    if (!(ok && in_budget)) ++failures;
    std::cout << "[" << index << "] " << name << ": " << (ok && in_budget ? "PASS" : "FAIL")
              << "  (" << secs << "s, budget " << budget_s << "s";
    if (!detail.empty()) std::cout << "; " << detail;
    std::cout << ")" << std::endl;
  }
};

TorusElem tmono(int n, std::vector<int> ze, int q1, int q2, Int c) {
  ExpVec key = zero_exps(n + 2);
  for (int i = 0; i < n; ++i) key[i] = checked_exp(ze[i]);
  key[n] = checked_exp(q1);
  key[n + 1] = checked_exp(q2);
  return TorusElem::monomial(n, 2, std::move(key), std::move(c));
}

TorusElem torus_one(int n) { return tmono(n, std::vector<int>(n, 0), 0, 0, 1); }

SurfaceElem smono(int n, std::vector<int> ze, RingElem c) {
  ExpVec key = zero_exps(n);
  for (int i = 0; i < n; ++i) key[i] = checked_exp(ze[i]);
  return SurfaceElem::monomial(n, 0, std::move(key), std::move(c));
}

// --- criterion bodies ------------------------------------------------------

bool crit1_proof_reproduction(std::string& detail) {
  auto M = CoordSubspace::make(3, {{0, 1}}, {{1, 2}});
  auto V1 = CoordSubspace::make(3, {{0, 1}}, {});
  auto V2 = CoordSubspace::make(3, {}, {{1, 2}});

  TorusElem k1 = koszul_restrict_class(V1, M);
  TorusElem k2 = koszul_restrict_class(V2, M);
  TorusElem e1 = torus_one(3) - tmono(3, {0, -1, 1}, 0, -1, 1);  // 1 - q2^-1 z3/z2
  TorusElem e2 = torus_one(3) - tmono(3, {-1, 1, 0}, -1, 0, 1);  // 1 - q1^-1 z2/z1

  bool formulas = (k1 == e1) && (k2 == e2);
  bool members = comm_wheel_membership(k1, 0, 1, 2, QOrdering::q2q1) &&
                 comm_wheel_membership(k2, 0, 1, 2, QOrdering::q2q1);
  detail = "formulas " + std::string(formulas ? "exact" : "WRONG") + ", q2q1 membership " +
           (members ? "ok" : "WRONG");
  return formulas && members;
}

bool crit2_comm3_campaign(std::string& detail) {
  std::ostringstream out, err;
  int rc = cli::run({"campaign", "comm3"}, out, err);
  std::string text = out.str();
  auto pos = text.rfind("total=");
  detail = pos == std::string::npos ? "no summary" : text.substr(pos, text.size() - pos - 1);
  return rc == 0 && text.find(" fail=0") != std::string::npos;
}

bool crit3_checker_oracle(std::string& detail) {
  std::mt19937_64 rng(0xC0FFEE);
  long constructed = 0, randoms = 0, certified = 0;

  // Torus side: the comm wheel ideal for triple (1,2,3), ordering (q1,q2).
  TorusElem tf = tmono(3, {0, 0, 1}, 0, 0, 1) - tmono(3, {0, 1, 0}, 1, 0, 1);
  TorusElem tg = tmono(3, {0, 1, 0}, 0, 0, 1) - tmono(3, {1, 0, 0}, 0, 1, 1);
  std::vector<TorusElem> tgens = {tf, tg};

  auto random_small_torus = [&](int terms, int emax, int qmax) {
    TorusElem acc(3, 2);
    std::uniform_int_distribution<int> e(0, emax);
    std::uniform_int_distribution<int> q(-qmax, qmax);
    std::uniform_int_distribution<int> c(-3, 3);
    for (int t = 0; t < terms; ++t)
      acc = acc + tmono(3, {e(rng), e(rng), e(rng)}, q(rng), q(rng), Int(c(rng)));
    return acc;
  };

  for (int t = 0; t < 200; ++t) {
    TorusElem a = random_small_torus(1 + int(rng() % 2), 1, 0);
    TorusElem b = random_small_torus(1 + int(rng() % 2), 1, 0);
    TorusElem x = a * tf + b * tg;
    ++constructed;
    if (!comm_wheel_membership(x, 0, 1, 2, QOrdering::q1q2)) {
      detail = "torus constructed member rejected by checker";
      return false;
    }
    if (x.is_zero()) continue;
    auto box = cli::detail::known_multiplier_box<Int>({a, b});
    auto orc = membership_oracle(x, tgens, box, 200000);
    if (!orc.member) {
      detail = "torus constructed member rejected by oracle";
      return false;
    }
  }
  for (int t = 0; t < 200; ++t) {
    TorusElem x = random_small_torus(1 + int(rng() % 3), 1, 1);
    ++randoms;
    SupportBox box;
    for (int s = 0; s < 3; ++s) box.range.emplace_back(-1, 1);
    box.range.emplace_back(-2, 2);
    box.range.emplace_back(-2, 2);
    auto orc = membership_oracle(x, tgens, box, 200000);
    if (orc.member) {
      ++certified;
      if (!comm_wheel_membership(x, 0, 1, 2, QOrdering::q1q2)) {
        detail = "oracle certificate contradicts torus checker";
        return false;
      }
    }
  }

  // Surface side: the K(P^2) wheel ideal.
  KSurfaceModel surf = builtin_kp2();
  auto [sf, sg] = cli::detail::wheel_ideal_generators(surf, 3, 0, 1, 2);
  std::vector<SurfaceElem> sgens = {sf, sg};

  auto random_small_surface = [&](int terms, int emax) {
    SurfaceElem acc(3, 0);
    std::uniform_int_distribution<int> e(0, emax);
    for (int t = 0; t < terms; ++t)
      acc = acc + smono(3, {e(rng), e(rng), e(rng)},
                        cli::detail::random_ring_elem(rng, surf.ring, 2));
    return acc;
  };

  for (int t = 0; t < 200; ++t) {
    SurfaceElem a = random_small_surface(1 + int(rng() % 2), 1);
    SurfaceElem b = random_small_surface(1 + int(rng() % 2), 1);
    SurfaceElem x = a * sf + b * sg;
    ++constructed;
    if (!surface_wheel_membership(x, 0, 1, 2, surf)) {
      detail = "surface constructed member rejected by checker";
      return false;
    }
    if (x.is_zero()) continue;
    auto box = cli::detail::known_multiplier_box<RingElem>({a, b});
    auto orc = membership_oracle(x, sgens, box, 200000);
    if (!orc.member) {
      detail = "surface constructed member rejected by oracle";
      return false;
    }
  }
  for (int t = 0; t < 200; ++t) {
    SurfaceElem x = random_small_surface(1 + int(rng() % 3), 1);
    ++randoms;
    SupportBox box;
    for (int s = 0; s < 3; ++s) box.range.emplace_back(-2, 2);
    auto orc = membership_oracle(x, sgens, box, 200000);
    if (orc.member) {
      ++certified;
      if (!surface_wheel_membership(x, 0, 1, 2, surf)) {
        detail = "oracle certificate contradicts surface checker";
        return false;
      }
    }
  }

  detail = std::to_string(constructed) + " constructed, " + std::to_string(randoms) +
           " random (" + std::to_string(certified) + " oracle certificates)";
  return true;
}

bool crit4_surface_wheel(std::string& detail) {
  KSurfaceModel surf = builtin_kp2();
  auto [f, g] = cli::detail::wheel_ideal_generators(surf, 3, 0, 1, 2);
  std::mt19937_64 rng(777);

  if (!surface_wheel_membership(f, 0, 1, 2, surf) ||
      !surface_wheel_membership(g, 0, 1, 2, surf)) {
    detail = "generator rejected";
    return false;
  }
  if (surface_wheel_membership(smono(3, {0, 0, 0}, RingElem::unit(surf.ring)), 0, 1, 2,
                               surf)) {
    detail = "constant 1 accepted";
    return false;
  }

  auto rnd = [&](int terms) {
    return cli::detail::random_surface_elem(rng, surf.ring, 3, 1, terms);
  };

  // 100 random ideal combinations are members; closure under products holds.
  for (int t = 0; t < 100; ++t) {
    SurfaceElem member = rnd(2) * f + rnd(2) * g;
    if (!surface_wheel_membership(member, 0, 1, 2, surf)) {
      detail = "ideal combination rejected";
      return false;
    }
    if (!surface_wheel_membership(member * rnd(2), 0, 1, 2, surf)) {
      detail = "closure under multiplication failed";
      return false;
    }
  }

  // 50 guaranteed non-members: ideal member plus a nonzero constant (the
  // reduction leaves the constant as remainder).
  for (int t = 0; t < 50; ++t) {
    RingElem c = cli::detail::random_ring_elem(rng, surf.ring, 2);
    while (c.is_zero()) c = cli::detail::random_ring_elem(rng, surf.ring, 2);
    SurfaceElem x = rnd(2) * f + rnd(2) * g + smono(3, {0, 0, 0}, c);
    if (surface_wheel_membership(x, 0, 1, 2, surf)) {
      detail = "non-member accepted";
      return false;
    }
  }
  detail = "generators + 100 members + 100 closures + 50 non-members";
  return true;
}

bool crit5_pole(std::string& detail) {
  KSurfaceModel surf = builtin_kp2();
  auto sq = surf.square;
  std::mt19937_64 rng(424242);
  SurfaceElem phi = multiplier_phi(2, surf);

  RingElem s0 = embed_at_slot(sq, RingElem::basis(surf.ring, 1), 0);
  RingElem s1 = embed_at_slot(sq, RingElem::basis(surf.ring, 1), 1);
  RingElem unit = RingElem::unit(sq);

  auto nilpotent = [&](int cmax) {
    std::uniform_int_distribution<int> c(-cmax, cmax);
    return Int(c(rng)) * s0 + Int(c(rng)) * s1 + Int(c(rng)) * (s0 * s1);
  };

  for (int trial = 0; trial < 100; ++trial) {
    // H: nilpotent-coefficient noise plus one unit-rank monomial, so the rank
    // polynomial of the numerator is a monomial times the factor ranks.
    std::uniform_int_distribution<int> e(-1, 1);
    SurfaceElem H = smono(2, {e(rng), e(rng)},
                          ((rng() % 2) ? unit : -unit) + nilpotent(1));
    for (int t = 0; t < int(rng() % 3); ++t)
      H = H + smono(2, {e(rng), e(rng)}, nilpotent(2));

    int nf = 1 + int(rng() % 2);
    std::vector<BinomialFactor<RingElem>> fs;
    SurfaceElem num = H;
    for (int t = 0; t < nf; ++t) {
      int a = int(rng() % 2), b = 1 - a;
      ExpVec delta = zero_exps(2);
      delta[a] = 1;
      delta[b] = -1;
      BinomialFactor<RingElem> fac{a, b, delta,
                                   ((rng() % 2) ? unit : -unit) + nilpotent(1)};
      num = num.mul_binomial(fac);
      fs.push_back(std::move(fac));
    }
    std::sort(fs.begin(), fs.end(), factor_less<RingElem>);

    auto good = pole_check(Rat<RingElem>{num, fs}, surf);
    if (!good.value || !(*good.value == phi * H)) {
      detail = "constructed input did not return Phi*H";
      return false;
    }

    // Doubling one factor's coefficient moves its rank to +-2; no surviving
    // rank factor has a root there, so the division must fail.
    auto bad = fs;
    bad[rng() % bad.size()].c = Int(2) * bad[rng() % bad.size()].c;
    std::sort(bad.begin(), bad.end(), factor_less<RingElem>);
    auto violated = pole_check(Rat<RingElem>{num, bad}, surf);
    if (violated.value || !violated.violation) {
      detail = "perturbed denominator not flagged";
      return false;
    }
  }
  detail = "100 round-trips + 100 perturbations";
  return true;
}

bool crit6_ring_validation(std::string& detail) {
  KSurfaceModel surf = builtin_kp2();
  auto fails3 = ring_validate(surf.ring);
  auto fails9 = ring_validate(surf.square);
  bool counts = ring_validate_check_count(surf.ring) == 27 + 9 + 3;
  bool omega = surf.omega * surf.omega_inv == RingElem::unit(surf.ring);
  RingElem L = RingElem::unit(surf.ring) + RingElem::basis(surf.ring, 1);
  bool nil = (L - RingElem::unit(surf.ring)).pow(3).is_zero();
  detail = "rank-3 fails=" + std::to_string(fails3.size()) +
           ", rank-9 fails=" + std::to_string(fails9.size());
  return fails3.empty() && fails9.empty() && counts && omega && nil;
}

bool crit7_shuffle_associativity(std::string& detail) {
  TorusMode tm;
  auto plane = torus_kernel_fn(default_plane_kernel());
  auto triv = trivial_kernel_fn<Int>();
  long checked = 0;

  auto monomials = [](int n) {
    // Symmetrized monomial bodies, one per exponent multiset in {0,1}^n
    // (graded elements carry symmetric bodies, so each {0,1}^n monomial
    // lands in the element generated by its sorted exponent vector).
    std::vector<TorusElem> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      ExpVec key = zero_exps(n + 2);
      bool sorted = true;
      for (int i = 0; i < n; ++i) key[i] = (mask >> i) & 1;
      for (int i = 0; i + 1 < n; ++i) sorted &= key[i] >= key[i + 1];
      if (!sorted) continue;
      out.push_back(TorusElem::monomial(n, 2, std::move(key), Int(1)).symmetrize());
    }
    return out;
  };

  // Every symmetrized-monomial triple of total degree <= 4.
  for (int n1 = 1; n1 <= 2; ++n1)
    for (int n2 = 1; n2 <= 2; ++n2)
      for (int n3 = 1; n3 <= 2; ++n3) {
        if (n1 + n2 + n3 > 4) continue;
        for (const auto& b1 : monomials(n1))
          for (const auto& b2 : monomials(n2))
            for (const auto& b3 : monomials(n3)) {
              GradedElem<Int> F{n1, Rat<Int>::from(b1)};
              GradedElem<Int> G{n2, Rat<Int>::from(b2)};
              GradedElem<Int> H{n3, Rat<Int>::from(b3)};
              if (!associativity_check(F, G, H, plane, tm) ||
                  !associativity_check(F, G, H, triv, tm)) {
                detail = "triple (" + std::to_string(n1) + "," + std::to_string(n2) +
                         "," + std::to_string(n3) + ") failed";
                return false;
              }
              ++checked;
            }
      }

  // 20 random degree-5 triples.
  std::mt19937_64 rng(512);
  static const int parts[][3] = {{1, 1, 3}, {1, 3, 1}, {3, 1, 1},
                                 {1, 2, 2}, {2, 1, 2}, {2, 2, 1}};
  for (int t = 0; t < 20; ++t) {
    const int* p = parts[rng() % 6];
    GradedElem<Int> gs[3];
    for (int s = 0; s < 3; ++s) {
      ExpVec key = zero_exps(p[s] + 2);
      for (int i = 0; i < p[s]; ++i) key[i] = checked_exp(long(rng() % 3));
      gs[s] = {p[s], Rat<Int>::from(TorusElem::monomial(p[s], 2, std::move(key),
                                                        Int(1 + rng() % 3))
                                        .symmetrize())};
    }
    if (!associativity_check(gs[0], gs[1], gs[2], plane, tm) ||
        !associativity_check(gs[0], gs[1], gs[2], triv, tm)) {
      detail = "random degree-5 triple failed";
      return false;
    }
    ++checked;
  }

  // zeta = 1 really is plain symmetrized multiplication (spot oracle).
  {
    TorusElem f = tmono(1, {1}, 0, 0, 1);
    auto P = shuffle_product(GradedElem<Int>{1, Rat<Int>::from(f)},
                             GradedElem<Int>{1, Rat<Int>::from(f)}, triv, tm);
    TorusElem expect = tmono(2, {1, 1}, 0, 0, 2);
    if (!(P.body.num == expect && P.body.den.empty())) {
      detail = "zeta=1 oracle mismatch";
      return false;
    }
  }

  detail = std::to_string(checked) + " associativity triples, both kernels";
  return true;
}

bool crit8_symmetrize_s6(std::string& detail) {
  KSurfaceModel surf = builtin_kp2();
  auto model6 = RingModel::tensor_power(surf.ring, 6);
  std::mt19937_64 rng(66);
  std::uniform_int_distribution<int> e(-2, 2);
  std::uniform_int_distribution<std::uint32_t> idx(0, model6->rank() - 1);

  SurfaceElem x(6, 0);
  std::vector<SurfaceElem::Term> ts;
  for (int t = 0; t < 50; ++t) {
    ExpVec key = zero_exps(6);
    for (int i = 0; i < 6; ++i) key[i] = checked_exp(e(rng));
    ts.emplace_back(std::move(key), RingElem::basis(model6, idx(rng)));
  }
  x = SurfaceElem::from_terms(6, 0, std::move(ts));
  SurfaceElem y = x.symmetrize();
  detail = std::to_string(x.term_count()) + " terms -> " + std::to_string(y.term_count());
  return !y.is_zero() && y.is_symmetric();
}

}  // namespace

int main() {
  Gate gate;
  gate.run(1, "proof-reproduction (exact Koszul classes, q2q1 membership)", 1.0,
           crit1_proof_reproduction);
  gate.run(2, "comm3 desk-scale campaign (full enumeration + 500 unions)", 300.0,
           crit2_comm3_campaign);
  gate.run(3, "checker/oracle agreement (2x200 constructed + 2x200 random)", 120.0,
           crit3_checker_oracle);
  gate.run(4, "surface wheel checker over K(P^2)", 60.0, crit4_surface_wheel);
  gate.run(5, "pole checker round-trips and perturbations", 60.0, crit5_pole);
  gate.run(6, "ring validation (27+9+3 and tensor square)", 1.0, crit6_ring_validation);
  gate.run(7, "shuffle associativity (degree <= 4 sweep + 20 random degree 5)", 120.0,
           crit7_shuffle_associativity);
  gate.run(8, "S6 symmetrization of a 50-term tensor element", 10.0, crit8_symmetrize_s6);

  if (gate.failures == 0) {
    std::cout << "ACCEPTANCE PASS\n";
    return 0;
  }
  std::cout << "ACCEPTANCE FAIL (" << gate.failures << " criteria)\n";
  return 1;
}
