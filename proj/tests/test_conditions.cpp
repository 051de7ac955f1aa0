// Surface condition checkers: the multiplier Phi, pole divisibility,
// small-diagonal restriction, wheel-ideal membership, and the independent
// linear-algebra oracle.
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "khall/conditions.hpp"
#include "khall/equivariant.hpp"
#include "khall/linsolve.hpp"
#include "khall/surface.hpp"

using namespace khall;

namespace {

const KSurfaceModel& kp2() {
  static KSurfaceModel surf = builtin_kp2();
  return surf;
}

SurfaceElem smono(int n, std::vector<int> ze, RingElem c) {
  ExpVec key = zero_exps(n);
  for (int i = 0; i < n; ++i) key[i] = checked_exp(ze[i]);
  return SurfaceElem::monomial(n, 0, std::move(key), std::move(c));
}

SurfaceElem surface_one(int n, const RingModelPtr& m) {
  return smono(n, std::vector<int>(n, 0), RingElem::unit(m));
}

// Wheel ideal generators for an already-restricted degree-n class:
// f = 1 - omega z_i/z_k, g = 1 - c_omega z_j/z_k + omega (z_j/z_k)^2.
std::pair<SurfaceElem, SurfaceElem> wheel_gens(int n, int i, int j, int k,
                                               const KSurfaceModel& surf) {
  std::vector<int> u(n, 0), v(n, 0), v2(n, 0);
  u[i] = 1;
  u[k] = -1;
  v[j] = 1;
  v[k] = -1;
  v2[j] = 2;
  v2[k] = -2;
  SurfaceElem one = surface_one(n, surf.ring);
  SurfaceElem f = one - smono(n, u, surf.omega);
  SurfaceElem g = one - smono(n, v, surf.c_omega) + smono(n, v2, surf.omega);
  return {f, g};
}

RingElem random_ring(std::mt19937& rng, const RingModelPtr& m) {
  std::uniform_int_distribution<int> c(-2, 2);
  std::vector<Int> v(m->rank());
  for (auto& x : v) x = c(rng);
  return RingElem::from_dense(m, v);
}

SurfaceElem random_surface(std::mt19937& rng, int n, const RingModelPtr& m, int terms) {
  std::uniform_int_distribution<int> e(-1, 1);
  SurfaceElem acc(n, 0);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> ze(n);
    for (auto& x : ze) x = e(rng);
    acc = acc + smono(n, ze, random_ring(rng, m));
  }
  return acc;
}

TorusElem tmono(int n, std::vector<int> ze, int q1, int q2, Int c) {
  ExpVec key = zero_exps(n + 2);
  for (int i = 0; i < n; ++i) key[i] = checked_exp(ze[i]);
  key[n] = checked_exp(q1);
  key[n + 1] = checked_exp(q2);
  return TorusElem::monomial(n, 2, std::move(key), std::move(c));
}

TorusElem random_torus(std::mt19937& rng, int n, int terms) {
  std::uniform_int_distribution<int> e(-1, 1);
  std::uniform_int_distribution<int> c(-3, 3);
  TorusElem acc(n, 2);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> ze(n);
    for (auto& x : ze) x = e(rng);
    acc = acc + tmono(n, ze, e(rng), e(rng), Int(c(rng)));
  }
  return acc;
}

// Rank map: s -> 0 in every tensor slot, i.e. keep the unit coordinate.
TorusElem rank_map(const SurfaceElem& x) {
  std::vector<TorusElem::Term> ts;
  for (const auto& [key, c] : x.terms()) {
    Int r = c.dense()[0];
    if (r != 0) {
      ExpVec k = key;
      for (int i = 0; i < 2; ++i) k.push_back(0);  // widen to nq=2
      ts.emplace_back(std::move(k), r);
    }
  }
  return TorusElem::from_terms(x.nz(), 2, std::move(ts));
}

}  // namespace

TEST_CASE("multiplier Phi", "[conditions]") {
  const auto& surf = kp2();

  // Empty pair product at n=1.
  CHECK(multiplier_phi(1, surf) == surface_one(1, surf.ring));

  // n=2 rank map: ranks of wedge^k W are 1,2,1, so each pair factor
  // specializes to 1 - 2x + x^2 with x the slot ratio.
  SurfaceElem phi2 = multiplier_phi(2, surf);
  TorusElem x = tmono(2, {-1, 1}, 0, 0, 1);  // z2/z1 (orientation z_j/z_i)
  TorusElem one = tmono(2, {0, 0}, 0, 0, 1);
  TorusElem xi = tmono(2, {1, -1}, 0, 0, 1);
  TorusElem expect = (one - x.scale(Int(2)) + x * x) * (one - xi.scale(Int(2)) + xi * xi);
  CHECK(rank_map(phi2) == expect);

  // Symmetric under simultaneous slot/variable permutation.
  CHECK(phi2.is_symmetric());
  CHECK(multiplier_phi(3, surf).is_symmetric());

  // The ij orientation inverts every ratio: same element with z-exponents
  // negated (slot placement unchanged).
  SurfaceElem phi2r = multiplier_phi(2, surf, RatioOrientation::ij);
  std::vector<SurfaceElem::Term> neg(phi2.terms().begin(), phi2.terms().end());
  for (auto& [key, c] : neg)
    for (int i = 0; i < 2; ++i) key[i] = checked_exp(-long(key[i]));
  CHECK(phi2r == SurfaceElem::from_terms(2, 0, std::move(neg)));
}

TEST_CASE("pole condition via exact division", "[conditions]") {
  const auto& surf = kp2();
  auto sq = surf.square;

  // Zero and denominator-free inputs pass trivially.
  auto r0 = pole_check(Rat<RingElem>::from(SurfaceElem(2, 0)), surf);
  REQUIRE(r0.value.has_value());
  CHECK(r0.value->is_zero());

  SurfaceElem H = smono(2, {1, 0}, RingElem::unit(sq)) +
                  smono(2, {0, 1}, embed_at_slot(sq, RingElem::basis(surf.ring, 1), 0));
  SurfaceElem phi2 = multiplier_phi(2, surf);
  auto r1 = pole_check(Rat<RingElem>::from(H), surf);
  REQUIRE(r1.value.has_value());
  CHECK(*r1.value == phi2 * H);

  // Constructed divisibility: numerator (1 - c z2/z1) H over {1 - c z2/z1}.
  ExpVec delta = zero_exps(2);
  delta[1] = 1;
  delta[0] = -1;
  BinomialFactor<RingElem> f{1, 0, delta, RingElem::unit(sq)};
  auto r2 = pole_check(Rat<RingElem>{H.mul_binomial(f), {f}}, surf);
  REQUIRE(r2.value.has_value());
  CHECK(*r2.value == phi2 * H);

  // Perturbed denominator c' != c: the division must fail and name the factor.
  BinomialFactor<RingElem> fbad{1, 0, delta, Int(2) * RingElem::unit(sq)};
  auto r3 = pole_check(Rat<RingElem>{H.mul_binomial(f), {fbad}}, surf);
  REQUIRE(!r3.value.has_value());
  REQUIRE(r3.violation.has_value());
  CHECK(factor_cmp(*r3.violation, fbad) == 0);
}

TEST_CASE("pole check round-trips constructed inputs", "[conditions]") {
  const auto& surf = kp2();
  auto sq = surf.square;
  std::mt19937 rng(20240229);
  for (int trial = 0; trial < 10; ++trial) {
    SurfaceElem H = random_surface(rng, 2, sq, 3);
    ExpVec delta = zero_exps(2);
    int a = int(rng() % 2), b = 1 - a;
    delta[a] = 1;
    delta[b] = -1;
    BinomialFactor<RingElem> f{a, b, delta,
                               (rng() % 2) ? RingElem::unit(sq) : -RingElem::unit(sq)};
    auto with_den = pole_check(Rat<RingElem>{H.mul_binomial(f), {f}}, surf);
    auto plain = pole_check(Rat<RingElem>::from(H), surf);
    REQUIRE(with_den.value.has_value());
    REQUIRE(plain.value.has_value());
    CHECK(*with_den.value == *plain.value);
  }
}

TEST_CASE("restriction to the small diagonal", "[conditions]") {
  const auto& surf = kp2();
  auto cube = RingModel::tensor_power(surf.ring, 3);
  RingElem s = RingElem::basis(surf.ring, 1);
  RingElem one = RingElem::unit(surf.ring);

  auto coeff = [&](const RingElem& a, const RingElem& b, const RingElem& c) {
    return RingElem(cube, outer_coords(3, {&a.coords(), &b.coords(), &c.coords()}));
  };

  // Coefficient slots merge through the product table; z-keys are untouched.
  SurfaceElem g1 = smono(3, {1, 2, 3}, coeff(one, one, one));
  SurfaceElem r1 = restrict_small_diagonal(g1, 0, 1, 2);
  CHECK(r1 == smono(3, {1, 2, 3}, one));

  SurfaceElem g2 = smono(3, {0, 0, 0}, coeff(s, s, one));
  CHECK(restrict_small_diagonal(g2, 0, 1, 2) ==
        smono(3, {0, 0, 0}, RingElem::basis(surf.ring, 2)));

  SurfaceElem g3 = smono(3, {0, 0, 0}, coeff(s, s, s));
  CHECK(restrict_small_diagonal(g3, 0, 1, 2).is_zero());

  // n=4: merged slot lands at min(i,j,k), remaining slots keep order.
  auto quad = RingModel::tensor_power(surf.ring, 4);
  auto sq = RingModel::tensor_power(surf.ring, 2);
  RingElem c4(quad, outer_coords(3, {&s.coords(), &one.coords(), &s.coords(),
                                     &one.coords()}));
  SurfaceElem g4 = smono(4, {1, 0, 0, 0}, c4);
  SurfaceElem r4 = restrict_small_diagonal(g4, 0, 2, 3);
  RingElem expect(sq, outer_coords(3, {&(s * s).coords(), &one.coords()}));
  CHECK(r4 == smono(4, {1, 0, 0, 0}, expect));
}

TEST_CASE("surface wheel membership", "[conditions]") {
  const auto& surf = kp2();
  auto [f, g] = wheel_gens(3, 0, 1, 2, surf);

  CHECK(surface_wheel_membership(f, 0, 1, 2, surf));
  CHECK(surface_wheel_membership(g, 0, 1, 2, surf));
  CHECK(!surface_wheel_membership(surface_one(3, surf.ring), 0, 1, 2, surf));

  // Second generator times anything stays a member.
  std::mt19937 rng(1618033);
  for (int trial = 0; trial < 20; ++trial) {
    SurfaceElem H = random_surface(rng, 3, surf.ring, 3);
    CHECK(surface_wheel_membership(g * H, 0, 1, 2, surf));
    SurfaceElem member = f * random_surface(rng, 3, surf.ring, 2) + g * H;
    CHECK(surface_wheel_membership(member, 0, 1, 2, surf));
    CHECK(surface_wheel_membership(member + member, 0, 1, 2, surf));
    CHECK(surface_wheel_membership(member * random_surface(rng, 3, surf.ring, 2), 0,
                                   1, 2, surf));
  }
}

TEST_CASE("torus wheel membership implies both substitution kills", "[conditions]") {
  // With c1 = q1+q2, c2 = q1q2 the wheel locus contains both substitution
  // points {z_k -> q1 z_j, z_j -> q2 z_i} and the q-swapped pair.
  std::mt19937 rng(31337);
  TorusElem one = tmono(3, {0, 0, 0}, 0, 0, 1);
  TorusElem f = one - tmono(3, {1, 0, -1}, 1, 1, 1);  // 1 - q1 q2 z_i/z_k
  TorusElem g = one - tmono(3, {0, 1, -1}, 1, 0, 1) - tmono(3, {0, 1, -1}, 0, 1, 1) +
                tmono(3, {0, 2, -2}, 1, 1, 1);  // (1 - q1 v)(1 - q2 v)

  CHECK(torus_wheel_membership(f, 0, 1, 2));
  CHECK(torus_wheel_membership(g, 0, 1, 2));
  CHECK(!torus_wheel_membership(one, 0, 1, 2));

  for (int trial = 0; trial < 25; ++trial) {
    TorusElem member =
        random_torus(rng, 3, 3) * f + random_torus(rng, 3, 3) * g;
    REQUIRE(torus_wheel_membership(member, 0, 1, 2));
    CHECK(comm_wheel_membership(member, 0, 1, 2, QOrdering::q1q2));
    CHECK(comm_wheel_membership(member, 0, 1, 2, QOrdering::q2q1));
  }
}

TEST_CASE("membership oracle certifies and agrees", "[conditions]") {
  const auto& surf = kp2();
  auto [f, g] = wheel_gens(3, 0, 1, 2, surf);
  std::vector<SurfaceElem> gens = {f, g};

  // x = f: certificate a = 1, b = 0.
  auto box1 = suggest_box(f, gens, 1);
  auto r1 = membership_oracle(f, gens, box1);
  CHECK(r1.member);
  CHECK(r1.integer_certificate);

  // x = v g: agrees with the remainder checker.
  SurfaceElem v = smono(3, {0, 1, -1}, RingElem::unit(surf.ring));
  SurfaceElem x = v * g;
  auto r2 = membership_oracle(x, gens, suggest_box(x, gens, 1));
  CHECK(r2.member);
  CHECK(surface_wheel_membership(x, 0, 1, 2, surf));

  // Non-members within a sufficient box are rejected.
  auto one = surface_one(3, surf.ring);
  auto r3 = membership_oracle(one, gens, suggest_box(one, gens, 1));
  CHECK(!r3.member);
  CHECK(!surface_wheel_membership(one, 0, 1, 2, surf));

  // Randomized cross-validation: an oracle certificate must be confirmed by
  // the remainder checker (the converse can fail only by box exhaustion).
  std::mt19937 rng(24601);
  SupportBox box;
  for (int s = 0; s < 3; ++s) box.range.emplace_back(-2, 2);
  for (int trial = 0; trial < 15; ++trial) {
    SurfaceElem y = random_surface(rng, 3, surf.ring, 2);
    auto orc = membership_oracle(y, gens, box);
    bool chk = surface_wheel_membership(y, 0, 1, 2, surf);
    if (orc.member) CHECK(chk);

    SurfaceElem member = random_surface(rng, 3, surf.ring, 2) * f +
                         random_surface(rng, 3, surf.ring, 2) * g;
    CHECK(surface_wheel_membership(member, 0, 1, 2, surf));
  }
}

TEST_CASE("oracle guards its box size", "[conditions]") {
  const auto& surf = kp2();
  auto [f, g] = wheel_gens(3, 0, 1, 2, surf);
  SupportBox huge;
  for (int s = 0; s < 3; ++s) huge.range.emplace_back(-20, 20);
  CHECK_THROWS_AS(membership_oracle(f, {f, g}, huge, 1000), oracle_error);
}
