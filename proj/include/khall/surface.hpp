#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "khall/ring_model.hpp"

namespace khall {

// A structure-constant model of K(S) together with the distinguished classes
// the surface checkers consume.  wedgeW lives in the tensor square (classes
// on S x S); wedgeW[k] is the k-th exterior power of the rank r-1 bundle W,
// so the list has r entries and wedgeW[0] is the unit.
struct KSurfaceModel {
  RingModelPtr ring;
  RingModelPtr square;  // tensor_power(ring, 2)
  RingElem omega;       // canonical class, invertible
  RingElem omega_inv;
  RingElem c_omega;     // cotangent class [Omega_S]
  std::optional<RingElem> hyperplane;
  std::vector<RingElem> wedgeW;
  unsigned r = 0;
};

// K(P^2) = Z[s]/(s^3) with s = [O(1)] - 1.  The W-data comes from the Euler
// sequence 0 -> Omega(1) -> O^3 -> O(1) -> 0: R = Omega(1), r = 3,
// wedge^1 W = (3 - L) (x) L^{-1}, wedge^2 W = L^{-1} (x) L^{-2}.
inline KSurfaceModel builtin_kp2() {
  std::vector<Coords> upper = {
      /*1*1*/ {{0, Int(1)}}, /*1*s*/ {{1, Int(1)}}, /*1*s2*/ {{2, Int(1)}},
      /*s*s*/ {{2, Int(1)}}, /*s*s2*/ {},
      /*s2*s2*/ {},
  };
  auto m = RingModel::make_explicit("kp2", 3, {"1", "s", "s2"}, std::move(upper),
                                    {{0, Int(1)}});
  KSurfaceModel surf;
  surf.ring = m;
  surf.square = RingModel::tensor_power(m, 2);
  RingElem one = RingElem::unit(m);
  RingElem L = one + RingElem::basis(m, 1);
  RingElem Linv = *L.try_invert();
  surf.omega = Linv.pow(3);
  surf.omega_inv = *surf.omega.try_invert();
  surf.c_omega = Int(3) * Linv - one;
  surf.hyperplane = L;
  surf.r = 3;
  surf.wedgeW = {
      tensor_outer(surf.square, {one, one}),
      tensor_outer(surf.square, {Int(3) * one - L, Linv}),
      tensor_outer(surf.square, {Linv, Linv * Linv}),
  };
  return surf;
}

}  // namespace khall
