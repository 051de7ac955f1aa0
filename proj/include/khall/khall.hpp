#pragma once

#include "khall/conditions.hpp"
#include "khall/equivariant.hpp"
#include "khall/expvec.hpp"
#include "khall/format.hpp"
#include "khall/ints.hpp"
#include "khall/laurent.hpp"
#include "khall/linsolve.hpp"
#include "khall/parse.hpp"
#include "khall/ring_model.hpp"
#include "khall/shuffle.hpp"
#include "khall/surface.hpp"
