#pragma once

// Rational q-Heun operators on the Askey-Wilson grid, the associated
// generalized eigenvalue problems, and their Wilson biorthogonal solutions.

#include "ratheun/types.hpp"
#include "ratheun/numerics.hpp"
#include "ratheun/linalg.hpp"
#include "ratheun/sampling.hpp"
#include "ratheun/ratfun.hpp"
#include "ratheun/heunop.hpp"
#include "ratheun/classical.hpp"
#include "ratheun/gevp.hpp"
#include "ratheun/hyp.hpp"
