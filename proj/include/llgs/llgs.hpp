#pragma once

#include "llgs/errors.hpp"
#include "llgs/model.hpp"
#include "llgs/analytic.hpp"
#include "llgs/classification.hpp"
#include "llgs/melnikov.hpp"
#include "llgs/profile.hpp"
#include "llgs/hamiltonian.hpp"
#include "llgs/integrator.hpp"
#include "llgs/collocation.hpp"
#include "llgs/continuation.hpp"
#include "llgs/freezing.hpp"
