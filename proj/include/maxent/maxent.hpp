#pragma once

#include "maxent/bounds.hpp"
#include "maxent/channels.hpp"
#include "maxent/constraints.hpp"
#include "maxent/dual_solver.hpp"
#include "maxent/entropy.hpp"
#include "maxent/errors.hpp"
#include "maxent/harness.hpp"
#include "maxent/io.hpp"
#include "maxent/operators.hpp"
#include "maxent/rng.hpp"
