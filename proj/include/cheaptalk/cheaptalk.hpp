#pragma once

#include "cheaptalk/errors.hpp"
#include "cheaptalk/quadrature.hpp"
#include "cheaptalk/distributions.hpp"
#include "cheaptalk/game.hpp"
#include "cheaptalk/equilibrium.hpp"
#include "cheaptalk/benchmarks.hpp"
#include "cheaptalk/evolving.hpp"
#include "cheaptalk/montecarlo.hpp"
