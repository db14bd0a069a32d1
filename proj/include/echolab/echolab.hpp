#pragma once

// Umbrella header: input subshifts, switched map families, attractor
// atlases, nonautonomous simulation and echo-index estimation.

#include "echolab/atlas.hpp"
#include "echolab/cluster.hpp"
#include "echolab/cocycle.hpp"
#include "echolab/common.hpp"
#include "echolab/echo.hpp"
#include "echolab/io.hpp"
#include "echolab/map_family.hpp"
#include "echolab/rng.hpp"
#include "echolab/sweep.hpp"
#include "echolab/symbolic.hpp"
