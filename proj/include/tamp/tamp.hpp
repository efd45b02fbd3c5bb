#pragma once

#include "tamp/abstraction.hpp"
#include "tamp/bench.hpp"
#include "tamp/boolspec.hpp"
#include "tamp/cache.hpp"
#include "tamp/cost.hpp"
#include "tamp/ebrg.hpp"
#include "tamp/environment.hpp"
#include "tamp/error.hpp"
#include "tamp/oracle.hpp"
#include "tamp/petri_net.hpp"
#include "tamp/planner.hpp"
#include "tamp/render.hpp"
