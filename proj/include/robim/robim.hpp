#pragma once

#include "robim/analytics.hpp"
#include "robim/collada.hpp"
#include "robim/error.hpp"
#include "robim/fleet.hpp"
#include "robim/geometry.hpp"
#include "robim/grid.hpp"
#include "robim/kb.hpp"
#include "robim/model.hpp"
#include "robim/planner.hpp"
#include "robim/pose.hpp"
#include "robim/reqs.hpp"
#include "robim/sim.hpp"
#include "robim/site_params.hpp"
#include "robim/trace.hpp"
#include "robim/worldgen.hpp"
