#pragma once

#include "waitr/clustering.hpp"
#include "waitr/config.hpp"
#include "waitr/env.hpp"
#include "waitr/error.hpp"
#include "waitr/export.hpp"
#include "waitr/geometry.hpp"
#include "waitr/grid_io.hpp"
#include "waitr/kgraph.hpp"
#include "waitr/pathlets.hpp"
#include "waitr/planner.hpp"
#include "waitr/sim.hpp"
#include "waitr/synth.hpp"
#include "waitr/ted.hpp"
