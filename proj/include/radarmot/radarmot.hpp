#pragma once

// Umbrella header: the whole tracking engine in one include.

#include "radarmot/assoc.hpp"
#include "radarmot/config.hpp"
#include "radarmot/errors.hpp"
#include "radarmot/filter.hpp"
#include "radarmot/geom.hpp"
#include "radarmot/hungarian.hpp"
#include "radarmot/metrics.hpp"
#include "radarmot/radar.hpp"
#include "radarmot/scenario_io.hpp"
#include "radarmot/scene.hpp"
#include "radarmot/simgen.hpp"
#include "radarmot/track.hpp"
#include "radarmot/tracker.hpp"
