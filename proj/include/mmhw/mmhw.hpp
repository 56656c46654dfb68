#pragma once

#include "mmhw/antenna.hpp"
#include "mmhw/blockage.hpp"
#include "mmhw/channel.hpp"
#include "mmhw/error.hpp"
#include "mmhw/mac.hpp"
#include "mmhw/metrics.hpp"
#include "mmhw/mobility.hpp"
#include "mmhw/random.hpp"
#include "mmhw/road.hpp"
#include "mmhw/scenario.hpp"
#include "mmhw/simulation.hpp"
