#pragma once

#include "ecoroute/agents.hpp"
#include "ecoroute/belief.hpp"
#include "ecoroute/config.hpp"
#include "ecoroute/energy.hpp"
#include "ecoroute/errors.hpp"
#include "ecoroute/experiment.hpp"
#include "ecoroute/graph.hpp"
#include "ecoroute/io.hpp"
#include "ecoroute/rng.hpp"
#include "ecoroute/sim.hpp"
#include "ecoroute/stats.hpp"
#include "ecoroute/synth.hpp"
