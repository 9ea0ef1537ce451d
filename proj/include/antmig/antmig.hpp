#pragma once

// Umbrella header for the antmig simulation library.

#include "antmig/colony.hpp"
#include "antmig/config.hpp"
#include "antmig/engine.hpp"
#include "antmig/graph.hpp"
#include "antmig/io.hpp"
#include "antmig/metrics.hpp"
#include "antmig/pheromone.hpp"
#include "antmig/rng.hpp"
#include "antmig/sweep.hpp"
