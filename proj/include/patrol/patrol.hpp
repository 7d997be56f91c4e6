#pragma once
// Umbrella header.

#include "patrol/builders.hpp"
#include "patrol/enumeration.hpp"
#include "patrol/gradient.hpp"
#include "patrol/graph.hpp"
#include "patrol/hitting.hpp"
#include "patrol/intruder.hpp"
#include "patrol/io.hpp"
#include "patrol/metrics.hpp"
#include "patrol/optimize.hpp"
#include "patrol/projection.hpp"
#include "patrol/rng.hpp"
#include "patrol/version.hpp"
