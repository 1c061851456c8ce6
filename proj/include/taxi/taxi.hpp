#pragma once

#include "taxi/clustering.hpp"
#include "taxi/costmodel.hpp"
#include "taxi/distance.hpp"
#include "taxi/ising_macro.hpp"
#include "taxi/oracle.hpp"
#include "taxi/orchestrator.hpp"
#include "taxi/rng.hpp"
#include "taxi/trace.hpp"
#include "taxi/tsplib.hpp"
