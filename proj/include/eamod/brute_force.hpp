#pragma once

#include "eamod/economics.hpp"
#include "eamod/milp_core.hpp"
#include "eamod/transition_graph.hpp"

namespace eamod {

struct BruteForceLimits {
    int max_requests = 6;
    int max_vehicles = 2;
};

/// Exhaustive reference optimizer for tiny instances: enumerates every
/// assignment of time-ordered request chains to vehicles and every charging
/// station choice per transition, then solves the remaining continuous
/// problem (battery size and charge amounts) with a small self-contained
/// tableau simplex. Heterogeneous fleet, no battery pinning, no service
/// quota. Intended as an independent cross-check for the main solver.
FleetSolution brute_force(const TransitionDag& dag, int k_max, const EconomicParams& econ,
                          const BruteForceLimits& limits = {});

}  // namespace eamod
