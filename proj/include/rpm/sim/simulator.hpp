#pragma once

#include "rpm/sim/network.hpp"
#include "rpm/sim/scenario.hpp"
#include "rpm/sim/trace.hpp"

namespace rpm::sim {

/// Executes the flows of the network's scenario until `until`. Events are
/// dispatched in (time, insertion order); the result is a pure function of
/// the scenario, including its seed.
SimTrace run(Network network, SimTime until);

/// build_topology + run over config.duration.
SimTrace simulate(const ScenarioConfig& config);

}  // namespace rpm::sim
