#pragma once

#include <cstdint>
#include <optional>

#include "rpm/core/sim_time.hpp"

namespace rpm::aqm {

enum class CodelDecision { Forward, Signal };

/// Per-port CoDel controller state (dequeue-time algorithm, signal instead of drop).
struct CodelState {
  SimTime target = SimTime::from_ms(1);
  SimTime interval = SimTime::from_ms(20);
  std::optional<SimTime> first_above_time;
  SimTime drop_next;
  std::uint32_t count = 0;
  std::uint32_t last_count = 0;
  bool in_dropping = false;

  // Counters for reporting only.
  std::uint64_t signals = 0;
};

CodelState make_codel(SimTime target, SimTime interval);

/// drop_next + interval/sqrt(count), rounded half up to whole nanoseconds.
/// Throws ContractViolation for count == 0.
SimTime control_law(SimTime drop_next, std::uint32_t count, SimTime interval);

/// Runs the CoDel state machine for one dequeued packet. Signal is the
/// congestion indication (drop, CE mark, or register increment, by mode).
CodelDecision codel_evaluate(CodelState& state, SimTime sojourn, SimTime now);

}  // namespace rpm::aqm
