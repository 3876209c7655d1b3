#pragma once

#include <cstdint>

#include "rpm/core/sim_time.hpp"

namespace rpm::sim {

/// One direction of a point-to-point link.
struct Link {
  std::uint64_t capacity_bps = 0;
  SimTime prop_delay;

  /// size·8/capacity seconds, rounded up to whole nanoseconds (never zero for size > 0).
  SimTime serialization_time(std::uint32_t size_bytes) const;
};

}  // namespace rpm::sim
