#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rpm/sim/scenario.hpp"

namespace rpm::sim {

/// Dumbbell H1..H10 -> S1 -> R1 -> S2 -> H11..H20 with CoDel on R1's port
/// towards S2. At scale 1 host links and S1-R1 run at 10 and 100 Gbps and
/// R1-S2 at 10 Gbps.
struct DumbbellOptions {
  double scale = 0.001;
  AqmMode mode = AqmMode::Fwd;
  transport::Transport transport = transport::Transport::TcpAimd;
  SimTime sender_delay = SimTime::from_ms(10);
  /// One-way delay of S2-H(10+i), one entry per pair. Empty: all 10 ms.
  std::vector<SimTime> receiver_delays;
  /// Long-lived flows H_i -> H_{i+10} for i in [1, long_flows].
  std::uint32_t long_flows = 10;
  SimTime duration = SimTime::from_ms(10'000);
  SimTime start_jitter = SimTime::from_ms(100);
  std::optional<std::uint64_t> buffer_bytes;
  std::uint64_t seed = 1;
};

ScenarioConfig make_dumbbell(const DumbbellOptions& opt);

/// Receiver-side delays of the three fairness configurations (1, 2, 3).
std::vector<SimTime> fairness_receiver_delays(int experiment);

}  // namespace rpm::sim
