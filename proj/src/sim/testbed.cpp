#include "rpm/sim/testbed.hpp"

#include <cmath>
#include <string>

#include "rpm/core/errors.hpp"

namespace rpm::sim {
namespace {

std::uint64_t scaled(double gbps, double scale) {
  const double bps = std::round(gbps * 1e9 * scale);
  if (!(bps >= 1.0)) throw ConfigError("scale factor yields a zero link capacity");
  return static_cast<std::uint64_t>(bps);
}

}  // namespace

std::vector<SimTime> fairness_receiver_delays(int experiment) {
  std::vector<SimTime> d;
  for (int i = 0; i < 10; ++i) {
    switch (experiment) {
      case 1: d.push_back(SimTime::from_ms(10)); break;
      case 2: d.push_back(SimTime::from_ms(10 * (i / 2 + 1))); break;
      case 3: d.push_back(SimTime::from_ms(20 * (i / 2 + 1))); break;
      default: throw ConfigError("fairness experiment must be 1, 2 or 3");
    }
  }
  return d;
}

ScenarioConfig make_dumbbell(const DumbbellOptions& opt) {
  if (!(opt.scale > 0)) throw ConfigError("scale factor must be positive");
  if (opt.long_flows > 10) throw ConfigError("at most 10 long flows");
  if (!opt.receiver_delays.empty() && opt.receiver_delays.size() != 10) {
    throw ConfigError("receiver_delays needs one entry per host pair");
  }
  const auto host = scaled(10, opt.scale);
  const auto core = scaled(100, opt.scale);
  const auto bottleneck = scaled(10, opt.scale);

  ScenarioConfig cfg;
  for (int i = 1; i <= 20; ++i) cfg.nodes.push_back({"H" + std::to_string(i), NodeKind::Host});
  for (const char* s : {"S1", "R1", "S2"}) cfg.nodes.push_back({s, NodeKind::Switch});
  for (int i = 1; i <= 10; ++i) cfg.links.push_back({"H" + std::to_string(i), "S1", host, opt.sender_delay});
  cfg.links.push_back({"S1", "R1", core, SimTime{}});
  cfg.links.push_back({"R1", "S2", bottleneck, SimTime{}});
  for (int i = 1; i <= 10; ++i) {
    const auto d = opt.receiver_delays.empty() ? SimTime::from_ms(10) : opt.receiver_delays[i - 1];
    cfg.links.push_back({"S2", "H" + std::to_string(i + 10), host, d});
  }
  for (std::uint32_t i = 1; i <= opt.long_flows; ++i) {
    FlowSpec f;
    f.src = "H" + std::to_string(i);
    f.dst = "H" + std::to_string(i + 10);
    f.transport = opt.transport;
    cfg.flows.push_back(f);
  }
  cfg.aqm.mode = opt.mode;
  cfg.aqm.node = "R1";
  cfg.aqm.port = "S2";
  cfg.buffer_bytes = opt.buffer_bytes;
  cfg.duration = opt.duration;
  cfg.start_jitter = opt.start_jitter;
  cfg.seed = opt.seed;
  return cfg;
}

}  // namespace rpm::sim
