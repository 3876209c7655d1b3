#include "rpm/sim/scenario.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rpm/core/errors.hpp"

namespace rpm::sim {

using nlohmann::json;

std::string_view to_string(AqmMode mode) {
  switch (mode) {
    case AqmMode::None: return "none";
    case AqmMode::Fwd: return "fwd";
    case AqmMode::RpmPerFlow: return "rpm";
    case AqmMode::RpmPerPort: return "rpm-port";
  }
  return "?";
}

AqmMode parse_aqm_mode(std::string_view s) {
  if (s == "none") return AqmMode::None;
  if (s == "fwd") return AqmMode::Fwd;
  if (s == "rpm" || s == "rpm-flow") return AqmMode::RpmPerFlow;
  if (s == "rpm-port") return AqmMode::RpmPerPort;
  throw ConfigError("unknown aqm mode '" + std::string(s) + "'");
}

std::string_view to_string(transport::Transport t) {
  switch (t) {
    case transport::Transport::TcpAimd: return "tcp";
    case transport::Transport::TcpCubic: return "cubic";
    case transport::Transport::Dctcp: return "dctcp";
  }
  return "?";
}

transport::Transport parse_transport(std::string_view s) {
  if (s == "tcp" || s == "aimd") return transport::Transport::TcpAimd;
  if (s == "cubic") return transport::Transport::TcpCubic;
  if (s == "dctcp") return transport::Transport::Dctcp;
  throw ConfigError("unknown transport '" + std::string(s) + "'");
}

void ScenarioConfig::validate() const {
  if (nodes.empty()) throw ConfigError("no nodes");
  std::map<std::string, NodeKind, std::less<>> kinds;
  for (const auto& n : nodes) {
    if (n.name.empty()) throw ConfigError("node with empty name");
    if (!kinds.emplace(n.name, n.kind).second) throw ConfigError("duplicate node '" + n.name + "'");
  }
  auto require_node = [&](const std::string& name, std::string_view what) {
    auto it = kinds.find(name);
    if (it == kinds.end()) throw ConfigError("dangling node reference '" + name + "' in " + std::string(what));
    return it->second;
  };

  std::set<std::pair<std::string, std::string>> adjacent;
  for (const auto& l : links) {
    require_node(l.a, "link");
    require_node(l.b, "link");
    if (l.a == l.b) throw ConfigError("self-loop link at '" + l.a + "'");
    if (l.capacity_bps == 0) throw ConfigError("non-positive capacity on link " + l.a + "-" + l.b);
    if (l.delay < SimTime{}) throw ConfigError("negative delay on link " + l.a + "-" + l.b);
    adjacent.emplace(l.a, l.b);
    adjacent.emplace(l.b, l.a);
  }

  for (const auto& f : flows) {
    if (require_node(f.src, "flow") != NodeKind::Host || require_node(f.dst, "flow") != NodeKind::Host) {
      throw ConfigError("flow endpoints must be hosts");
    }
    if (f.src == f.dst) throw ConfigError("flow source equals destination '" + f.src + "'");
    if (f.size_mss && *f.size_mss == 0) throw ConfigError("flow size_mss must be >= 1");
    if (f.start < SimTime{}) throw ConfigError("negative flow start");
    if (f.transport == transport::Transport::TcpCubic) throw ConfigError("cubic transport is not implemented");
  }

  for (const auto& r : routes) {
    require_node(r.node, "route");
    require_node(r.dst, "route");
    require_node(r.via, "route");
    if (!adjacent.contains({r.node, r.via})) throw ConfigError("route via non-neighbour '" + r.via + "'");
  }

  if (aqm.mode != AqmMode::None) {
    if (require_node(aqm.node, "aqm") != NodeKind::Switch) throw ConfigError("aqm node must be a switch");
    if (aqm.port && !adjacent.contains({aqm.node, *aqm.port})) {
      throw ConfigError("aqm port '" + *aqm.port + "' is not a neighbour of '" + aqm.node + "'");
    }
    if (aqm.target <= SimTime{} || aqm.interval <= SimTime{}) throw ConfigError("codel target/interval must be positive");
    if (aqm.register_size == 0 || !std::has_single_bit(aqm.register_size)) {
      throw ConfigError("register_size must be a power of two");
    }
    if (aqm.counter_max == 0) throw ConfigError("counter_max must be positive");
  }

  if (duration <= SimTime{}) throw ConfigError("duration must be positive");
  if (mss == 0) throw ConfigError("mss must be positive");
  if (sample_interval <= SimTime{}) throw ConfigError("sample_interval must be positive");
  if (start_jitter < SimTime{}) throw ConfigError("start_jitter must be non-negative");
  if (buffer_bytes && *buffer_bytes == 0) throw ConfigError("buffer_bytes must be positive");
}

std::uint64_t default_buffer_bytes(const ScenarioConfig& cfg) {
  std::uint64_t rate = 0;
  for (const auto& l : cfg.links) {
    const bool adjacent = cfg.aqm.mode == AqmMode::None || l.a == cfg.aqm.node || l.b == cfg.aqm.node;
    if (adjacent && (rate == 0 || l.capacity_bps < rate)) rate = l.capacity_bps;
  }
  if (rate == 0) return 1ULL << 20;
  const auto bytes = static_cast<std::uint64_t>(rate) * static_cast<std::uint64_t>(kDefaultQueueDelay.ns()) /
                     (8ULL * 1'000'000'000ULL);
  return std::max<std::uint64_t>(static_cast<std::uint64_t>(bytes), kHeaderBytes);
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

std::uint64_t get_positive_u64(const json& j, const char* key, std::string_view what) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string(what) + ": missing '" + key + "'");
  if (!it->is_number()) throw ConfigError(std::string(what) + ": '" + key + "' must be a number");
  const double v = it->get<double>();
  if (v <= 0) throw ConfigError(std::string("non-positive ") + key + " in " + std::string(what));
  return it->is_number_integer() ? it->get<std::uint64_t>() : static_cast<std::uint64_t>(v);
}

SimTime get_time(const json& j, const char* key, SimTime fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("'") + key + "' must be a number of nanoseconds");
  return SimTime::from_ns(it->get<std::int64_t>());
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("scenario root must be an object");

  ScenarioConfig cfg;
  try {
    for (const auto& n : root.value("nodes", json::array())) {
      NodeSpec spec;
      spec.name = n.at("name").get<std::string>();
      const auto kind = n.value("kind", std::string("host"));
      if (kind == "host") {
        spec.kind = NodeKind::Host;
      } else if (kind == "switch") {
        spec.kind = NodeKind::Switch;
      } else {
        throw ConfigError("unknown node kind '" + kind + "'");
      }
      cfg.nodes.push_back(std::move(spec));
    }
    for (const auto& l : root.value("links", json::array())) {
      LinkSpec spec;
      spec.a = l.at("a").get<std::string>();
      spec.b = l.at("b").get<std::string>();
      spec.capacity_bps = get_positive_u64(l, "capacity_bps", "link " + spec.a + "-" + spec.b);
      spec.delay = get_time(l, "delay_ns", SimTime{});
      cfg.links.push_back(std::move(spec));
    }
    for (const auto& f : root.value("flows", json::array())) {
      FlowSpec spec;
      spec.src = f.at("src").get<std::string>();
      spec.dst = f.at("dst").get<std::string>();
      if (f.contains("size_mss") && !f["size_mss"].is_null()) {
        const auto v = f["size_mss"].get<std::int64_t>();
        if (v < 1) throw ConfigError("flow size_mss must be >= 1");
        spec.size_mss = static_cast<std::uint64_t>(v);
      }
      spec.start = get_time(f, "start_ns", SimTime{});
      spec.transport = parse_transport(f.value("transport", std::string("tcp")));
      if (f.contains("src_port")) spec.src_port = f["src_port"].get<PortNumber>();
      if (f.contains("dst_port")) spec.dst_port = f["dst_port"].get<PortNumber>();
      cfg.flows.push_back(std::move(spec));
    }
    for (const auto& r : root.value("routes", json::array())) {
      cfg.routes.push_back(RouteSpec{r.at("node").get<std::string>(), r.at("dst").get<std::string>(),
                                     r.at("via").get<std::string>()});
    }
    if (root.contains("aqm")) {
      const auto& a = root["aqm"];
      cfg.aqm.mode = parse_aqm_mode(a.value("mode", std::string("none")));
      cfg.aqm.node = a.value("node", std::string{});
      if (a.contains("port") && !a["port"].is_null()) cfg.aqm.port = a["port"].get<std::string>();
      cfg.aqm.target = get_time(a, "target_ns", cfg.aqm.target);
      cfg.aqm.interval = get_time(a, "interval_ns", cfg.aqm.interval);
      cfg.aqm.register_size = get_or<std::uint32_t>(a, "register_size", cfg.aqm.register_size);
      cfg.aqm.counter_max = get_or<std::uint32_t>(a, "counter_max", cfg.aqm.counter_max);
    }
    if (root.contains("buffer_bytes") && !root["buffer_bytes"].is_null()) {
      cfg.buffer_bytes = get_positive_u64(root, "buffer_bytes", "scenario");
    }
    cfg.host_buffer_bytes = get_or<std::uint64_t>(root, "host_buffer_bytes", cfg.host_buffer_bytes);
    cfg.duration = get_time(root, "duration_ns", cfg.duration);
    cfg.seed = get_or<std::uint64_t>(root, "seed", cfg.seed);
    cfg.mss = get_or<std::uint32_t>(root, "mss", cfg.mss);
    cfg.sample_interval = get_time(root, "sample_interval_ns", cfg.sample_interval);
    cfg.start_jitter = get_time(root, "start_jitter_ns", cfg.start_jitter);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string dump_scenario(const ScenarioConfig& cfg) {
  json root;
  root["nodes"] = json::array();
  for (const auto& n : cfg.nodes) {
    root["nodes"].push_back({{"name", n.name}, {"kind", n.kind == NodeKind::Host ? "host" : "switch"}});
  }
  root["links"] = json::array();
  for (const auto& l : cfg.links) {
    root["links"].push_back({{"a", l.a}, {"b", l.b}, {"capacity_bps", l.capacity_bps}, {"delay_ns", l.delay.ns()}});
  }
  root["flows"] = json::array();
  for (const auto& f : cfg.flows) {
    json jf{{"src", f.src}, {"dst", f.dst}, {"start_ns", f.start.ns()}, {"transport", to_string(f.transport)}};
    if (f.size_mss) jf["size_mss"] = *f.size_mss;
    if (f.src_port) jf["src_port"] = *f.src_port;
    if (f.dst_port) jf["dst_port"] = *f.dst_port;
    root["flows"].push_back(std::move(jf));
  }
  root["routes"] = json::array();
  for (const auto& r : cfg.routes) root["routes"].push_back({{"node", r.node}, {"dst", r.dst}, {"via", r.via}});
  json aqm{{"mode", to_string(cfg.aqm.mode)},
           {"node", cfg.aqm.node},
           {"target_ns", cfg.aqm.target.ns()},
           {"interval_ns", cfg.aqm.interval.ns()},
           {"register_size", cfg.aqm.register_size},
           {"counter_max", cfg.aqm.counter_max}};
  if (cfg.aqm.port) aqm["port"] = *cfg.aqm.port;
  root["aqm"] = std::move(aqm);
  if (cfg.buffer_bytes) root["buffer_bytes"] = *cfg.buffer_bytes;
  root["host_buffer_bytes"] = cfg.host_buffer_bytes;
  root["duration_ns"] = cfg.duration.ns();
  root["seed"] = cfg.seed;
  root["mss"] = cfg.mss;
  root["sample_interval_ns"] = cfg.sample_interval.ns();
  root["start_jitter_ns"] = cfg.start_jitter.ns();
  return root.dump(2);
}

}  // namespace rpm::sim
