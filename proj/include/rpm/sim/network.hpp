#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rpm/aqm/codel.hpp"
#include "rpm/core/flow_key.hpp"
#include "rpm/sim/link.hpp"
#include "rpm/sim/output_queue.hpp"
#include "rpm/sim/scenario.hpp"

namespace rpm::sim {

using NodeId = std::uint32_t;
using PortId = std::uint32_t;

/// Egress side of one link direction at a node.
struct Port {
  PortId id = 0;
  NodeId node = 0;
  NodeId peer = 0;
  Link link;
  OutputQueue queue{0};
  std::optional<aqm::CodelState> codel;
};

struct Node {
  std::string name;
  NodeKind kind = NodeKind::Host;
  IpAddress ip = 0;
  std::vector<PortId> ports;
  std::vector<PortId> next_port;  // indexed by destination NodeId
};

inline constexpr PortId kNoPort = 0xFFFF'FFFFU;

/// Static topology with per-destination next hops (BFS shortest path, ties to
/// the lowest neighbour id, then config overrides).
class Network {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Port>& ports() const { return ports_; }
  std::vector<Port>& ports() { return ports_; }
  std::size_t link_count() const { return link_count_; }

  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::optional<NodeId> find(std::string_view name) const;
  std::optional<NodeId> node_by_ip(IpAddress ip) const;

  /// Egress port at `at` towards the node owning `dst`. Throws RuntimeError if unroutable.
  PortId route(NodeId at, IpAddress dst) const;
  /// Node sequence from the owner of `src` to the owner of `dst`, inclusive.
  std::vector<NodeId> path(IpAddress src, IpAddress dst) const;

  std::optional<NodeId> aqm_node() const { return aqm_node_; }
  const ScenarioConfig& config() const { return config_; }

 private:
  friend Network build_topology(const ScenarioConfig& config);

  ScenarioConfig config_;
  std::vector<Node> nodes_;
  std::vector<Port> ports_;
  std::unordered_map<IpAddress, NodeId> by_ip_;
  std::size_t link_count_ = 0;
  std::optional<NodeId> aqm_node_;
};

/// Validates the config and builds nodes, ports, routes and CoDel instances.
Network build_topology(const ScenarioConfig& config);

/// Address assigned to the node at index `id`: 10.0.0.0 + id + 1.
constexpr IpAddress node_address(NodeId id) { return 0x0A00'0000U + id + 1; }

/// True iff `aqm_node` lies on both the forward route of `key` and the route
/// of its swapped tuple. Throws RuntimeError for an unroutable key.
bool check_path_symmetry(const Network& net, const FlowKey& key, NodeId aqm_node);

}  // namespace rpm::sim
