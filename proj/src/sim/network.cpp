#include "rpm/sim/network.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "rpm/core/errors.hpp"

namespace rpm::sim {

std::optional<NodeId> Network::find(std::string_view name) const {
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<NodeId> Network::node_by_ip(IpAddress ip) const {
  auto it = by_ip_.find(ip);
  if (it == by_ip_.end()) return std::nullopt;
  return it->second;
}

PortId Network::route(NodeId at, IpAddress dst) const {
  auto target = node_by_ip(dst);
  if (!target) throw RuntimeError("no node owns destination address " + std::to_string(dst));
  const PortId p = nodes_.at(at).next_port.at(*target);
  if (p == kNoPort) throw RuntimeError("no route from " + nodes_[at].name + " to " + nodes_[*target].name);
  return p;
}

std::vector<NodeId> Network::path(IpAddress src, IpAddress dst) const {
  auto from = node_by_ip(src);
  auto to = node_by_ip(dst);
  if (!from || !to) throw RuntimeError("path endpoint address not in network");
  std::vector<NodeId> hops{*from};
  NodeId cur = *from;
  while (cur != *to) {
    if (hops.size() > nodes_.size()) throw RuntimeError("routing loop between " + nodes_[*from].name + " and " + nodes_[*to].name);
    cur = ports_[route(cur, dst)].peer;
    hops.push_back(cur);
  }
  return hops;
}

Network build_topology(const ScenarioConfig& config) {
  config.validate();
  Network net;
  net.config_ = config;

  for (NodeId i = 0; i < config.nodes.size(); ++i) {
    Node n;
    n.name = config.nodes[i].name;
    n.kind = config.nodes[i].kind;
    n.ip = node_address(i);
    net.by_ip_.emplace(n.ip, i);
    net.nodes_.push_back(std::move(n));
  }

  const std::uint64_t switch_buffer = config.buffer_bytes.value_or(default_buffer_bytes(config));
  auto add_port = [&](NodeId from, NodeId to, const LinkSpec& l) {
    Port p;
    p.id = static_cast<PortId>(net.ports_.size());
    p.node = from;
    p.peer = to;
    p.link = Link{l.capacity_bps, l.delay};
    const bool is_switch = net.nodes_[from].kind == NodeKind::Switch;
    p.queue = OutputQueue(is_switch ? switch_buffer : config.host_buffer_bytes);
    net.nodes_[from].ports.push_back(p.id);
    net.ports_.push_back(std::move(p));
  };
  for (const auto& l : config.links) {
    const NodeId a = *net.find(l.a);
    const NodeId b = *net.find(l.b);
    add_port(a, b, l);
    add_port(b, a, l);
    ++net.link_count_;
  }

  // Shortest-path next hops, computed by BFS outward from each destination.
  const auto n = net.nodes_.size();
  constexpr auto kInf = std::numeric_limits<std::uint32_t>::max();
  for (auto& node : net.nodes_) node.next_port.assign(n, kNoPort);
  for (NodeId dst = 0; dst < n; ++dst) {
    std::vector<std::uint32_t> dist(n, kInf);
    std::deque<NodeId> frontier{dst};
    dist[dst] = 0;
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop_front();
      for (PortId pid : net.nodes_[u].ports) {
        const NodeId v = net.ports_[pid].peer;
        if (dist[v] == kInf) {
          dist[v] = dist[u] + 1;
          frontier.push_back(v);
        }
      }
    }
    for (NodeId u = 0; u < n; ++u) {
      if (u == dst || dist[u] == kInf) continue;
      PortId best = kNoPort;
      for (PortId pid : net.nodes_[u].ports) {
        const NodeId v = net.ports_[pid].peer;
        if (dist[v] + 1 != dist[u]) continue;
        if (best == kNoPort || v < net.ports_[best].peer) best = pid;
      }
      net.nodes_[u].next_port[dst] = best;
    }
  }
  for (const auto& r : config.routes) {
    const NodeId at = *net.find(r.node);
    const NodeId dst = *net.find(r.dst);
    const NodeId via = *net.find(r.via);
    for (PortId pid : net.nodes_[at].ports) {
      if (net.ports_[pid].peer == via) {
        net.nodes_[at].next_port[dst] = pid;
        break;
      }
    }
  }

  if (config.aqm.mode != AqmMode::None) {
    const NodeId aqm = *net.find(config.aqm.node);
    net.aqm_node_ = aqm;
    for (PortId pid : net.nodes_[aqm].ports) {
      auto& port = net.ports_[pid];
      if (config.aqm.port && net.nodes_[port.peer].name != *config.aqm.port) continue;
      port.codel = aqm::make_codel(config.aqm.target, config.aqm.interval);
    }
  }
  return net;
}

bool check_path_symmetry(const Network& net, const FlowKey& key, NodeId aqm_node) {
  const auto fwd = net.path(key.src_ip, key.dst_ip);
  const auto rev = net.path(key.dst_ip, key.src_ip);
  auto contains = [aqm_node](const std::vector<NodeId>& p) {
    return std::find(p.begin(), p.end(), aqm_node) != p.end();
  };
  return contains(fwd) && contains(rev);
}

}  // namespace rpm::sim
