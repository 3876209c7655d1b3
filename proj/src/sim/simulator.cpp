#include "rpm/sim/simulator.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <memory>
#include <queue>
#include <random>
#include <unordered_map>

#include "rpm/core/errors.hpp"
#include "rpm/dataplane/rpm.hpp"
#include "rpm/transport/endpoint.hpp"

namespace rpm::sim {
namespace {

enum class EventKind : std::uint8_t { FlowStart, TxDone, Arrive, Timer, Sample };

struct Event {
  SimTime t;
  std::uint64_t seq;
  EventKind kind;
  std::uint32_t a;  // flow, port or packet slot
  std::uint32_t b;  // ingress port for Arrive
  std::uint32_t c;  // destination node for Arrive

  bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

struct FlowRuntime {
  std::unique_ptr<transport::Sender> sender;
  std::unique_ptr<transport::Receiver> receiver;
  NodeId src = 0;
  NodeId dst = 0;
  bool rpm = false;
  std::optional<SimTime> timer_event_at;
};

class Engine {
 public:
  Engine(Network net, SimTime until) : net_(std::move(net)), until_(until) {}

  SimTrace run();

 private:
  void schedule(SimTime t, EventKind kind, std::uint32_t a = 0, std::uint32_t b = 0, std::uint32_t c = 0);
  void dispatch(const Event& e);

  void start_flow(std::uint32_t f);
  void flush(std::uint32_t f, NodeId at, transport::Outbox& out);
  void sync_timer(std::uint32_t f);
  void on_timer(std::uint32_t f);

  void forward(NodeId at, Packet pkt);
  void try_transmit(PortId pid);
  void on_arrive(std::uint32_t slot, PortId ingress, NodeId at);
  void aqm_ingress(PortId ingress, Packet& pkt);
  bool aqm_signal(Port& port, Packet& pkt);  // false when the packet is dropped
  void sample();

  void log(TraceEventKind kind, std::uint32_t flow, std::uint32_t port, std::optional<SimTime> cause = {}) {
    trace_.events.push_back({now_, kind, flow, port, cause});
  }
  FlowSummary& summary(std::uint32_t flow) { return trace_.flows.at(flow); }

  std::uint32_t store(Packet p);
  Packet take(std::uint32_t slot);

  Network net_;
  SimTime until_;
  SimTime now_;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<bool> busy_;
  std::vector<Packet> pool_;
  std::vector<std::uint32_t> free_slots_;
  std::uint64_t live_slots_ = 0;
  std::vector<FlowRuntime> flows_;
  std::optional<dataplane::CongestionStateRegister> reg_;
  // Signal times behind each register cell, oldest first. Bookkeeping only:
  // lets a reverse mark be attributed to the signal it delivers.
  std::unordered_map<std::uint32_t, std::deque<SimTime>> pending_;
  SimTrace trace_;
};

void Engine::schedule(SimTime t, EventKind kind, std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  if (t < now_) throw ContractViolation("event scheduled in the past");
  events_.push(Event{t, seq_++, kind, a, b, c});
}

std::uint32_t Engine::store(Packet p) {
  ++live_slots_;
  if (!free_slots_.empty()) {
    const auto slot = free_slots_.back();
    free_slots_.pop_back();
    pool_[slot] = p;
    return slot;
  }
  pool_.push_back(p);
  return static_cast<std::uint32_t>(pool_.size() - 1);
}

Packet Engine::take(std::uint32_t slot) {
  --live_slots_;
  free_slots_.push_back(slot);
  return pool_[slot];
}

SimTrace Engine::run() {
  const auto& cfg = net_.config();
  busy_.assign(net_.ports().size(), false);
  trace_.horizon = until_;

  for (const auto& p : net_.ports()) {
    trace_.ports.push_back({p.id, net_.node(p.node).name, net_.node(p.peer).name, p.codel.has_value()});
  }

  if (cfg.aqm.mode == AqmMode::RpmPerFlow) {
    reg_.emplace(cfg.aqm.register_size, cfg.aqm.counter_max);
  } else if (cfg.aqm.mode == AqmMode::RpmPerPort) {
    const auto n = std::bit_ceil(std::max<std::uint32_t>(1, static_cast<std::uint32_t>(net_.ports().size())));
    reg_.emplace(n, cfg.aqm.counter_max);
  }

  std::mt19937_64 rng(cfg.seed);
  for (std::uint32_t i = 0; i < cfg.flows.size(); ++i) {
    const auto& spec = cfg.flows[i];
    FlowRuntime rt;
    rt.src = *net_.find(spec.src);
    rt.dst = *net_.find(spec.dst);

    transport::EndpointConfig ec;
    ec.key = FlowKey{net_.node(rt.src).ip, net_.node(rt.dst).ip, kProtoTcp,
                     spec.src_port.value_or(static_cast<PortNumber>(10000 + i % 50000)),
                     spec.dst_port.value_or(PortNumber{5001})};
    ec.flow_id = i;
    ec.mss = cfg.mss;
    ec.size_segments = spec.size_mss;
    ec.transport = spec.transport;
    rt.sender = std::make_unique<transport::Sender>(ec);
    rt.receiver = std::make_unique<transport::Receiver>(ec);

    if (reg_ && net_.aqm_node()) rt.rpm = check_path_symmetry(net_, ec.key, *net_.aqm_node());

    SimTime start = spec.start;
    if (cfg.start_jitter > SimTime{}) {
      std::uniform_int_distribution<std::int64_t> jitter(0, cfg.start_jitter.ns() - 1);
      start += SimTime::from_ns(jitter(rng));
    }

    FlowSummary s;
    s.id = i;
    s.key = ec.key;
    s.src = spec.src;
    s.dst = spec.dst;
    s.transport = spec.transport;
    s.size_mss = spec.size_mss;
    s.start = start;
    s.rpm_enabled = rt.rpm;
    trace_.flows.push_back(std::move(s));
    flows_.push_back(std::move(rt));
    if (start <= until_) schedule(start, EventKind::FlowStart, i);
  }
  if (!cfg.flows.empty()) schedule(SimTime{}, EventKind::Sample);

  while (!events_.empty() && events_.top().t <= until_) {
    const Event e = events_.top();
    events_.pop();
    if (e.t < now_) throw ContractViolation("event dispatched out of order");
    now_ = e.t;
    ++trace_.events_dispatched;
    dispatch(e);
  }

  // Whatever is still queued or on the wire is in flight at the horizon.
  for (const auto& p : net_.ports()) {
    for (const auto& pkt : p.queue.contents()) ++summary(pkt.flow_id).packets_in_flight;
  }
  while (!events_.empty()) {
    const Event e = events_.top();
    events_.pop();
    if (e.kind == EventKind::Arrive) ++summary(pool_[e.a].flow_id).packets_in_flight;
  }
  for (std::uint32_t i = 0; i < flows_.size(); ++i) {
    auto& s = summary(i);
    const auto& snd = *flows_[i].sender;
    s.completed_at = snd.completed_at();
    s.bytes_delivered = flows_[i].receiver->bytes_delivered();
    s.retransmissions = snd.retransmissions();
    s.timeouts = snd.timeouts();
    s.window_reductions = snd.window().reductions;
  }
  return std::move(trace_);
}

void Engine::dispatch(const Event& e) {
  switch (e.kind) {
    case EventKind::FlowStart: start_flow(e.a); break;
    case EventKind::TxDone:
      busy_[e.a] = false;
      try_transmit(e.a);
      break;
    case EventKind::Arrive: on_arrive(e.a, e.b, e.c); break;
    case EventKind::Timer:
      if (flows_[e.a].timer_event_at == e.t) {
        flows_[e.a].timer_event_at.reset();
        on_timer(e.a);
      }
      break;
    case EventKind::Sample:
      sample();
      schedule(now_ + net_.config().sample_interval, EventKind::Sample);
      break;
  }
}

void Engine::start_flow(std::uint32_t f) {
  transport::Outbox out;
  flows_[f].sender->start(now_, out);
  flush(f, flows_[f].src, out);
  sync_timer(f);
}

void Engine::flush(std::uint32_t f, NodeId at, transport::Outbox& out) {
  for (auto& p : out.packets) {
    ++summary(f).packets_sent;
    forward(at, p);
  }
  out.packets.clear();
}

// One pending timer event per flow; a later deadline is picked up lazily when
// the earlier event fires.
void Engine::sync_timer(std::uint32_t f) {
  auto& rt = flows_[f];
  const auto deadline = rt.sender->timer_deadline();
  if (!deadline) return;
  if (!rt.timer_event_at || *deadline < *rt.timer_event_at) {
    rt.timer_event_at = *deadline;
    schedule(*deadline, EventKind::Timer, f);
  }
}

void Engine::on_timer(std::uint32_t f) {
  auto& rt = flows_[f];
  const auto deadline = rt.sender->timer_deadline();
  if (!deadline) return;
  if (*deadline <= now_) {
    transport::Outbox out;
    rt.sender->on_timer(now_, out);
    flush(f, rt.src, out);
  }
  sync_timer(f);
}

void Engine::forward(NodeId at, Packet pkt) {
  const PortId pid = net_.route(at, pkt.key.dst_ip);
  auto& port = net_.ports()[pid];
  if (port.queue.enqueue(pkt, now_) == EnqueueResult::TailDropped) {
    ++summary(pkt.flow_id).packets_dropped;
    log(TraceEventKind::TailDrop, pkt.flow_id, pid);
    return;
  }
  try_transmit(pid);
}

void Engine::try_transmit(PortId pid) {
  if (busy_[pid]) return;
  auto& port = net_.ports()[pid];
  while (!port.queue.empty()) {
    auto [pkt, sojourn] = port.queue.dequeue(now_);
    if (port.codel && aqm::codel_evaluate(*port.codel, sojourn, now_) == aqm::CodelDecision::Signal) {
      if (!aqm_signal(port, pkt)) continue;
    }
    const SimTime tx = port.link.serialization_time(pkt.size);
    busy_[pid] = true;
    schedule(now_ + tx, EventKind::TxDone, pid);
    schedule(now_ + tx + port.link.prop_delay, EventKind::Arrive, store(pkt), pid, port.peer);
    return;
  }
}

bool Engine::aqm_signal(Port& port, Packet& pkt) {
  const auto flow = pkt.flow_id;
  ++summary(flow).signals;
  log(TraceEventKind::Signal, flow, port.id);
  auto mode = net_.config().aqm.mode;
  if (mode != AqmMode::Fwd && !flows_[flow].rpm) mode = AqmMode::Fwd;

  if (mode == AqmMode::RpmPerFlow || mode == AqmMode::RpmPerPort) {
    const auto cell = mode == AqmMode::RpmPerFlow ? dataplane::flow_hash(pkt.key, reg_->size()) : port.id;
    // Same register update as on_congestion_signal / per_port_signal.
    if (reg_->increment(cell)) pending_[cell].push_back(now_);
    return true;
  }
  switch (dataplane::forward_mark(pkt)) {
    case dataplane::ForwardMarkResult::Marked:
      pkt.signal_at = now_;
      ++summary(flow).ce_marks;
      log(TraceEventKind::CeMark, flow, port.id, now_);
      return true;
    case dataplane::ForwardMarkResult::AlreadyCe: return true;
    case dataplane::ForwardMarkResult::Dropped:
      ++summary(flow).packets_dropped;
      log(TraceEventKind::AqmDrop, flow, port.id);
      return false;
  }
  return true;
}

void Engine::aqm_ingress(PortId ingress, Packet& pkt) {
  if (pkt.to_receiver && pkt.flags.has(TcpFlag::Cwr)) {
    log(TraceEventKind::CwrSeen, pkt.flow_id, ingress, pkt.signal_at);
  }
  if (!reg_) return;
  std::uint32_t cell;
  bool marked;
  if (net_.config().aqm.mode == AqmMode::RpmPerFlow) {
    cell = dataplane::flow_hash(pkt.key.swapped(), reg_->size());
    marked = dataplane::mark_reverse(*reg_, pkt);
  } else {
    // The forward direction of this packet leaves the switch towards its source.
    cell = net_.route(*net_.aqm_node(), pkt.key.src_ip);
    marked = dataplane::per_port_mark(*reg_, cell, pkt);
  }
  if (!marked) return;
  auto& q = pending_[cell];
  pkt.signal_at = q.front();
  q.pop_front();
  ++summary(pkt.flow_id).ece_marks;
  log(TraceEventKind::EceMark, pkt.flow_id, ingress, pkt.signal_at);
}

void Engine::on_arrive(std::uint32_t slot, PortId ingress, NodeId at) {
  Packet pkt = take(slot);
  const auto& node = net_.node(at);
  if (node.ip == pkt.key.dst_ip) {
    ++summary(pkt.flow_id).packets_delivered;
    auto& rt = flows_.at(pkt.flow_id);
    transport::Outbox out;
    if (pkt.to_receiver) {
      rt.receiver->on_packet(pkt, now_, out);
      flush(pkt.flow_id, at, out);
    } else {
      rt.sender->on_packet(pkt, now_, out);
      flush(pkt.flow_id, at, out);
      sync_timer(pkt.flow_id);
    }
    return;
  }
  if (node.kind == NodeKind::Host) throw RuntimeError("host " + node.name + " received transit traffic");
  if (net_.aqm_node() == at) aqm_ingress(ingress, pkt);
  forward(at, pkt);
}

void Engine::sample() {
  DeliverySample d;
  d.t = now_;
  d.bytes.reserve(flows_.size());
  for (const auto& rt : flows_) d.bytes.push_back(rt.receiver->bytes_delivered());
  trace_.delivery.push_back(std::move(d));
  for (const auto& p : net_.ports()) {
    if (net_.node(p.node).kind == NodeKind::Switch) trace_.occupancy.push_back({now_, p.id, p.queue.occupancy()});
  }
}

}  // namespace

SimTrace run(Network network, SimTime until) {
  if (until <= SimTime{}) throw ConfigError("simulation horizon must be positive");
  return Engine(std::move(network), until).run();
}

SimTrace simulate(const ScenarioConfig& config) { return run(build_topology(config), config.duration); }

}  // namespace rpm::sim
