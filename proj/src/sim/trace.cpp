#include "rpm/sim/trace.hpp"

#include <algorithm>

#include "rpm/sim/scenario.hpp"

namespace rpm::sim {

std::string_view to_string(TraceEventKind k) {
  switch (k) {
    case TraceEventKind::Signal: return "signal";
    case TraceEventKind::CeMark: return "ce_mark";
    case TraceEventKind::EceMark: return "ece_mark";
    case TraceEventKind::AqmDrop: return "aqm_drop";
    case TraceEventKind::TailDrop: return "tail_drop";
    case TraceEventKind::CwrSeen: return "cwr_seen";
  }
  return "?";
}

std::uint64_t SimTrace::delivered_at(std::uint32_t flow, SimTime t) const {
  auto it = std::upper_bound(delivery.begin(), delivery.end(), t,
                             [](SimTime v, const DeliverySample& s) { return v < s.t; });
  if (it == delivery.begin()) return 0;
  return std::prev(it)->bytes.at(flow);
}

namespace {

struct Row {
  std::int64_t t;
  int order;
  std::string_view kind;
  std::int64_t flow;
  std::int64_t port;
  std::optional<std::int64_t> value;
};

}  // namespace

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
  std::vector<Row> rows;
  rows.reserve(trace.events.size() + trace.occupancy.size() + trace.delivery.size() * trace.flows.size());
  for (const auto& e : trace.events) {
    rows.push_back({e.t.ns(), 0, to_string(e.kind), e.flow, e.port,
                    e.cause ? std::optional<std::int64_t>(e.cause->ns()) : std::nullopt});
  }
  for (const auto& s : trace.delivery) {
    for (std::size_t f = 0; f < s.bytes.size(); ++f) {
      rows.push_back({s.t.ns(), 1, "delivered", static_cast<std::int64_t>(f), -1, static_cast<std::int64_t>(s.bytes[f])});
    }
  }
  for (const auto& o : trace.occupancy) rows.push_back({o.t.ns(), 2, "occupancy", -1, o.port, static_cast<std::int64_t>(o.bytes)});
  for (const auto& f : trace.flows) {
    if (f.completed_at) {
      rows.push_back({f.completed_at->ns(), 3, "complete", f.id, -1, f.fct()->ns()});
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return std::tie(a.t, a.order) < std::tie(b.t, b.order); });
  os << "time_ns,kind,flow,port,value\n";
  for (const auto& r : rows) {
    os << r.t << ',' << r.kind << ',';
    if (r.flow >= 0) os << r.flow;
    os << ',';
    if (r.port >= 0) os << r.port;
    os << ',';
    if (r.value) os << *r.value;
    os << '\n';
  }
}

void write_flow_summary_csv(std::ostream& os, const SimTrace& trace) {
  os << "flow,src,dst,transport,size_mss,start_ns,fct_ns,bytes_delivered,packets_sent,packets_delivered,"
        "packets_dropped,packets_in_flight,signals,ce_marks,ece_marks,retransmissions,timeouts,"
        "window_reductions,rpm_enabled\n";
  for (const auto& f : trace.flows) {
    os << f.id << ',' << f.src << ',' << f.dst << ',' << to_string(f.transport) << ',';
    if (f.size_mss) os << *f.size_mss;
    os << ',' << f.start.ns() << ',';
    if (f.fct()) os << f.fct()->ns();
    os << ',' << f.bytes_delivered << ',' << f.packets_sent << ',' << f.packets_delivered << ','
       << f.packets_dropped << ',' << f.packets_in_flight << ',' << f.signals << ',' << f.ce_marks << ','
       << f.ece_marks << ',' << f.retransmissions << ',' << f.timeouts << ',' << f.window_reductions << ','
       << (f.rpm_enabled ? 1 : 0) << '\n';
  }
}

}  // namespace rpm::sim
