#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rpm/core/flow_key.hpp"
#include "rpm/core/sim_time.hpp"
#include "rpm/transport/congestion.hpp"

namespace rpm::sim {

enum class TraceEventKind : std::uint8_t {
  Signal,    // CoDel signal at an AQM port
  CeMark,    // forward CE mark (FWD)
  EceMark,   // reverse ECE mark by the switch (RPM)
  AqmDrop,   // CoDel signal on a NotECT packet in FWD mode
  TailDrop,  // buffer overflow
  CwrSeen,   // CWR-flagged data packet arriving at the AQM switch
};

std::string_view to_string(TraceEventKind k);

struct TraceEvent {
  SimTime t;
  TraceEventKind kind;
  std::uint32_t flow;
  std::uint32_t port;
  /// CwrSeen, EceMark, CeMark: time of the Signal the packet answers, if known.
  std::optional<SimTime> cause;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct FlowSummary {
  std::uint32_t id = 0;
  FlowKey key;
  std::string src;
  std::string dst;
  transport::Transport transport = transport::Transport::TcpAimd;
  std::optional<std::uint64_t> size_mss;
  SimTime start;
  std::optional<SimTime> completed_at;
  std::uint64_t bytes_delivered = 0;

  // Packet accounting over both directions of the flow.
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_dropped = 0;
  std::uint64_t packets_in_flight = 0;  // at the horizon

  std::uint64_t signals = 0;
  std::uint64_t ce_marks = 0;
  std::uint64_t ece_marks = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t window_reductions = 0;
  bool rpm_enabled = false;  // false when the path-symmetry check forced FWD

  std::optional<SimTime> fct() const {
    if (!completed_at) return std::nullopt;
    return *completed_at - start;
  }
};

/// Cumulative in-order bytes delivered per flow at one sampling instant.
struct DeliverySample {
  SimTime t;
  std::vector<std::uint64_t> bytes;
};

struct OccupancySample {
  SimTime t;
  std::uint32_t port;
  std::uint64_t bytes;
};

struct PortLabel {
  std::uint32_t id;
  std::string from;
  std::string to;
  bool aqm;
};

/// Result of one run. Immutable once returned.
struct SimTrace {
  SimTime horizon;
  std::uint64_t events_dispatched = 0;
  std::vector<FlowSummary> flows;
  std::vector<PortLabel> ports;
  std::vector<DeliverySample> delivery;
  std::vector<OccupancySample> occupancy;
  std::vector<TraceEvent> events;

  /// Cumulative delivered bytes of `flow` at the last sample at or before t.
  std::uint64_t delivered_at(std::uint32_t flow, SimTime t) const;
};

/// Event log CSV: time_ns,kind,flow,port,value. Kinds: the TraceEventKind
/// names (value = time_ns of the causing signal, where known), plus "delivered" (value = cumulative bytes), "occupancy" (value =
/// queue bytes) and "complete" (value = fct in ns).
void write_trace_csv(std::ostream& os, const SimTrace& trace);

/// Per-flow summary CSV.
void write_flow_summary_csv(std::ostream& os, const SimTrace& trace);

}  // namespace rpm::sim
