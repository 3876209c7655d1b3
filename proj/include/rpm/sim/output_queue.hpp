#pragma once

#include <cstdint>
#include <deque>

#include "rpm/core/packet.hpp"

namespace rpm::sim {

enum class EnqueueResult { Accepted, TailDropped };

struct Dequeued {
  Packet packet;
  SimTime sojourn;
};

/// Byte-limited FIFO. occupancy() is the sum of queued packet sizes and never
/// exceeds buffer_limit().
class OutputQueue {
 public:
  explicit OutputQueue(std::uint64_t buffer_limit_bytes) : limit_(buffer_limit_bytes) {}

  EnqueueResult enqueue(Packet pkt, SimTime now);
  /// Contract: queue must be non-empty.
  Dequeued dequeue(SimTime now);

  bool empty() const { return fifo_.empty(); }
  std::size_t packets() const { return fifo_.size(); }
  std::uint64_t occupancy() const { return occupancy_; }
  std::uint64_t buffer_limit() const { return limit_; }
  std::uint64_t drops() const { return drops_; }
  const std::deque<Packet>& contents() const { return fifo_; }

 private:
  std::uint64_t limit_;
  std::uint64_t occupancy_ = 0;
  std::uint64_t drops_ = 0;
  std::deque<Packet> fifo_;
};

}  // namespace rpm::sim
