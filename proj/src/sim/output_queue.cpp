#include "rpm/sim/output_queue.hpp"

#include "rpm/core/errors.hpp"
#include "rpm/sim/link.hpp"

namespace rpm::sim {

__extension__ using Wide = unsigned __int128;

SimTime Link::serialization_time(std::uint32_t size_bytes) const {
  if (capacity_bps == 0) throw ContractViolation("serialization on zero-capacity link");
  const auto bits = static_cast<Wide>(size_bytes) * 8U * 1'000'000'000U;
  const auto ns = (bits + capacity_bps - 1) / capacity_bps;
  return SimTime::from_ns(static_cast<std::int64_t>(ns));
}

EnqueueResult OutputQueue::enqueue(Packet pkt, SimTime now) {
  if (pkt.size == 0) throw ContractViolation("enqueue of zero-size packet");
  if (occupancy_ + pkt.size > limit_) {
    ++drops_;
    return EnqueueResult::TailDropped;
  }
  pkt.enqueue_time = now;
  occupancy_ += pkt.size;
  fifo_.push_back(pkt);
  return EnqueueResult::Accepted;
}

Dequeued OutputQueue::dequeue(SimTime now) {
  if (fifo_.empty()) throw ContractViolation("dequeue on empty output queue");
  Packet pkt = fifo_.front();
  fifo_.pop_front();
  occupancy_ -= pkt.size;
  return Dequeued{pkt, now - pkt.enqueue_time};
}

}  // namespace rpm::sim
