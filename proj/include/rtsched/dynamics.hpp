#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rtsched/graph.hpp"
#include "rtsched/traffic.hpp"

namespace rtsched {

// Per-link deficit queue values; always nonnegative (the update clamps at
// zero). Real-valued so that deterministic admission credits fractions.
using DeficitVector = std::vector<double>;

// Per-link counts of pending packets indexed by remaining deadline.
// count(l, d) packets on link l must be transmitted within d more slots.
class BufferState {
 public:
  BufferState() : num_links_(0), max_deadline_(0) {}
  BufferState(int num_links, int max_deadline);

  int num_links() const { return num_links_; }
  int max_deadline() const { return max_deadline_; }
  int count(int link, int deadline) const { return psi_[index(link, deadline)]; }
  void set_count(int link, int deadline, int n);
  int link_total(int link) const;
  int total() const;
  bool link_empty(int link) const { return link_total(link) == 0; }
  void merge_arrivals(const ArrivalBatch& batch);

  bool operator==(const BufferState&) const = default;

 private:
  std::size_t index(int link, int deadline) const {
    return static_cast<std::size_t>(link) * static_cast<std::size_t>(max_deadline_) +
           static_cast<std::size_t>(deadline - 1);
  }
  int num_links_;
  int max_deadline_;
  std::vector<int> psi_;
};

// One slot's transmissions: per link either idle (0) or the remaining
// deadline of the packet class it sends. At most one packet per link,
// transmitting links must form a feasible schedule, and a link may only
// send from a nonempty deadline class.
struct ScheduleDecision {
  std::vector<int> deadline_class;  // 0 = idle

  static ScheduleDecision idle(int num_links) {
    return ScheduleDecision{std::vector<int>(static_cast<std::size_t>(num_links), 0)};
  }
  int num_links() const { return static_cast<int>(deadline_class.size()); }
  bool transmits(int link) const { return deadline_class[static_cast<std::size_t>(link)] > 0; }
  LinkMask transmit_mask() const;
};

// Throws std::invalid_argument when the decision violates its invariants
// against the given graph and buffers.
void validate_decision(const InterferenceGraph& graph, const BufferState& buffers,
                       const ScheduleDecision& decision);

// Remaining deadline of the earliest-deadline packet on the link, or nullopt
// when the link buffer is empty.
std::optional<int> earliest_deadline(const BufferState& buffers, int link);

// Links holding at least one packet.
LinkMask nonempty_mask(const BufferState& buffers);
std::vector<int> nonempty_links(const BufferState& buffers);

struct AdvanceResult {
  BufferState next;
  std::vector<int> expired;  // deadline-1 packets that were not transmitted
};

// One-slot buffer evolution: remaining deadlines shift down by one, the
// transmitted class loses one packet, untransmitted deadline-1 packets
// expire, and the next slot's arrivals are merged in.
AdvanceResult advance_buffers(const BufferState& buffers, const ScheduleDecision& decision,
                              const ArrivalBatch& next_arrivals);

// Deficit update, componentwise [w + admitted - transmitted]^+.
DeficitVector update_deficits(const DeficitVector& deficits, std::span<const double> admitted,
                              const ScheduleDecision& decision);

// Sum of the transmitting links' deficits, taken before this slot's deficit
// update.
double slot_gain(const DeficitVector& deficits, const ScheduleDecision& decision);

}  // namespace rtsched
