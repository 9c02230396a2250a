#include "rtsched/dynamics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rtsched {

BufferState::BufferState(int num_links, int max_deadline)
    : num_links_(num_links), max_deadline_(max_deadline) {
  if (num_links < 1) throw std::invalid_argument("buffer: need at least one link");
  if (max_deadline < 1) throw std::invalid_argument("buffer: max deadline must be >= 1");
  psi_.assign(static_cast<std::size_t>(num_links) * static_cast<std::size_t>(max_deadline), 0);
}

void BufferState::set_count(int link, int deadline, int n) {
  if (link < 0 || link >= num_links_) throw std::invalid_argument("buffer: link out of range");
  if (deadline < 1 || deadline > max_deadline_)
    throw std::invalid_argument("buffer: deadline out of range");
  if (n < 0) throw std::invalid_argument("buffer: negative count");
  psi_[index(link, deadline)] = n;
}

int BufferState::link_total(int link) const {
  int total = 0;
  for (int d = 1; d <= max_deadline_; ++d) total += psi_[index(link, d)];
  return total;
}

int BufferState::total() const { return std::accumulate(psi_.begin(), psi_.end(), 0); }

void BufferState::merge_arrivals(const ArrivalBatch& batch) {
  if (batch.num_links() != num_links_ || batch.max_deadline() > max_deadline_)
    throw std::invalid_argument("buffer: arrival batch shape mismatch");
  for (int l = 0; l < num_links_; ++l)
    for (int d = 1; d <= batch.max_deadline(); ++d) psi_[index(l, d)] += batch.count(l, d);
}

LinkMask ScheduleDecision::transmit_mask() const {
  LinkMask mask = 0;
  for (std::size_t l = 0; l < deadline_class.size(); ++l)
    if (deadline_class[l] > 0) mask |= LinkMask{1} << l;
  return mask;
}

void validate_decision(const InterferenceGraph& graph, const BufferState& buffers,
                       const ScheduleDecision& decision) {
  if (decision.num_links() != graph.num_links() || buffers.num_links() != graph.num_links())
    throw std::invalid_argument("decision: link count mismatch");
  for (int l = 0; l < decision.num_links(); ++l) {
    const int d = decision.deadline_class[static_cast<std::size_t>(l)];
    if (d < 0 || d > buffers.max_deadline())
      throw std::invalid_argument("decision: deadline class out of range");
    if (d > 0 && buffers.count(l, d) <= 0)
      throw std::invalid_argument("decision: transmit from empty deadline class");
  }
  if (!is_feasible_mask(graph, decision.transmit_mask()))
    throw std::invalid_argument("decision: transmitting links interfere");
}

std::optional<int> earliest_deadline(const BufferState& buffers, int link) {
  for (int d = 1; d <= buffers.max_deadline(); ++d)
    if (buffers.count(link, d) > 0) return d;
  return std::nullopt;
}

LinkMask nonempty_mask(const BufferState& buffers) {
  LinkMask mask = 0;
  for (int l = 0; l < buffers.num_links(); ++l)
    if (!buffers.link_empty(l)) mask |= LinkMask{1} << l;
  return mask;
}

std::vector<int> nonempty_links(const BufferState& buffers) {
  return mask_to_links(nonempty_mask(buffers));
}

AdvanceResult advance_buffers(const BufferState& buffers, const ScheduleDecision& decision,
                              const ArrivalBatch& next_arrivals) {
  if (decision.num_links() != buffers.num_links())
    throw std::invalid_argument("advance: decision size mismatch");
  const int K = buffers.num_links();
  const int D = buffers.max_deadline();
  AdvanceResult out{BufferState(K, D), std::vector<int>(static_cast<std::size_t>(K), 0)};
  for (int l = 0; l < K; ++l) {
    const int sent = decision.deadline_class[static_cast<std::size_t>(l)];
    if (sent > 0 && buffers.count(l, sent) <= 0)
      throw std::invalid_argument("advance: transmit from empty deadline class");
    // Remaining deadlines shift down by one; class D has no successor.
    for (int d = 1; d <= D; ++d) {
      int carried = d < D ? buffers.count(l, d + 1) : 0;
      if (sent == d + 1) carried -= 1;
      out.next.set_count(l, d, carried);
    }
    // Whatever sat at deadline 1 and was not the transmitted packet expires.
    out.expired[static_cast<std::size_t>(l)] = buffers.count(l, 1) - (sent == 1 ? 1 : 0);
  }
  out.next.merge_arrivals(next_arrivals);
  return out;
}

DeficitVector update_deficits(const DeficitVector& deficits, std::span<const double> admitted,
                              const ScheduleDecision& decision) {
  if (admitted.size() != deficits.size() ||
      decision.deadline_class.size() != deficits.size())
    throw std::invalid_argument("deficit update: size mismatch");
  DeficitVector next(deficits.size());
  for (std::size_t l = 0; l < deficits.size(); ++l) {
    if (admitted[l] < 0.0) throw std::invalid_argument("deficit update: negative admitted amount");
    const double service = decision.deadline_class[l] > 0 ? 1.0 : 0.0;
    next[l] = std::max(deficits[l] + admitted[l] - service, 0.0);
  }
  return next;
}

double slot_gain(const DeficitVector& deficits, const ScheduleDecision& decision) {
  double gain = 0.0;
  for (std::size_t l = 0; l < deficits.size(); ++l)
    if (decision.deadline_class[l] > 0) gain += deficits[l];
  return gain;
}

}  // namespace rtsched
