#include <doctest.h>

#include <numeric>
#include <vector>

#include "rtsched/dynamics.hpp"
#include "rtsched/rng.hpp"

using namespace rtsched;

namespace {

BufferState single_link_buffer(std::vector<int> counts) {
  BufferState b(1, static_cast<int>(counts.size()));
  for (std::size_t d = 0; d < counts.size(); ++d)
    b.set_count(0, static_cast<int>(d) + 1, counts[d]);
  return b;
}

ScheduleDecision transmit(int num_links, int link, int deadline) {
  auto d = ScheduleDecision::idle(num_links);
  d.deadline_class[static_cast<std::size_t>(link)] = deadline;
  return d;
}

}  // namespace

TEST_CASE("earliest deadline per link") {
  CHECK(earliest_deadline(single_link_buffer({0, 2, 1}), 0) == 2);
  CHECK_FALSE(earliest_deadline(single_link_buffer({0, 0, 0}), 0).has_value());
  CHECK(earliest_deadline(single_link_buffer({1, 0, 3}), 0) == 1);
}

TEST_CASE("buffer advance follows the shift dynamics") {
  // psi = [1,2,0], transmit the deadline-1 packet, next arrivals add one
  // deadline-3 packet: the deadline-2 pair shifts down, nothing expires.
  ArrivalBatch next(1, 3);
  next.add(0, 3, 1);
  const auto r = advance_buffers(single_link_buffer({1, 2, 0}), transmit(1, 0, 1), next);
  CHECK(r.next.count(0, 1) == 2);
  CHECK(r.next.count(0, 2) == 0);
  CHECK(r.next.count(0, 3) == 1);
  CHECK(r.expired[0] == 0);

  // Idle on empty stays empty.
  const auto idle = advance_buffers(single_link_buffer({0, 0, 0}),
                                    ScheduleDecision::idle(1), ArrivalBatch(1, 3));
  CHECK(idle.next.total() == 0);
  CHECK(idle.expired[0] == 0);

  // Two deadline-1 packets left unserved both expire.
  const auto dropped = advance_buffers(single_link_buffer({2, 0, 0}),
                                       ScheduleDecision::idle(1), ArrivalBatch(1, 3));
  CHECK(dropped.next.total() == 0);
  CHECK(dropped.expired[0] == 2);

  // Transmitting from an empty class is rejected.
  CHECK_THROWS_AS(advance_buffers(single_link_buffer({0, 1, 0}), transmit(1, 0, 1),
                                  ArrivalBatch(1, 3)),
                  std::invalid_argument);
}

TEST_CASE("deficit update clamps at zero") {
  const ScheduleDecision send = transmit(1, 0, 1);
  const ScheduleDecision hold = ScheduleDecision::idle(1);
  const std::vector<double> a07{0.7};
  const std::vector<double> a0{0.0};
  CHECK(update_deficits({3.5}, a07, send)[0] == doctest::Approx(3.2));
  CHECK(update_deficits({0.3}, a0, send)[0] == 0.0);
  CHECK(update_deficits({0.0}, a0, hold)[0] == 0.0);
  const std::vector<double> neg{-0.1};
  CHECK_THROWS_AS(update_deficits({1.0}, neg, hold), std::invalid_argument);
}

TEST_CASE("slot gain sums transmitting deficits") {
  ScheduleDecision both = ScheduleDecision::idle(2);
  both.deadline_class = {1, 1};
  CHECK(slot_gain({10.0, 5.0}, both) == doctest::Approx(15.0));
  CHECK(slot_gain({10.0, 5.0}, ScheduleDecision::idle(2)) == 0.0);
  ScheduleDecision ends = ScheduleDecision::idle(3);
  ends.deadline_class = {1, 0, 2};
  CHECK(slot_gain({2.5, 0.0, 4.0}, ends) == doctest::Approx(6.5));
}

TEST_CASE("nonempty link set") {
  BufferState b(3, 3);
  CHECK(nonempty_links(b).empty());
  b.set_count(2, 3, 1);
  CHECK(nonempty_links(b) == std::vector<int>{2});
  b.set_count(0, 1, 1);
  b.set_count(0, 2, 2);
  CHECK(nonempty_links(b) == std::vector<int>{0, 2});
  CHECK(nonempty_mask(b) == 0b101u);
}

TEST_CASE("decision validation") {
  const auto graph = make_collocated(2);
  BufferState b(2, 2);
  b.set_count(0, 1, 1);
  b.set_count(1, 2, 1);
  ScheduleDecision clash = ScheduleDecision::idle(2);
  clash.deadline_class = {1, 2};
  CHECK_THROWS_AS(validate_decision(graph, b, clash), std::invalid_argument);
  ScheduleDecision fine = transmit(2, 1, 2);
  CHECK_NOTHROW(validate_decision(graph, b, fine));
  ScheduleDecision empty_class = transmit(2, 1, 1);
  CHECK_THROWS_AS(validate_decision(graph, b, empty_class), std::invalid_argument);
}

TEST_CASE("conservation across random trajectories") {
  // Random arrivals, random feasible single-link service; packets in, packets
  // out: arrivals == delivered + expired + residual at every step.
  RandomStream rng(404, "dynamics");
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 1 + static_cast<int>(rng.next_below(4));
    const int D = 1 + static_cast<int>(rng.next_below(4));
    BufferState buffers(K, D);
    std::int64_t arrivals = 0, delivered = 0, expired = 0;
    for (int slot = 0; slot < 40; ++slot) {
      ArrivalBatch batch(K, D);
      for (int l = 0; l < K; ++l)
        if (rng.bernoulli(0.6))
          batch.add(l, 1 + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(D))), 1);
      buffers.merge_arrivals(batch);
      arrivals += batch.total();

      ScheduleDecision decision = ScheduleDecision::idle(K);
      const auto busy = nonempty_links(buffers);
      if (!busy.empty() && rng.bernoulli(0.8)) {
        const int link = busy[rng.next_below(static_cast<std::uint32_t>(busy.size()))];
        decision.deadline_class[static_cast<std::size_t>(link)] =
            *earliest_deadline(buffers, link);
        delivered += 1;
      }
      const auto r = advance_buffers(buffers, decision, ArrivalBatch(K, D));
      buffers = r.next;
      expired += std::accumulate(r.expired.begin(), r.expired.end(), 0);
      CHECK(arrivals == delivered + expired + buffers.total());
    }
  }
}
