#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rtsched/rng.hpp"

namespace rtsched {

// One slot's worth of arrivals: counts indexed by (link, deadline), with
// deadlines in [1, max_deadline]. A packet arriving with deadline d must be
// transmitted within d slots of its arrival or it is dropped.
class ArrivalBatch {
 public:
  ArrivalBatch() : num_links_(0), max_deadline_(0) {}
  ArrivalBatch(int num_links, int max_deadline);

  int num_links() const { return num_links_; }
  int max_deadline() const { return max_deadline_; }
  int count(int link, int deadline) const { return counts_[index(link, deadline)]; }
  void add(int link, int deadline, int n);
  int link_total(int link) const;
  int total() const;
  bool empty() const { return total() == 0; }

  bool operator==(const ArrivalBatch&) const = default;

 private:
  std::size_t index(int link, int deadline) const {
    return static_cast<std::size_t>(link) * static_cast<std::size_t>(max_deadline_) +
           static_cast<std::size_t>(deadline - 1);
  }
  int num_links_;
  int max_deadline_;
  std::vector<int> counts_;
};

// One outcome of a per-link i.i.d. arrival distribution: with probability
// `prob`, `count` packets arrive carrying `deadline`. Outcomes of one link
// are mutually exclusive; leftover probability means no arrival.
struct IidOutcome {
  double prob;
  int count;
  int deadline;

  bool operator==(const IidOutcome&) const = default;
};

// Per-slot arrival generator. The pattern part evolves as an irreducible
// finite-state Markov chain over slot templates (a deterministic cyclic
// chain in periodic mode); i.i.d. per-link distributions can be layered on
// top, and are the whole process in iid mode. Owned by exactly one run.
class TrafficProcess {
 public:
  enum class Mode { periodic, markov, iid };

  static TrafficProcess periodic(std::vector<ArrivalBatch> patterns, int start = 0);
  static TrafficProcess markov(std::vector<ArrivalBatch> patterns,
                               std::vector<std::vector<double>> transition, int start = 0);
  static TrafficProcess iid(int num_links, int max_deadline);

  void add_iid_link(int link, std::vector<IidOutcome> outcomes);

  // Emits the current slot's batch, then advances the pattern chain. A
  // deterministic transition row consumes no randomness.
  ArrivalBatch step(RandomStream& rng);

  Mode mode() const { return mode_; }
  int num_links() const { return num_links_; }
  int max_deadline() const { return max_deadline_; }
  int current_state() const { return state_; }
  int num_states() const { return static_cast<int>(patterns_.size()); }
  const std::vector<std::vector<double>>& transition() const { return transition_; }
  const std::vector<ArrivalBatch>& patterns() const { return patterns_; }
  const std::vector<std::vector<IidOutcome>>& iid_outcomes() const { return iid_; }

  // Largest possible per-link arrival total in one slot (the traffic model's
  // a_max), implied by the declared templates and distributions.
  int max_per_link_arrivals() const;

  bool operator==(const TrafficProcess&) const = default;

 private:
  TrafficProcess() = default;
  void validate() const;

  Mode mode_ = Mode::iid;
  int num_links_ = 0;
  int max_deadline_ = 1;
  std::vector<ArrivalBatch> patterns_;
  std::vector<std::vector<double>> transition_;
  int state_ = 0;
  std::vector<std::vector<IidOutcome>> iid_;  // per link, possibly empty
};

// Rule converting packet arrivals into deficit credit: either one Bernoulli
// coin per packet (integer increments) or exactly target_ratio per packet.
struct AdmissionScheme {
  enum class Kind { coin_toss, deterministic };
  Kind kind = Kind::deterministic;
  std::vector<double> target_ratio;  // p_l in [0,1], one per link
};

void validate_admission(const AdmissionScheme& scheme, int num_links);

// Per-link deficit increments for one slot's arrivals. Expectation is
// a_l * p_l under both kinds.
std::vector<double> admit_deficit(const ArrivalBatch& batch, const AdmissionScheme& scheme,
                                  RandomStream& rng);

// Time-average arrivals per link over `horizon` slots of a copy of the process.
std::vector<double> empirical_rate(TrafficProcess process, std::int64_t horizon,
                                   RandomStream& rng);

}  // namespace rtsched
