#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rtsched/dynamics.hpp"
#include "rtsched/graph.hpp"
#include "rtsched/rng.hpp"

namespace rtsched {

enum class PolicyKind { amnd, amms, ldf_rd, ldf_ed, edf };

std::optional<PolicyKind> policy_from_name(std::string_view name);
std::string_view policy_name(PolicyKind kind);
// AMND mixes over single links and is defined for collocated networks only.
bool policy_supports(PolicyKind kind, const InterferenceGraph& graph);

// One entry of the non-dominated staircase: deficits strictly decrease and
// earliest deadlines strictly decrease along the returned list.
struct NonDominatedLink {
  int link;
  double deficit;
  int deadline;  // earliest remaining deadline on the link
};

// Iteratively selects the largest-deficit non-dominated link and discards
// every link whose earliest deadline is not strictly earlier. Deficit ties
// are broken by earliest deadline, then lowest link index.
std::vector<NonDominatedLink> find_nondominated(const BufferState& buffers,
                                                const DeficitVector& deficits);

// A discrete mixing over alternatives (links or maximal-set indices);
// probabilities are nonnegative and sum to one.
struct MixingDistribution {
  std::vector<int> support;
  std::vector<double> prob;
};

// Link mixing over the non-dominated set: p_i = min(1 - w_{i+1}/w_i, r) with
// r the remaining mass, the last link taking the residual.
MixingDistribution amnd_mixing(std::span<const NonDominatedLink> nd);

// Randomized single-link policy for collocated networks: samples from
// amnd_mixing over the non-dominated set and sends that link's
// earliest-deadline packet.
ScheduleDecision amnd_decide(const BufferState& buffers, const DeficitVector& deficits,
                             RandomStream& rng);

// Maximal-set weights ordered for mixing. Only sets with positive weight
// (deficit mass over nonempty member links) participate; weight ties keep
// canonical family order.
struct OrderedWeights {
  std::vector<int> mis_index;   // into the MaximalScheduleFamily, weight-descending
  std::vector<double> weight;   // matching weights, all positive
  int n_star = 0;               // mixing prefix length
  double c_star = 0.0;          // subharmonic average over that prefix
};

struct NStarResult {
  int n_star;
  double c_star;
};

// Largest prefix n for which p_n = 1 - C_n / W_n stays nonnegative, where
// C_n = (n-1) / sum_{i<=n} 1/W_i. Found by binary search; input must be
// positive and nonincreasing.
NStarResult compute_nstar(std::span<const double> descending_weights);

OrderedWeights amms_order(const MaximalScheduleFamily& family, const BufferState& buffers,
                          const DeficitVector& deficits);

// Prefix mixing p_i = 1 - C_{n*}/W_i for i <= n*, zero beyond.
MixingDistribution amms_mixing(const OrderedWeights& ordered);

// Randomized maximal-schedule policy: samples a maximal set from
// amms_mixing, transmits the earliest-deadline packet of each nonempty
// member, then pads the schedule to maximality over the remaining nonempty
// links (largest deficit first). Falls back to the deadline-greedy schedule
// when every set has zero weight but packets are pending.
ScheduleDecision amms_decide(const MaximalScheduleFamily& family, const BufferState& buffers,
                             const DeficitVector& deficits, RandomStream& rng);

enum class LdfTie { random, earliest_deadline };

// Greedy maximal schedule over nonempty links in decreasing deficit order.
// Exact deficit ties are broken uniformly at random (RD) or by earliest
// deadline then lowest index (ED). Scheduled links send their
// earliest-deadline packet.
ScheduleDecision ldf_decide(const BufferState& buffers, const DeficitVector& deficits,
                            const InterferenceGraph& graph, LdfTie tie, RandomStream& rng);

// Greedy maximal schedule over nonempty links in increasing earliest-deadline
// order, ties by index.
ScheduleDecision edf_maximal_decide(const BufferState& buffers, const InterferenceGraph& graph,
                                    RandomStream& rng);

// Dispatch by policy kind.
ScheduleDecision decide(PolicyKind kind, const InterferenceGraph& graph,
                        const MaximalScheduleFamily& family, const BufferState& buffers,
                        const DeficitVector& deficits, RandomStream& rng);

}  // namespace rtsched
