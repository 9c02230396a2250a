#pragma once

#include <cstdint>
#include <vector>

#include "rtsched/dynamics.hpp"
#include "rtsched/graph.hpp"
#include "rtsched/sched.hpp"
#include "rtsched/traffic.hpp"

namespace rtsched {

// A fully known short scheduling problem: fixed arrivals and deficit credits
// over a finite horizon. Ground truth for efficiency comparisons at desk
// scale; the search is exponential on purpose.
struct HorizonInstance {
  MaximalScheduleFamily family;            // carries the interference graph
  BufferState initial_buffers;             // contents before slot-0 arrivals
  DeficitVector initial_deficits;
  std::vector<ArrivalBatch> arrivals;      // arrivals[t] joins the buffer at slot t
  std::vector<std::vector<double>> admitted;  // per slot per link; empty = all zero

  int horizon() const { return static_cast<int>(arrivals.size()); }
};

// Search-space guard: (number of maximal sets)^horizon after the per-slot
// restriction to maximal, earliest-deadline schedules.
inline constexpr double kMaxGainSearchBound = 1e7;
bool within_search_bound(const HorizonInstance& instance);

struct MaxGainResult {
  double gain = 0.0;
  std::vector<ScheduleDecision> schedule;  // one argmax sequence, first in canonical order
};

// Exhaustive depth-first search over per-slot maximal schedules (earliest
// deadline per scheduled link), simulating the exact buffer and deficit
// dynamics. Throws std::domain_error when the instance exceeds the bound.
MaxGainResult max_gain(const HorizonInstance& instance);

// Cumulative gain of one causal policy replay on the instance, same dynamics
// and deficit credits as max_gain searches over.
double replay_gain(const HorizonInstance& instance, PolicyKind policy, RandomStream& rng);

// Largest uniform delivery ratio p, on a grid of step `resolution`, such that
// some periodic schedule delivers at least a p fraction of every link's
// packets per cycle in the long run. Computed exactly on the grid via a
// scaled integral max-flow over cyclic slot classes. Collocated graphs only.
double max_uniform_ratio(const InterferenceGraph& graph, const std::vector<ArrivalBatch>& cycle,
                         double resolution);

}  // namespace rtsched
