#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rtsched/dynamics.hpp"
#include "rtsched/graph.hpp"
#include "rtsched/sched.hpp"
#include "rtsched/traffic.hpp"

namespace rtsched {

// Everything one seeded run needs. Runs are deterministic functions of this
// struct: traffic, admission and policy randomness come from streams derived
// from (seed, purpose label), so swapping the scheduler never perturbs the
// arrival sample path.
struct RunConfig {
  std::string scenario_id;
  MaximalScheduleFamily family;  // carries the interference graph
  TrafficProcess traffic;
  AdmissionScheme admission;
  PolicyKind scheduler = PolicyKind::edf;
  std::int64_t horizon = 1;
  std::uint64_t seed = 0;
  int sample_every = 100;
};

void validate_config(const RunConfig& config);

struct StabilityVerdict {
  bool unstable = false;
  double slope = 0.0;       // deficit units per slot over the last half
  double mean_q2 = 0.0;     // mean total deficit over the second quarter
  double mean_q4 = 0.0;     // mean total deficit over the last quarter
};

// Deficit queues are declared unstable when the total deficit both trends up
// (least-squares slope over the last half of the sampled series above
// kSlopeThreshold per slot) and has actually drifted by more than the noise
// allowance between the second and last quarter of the run.
inline constexpr double kSlopeThreshold = 1e-3;
inline double drift_margin(std::int64_t horizon, int a_max) {
  return 2.0 * std::sqrt(static_cast<double>(horizon)) * a_max;
}

StabilityVerdict classify_stability(std::span<const double> sampled_totals, int sample_every,
                                    std::int64_t horizon, int a_max);

struct RunMetrics {
  std::vector<std::int64_t> arrivals;
  std::vector<std::int64_t> delivered;
  std::vector<std::int64_t> expired;
  std::vector<double> delivery_ratio;      // delivered / arrivals, 0 when no arrivals
  std::vector<double> final_deficits;
  std::vector<double> deficit_series;      // total deficit sampled every sample_every slots
  double mean_deficit = 0.0;               // average of w over all links and slots
  double final_total_deficit = 0.0;
  double slope = 0.0;
  bool stable = true;
  bool accounting_ok = true;               // conservation identity held at every slot
  double wall_time_ms = 0.0;

  bool operator==(const RunMetrics&) const;
};

// Executes horizon slots: arrivals -> admission -> decision -> gain/metrics
// -> buffer and deficit update. Per-slot invariants (decision feasibility,
// packet conservation, nonnegative deficits) are enforced and throw on
// violation.
RunMetrics run(const RunConfig& config);

// Runs every config, optionally on a thread pool. Results keep input order
// and are bit-identical regardless of thread count.
std::vector<RunMetrics> run_many(std::span<const RunConfig> configs, int threads = 1);

}  // namespace rtsched
