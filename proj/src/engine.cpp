#include "rtsched/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace rtsched {

bool RunMetrics::operator==(const RunMetrics& o) const {
  // Everything except wall time, which is not part of the result proper.
  return arrivals == o.arrivals && delivered == o.delivered && expired == o.expired &&
         delivery_ratio == o.delivery_ratio && final_deficits == o.final_deficits &&
         deficit_series == o.deficit_series && mean_deficit == o.mean_deficit &&
         final_total_deficit == o.final_total_deficit && slope == o.slope &&
         stable == o.stable && accounting_ok == o.accounting_ok;
}

void validate_config(const RunConfig& config) {
  const auto& graph = config.family.graph();
  if (config.horizon < 1) throw std::invalid_argument("run: horizon must be >= 1");
  if (config.sample_every < 1) throw std::invalid_argument("run: sample_every must be >= 1");
  if (config.traffic.num_links() != graph.num_links())
    throw std::invalid_argument("run: traffic link count mismatch");
  validate_admission(config.admission, graph.num_links());
  if (!policy_supports(config.scheduler, graph))
    throw std::invalid_argument("run: scheduler requires a collocated graph");
}

StabilityVerdict classify_stability(std::span<const double> sampled_totals, int sample_every,
                                    std::int64_t horizon, int a_max) {
  const std::size_t n = sampled_totals.size();
  if (n < 8) throw std::invalid_argument("classify_stability: need at least 8 samples");
  // Least-squares slope over the last half, in deficit units per slot.
  const std::size_t start = n / 2;
  const std::size_t m = n - start;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    const double x = static_cast<double>(i) * sample_every;
    const double y = sampled_totals[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  const double slope = denom > 0.0 ? (m * sxy - sx * sy) / denom : 0.0;

  auto mean_range = [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += sampled_totals[i];
    return acc / static_cast<double>(hi - lo);
  };
  StabilityVerdict verdict;
  verdict.slope = slope;
  verdict.mean_q2 = mean_range(n / 4, n / 2);
  verdict.mean_q4 = mean_range(3 * n / 4, n);
  verdict.unstable = slope > kSlopeThreshold &&
                     verdict.mean_q4 > verdict.mean_q2 + drift_margin(horizon, a_max);
  return verdict;
}

RunMetrics run(const RunConfig& config) {
  validate_config(config);
  const auto t_begin = std::chrono::steady_clock::now();

  const auto& graph = config.family.graph();
  const int K = graph.num_links();
  const int D = std::max(config.traffic.max_deadline(), 1);
  const int a_max = config.traffic.max_per_link_arrivals();

  RandomStream traffic_rng(config.seed, "traffic");
  RandomStream admission_rng(config.seed, "admission");
  RandomStream policy_rng(config.seed, "policy");
  TrafficProcess traffic = config.traffic;

  RunMetrics metrics;
  metrics.arrivals.assign(static_cast<std::size_t>(K), 0);
  metrics.delivered.assign(static_cast<std::size_t>(K), 0);
  metrics.expired.assign(static_cast<std::size_t>(K), 0);

  BufferState buffers(K, D);
  DeficitVector deficits(static_cast<std::size_t>(K), 0.0);
  ArrivalBatch pending = traffic.step(traffic_rng);  // slot-0 arrivals
  double deficit_mass = 0.0;                         // sum of w over links and slots

  for (std::int64_t t = 0; t < config.horizon; ++t) {
    buffers.merge_arrivals(pending);
    for (int l = 0; l < K; ++l) {
      const int a = pending.link_total(l);
      if (a > a_max) throw std::logic_error("run: arrival bound violated");
      metrics.arrivals[static_cast<std::size_t>(l)] += a;
    }
    const std::vector<double> admitted = admit_deficit(pending, config.admission, admission_rng);

    // Admission precedes the decision in the slot pipeline: the scheduler
    // sees this slot's deficit credits. The gain below still multiplies the
    // pre-update deficits.
    DeficitVector credited(deficits);
    for (std::size_t l = 0; l < credited.size(); ++l) credited[l] += admitted[l];
    const ScheduleDecision decision =
        decide(config.scheduler, graph, config.family, buffers, credited, policy_rng);
    validate_decision(graph, buffers, decision);
    for (int l = 0; l < K; ++l)
      if (decision.transmits(l)) metrics.delivered[static_cast<std::size_t>(l)] += 1;

    pending = t + 1 < config.horizon ? traffic.step(traffic_rng) : ArrivalBatch(K, D);
    AdvanceResult adv = advance_buffers(buffers, decision, ArrivalBatch(K, D));
    buffers = std::move(adv.next);
    deficits = update_deficits(deficits, admitted, decision);

    double total_w = 0.0;
    for (int l = 0; l < K; ++l) {
      metrics.expired[static_cast<std::size_t>(l)] += adv.expired[static_cast<std::size_t>(l)];
      // Conservation: every arrival so far is delivered, expired, or pending.
      const std::int64_t residual = buffers.link_total(l);
      if (metrics.delivered[static_cast<std::size_t>(l)] +
              metrics.expired[static_cast<std::size_t>(l)] + residual !=
          metrics.arrivals[static_cast<std::size_t>(l)])
        throw std::logic_error("run: packet conservation violated");
      const double w = deficits[static_cast<std::size_t>(l)];
      if (!(w >= 0.0)) throw std::logic_error("run: negative deficit");
      total_w += w;
    }
    deficit_mass += total_w;
    if ((t + 1) % config.sample_every == 0) metrics.deficit_series.push_back(total_w);
  }

  metrics.final_deficits = deficits;
  metrics.final_total_deficit = std::accumulate(deficits.begin(), deficits.end(), 0.0);
  metrics.mean_deficit = deficit_mass / (static_cast<double>(config.horizon) * K);
  metrics.delivery_ratio.resize(static_cast<std::size_t>(K), 0.0);
  for (int l = 0; l < K; ++l) {
    const auto i = static_cast<std::size_t>(l);
    if (metrics.arrivals[i] > 0)
      metrics.delivery_ratio[i] =
          static_cast<double>(metrics.delivered[i]) / static_cast<double>(metrics.arrivals[i]);
    if (metrics.delivery_ratio[i] < 0.0 || metrics.delivery_ratio[i] > 1.0)
      throw std::logic_error("run: delivery ratio outside [0,1]");
  }
  if (metrics.deficit_series.size() >= 8) {
    const StabilityVerdict verdict =
        classify_stability(metrics.deficit_series, config.sample_every, config.horizon, a_max);
    metrics.slope = verdict.slope;
    metrics.stable = !verdict.unstable;
  }
  metrics.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_begin)
          .count();
  return metrics;
}

std::vector<RunMetrics> run_many(std::span<const RunConfig> configs, int threads) {
  std::vector<RunMetrics> results(configs.size());
  if (threads <= 1 || configs.size() <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) results[i] = run(configs[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(configs.size());
  const int n_threads = std::min<int>(threads, static_cast<int>(configs.size()));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= configs.size()) return;
        try {
          results[i] = run(configs[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace rtsched
