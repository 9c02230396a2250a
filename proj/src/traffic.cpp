#include "rtsched/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rtsched {

ArrivalBatch::ArrivalBatch(int num_links, int max_deadline)
    : num_links_(num_links), max_deadline_(max_deadline) {
  if (num_links < 1) throw std::invalid_argument("batch: need at least one link");
  if (max_deadline < 1) throw std::invalid_argument("batch: max deadline must be >= 1");
  counts_.assign(static_cast<std::size_t>(num_links) * static_cast<std::size_t>(max_deadline), 0);
}

void ArrivalBatch::add(int link, int deadline, int n) {
  if (link < 0 || link >= num_links_) throw std::invalid_argument("batch: link out of range");
  if (deadline < 1 || deadline > max_deadline_)
    throw std::invalid_argument("batch: deadline out of range");
  if (n < 0) throw std::invalid_argument("batch: negative count");
  counts_[index(link, deadline)] += n;
}

int ArrivalBatch::link_total(int link) const {
  int total = 0;
  for (int d = 1; d <= max_deadline_; ++d) total += counts_[index(link, d)];
  return total;
}

int ArrivalBatch::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), 0);
}

namespace {

// Strong connectivity of the positive-probability transition digraph; with a
// finite state space this is exactly irreducibility.
bool strongly_connected(const std::vector<std::vector<double>>& t) {
  const std::size_t n = t.size();
  auto reach = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u = 0; u < n; ++u) {
        const double p = forward ? t[v][u] : t[u][v];
        if (p > 0.0 && !seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reach(true) && reach(false);
}

}  // namespace

void TrafficProcess::validate() const {
  if (num_links_ < 1) throw std::invalid_argument("traffic: need at least one link");
  if (mode_ != Mode::iid) {
    if (patterns_.empty()) throw std::invalid_argument("traffic: no patterns");
    for (const auto& b : patterns_) {
      if (b.num_links() != num_links_ || b.max_deadline() != max_deadline_)
        throw std::invalid_argument("traffic: pattern shape mismatch");
    }
    if (transition_.size() != patterns_.size())
      throw std::invalid_argument("traffic: transition size mismatch");
    for (const auto& row : transition_) {
      if (row.size() != patterns_.size())
        throw std::invalid_argument("traffic: transition row size mismatch");
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0) throw std::invalid_argument("traffic: negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("traffic: transition row does not sum to 1");
    }
    if (!strongly_connected(transition_))
      throw std::invalid_argument("traffic: pattern chain is reducible");
    if (state_ < 0 || state_ >= static_cast<int>(patterns_.size()))
      throw std::invalid_argument("traffic: start state out of range");
  }
  for (const auto& outcomes : iid_) {
    double total = 0.0;
    for (const auto& o : outcomes) {
      if (o.prob < 0.0) throw std::invalid_argument("traffic: negative outcome probability");
      if (o.count < 0) throw std::invalid_argument("traffic: negative outcome count");
      if (o.deadline < 1 || o.deadline > max_deadline_)
        throw std::invalid_argument("traffic: outcome deadline out of range");
      total += o.prob;
    }
    if (total > 1.0 + 1e-12)
      throw std::invalid_argument("traffic: outcome probabilities exceed 1");
  }
}

TrafficProcess TrafficProcess::periodic(std::vector<ArrivalBatch> patterns, int start) {
  // A cycle is the special case of a deterministic cyclic chain; one code path.
  const std::size_t n = patterns.size();
  std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) t[i][(i + 1) % n] = 1.0;
  TrafficProcess proc = markov(std::move(patterns), std::move(t), start);
  proc.mode_ = Mode::periodic;
  return proc;
}

TrafficProcess TrafficProcess::markov(std::vector<ArrivalBatch> patterns,
                                      std::vector<std::vector<double>> transition, int start) {
  TrafficProcess proc;
  proc.mode_ = Mode::markov;
  if (patterns.empty()) throw std::invalid_argument("traffic: no patterns");
  proc.num_links_ = patterns.front().num_links();
  proc.max_deadline_ = patterns.front().max_deadline();
  proc.patterns_ = std::move(patterns);
  proc.transition_ = std::move(transition);
  proc.state_ = start;
  proc.iid_.assign(static_cast<std::size_t>(proc.num_links_), {});
  proc.validate();
  return proc;
}

TrafficProcess TrafficProcess::iid(int num_links, int max_deadline) {
  TrafficProcess proc;
  proc.mode_ = Mode::iid;
  proc.num_links_ = num_links;
  proc.max_deadline_ = max_deadline;
  proc.iid_.assign(static_cast<std::size_t>(num_links), {});
  proc.validate();
  return proc;
}

void TrafficProcess::add_iid_link(int link, std::vector<IidOutcome> outcomes) {
  if (link < 0 || link >= num_links_) throw std::invalid_argument("traffic: iid link out of range");
  iid_[static_cast<std::size_t>(link)] = std::move(outcomes);
  validate();
}

ArrivalBatch TrafficProcess::step(RandomStream& rng) {
  ArrivalBatch batch(num_links_, max_deadline_);
  if (!patterns_.empty()) {
    batch = patterns_[static_cast<std::size_t>(state_)];
    const auto& row = transition_[static_cast<std::size_t>(state_)];
    // Deterministic rows advance without touching the stream.
    int target = -1;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] == 1.0) {
        target = static_cast<int>(j);
        break;
      }
    }
    state_ = target >= 0 ? target : rng.sample_discrete(row);
  }
  for (int l = 0; l < num_links_; ++l) {
    const auto& outcomes = iid_[static_cast<std::size_t>(l)];
    if (outcomes.empty()) continue;
    const double u = rng.next_double();
    double cdf = 0.0;
    for (const auto& o : outcomes) {
      cdf += o.prob;
      if (u < cdf) {
        batch.add(l, o.deadline, o.count);
        break;
      }
    }
  }
  return batch;
}

int TrafficProcess::max_per_link_arrivals() const {
  int a_max = 0;
  for (int l = 0; l < num_links_; ++l) {
    int pattern_max = 0;
    for (const auto& b : patterns_) pattern_max = std::max(pattern_max, b.link_total(l));
    int iid_max = 0;
    for (const auto& o : iid_[static_cast<std::size_t>(l)]) iid_max = std::max(iid_max, o.count);
    a_max = std::max(a_max, pattern_max + iid_max);
  }
  return a_max;
}

void validate_admission(const AdmissionScheme& scheme, int num_links) {
  if (static_cast<int>(scheme.target_ratio.size()) != num_links)
    throw std::invalid_argument("admission: ratio vector size mismatch");
  for (double p : scheme.target_ratio)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("admission: p outside [0,1]");
}

std::vector<double> admit_deficit(const ArrivalBatch& batch, const AdmissionScheme& scheme,
                                  RandomStream& rng) {
  validate_admission(scheme, batch.num_links());
  std::vector<double> admitted(static_cast<std::size_t>(batch.num_links()), 0.0);
  for (int l = 0; l < batch.num_links(); ++l) {
    const int arrivals = batch.link_total(l);
    if (arrivals == 0) continue;
    const double p = scheme.target_ratio[static_cast<std::size_t>(l)];
    if (scheme.kind == AdmissionScheme::Kind::deterministic) {
      admitted[static_cast<std::size_t>(l)] = arrivals * p;
    } else {
      // One coin per packet, so the slot increment is Binomial(a_l, p_l).
      int credited = 0;
      for (int i = 0; i < arrivals; ++i) credited += rng.bernoulli(p) ? 1 : 0;
      admitted[static_cast<std::size_t>(l)] = credited;
    }
  }
  return admitted;
}

std::vector<double> empirical_rate(TrafficProcess process, std::int64_t horizon,
                                   RandomStream& rng) {
  if (horizon < 1) throw std::invalid_argument("empirical_rate: horizon must be >= 1");
  std::vector<std::int64_t> totals(static_cast<std::size_t>(process.num_links()), 0);
  for (std::int64_t t = 0; t < horizon; ++t) {
    const ArrivalBatch batch = process.step(rng);
    for (int l = 0; l < process.num_links(); ++l)
      totals[static_cast<std::size_t>(l)] += batch.link_total(l);
  }
  std::vector<double> rates(totals.size());
  for (std::size_t l = 0; l < totals.size(); ++l)
    rates[l] = static_cast<double>(totals[l]) / static_cast<double>(horizon);
  return rates;
}

}  // namespace rtsched
