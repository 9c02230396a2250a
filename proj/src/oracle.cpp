#include "rtsched/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace rtsched {

namespace {

void validate_instance(const HorizonInstance& inst) {
  const int K = inst.family.graph().num_links();
  if (inst.initial_buffers.num_links() != K ||
      static_cast<int>(inst.initial_deficits.size()) != K)
    throw std::invalid_argument("oracle: instance shape mismatch");
  if (inst.arrivals.empty()) throw std::invalid_argument("oracle: horizon must be >= 1");
  for (const auto& b : inst.arrivals)
    if (b.num_links() != K || b.max_deadline() > inst.initial_buffers.max_deadline())
      throw std::invalid_argument("oracle: arrival batch shape mismatch");
  if (!inst.admitted.empty()) {
    if (inst.admitted.size() != inst.arrivals.size())
      throw std::invalid_argument("oracle: admitted sequence length mismatch");
    for (const auto& row : inst.admitted)
      if (static_cast<int>(row.size()) != K)
        throw std::invalid_argument("oracle: admitted row size mismatch");
  }
  for (double w : inst.initial_deficits)
    if (!(w >= 0.0)) throw std::invalid_argument("oracle: negative initial deficit");
}

struct Search {
  const HorizonInstance& inst;
  const std::vector<double> zero_row;
  std::unordered_map<LinkMask, std::vector<LinkMask>> candidate_cache;
  MaxGainResult best;
  std::vector<ScheduleDecision> current;
  bool found = false;

  explicit Search(const HorizonInstance& i)
      : inst(i), zero_row(static_cast<std::size_t>(i.family.graph().num_links()), 0.0) {}

  const std::vector<double>& admitted_row(int t) const {
    return inst.admitted.empty() ? zero_row : inst.admitted[static_cast<std::size_t>(t)];
  }

  const std::vector<LinkMask>& candidates(LinkMask busy) {
    auto it = candidate_cache.find(busy);
    if (it != candidate_cache.end()) return it->second;
    std::vector<LinkMask> c = busy == 0 ? std::vector<LinkMask>{0}
                                        : enumerate_mis_masks(inst.family.graph(), busy);
    return candidate_cache.emplace(busy, std::move(c)).first->second;
  }

  // `buffers` already includes slot-t arrivals.
  void dfs(int t, const BufferState& buffers, const DeficitVector& deficits, double gain) {
    if (t == inst.horizon()) {
      if (!found || gain > best.gain) {
        best.gain = gain;
        best.schedule = current;
        found = true;
      }
      return;
    }
    const LinkMask busy = nonempty_mask(buffers);
    for (LinkMask mask : candidates(busy)) {
      ScheduleDecision decision = ScheduleDecision::idle(buffers.num_links());
      for (LinkMask scan = mask; scan != 0; scan &= scan - 1) {
        const int l = std::countr_zero(scan);
        decision.deadline_class[static_cast<std::size_t>(l)] = *earliest_deadline(buffers, l);
      }
      const double g = slot_gain(deficits, decision);
      const ArrivalBatch next = t + 1 < inst.horizon()
                                    ? inst.arrivals[static_cast<std::size_t>(t + 1)]
                                    : ArrivalBatch(buffers.num_links(), buffers.max_deadline());
      AdvanceResult adv = advance_buffers(buffers, decision, next);
      DeficitVector w = update_deficits(deficits, admitted_row(t), decision);
      current.push_back(decision);
      dfs(t + 1, adv.next, w, gain + g);
      current.pop_back();
    }
  }
};

}  // namespace

bool within_search_bound(const HorizonInstance& instance) {
  const double branching = std::max<std::size_t>(instance.family.size(), 1);
  return std::pow(branching, instance.horizon()) <= kMaxGainSearchBound;
}

MaxGainResult max_gain(const HorizonInstance& instance) {
  validate_instance(instance);
  if (!within_search_bound(instance))
    throw std::domain_error("oracle: instance exceeds the search bound");
  Search search(instance);
  BufferState start = instance.initial_buffers;
  start.merge_arrivals(instance.arrivals.front());
  search.dfs(0, start, instance.initial_deficits, 0.0);
  return std::move(search.best);
}

double replay_gain(const HorizonInstance& instance, PolicyKind policy, RandomStream& rng) {
  validate_instance(instance);
  const auto& graph = instance.family.graph();
  const std::vector<double> zero_row(instance.initial_deficits.size(), 0.0);
  BufferState buffers = instance.initial_buffers;
  buffers.merge_arrivals(instance.arrivals.front());
  DeficitVector deficits = instance.initial_deficits;
  double gain = 0.0;
  for (int t = 0; t < instance.horizon(); ++t) {
    const ScheduleDecision decision =
        decide(policy, graph, instance.family, buffers, deficits, rng);
    gain += slot_gain(deficits, decision);
    const ArrivalBatch next = t + 1 < instance.horizon()
                                  ? instance.arrivals[static_cast<std::size_t>(t + 1)]
                                  : ArrivalBatch(buffers.num_links(), buffers.max_deadline());
    AdvanceResult adv = advance_buffers(buffers, decision, next);
    buffers = std::move(adv.next);
    const std::vector<double>& admitted =
        instance.admitted.empty() ? zero_row : instance.admitted[static_cast<std::size_t>(t)];
    deficits = update_deficits(deficits, admitted, decision);
  }
  return gain;
}

namespace {

// Plain Dinic max-flow on a tiny graph.
class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes) : head_(static_cast<std::size_t>(nodes), -1) {}

  void add_edge(int from, int to, std::int64_t capacity) {
    edges_.push_back({to, head_[static_cast<std::size_t>(from)], capacity});
    head_[static_cast<std::size_t>(from)] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({from, head_[static_cast<std::size_t>(to)], 0});
    head_[static_cast<std::size_t>(to)] = static_cast<int>(edges_.size()) - 1;
  }

  std::int64_t max_flow(int source, int sink) {
    std::int64_t flow = 0;
    while (bfs(source, sink)) {
      iter_ = head_;
      while (std::int64_t pushed = dfs(source, sink, std::numeric_limits<std::int64_t>::max()))
        flow += pushed;
    }
    return flow;
  }

 private:
  struct Edge {
    int to;
    int next;
    std::int64_t cap;
  };

  bool bfs(int source, int sink) {
    level_.assign(head_.size(), -1);
    level_[static_cast<std::size_t>(source)] = 0;
    std::vector<int> queue{source};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int v = queue[qi];
      for (int e = head_[static_cast<std::size_t>(v)]; e != -1; e = edges_[static_cast<std::size_t>(e)].next) {
        const Edge& edge = edges_[static_cast<std::size_t>(e)];
        if (edge.cap > 0 && level_[static_cast<std::size_t>(edge.to)] < 0) {
          level_[static_cast<std::size_t>(edge.to)] = level_[static_cast<std::size_t>(v)] + 1;
          queue.push_back(edge.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
  }

  std::int64_t dfs(int v, int sink, std::int64_t limit) {
    if (v == sink) return limit;
    for (int& e = iter_[static_cast<std::size_t>(v)]; e != -1;
         e = edges_[static_cast<std::size_t>(e)].next) {
      Edge& edge = edges_[static_cast<std::size_t>(e)];
      if (edge.cap <= 0 || level_[static_cast<std::size_t>(edge.to)] !=
                               level_[static_cast<std::size_t>(v)] + 1)
        continue;
      const std::int64_t pushed = dfs(edge.to, sink, std::min(limit, edge.cap));
      if (pushed > 0) {
        edge.cap -= pushed;
        edges_[static_cast<std::size_t>(e ^ 1)].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> iter_;
  std::vector<Edge> edges_;
};

struct PacketClass {
  int link;
  int slot;
  int deadline;
  int count;
};

}  // namespace

double max_uniform_ratio(const InterferenceGraph& graph, const std::vector<ArrivalBatch>& cycle,
                         double resolution) {
  if (!graph.is_complete())
    throw std::invalid_argument("max_uniform_ratio: only collocated graphs are supported");
  if (cycle.empty()) throw std::invalid_argument("max_uniform_ratio: empty cycle");
  if (!(resolution > 0.0 && resolution <= 1.0))
    throw std::invalid_argument("max_uniform_ratio: resolution must be in (0, 1]");
  const int K = graph.num_links();
  const int L = static_cast<int>(cycle.size());
  if (static_cast<std::int64_t>(L) * K > 4096)
    throw std::domain_error("max_uniform_ratio: instance too large");

  std::vector<PacketClass> classes;
  std::vector<std::int64_t> per_link(static_cast<std::size_t>(K), 0);
  for (int s = 0; s < L; ++s) {
    const ArrivalBatch& batch = cycle[static_cast<std::size_t>(s)];
    if (batch.num_links() != K) throw std::invalid_argument("max_uniform_ratio: batch shape");
    for (int l = 0; l < K; ++l)
      for (int d = 1; d <= batch.max_deadline(); ++d)
        if (const int c = batch.count(l, d); c > 0) {
          classes.push_back({l, s, d, c});
          per_link[static_cast<std::size_t>(l)] += c;
        }
  }
  const std::int64_t scale = std::llround(1.0 / resolution);
  if (scale < 1) throw std::invalid_argument("max_uniform_ratio: resolution too coarse");

  // Nodes: source, K link nodes, |classes| class nodes, L slot nodes, sink.
  const int source = 0;
  const int link0 = 1;
  const int class0 = link0 + K;
  const int slot0 = class0 + static_cast<int>(classes.size());
  const int sink = slot0 + L;

  // Feasible at p = k/scale iff every link can deliver k * n_l units per
  // scale cycles, with per-cycle slot capacity `scale` and packet-class
  // supply count * scale. Monotone in k, so binary search on the grid.
  auto feasible = [&](std::int64_t k) {
    FlowNetwork net(sink + 1);
    std::int64_t demand = 0;
    for (int l = 0; l < K; ++l) {
      const std::int64_t target = k * per_link[static_cast<std::size_t>(l)];
      if (target == 0) continue;
      net.add_edge(source, link0 + l, target);
      demand += target;
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto& pc = classes[c];
      net.add_edge(link0 + pc.link, class0 + static_cast<int>(c),
                   static_cast<std::int64_t>(pc.count) * scale);
      const int span = std::min(pc.deadline, L);
      for (int off = 0; off < span; ++off)
        net.add_edge(class0 + static_cast<int>(c), slot0 + (pc.slot + off) % L,
                     static_cast<std::int64_t>(pc.count) * scale);
    }
    for (int s = 0; s < L; ++s) net.add_edge(slot0 + s, sink, scale);
    return net.max_flow(source, sink) == demand;
  };

  std::int64_t lo = 0;
  std::int64_t hi = scale;
  while (lo < hi) {
    const std::int64_t mid = (lo + hi + 1) / 2;
    if (feasible(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return static_cast<double>(lo) / static_cast<double>(scale);
}

}  // namespace rtsched
