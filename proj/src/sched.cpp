#include "rtsched/sched.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace rtsched {

std::optional<PolicyKind> policy_from_name(std::string_view name) {
  if (name == "amnd") return PolicyKind::amnd;
  if (name == "amms") return PolicyKind::amms;
  if (name == "ldf-rd") return PolicyKind::ldf_rd;
  if (name == "ldf-ed") return PolicyKind::ldf_ed;
  if (name == "edf") return PolicyKind::edf;
  return std::nullopt;
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::amnd: return "amnd";
    case PolicyKind::amms: return "amms";
    case PolicyKind::ldf_rd: return "ldf-rd";
    case PolicyKind::ldf_ed: return "ldf-ed";
    case PolicyKind::edf: return "edf";
  }
  return "?";
}

bool policy_supports(PolicyKind kind, const InterferenceGraph& graph) {
  return kind != PolicyKind::amnd || graph.is_complete();
}

std::vector<NonDominatedLink> find_nondominated(const BufferState& buffers,
                                                const DeficitVector& deficits) {
  std::vector<NonDominatedLink> candidates;
  for (int l = 0; l < buffers.num_links(); ++l) {
    if (const auto e = earliest_deadline(buffers, l))
      candidates.push_back({l, deficits[static_cast<std::size_t>(l)], *e});
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.deficit != b.deficit) return a.deficit > b.deficit;
    if (a.deadline != b.deadline) return a.deadline < b.deadline;
    return a.link < b.link;
  });
  // Sweeping in this order, a candidate survives exactly when its deadline is
  // strictly earlier than everything already selected; equal-deficit peers of
  // a selected link always have deadline >= it and are discarded with it.
  std::vector<NonDominatedLink> selected;
  int min_deadline = buffers.max_deadline() + 1;
  for (const auto& c : candidates) {
    if (c.deadline < min_deadline) {
      selected.push_back(c);
      min_deadline = c.deadline;
    }
  }
  return selected;
}

MixingDistribution amnd_mixing(std::span<const NonDominatedLink> nd) {
  if (nd.empty()) throw std::invalid_argument("amnd_mixing: empty non-dominated set");
  MixingDistribution mix;
  mix.support.reserve(nd.size());
  mix.prob.resize(nd.size());
  for (const auto& e : nd) mix.support.push_back(e.link);
  double remaining = 1.0;
  for (std::size_t i = 0; i + 1 < nd.size(); ++i) {
    // Deficits decrease strictly along the set, so only the last entry can be
    // zero; a zero head is the singleton case, which never reaches here.
    const double ratio = nd[i + 1].deficit / nd[i].deficit;
    const double p = std::min(1.0 - ratio, remaining);
    mix.prob[i] = p;
    remaining -= p;
  }
  mix.prob[nd.size() - 1] = remaining;
  return mix;
}

ScheduleDecision amnd_decide(const BufferState& buffers, const DeficitVector& deficits,
                             RandomStream& rng) {
  ScheduleDecision decision = ScheduleDecision::idle(buffers.num_links());
  const auto nd = find_nondominated(buffers, deficits);
  if (nd.empty()) return decision;
  const MixingDistribution mix = amnd_mixing(nd);
  const auto& pick = nd[static_cast<std::size_t>(rng.sample_discrete(mix.prob))];
  decision.deadline_class[static_cast<std::size_t>(pick.link)] = pick.deadline;
  return decision;
}

namespace {

double p_tail(std::span<const double> weights, int n) {
  // p_n under the n-prefix mixing: 1 - C_n / W_n with
  // C_n = (n-1) / sum_{i<=n} 1/W_i. Recomputed from scratch so that the
  // binary search and a linear scan evaluate bit-identical predicates.
  double recip = 0.0;
  for (int i = 0; i < n; ++i) recip += 1.0 / weights[static_cast<std::size_t>(i)];
  const double c = static_cast<double>(n - 1) / recip;
  return 1.0 - c / weights[static_cast<std::size_t>(n - 1)];
}

}  // namespace

NStarResult compute_nstar(std::span<const double> descending_weights) {
  if (descending_weights.empty()) throw std::invalid_argument("compute_nstar: empty weights");
  for (std::size_t i = 0; i < descending_weights.size(); ++i) {
    if (!(descending_weights[i] > 0.0))
      throw std::invalid_argument("compute_nstar: weights must be positive");
    if (i > 0 && descending_weights[i] > descending_weights[i - 1])
      throw std::invalid_argument("compute_nstar: weights must be nonincreasing");
  }
  int lo = 1;
  int hi = static_cast<int>(descending_weights.size());
  while (lo != hi) {
    const int n = (lo + hi + 1) / 2;  // ceil of the midpoint
    if (p_tail(descending_weights, n) >= 0.0)
      lo = n;
    else
      hi = n - 1;
  }
  double recip = 0.0;
  for (int i = 0; i < lo; ++i) recip += 1.0 / descending_weights[static_cast<std::size_t>(i)];
  const double c_star = lo == 1 ? 0.0 : static_cast<double>(lo - 1) / recip;
  return {lo, c_star};
}

OrderedWeights amms_order(const MaximalScheduleFamily& family, const BufferState& buffers,
                          const DeficitVector& deficits) {
  const LinkMask busy = nonempty_mask(buffers);
  OrderedWeights ordered;
  for (std::size_t i = 0; i < family.size(); ++i) {
    double w = 0.0;
    for (LinkMask scan = family.mask(i) & busy; scan != 0; scan &= scan - 1)
      w += deficits[static_cast<std::size_t>(std::countr_zero(scan))];
    if (w > 0.0) {
      ordered.mis_index.push_back(static_cast<int>(i));
      ordered.weight.push_back(w);
    }
  }
  // Stable sort keeps canonical family order among equal weights.
  std::vector<std::size_t> perm(ordered.weight.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return ordered.weight[a] > ordered.weight[b];
  });
  OrderedWeights out;
  for (std::size_t i : perm) {
    out.mis_index.push_back(ordered.mis_index[i]);
    out.weight.push_back(ordered.weight[i]);
  }
  if (!out.weight.empty()) {
    const NStarResult ns = compute_nstar(out.weight);
    out.n_star = ns.n_star;
    out.c_star = ns.c_star;
  }
  return out;
}

MixingDistribution amms_mixing(const OrderedWeights& ordered) {
  if (ordered.weight.empty()) throw std::invalid_argument("amms_mixing: no positive weights");
  MixingDistribution mix;
  mix.support = ordered.mis_index;
  mix.prob.assign(ordered.weight.size(), 0.0);
  for (int i = 0; i < ordered.n_star; ++i)
    mix.prob[static_cast<std::size_t>(i)] =
        1.0 - ordered.c_star / ordered.weight[static_cast<std::size_t>(i)];
  return mix;
}

namespace {

// Earliest-deadline transmissions for every nonempty link in `mask`.
void transmit_mask_earliest(const BufferState& buffers, LinkMask mask,
                            ScheduleDecision& decision) {
  for (LinkMask scan = mask; scan != 0; scan &= scan - 1) {
    const int l = std::countr_zero(scan);
    if (const auto e = earliest_deadline(buffers, l))
      decision.deadline_class[static_cast<std::size_t>(l)] = *e;
  }
}

// Greedy completion to a maximal schedule over the nonempty links, visiting
// the remaining candidates by largest deficit, then earliest deadline, then
// index.
void pad_to_maximal(const InterferenceGraph& graph, const BufferState& buffers,
                    const DeficitVector& deficits, ScheduleDecision& decision) {
  LinkMask chosen = decision.transmit_mask();
  LinkMask blocked = 0;
  for (LinkMask scan = chosen; scan != 0; scan &= scan - 1)
    blocked |= graph.neighbors(std::countr_zero(scan));
  std::vector<NonDominatedLink> rest;
  for (int l = 0; l < buffers.num_links(); ++l) {
    const LinkMask bit = LinkMask{1} << l;
    if ((chosen | blocked) & bit) continue;
    if (const auto e = earliest_deadline(buffers, l))
      rest.push_back({l, deficits[static_cast<std::size_t>(l)], *e});
  }
  std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
    if (a.deficit != b.deficit) return a.deficit > b.deficit;
    if (a.deadline != b.deadline) return a.deadline < b.deadline;
    return a.link < b.link;
  });
  for (const auto& c : rest) {
    const LinkMask bit = LinkMask{1} << c.link;
    if (blocked & bit) continue;
    decision.deadline_class[static_cast<std::size_t>(c.link)] = c.deadline;
    blocked |= graph.neighbors(c.link);
  }
}

ScheduleDecision greedy_maximal(const BufferState& buffers, const InterferenceGraph& graph,
                                std::vector<NonDominatedLink> order) {
  ScheduleDecision decision = ScheduleDecision::idle(buffers.num_links());
  LinkMask blocked = 0;
  for (const auto& c : order) {
    const LinkMask bit = LinkMask{1} << c.link;
    if (blocked & bit) continue;
    decision.deadline_class[static_cast<std::size_t>(c.link)] = c.deadline;
    blocked |= bit | graph.neighbors(c.link);
  }
  return decision;
}

}  // namespace

ScheduleDecision amms_decide(const MaximalScheduleFamily& family, const BufferState& buffers,
                             const DeficitVector& deficits, RandomStream& rng) {
  const LinkMask busy = nonempty_mask(buffers);
  if (busy == 0) return ScheduleDecision::idle(buffers.num_links());
  // Zero-weight sets cannot carry mixing mass; when nothing has weight the
  // gain is zero no matter what, so serve packets deadline-greedily.
  const OrderedWeights ordered = amms_order(family, buffers, deficits);
  if (ordered.weight.empty()) return edf_maximal_decide(buffers, family.graph(), rng);
  const MixingDistribution mix = amms_mixing(ordered);
  const int pick = rng.sample_discrete(mix.prob);
  const LinkMask base =
      family.mask(static_cast<std::size_t>(mix.support[static_cast<std::size_t>(pick)]));
  ScheduleDecision decision = ScheduleDecision::idle(buffers.num_links());
  transmit_mask_earliest(buffers, base & busy, decision);
  // The induced schedule can miss nonempty links whose whole neighborhood in
  // the chosen set is empty; complete it so the decision is maximal.
  pad_to_maximal(family.graph(), buffers, deficits, decision);
  return decision;
}

ScheduleDecision ldf_decide(const BufferState& buffers, const DeficitVector& deficits,
                            const InterferenceGraph& graph, LdfTie tie, RandomStream& rng) {
  std::vector<NonDominatedLink> candidates;
  for (int l = 0; l < buffers.num_links(); ++l) {
    if (const auto e = earliest_deadline(buffers, l))
      candidates.push_back({l, deficits[static_cast<std::size_t>(l)], *e});
  }
  ScheduleDecision decision = ScheduleDecision::idle(buffers.num_links());
  LinkMask blocked = 0;
  while (true) {
    // Next greedy pick: the largest remaining deficit, tie broken per mode.
    std::vector<std::size_t> best;
    double best_w = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (blocked & (LinkMask{1} << candidates[i].link)) continue;
      if (candidates[i].deficit > best_w) {
        best_w = candidates[i].deficit;
        best.clear();
        best.push_back(i);
      } else if (candidates[i].deficit == best_w) {
        best.push_back(i);
      }
    }
    if (best.empty()) break;
    std::size_t pick;
    if (best.size() == 1) {
      pick = best[0];
    } else if (tie == LdfTie::random) {
      pick = best[rng.next_below(static_cast<std::uint32_t>(best.size()))];
    } else {
      pick = best[0];
      for (std::size_t i : best) {
        const auto& a = candidates[i];
        const auto& b = candidates[pick];
        if (a.deadline < b.deadline || (a.deadline == b.deadline && a.link < b.link)) pick = i;
      }
    }
    const auto& c = candidates[pick];
    decision.deadline_class[static_cast<std::size_t>(c.link)] = c.deadline;
    blocked |= (LinkMask{1} << c.link) | graph.neighbors(c.link);
  }
  return decision;
}

ScheduleDecision edf_maximal_decide(const BufferState& buffers, const InterferenceGraph& graph,
                                    RandomStream& rng) {
  (void)rng;  // deterministic tie-breaking by index
  std::vector<NonDominatedLink> order;
  for (int l = 0; l < buffers.num_links(); ++l) {
    if (const auto e = earliest_deadline(buffers, l))
      order.push_back({l, 0.0, *e});
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.deadline != b.deadline) return a.deadline < b.deadline;
    return a.link < b.link;
  });
  return greedy_maximal(buffers, graph, std::move(order));
}

ScheduleDecision decide(PolicyKind kind, const InterferenceGraph& graph,
                        const MaximalScheduleFamily& family, const BufferState& buffers,
                        const DeficitVector& deficits, RandomStream& rng) {
  switch (kind) {
    case PolicyKind::amnd:
      if (!graph.is_complete())
        throw std::invalid_argument("amnd requires a collocated (complete) graph");
      return amnd_decide(buffers, deficits, rng);
    case PolicyKind::amms:
      return amms_decide(family, buffers, deficits, rng);
    case PolicyKind::ldf_rd:
      return ldf_decide(buffers, deficits, graph, LdfTie::random, rng);
    case PolicyKind::ldf_ed:
      return ldf_decide(buffers, deficits, graph, LdfTie::earliest_deadline, rng);
    case PolicyKind::edf:
      return edf_maximal_decide(buffers, graph, rng);
  }
  throw std::logic_error("unknown policy");
}

}  // namespace rtsched
