#include "rtsched/graph.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace rtsched {

InterferenceGraph::InterferenceGraph(int num_links, std::vector<std::pair<int, int>> edges)
    : num_links_(num_links) {
  if (num_links < 1) throw std::invalid_argument("graph: need at least one link");
  if (num_links > kMaxLinks) throw std::invalid_argument("graph: more than 64 links unsupported");
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= num_links || b >= num_links)
      throw std::invalid_argument("graph: edge endpoint out of range");
    if (a == b) throw std::invalid_argument("graph: self-loop");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
  adj_.assign(static_cast<std::size_t>(num_links), 0);
  for (const auto& [a, b] : edges_) {
    adj_[static_cast<std::size_t>(a)] |= LinkMask{1} << b;
    adj_[static_cast<std::size_t>(b)] |= LinkMask{1} << a;
  }
}

LinkMask InterferenceGraph::all_links_mask() const {
  return num_links_ == 64 ? ~LinkMask{0} : (LinkMask{1} << num_links_) - 1;
}

bool InterferenceGraph::is_complete() const {
  return edges_.size() == static_cast<std::size_t>(num_links_) * (num_links_ - 1) / 2;
}

InterferenceGraph make_collocated(int num_links) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < num_links; ++a)
    for (int b = a + 1; b < num_links; ++b) edges.emplace_back(a, b);
  return InterferenceGraph(num_links, std::move(edges));
}

InterferenceGraph make_star(int num_links) {
  std::vector<std::pair<int, int>> edges;
  for (int leaf = 1; leaf < num_links; ++leaf) edges.emplace_back(0, leaf);
  return InterferenceGraph(num_links, std::move(edges));
}

InterferenceGraph make_complete_partite(const std::vector<int>& part_sizes) {
  if (part_sizes.empty()) throw std::invalid_argument("complete_partite: no parts");
  int total = 0;
  std::vector<int> part_of;
  for (std::size_t p = 0; p < part_sizes.size(); ++p) {
    if (part_sizes[p] < 1) throw std::invalid_argument("complete_partite: empty part");
    for (int i = 0; i < part_sizes[p]; ++i) part_of.push_back(static_cast<int>(p));
    total += part_sizes[p];
  }
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < total; ++a)
    for (int b = a + 1; b < total; ++b)
      if (part_of[static_cast<std::size_t>(a)] != part_of[static_cast<std::size_t>(b)])
        edges.emplace_back(a, b);
  return InterferenceGraph(total, std::move(edges));
}

InterferenceGraph make_explicit(int num_links, std::vector<std::pair<int, int>> edges) {
  return InterferenceGraph(num_links, std::move(edges));
}

MaximalScheduleFamily::MaximalScheduleFamily(InterferenceGraph graph,
                                             std::vector<LinkMask> masks)
    : graph_(std::move(graph)), masks_(std::move(masks)) {
  members_.reserve(masks_.size());
  for (LinkMask m : masks_) members_.push_back(mask_to_links(m));
}

namespace {

// Bron-Kerbosch with pivoting over the non-conflict relation: maximal cliques
// of the complement graph are exactly the maximal independent sets here.
void bron_kerbosch(const std::vector<LinkMask>& compat, LinkMask r, LinkMask p, LinkMask x,
                   std::vector<LinkMask>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  const LinkMask px = p | x;
  int pivot = std::countr_zero(px);
  int best = -1;
  for (LinkMask scan = px; scan != 0; scan &= scan - 1) {
    const int v = std::countr_zero(scan);
    const int score = std::popcount(p & compat[static_cast<std::size_t>(v)]);
    if (score > best) {
      best = score;
      pivot = v;
    }
  }
  for (LinkMask cand = p & ~compat[static_cast<std::size_t>(pivot)]; cand != 0; cand &= cand - 1) {
    const int v = std::countr_zero(cand);
    const LinkMask bit = LinkMask{1} << v;
    bron_kerbosch(compat, r | bit, p & compat[static_cast<std::size_t>(v)],
                  x & compat[static_cast<std::size_t>(v)], out);
    p &= ~bit;
    x |= bit;
  }
}

void sort_canonical(std::vector<LinkMask>& masks) {
  // Lexicographic order on the sorted member lists coincides with numeric
  // order on bitmasks read from the lowest link upwards.
  std::sort(masks.begin(), masks.end(), [](LinkMask a, LinkMask b) {
    while (a != 0 && b != 0) {
      const int la = std::countr_zero(a);
      const int lb = std::countr_zero(b);
      if (la != lb) return la < lb;
      a &= a - 1;
      b &= b - 1;
    }
    return a == 0 && b != 0;
  });
}

}  // namespace

std::vector<LinkMask> enumerate_mis_masks(const InterferenceGraph& graph, LinkMask allowed) {
  if (allowed == 0) return {};
  std::vector<LinkMask> compat(static_cast<std::size_t>(graph.num_links()));
  for (int v = 0; v < graph.num_links(); ++v)
    compat[static_cast<std::size_t>(v)] =
        allowed & ~graph.neighbors(v) & ~(LinkMask{1} << v);
  std::vector<LinkMask> out;
  bron_kerbosch(compat, 0, allowed, 0, out);
  sort_canonical(out);
  return out;
}

MaximalScheduleFamily enumerate_mis(const InterferenceGraph& graph) {
  return MaximalScheduleFamily(graph, enumerate_mis_masks(graph, graph.all_links_mask()));
}

bool is_feasible_mask(const InterferenceGraph& graph, LinkMask mask) {
  for (LinkMask scan = mask; scan != 0; scan &= scan - 1) {
    const int v = std::countr_zero(scan);
    if (graph.neighbors(v) & mask) return false;
  }
  return true;
}

bool is_feasible_schedule(const InterferenceGraph& graph, std::span<const int> links) {
  LinkMask mask = 0;
  for (int l : links) {
    if (l < 0 || l >= graph.num_links()) throw std::invalid_argument("schedule: link out of range");
    mask |= LinkMask{1} << l;
  }
  return is_feasible_mask(graph, mask);
}

std::vector<int> mask_to_links(LinkMask mask) {
  std::vector<int> links;
  for (LinkMask scan = mask; scan != 0; scan &= scan - 1)
    links.push_back(std::countr_zero(scan));
  return links;
}

}  // namespace rtsched
