#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rtsched {

// Link sets are represented as bitmasks, which caps the supported network
// size at 64 links. Plenty for the scenarios this simulator targets.
inline constexpr int kMaxLinks = 64;

using LinkMask = std::uint64_t;

// Conflict relation over links: vertices are links, an edge means the two
// links cannot transmit in the same slot. Immutable after construction.
class InterferenceGraph {
 public:
  InterferenceGraph(int num_links, std::vector<std::pair<int, int>> edges);

  int num_links() const { return num_links_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  LinkMask neighbors(int link) const { return adj_[static_cast<std::size_t>(link)]; }
  bool adjacent(int a, int b) const { return (adj_[static_cast<std::size_t>(a)] >> b) & 1u; }
  LinkMask all_links_mask() const;
  bool is_complete() const;

  bool operator==(const InterferenceGraph& other) const = default;

 private:
  int num_links_;
  std::vector<std::pair<int, int>> edges_;  // normalized (a < b), sorted, deduped
  std::vector<LinkMask> adj_;
};

// Standard topologies.
InterferenceGraph make_collocated(int num_links);
InterferenceGraph make_star(int num_links);  // link 0 is the center
InterferenceGraph make_complete_partite(const std::vector<int>& part_sizes);
InterferenceGraph make_explicit(int num_links, std::vector<std::pair<int, int>> edges);

// Every maximal independent set of the graph, each exactly once, in canonical
// order: lexicographic by sorted member list. Enumerated once per graph and
// shared read-only afterwards.
class MaximalScheduleFamily {
 public:
  MaximalScheduleFamily(InterferenceGraph graph, std::vector<LinkMask> masks);

  const InterferenceGraph& graph() const { return graph_; }
  std::size_t size() const { return masks_.size(); }
  LinkMask mask(std::size_t i) const { return masks_[i]; }
  const std::vector<int>& members(std::size_t i) const { return members_[i]; }
  const std::vector<LinkMask>& masks() const { return masks_; }

 private:
  InterferenceGraph graph_;
  std::vector<LinkMask> masks_;
  std::vector<std::vector<int>> members_;
};

MaximalScheduleFamily enumerate_mis(const InterferenceGraph& graph);

// Maximal independent sets of the subgraph induced on `allowed`, canonical
// order. These are exactly the maximal schedules over the allowed links.
std::vector<LinkMask> enumerate_mis_masks(const InterferenceGraph& graph, LinkMask allowed);

bool is_feasible_schedule(const InterferenceGraph& graph, std::span<const int> links);
bool is_feasible_mask(const InterferenceGraph& graph, LinkMask mask);

std::vector<int> mask_to_links(LinkMask mask);

}  // namespace rtsched
