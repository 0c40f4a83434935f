#pragma once

/// Hypergraph topology for the multi-agent problems: m agents, hyperedges as
/// sorted vertex sets, and the slot maps between agents and edge positions.

#include <algorithm>
#include <utility>
#include <vector>

#include "rpd/common.hpp"

namespace rpd {

class Hypergraph {
 public:
  Hypergraph(int m, std::vector<std::vector<int>> edges) : m_(m), edges_(std::move(edges)) {
    require(m_ >= 1, "Hypergraph: need at least one agent");
    for (auto& e : edges_) {
      require(!e.empty(), "Hypergraph: empty hyperedge");
      std::sort(e.begin(), e.end());
      for (std::size_t i = 0; i < e.size(); ++i) {
        require(e[i] >= 0 && e[i] < m_, "Hypergraph: agent index out of range");
        require(i == 0 || e[i] != e[i - 1], "Hypergraph: duplicate agent in hyperedge");
      }
    }
    slots_.resize(m_);
    for (int l = 0; l < r(); ++l)
      for (int j = 0; j < kappa(l); ++j) slots_[edges_[l][j]].push_back({l, j});
  }

  /// Ring topology: edges {i, i+1 mod m}.
  static Hypergraph ring(int m) {
    require(m >= 3, "Hypergraph::ring: need at least three agents");
    std::vector<std::vector<int>> e;
    for (int i = 0; i < m; ++i) {
      std::vector<int> edge{i, (i + 1) % m};
      std::sort(edge.begin(), edge.end());
      e.push_back(std::move(edge));
    }
    return Hypergraph(m, std::move(e));
  }

  /// Single hyperedge containing every agent.
  static Hypergraph complete(int m) {
    std::vector<int> all(m);
    for (int i = 0; i < m; ++i) all[i] = i;
    return Hypergraph(m, {all});
  }

  int m() const { return m_; }
  int r() const { return static_cast<int>(edges_.size()); }
  int kappa(int l) const { return static_cast<int>(edges_[l].size()); }
  const std::vector<int>& edge(int l) const { return edges_[l]; }
  const std::vector<std::vector<int>>& edges() const { return edges_; }
  /// Agent i's (edge, slot) memberships, ascending in edge index.
  const std::vector<std::pair<int, int>>& slots(int i) const { return slots_[i]; }

  bool all_pairwise() const {
    for (const auto& e : edges_)
      if (e.size() != 2) return false;
    return true;
  }

 private:
  int m_;
  std::vector<std::vector<int>> edges_;
  std::vector<std::vector<std::pair<int, int>>> slots_;
};

/// True iff every agent lies in some edge and the agent-edge incidence graph
/// is connected (union-find over edges).
bool check_connectivity(const Hypergraph& h);

}  // namespace rpd
