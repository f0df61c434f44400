#include "oracles.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

namespace premlog::cli {

namespace {

constexpr Value kInf = std::numeric_limits<Value>::max() / 4;

struct Indexed {
  std::vector<Value> nodes;
  std::map<Value, std::size_t> index;
};

Indexed index_nodes(const std::vector<Tuple>& arcs) {
  Indexed g;
  for (const auto& a : arcs) {
    if (a.size() < 2) throw std::invalid_argument("arc needs two endpoints");
    g.index.emplace(a[0], 0);
    g.index.emplace(a[1], 0);
  }
  for (auto& [node, i] : g.index) {
    i = g.nodes.size();
    g.nodes.push_back(node);
  }
  return g;
}

// dist[x][y] over walks of zero or more arcs -> walks of at least one arc.
std::vector<Tuple> at_least_one_arc(const Indexed& g, const std::vector<Tuple>& arcs,
                                    const std::vector<std::vector<Value>>& dist) {
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<Value>> out(n, std::vector<Value>(n, kInf));
  for (const auto& a : arcs) {
    const std::size_t x = g.index.at(a[0]), z = g.index.at(a[1]);
    for (std::size_t y = 0; y < n; ++y)
      if (dist[z][y] < kInf) out[x][y] = std::min(out[x][y], a[2] + dist[z][y]);
  }
  std::vector<Tuple> result;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (out[x][y] < kInf) result.push_back({g.nodes[x], g.nodes[y], out[x][y]});
  return result;
}

void check_weights(const std::vector<Tuple>& arcs) {
  for (const auto& a : arcs)
    if (a.size() != 3 || a[2] < 0) throw std::invalid_argument("shortest paths need (x, y, w) arcs with w >= 0");
}

}  // namespace

std::vector<Tuple> floyd_warshall_apsp(const std::vector<Tuple>& arcs) {
  check_weights(arcs);
  Indexed g = index_nodes(arcs);
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<Value>> d(n, std::vector<Value>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& a : arcs) {
    auto& cell = d[g.index.at(a[0])][g.index.at(a[1])];
    cell = std::min(cell, a[2]);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] < kInf && d[k][j] < kInf) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return at_least_one_arc(g, arcs, d);
}

std::vector<Tuple> dijkstra_apsp(const std::vector<Tuple>& arcs) {
  check_weights(arcs);
  Indexed g = index_nodes(arcs);
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<std::pair<std::size_t, Value>>> adj(n);
  for (const auto& a : arcs) adj[g.index.at(a[0])].push_back({g.index.at(a[1]), a[2]});

  std::vector<std::vector<Value>> d(n, std::vector<Value>(n, kInf));
  using Item = std::pair<Value, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    auto& dist = d[s];
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0;
    pq.push({0, s});
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du != dist[u]) continue;
      for (auto [v, w] : adj[u])
        if (du + w < dist[v]) {
          dist[v] = du + w;
          pq.push({dist[v], v});
        }
    }
  }
  return at_least_one_arc(g, arcs, d);
}

std::vector<Tuple> warshall_closure(const std::vector<Tuple>& arcs) {
  Indexed g = index_nodes(arcs);
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (const auto& a : arcs) r[g.index.at(a[0])][g.index.at(a[1])] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = 1;
  std::vector<Tuple> result;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (r[i][j]) result.push_back({g.nodes[i], g.nodes[j]});
  return result;
}

}  // namespace premlog::cli
