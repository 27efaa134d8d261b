#pragma once

// Graph fixtures shared by the unit and acceptance suites.

#include <random>
#include <vector>

#include "fixlab/generators.hpp"
#include "fixlab/graph.hpp"

namespace fixlab::testing {

inline Graph two_cycle() { return Graph(EdgeList{2, {{0, 1, 1.0}, {1, 0, 1.0}}}); }

inline Graph directed_cycle(Index n) {
  EdgeList list{n, {}};
  for (Index i = 0; i < n; ++i) list.edges.push_back({i, (i + 1) % n, 1.0});
  return Graph(list);
}

inline Graph undirected(Index n, const std::vector<UndirectedEdge>& edges) {
  return Graph(from_undirected(n, edges, Weighting::Unweighted));
}

inline Graph path(Index n) {
  std::vector<UndirectedEdge> edges;
  for (Index i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return undirected(n, edges);
}

inline Graph ring(Index n) {
  std::vector<UndirectedEdge> edges;
  for (Index i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return undirected(n, edges);
}

inline Graph star(Index leaves) {
  std::vector<UndirectedEdge> edges;
  for (Index i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return undirected(leaves + 1, edges);
}

inline Graph complete(Index n) {
  std::vector<UndirectedEdge> edges;
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b) edges.emplace_back(a, b);
  return undirected(n, edges);
}

/// Random strongly connected digraph with asymmetric topology and random
/// weights: a random Hamiltonian cycle plus extra arcs with probability p.
inline Graph random_digraph(Index n, std::uint64_t seed, double p = 0.3) {
  std::mt19937_64 rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<char>> arc(static_cast<std::size_t>(n),
                                     std::vector<char>(static_cast<std::size_t>(n), 0));
  for (Index k = 0; k < n; ++k) {
    arc[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]
       [static_cast<std::size_t>(order[static_cast<std::size_t>((k + 1) % n)])] = 1;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      if (a != b && unit(rng) < p) arc[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;

  EdgeList list{n, {}};
  for (Index a = 0; a < n; ++a) {
    std::vector<Edge> row;
    double total = 0.0;
    for (Index b = 0; b < n; ++b) {
      if (!arc[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) continue;
      const double w = 1.0 - unit(rng);
      row.push_back({a, b, w});
      total += w;
    }
    for (auto& e : row) {
      e.weight /= total;
      list.edges.push_back(e);
    }
  }
  return Graph(list);
}

/// Random connected undirected, unweighted graph (Erdos-Renyi, redrawn until
/// connected).
inline Graph random_undirected(Index n, std::uint64_t seed, double p) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::ErdosRenyi;
  spec.n = n;
  spec.p = p;
  spec.seed = seed;
  spec.weighting = Weighting::Unweighted;
  return generate(spec);
}

inline Graph random_er_weighted(Index n, std::uint64_t seed, double p = 0.5) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::ErdosRenyi;
  spec.n = n;
  spec.p = p;
  spec.seed = seed;
  spec.weighting = Weighting::Random;
  return generate(spec);
}

}  // namespace fixlab::testing
