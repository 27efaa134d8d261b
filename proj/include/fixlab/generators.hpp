#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fixlab/graph.hpp"

namespace fixlab {

enum class GeneratorKind { PreferentialAttachment, ErdosRenyi, SmallWorld };

enum class Weighting {
  Unweighted,  ///< w_ij = 1 / k_out(i)
  Random,      ///< uniform(0,1] per outgoing edge, normalized per vertex
};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::PreferentialAttachment;
  Index n = 100;
  /// Edges added per new vertex (preferential attachment).
  Index m = 1;
  /// Edge probability (Erdos-Renyi) or shortcut probability (small world).
  double p = 0.5;
  /// Ring degree (small world): each vertex joins k/2 neighbours on each side.
  Index k = 2;
  Weighting weighting = Weighting::Random;
  std::uint64_t seed = 0;
  /// Erdos-Renyi redraws until connected, at most this many times.
  std::size_t max_retries = 1000;
};

using UndirectedEdge = std::pair<Index, Index>;

/// Undirected skeleton of the growth model; deterministic in spec.seed.
std::vector<UndirectedEdge> generate_undirected(const GeneratorSpec& spec);

/// Replaces every undirected edge by two directed edges and assigns weights.
/// `seed` is only consumed by Weighting::Random.
EdgeList from_undirected(Index n, std::span<const UndirectedEdge> edges, Weighting weighting,
                         std::uint64_t seed = 0);

/// Generated edge list; throws Error("invalid_argument") for bad parameters
/// and Error("generator_failed") when no connected graph appears in
/// max_retries draws.
EdgeList generate_edges(const GeneratorSpec& spec);

inline Graph generate(const GeneratorSpec& spec) { return Graph(generate_edges(spec)); }

std::string_view to_string(GeneratorKind kind);

/// Parses "kind:key=value,..." with kind in {ba, preferential_attachment,
/// er, erdos_renyi, nws, ws, small_world} and keys n, m, p, k, seed,
/// weights={random,unweighted}. Throws Error("invalid_argument").
GeneratorSpec parse_generator_spec(std::string_view text);

}  // namespace fixlab
