#include "fixlab/generators.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <set>

#include "fixlab/error.hpp"

namespace fixlab {

namespace {

using Engine = std::mt19937_64;

bool connected(Index n, const std::vector<UndirectedEdge>& edges) {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
  for (auto [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  Index count = 1;
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    for (Index u : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == n;
}

std::vector<UndirectedEdge> preferential_attachment(const GeneratorSpec& spec, Engine& rng) {
  const Index n = spec.n;
  const Index m = spec.m;
  std::vector<UndirectedEdge> edges;
  std::vector<Index> targets(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) targets[static_cast<std::size_t>(i)] = i;
  // Each vertex appears once per incident edge, so uniform draws from this
  // list are degree-proportional.
  std::vector<Index> repeated;
  for (Index source = m; source < n; ++source) {
    for (Index t : targets) edges.emplace_back(t, source);
    repeated.insert(repeated.end(), targets.begin(), targets.end());
    repeated.insert(repeated.end(), static_cast<std::size_t>(m), source);

    std::set<Index> chosen;
    std::uniform_int_distribution<std::size_t> pick(0, repeated.size() - 1);
    while (static_cast<Index>(chosen.size()) < m) chosen.insert(repeated[pick(rng)]);
    targets.assign(chosen.begin(), chosen.end());
  }
  return edges;
}

std::vector<UndirectedEdge> erdos_renyi(const GeneratorSpec& spec, Engine& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, spec.max_retries); ++attempt) {
    std::vector<UndirectedEdge> edges;
    for (Index a = 0; a < spec.n; ++a) {
      for (Index b = a + 1; b < spec.n; ++b) {
        if (unit(rng) < spec.p) edges.emplace_back(a, b);
      }
    }
    if (connected(spec.n, edges)) return edges;
  }
  throw Error("generator_failed", "no connected Erdos-Renyi graph after " +
                                      std::to_string(spec.max_retries) + " draws");
}

/// Newman-Watts small world: ring lattice plus random shortcuts, no rewiring.
std::vector<UndirectedEdge> small_world(const GeneratorSpec& spec, Engine& rng) {
  const Index n = spec.n;
  std::vector<std::set<Index>> adj(static_cast<std::size_t>(n));
  std::vector<UndirectedEdge> ring;
  auto link = [&](Index a, Index b) {
    adj[static_cast<std::size_t>(a)].insert(b);
    adj[static_cast<std::size_t>(b)].insert(a);
  };
  for (Index offset = 1; offset <= spec.k / 2; ++offset) {
    for (Index v = 0; v < n; ++v) {
      const Index u = (v + offset) % n;
      if (!adj[static_cast<std::size_t>(v)].contains(u)) {
        link(v, u);
        ring.emplace_back(v, u);
      }
    }
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Index> vertex(0, n - 1);
  for (auto [u, v] : ring) {
    (void)v;
    if (unit(rng) >= spec.p) continue;
    if (static_cast<Index>(adj[static_cast<std::size_t>(u)].size()) >= n - 1) continue;
    Index w;
    do {
      w = vertex(rng);
    } while (w == u || adj[static_cast<std::size_t>(u)].contains(w));
    link(u, w);
  }
  std::vector<UndirectedEdge> edges;
  for (Index a = 0; a < n; ++a) {
    for (Index b : adj[static_cast<std::size_t>(a)]) {
      if (a < b) edges.emplace_back(a, b);
    }
  }
  return edges;
}

void check_spec(const GeneratorSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error("invalid_argument", msg); };
  if (spec.n < 2) fail("generator needs n >= 2");
  switch (spec.kind) {
    case GeneratorKind::PreferentialAttachment:
      if (spec.m < 1 || spec.m >= spec.n) fail("preferential attachment needs 1 <= m < n");
      break;
    case GeneratorKind::ErdosRenyi:
      if (!(spec.p >= 0.0 && spec.p <= 1.0)) fail("edge probability p must lie in [0,1]");
      break;
    case GeneratorKind::SmallWorld:
      if (!(spec.p >= 0.0 && spec.p <= 1.0)) fail("shortcut probability p must lie in [0,1]");
      if (spec.k < 2 || spec.k >= spec.n) fail("small world needs 2 <= k < n");
      if (spec.n < 3) fail("small world needs n >= 3");
      break;
  }
}

}  // namespace

std::vector<UndirectedEdge> generate_undirected(const GeneratorSpec& spec) {
  check_spec(spec);
  Engine rng(spec.seed);
  switch (spec.kind) {
    case GeneratorKind::PreferentialAttachment: return preferential_attachment(spec, rng);
    case GeneratorKind::ErdosRenyi: return erdos_renyi(spec, rng);
    case GeneratorKind::SmallWorld: return small_world(spec, rng);
  }
  return {};
}

EdgeList from_undirected(Index n, std::span<const UndirectedEdge> edges, Weighting weighting,
                         std::uint64_t seed) {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(n));
  for (auto [a, b] : edges) {
    out[static_cast<std::size_t>(a)].push_back(b);
    out[static_cast<std::size_t>(b)].push_back(a);
  }
  Engine rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EdgeList list{n, {}};
  list.edges.reserve(2 * edges.size());
  for (Index i = 0; i < n; ++i) {
    auto& targets = out[static_cast<std::size_t>(i)];
    std::sort(targets.begin(), targets.end());
    std::vector<double> w(targets.size(), 1.0);
    if (weighting == Weighting::Random) {
      for (auto& x : w) x = 1.0 - unit(rng);  // (0, 1]
    }
    double total = 0.0;
    for (double x : w) total += x;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      list.edges.push_back({i, targets[k], w[k] / total});
    }
  }
  return list;
}

EdgeList generate_edges(const GeneratorSpec& spec) {
  const auto skeleton = generate_undirected(spec);
  // Weights use a stream separate from the topology draws.
  return from_undirected(spec.n, skeleton, spec.weighting, spec.seed ^ 0x9e3779b97f4a7c15ULL);
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::PreferentialAttachment: return "preferential_attachment";
    case GeneratorKind::ErdosRenyi: return "erdos_renyi";
    case GeneratorKind::SmallWorld: return "small_world";
  }
  return "?";
}

GeneratorSpec parse_generator_spec(std::string_view text) {
  auto fail = [&](const std::string& why) {
    throw Error("invalid_argument", "bad generator spec '" + std::string(text) + "': " + why);
  };
  GeneratorSpec spec;
  const auto colon = text.find(':');
  const auto kind = text.substr(0, colon);
  if (kind == "ba" || kind == "preferential_attachment") {
    spec.kind = GeneratorKind::PreferentialAttachment;
  } else if (kind == "er" || kind == "erdos_renyi") {
    spec.kind = GeneratorKind::ErdosRenyi;
  } else if (kind == "nws" || kind == "ws" || kind == "small_world") {
    spec.kind = GeneratorKind::SmallWorld;
  } else {
    fail("unknown kind");
  }
  if (colon == std::string_view::npos) return spec;

  auto rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) fail("expected key=value");
    const auto key = item.substr(0, eq);
    const auto value = std::string(item.substr(eq + 1));
    auto as_index = [&]() {
      Index v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size()) fail("bad integer " + value);
      return v;
    };
    if (key == "n") {
      spec.n = as_index();
    } else if (key == "m") {
      spec.m = as_index();
    } else if (key == "k") {
      spec.k = as_index();
    } else if (key == "p") {
      try {
        std::size_t used = 0;
        spec.p = std::stod(value, &used);
        if (used != value.size()) fail("bad number " + value);
      } catch (const std::logic_error&) {
        fail("bad number " + value);
      }
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(as_index());
    } else if (key == "weights") {
      if (value == "random") {
        spec.weighting = Weighting::Random;
      } else if (value == "unweighted") {
        spec.weighting = Weighting::Unweighted;
      } else {
        fail("weights must be random or unweighted");
      }
    } else {
      fail("unknown key " + std::string(key));
    }
  }
  return spec;
}

}  // namespace fixlab
