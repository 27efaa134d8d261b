#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fixlab/error.hpp"

namespace fixlab {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Tolerance on |sum_j w_ij - 1| for a vertex with outgoing edges.
inline constexpr double kRowSumTolerance = 1e-9;

struct Edge {
  Index source = 0;
  Index target = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Raw, unvalidated graph data as read from disk or produced by a generator.
struct EdgeList {
  Index n = 0;
  std::vector<Edge> edges;
};

enum class ViolationKind {
  EmptyGraph,
  VertexOutOfRange,
  SelfLoop,
  DuplicateEdge,
  BadWeight,
  RowSum,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  bool has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
  }

  std::string summary() const {
    std::ostringstream out;
    for (std::size_t k = 0; k < violations.size(); ++k) {
      if (k) out << "; ";
      out << violations[k].message;
    }
    return out.str();
  }
};

/// Collects every model-constraint violation in `list`. Never throws.
inline ValidationResult validate(const EdgeList& list) {
  ValidationResult result;
  auto report = [&](ViolationKind kind, std::string message) {
    result.violations.push_back({kind, std::move(message)});
  };
  if (list.n < 1) {
    report(ViolationKind::EmptyGraph, "graph has no vertices");
    return result;
  }

  std::vector<double> row_sum(static_cast<std::size_t>(list.n), 0.0);
  std::vector<Index> out_degree(static_cast<std::size_t>(list.n), 0);
  std::vector<std::pair<Index, Index>> seen;
  seen.reserve(list.edges.size());

  for (const auto& e : list.edges) {
    std::ostringstream tag;
    tag << "edge (" << e.source << "," << e.target << ")";
    if (e.source < 0 || e.source >= list.n || e.target < 0 || e.target >= list.n) {
      report(ViolationKind::VertexOutOfRange, tag.str() + " references a vertex outside 0.." +
                                                  std::to_string(list.n - 1));
      continue;
    }
    if (e.source == e.target) {
      report(ViolationKind::SelfLoop, tag.str() + " is a self-loop");
    }
    if (!std::isfinite(e.weight) || e.weight <= 0.0 || e.weight > 1.0 + kRowSumTolerance) {
      std::ostringstream msg;
      msg << tag.str() << " has weight " << e.weight << " outside (0,1]";
      report(ViolationKind::BadWeight, msg.str());
    }
    seen.emplace_back(e.source, e.target);
    if (std::isfinite(e.weight)) row_sum[static_cast<std::size_t>(e.source)] += e.weight;
    ++out_degree[static_cast<std::size_t>(e.source)];
  }

  std::sort(seen.begin(), seen.end());
  for (std::size_t k = 1; k < seen.size(); ++k) {
    if (seen[k] == seen[k - 1] && (k + 1 == seen.size() || seen[k + 1] != seen[k])) {
      std::ostringstream msg;
      msg << "edge (" << seen[k].first << "," << seen[k].second << ") listed more than once";
      report(ViolationKind::DuplicateEdge, msg.str());
    }
  }

  for (Index i = 0; i < list.n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (out_degree[k] > 0 && std::abs(row_sum[k] - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "row " << i << " sums to " << row_sum[k] << ", expected 1";
      report(ViolationKind::RowSum, msg.str());
    }
  }
  return result;
}

/// The population structure: N vertices and a row-stochastic weight matrix W
/// (w_ij is the probability that i's offspring lands on j). Immutable.
template <typename Scalar = double>
class EvolutionaryGraph {
 public:
  using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Index>;
  using VectorType = Vector<Scalar>;

  /// Throws Error("invalid_graph") listing every violation. Rows within
  /// tolerance of 1 are renormalized exactly.
  explicit EvolutionaryGraph(const EdgeList& list) {
    auto check = validate(list);
    if (!check.ok()) throw Error("invalid_graph", check.summary());

    n_ = list.n;
    std::vector<double> row_sum(static_cast<std::size_t>(n_), 0.0);
    for (const auto& e : list.edges) row_sum[static_cast<std::size_t>(e.source)] += e.weight;

    std::vector<Eigen::Triplet<Scalar, Index>> triplets;
    triplets.reserve(list.edges.size());
    for (const auto& e : list.edges) {
      const double w = e.weight / row_sum[static_cast<std::size_t>(e.source)];
      triplets.emplace_back(e.source, e.target, static_cast<Scalar>(w));
    }
    weights_.resize(n_, n_);
    weights_.setFromTriplets(triplets.begin(), triplets.end());
    weights_.makeCompressed();
    incoming_ = weights_.transpose();
    incoming_.makeCompressed();

    temperatures_ = VectorType::Zero(n_);
    for (Index i = 0; i < n_; ++i) {
      for (typename SparseMatrix::InnerIterator it(incoming_, i); it; ++it) {
        temperatures_[i] += it.value();
      }
    }
  }

  Index size() const { return n_; }
  Index edge_count() const { return weights_.nonZeros(); }

  /// Row i holds the outgoing weights w_ij, columns sorted by j.
  const SparseMatrix& weights() const { return weights_; }
  /// Row i holds the incoming weights w_ji, columns sorted by j.
  const SparseMatrix& incoming() const { return incoming_; }

  Index out_degree(Index i) const {
    return weights_.outerIndexPtr()[i + 1] - weights_.outerIndexPtr()[i];
  }
  Index in_degree(Index i) const {
    return incoming_.outerIndexPtr()[i + 1] - incoming_.outerIndexPtr()[i];
  }

  /// T_i = sum_j w_ji.
  const VectorType& temperatures() const { return temperatures_; }

  Scalar weight(Index i, Index j) const { return weights_.coeff(i, j); }

  EdgeList edge_list() const {
    EdgeList list{n_, {}};
    list.edges.reserve(static_cast<std::size_t>(edge_count()));
    for (Index i = 0; i < n_; ++i) {
      for (typename SparseMatrix::InnerIterator it(weights_, i); it; ++it) {
        list.edges.push_back({i, it.col(), static_cast<double>(it.value())});
      }
    }
    return list;
  }

 private:
  Index n_ = 0;
  SparseMatrix weights_;
  SparseMatrix incoming_;
  VectorType temperatures_;
};

using Graph = EvolutionaryGraph<double>;

/// An initial mutant set: sorted, duplicate-free vertex ids.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::initializer_list<Index> ids) : members_(ids) { normalize(); }
  explicit Configuration(std::vector<Index> ids) : members_(std::move(ids)) { normalize(); }

  static Configuration all(Index n) {
    std::vector<Index> ids(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    return Configuration(std::move(ids));
  }

  const std::vector<Index>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  bool contains(Index i) const { return std::binary_search(members_.begin(), members_.end(), i); }

  bool intersects(const Configuration& other) const {
    std::vector<Index> common;
    std::set_intersection(members_.begin(), members_.end(), other.members_.begin(),
                          other.members_.end(), std::back_inserter(common));
    return !common.empty();
  }

  Configuration unite(const Configuration& other) const {
    std::vector<Index> merged;
    std::set_union(members_.begin(), members_.end(), other.members_.begin(),
                   other.members_.end(), std::back_inserter(merged));
    return Configuration(std::move(merged));
  }

  /// Throws Error("invalid_configuration") if any id is outside 0..n-1.
  void check(Index n) const {
    for (Index i : members_) {
      if (i < 0 || i >= n) {
        throw Error("invalid_configuration", "configuration vertex " + std::to_string(i) +
                                                 " outside 0.." + std::to_string(n - 1));
      }
    }
  }

  /// Bit i set iff vertex i is a mutant.
  std::uint64_t bitmask() const {
    std::uint64_t mask = 0;
    for (Index i : members_) mask |= std::uint64_t{1} << i;
    return mask;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  void normalize() {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  std::vector<Index> members_;
};

namespace detail {

template <typename Matrix>
std::vector<char> reachable_from(const Matrix& adjacency, std::span<const Index> sources) {
  std::vector<char> seen(static_cast<std::size_t>(adjacency.rows()), 0);
  std::queue<Index> frontier;
  for (Index s : sources) {
    if (!seen[static_cast<std::size_t>(s)]) {
      seen[static_cast<std::size_t>(s)] = 1;
      frontier.push(s);
    }
  }
  while (!frontier.empty()) {
    const Index i = frontier.front();
    frontier.pop();
    for (typename Matrix::InnerIterator it(adjacency, i); it; ++it) {
      auto& flag = seen[static_cast<std::size_t>(it.col())];
      if (!flag) {
        flag = 1;
        frontier.push(it.col());
      }
    }
  }
  return seen;
}

}  // namespace detail

template <typename Scalar>
bool is_strongly_connected(const EvolutionaryGraph<Scalar>& g) {
  const Index root[] = {0};
  auto all_set = [](const std::vector<char>& v) {
    return std::all_of(v.begin(), v.end(), [](char c) { return c != 0; });
  };
  return all_set(detail::reachable_from(g.weights(), root)) &&
         all_set(detail::reachable_from(g.incoming(), root));
}

/// True iff every vertex outside `config` is reachable from some member;
/// equivalently F_C > 0 on a graph where absorption is certain.
template <typename Scalar>
bool reaches_all(const EvolutionaryGraph<Scalar>& g, const Configuration& config) {
  config.check(g.size());
  if (config.size() == static_cast<std::size_t>(g.size())) return true;
  auto seen = detail::reachable_from(g.weights(), std::span<const Index>(config.members()));
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

template <typename Scalar>
struct GraphStats {
  Vector<Scalar> temperatures;
  std::vector<Index> in_degree;
  std::vector<Index> out_degree;
  /// <k^{-1}>; present only for undirected, unweighted graphs.
  std::optional<Scalar> mean_inverse_degree;
  bool is_unweighted = false;
  bool is_undirected = false;
  bool is_strongly_connected = false;
};

template <typename Scalar>
GraphStats<Scalar> stats(const EvolutionaryGraph<Scalar>& g) {
  using Matrix = typename EvolutionaryGraph<Scalar>::SparseMatrix;
  GraphStats<Scalar> s;
  const Index n = g.size();
  s.temperatures = g.temperatures();
  s.in_degree.resize(static_cast<std::size_t>(n));
  s.out_degree.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    s.in_degree[static_cast<std::size_t>(i)] = g.in_degree(i);
    s.out_degree[static_cast<std::size_t>(i)] = g.out_degree(i);
  }

  s.is_unweighted = true;
  s.is_undirected = true;
  for (Index i = 0; i < n; ++i) {
    const Scalar uniform = Scalar(1) / static_cast<Scalar>(std::max<Index>(1, g.out_degree(i)));
    for (typename Matrix::InnerIterator it(g.weights(), i); it; ++it) {
      using std::abs;
      if (abs(it.value() - uniform) > Scalar(1e-12)) s.is_unweighted = false;
      if (g.weight(it.col(), i) == Scalar(0)) s.is_undirected = false;
    }
  }
  s.is_strongly_connected = is_strongly_connected(g);

  if (s.is_unweighted && s.is_undirected) {
    Scalar total = 0;
    bool defined = true;
    for (Index i = 0; i < n; ++i) {
      const Index k = g.out_degree(i);
      if (k == 0) {
        defined = false;
        break;
      }
      total += Scalar(1) / static_cast<Scalar>(k);
    }
    if (defined) s.mean_inverse_degree = total / static_cast<Scalar>(n);
  }
  return s;
}

}  // namespace fixlab
