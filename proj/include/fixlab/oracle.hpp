#pragma once

#include <Eigen/Sparse>

#include <cstdint>
#include <limits>

#include "fixlab/dynamics.hpp"
#include "fixlab/graph.hpp"

namespace fixlab {

/// Default largest population the brute-force chain accepts (2^16 states).
inline constexpr Index kOracleCap = 16;

/// The full configuration Markov chain. State s encodes the mutant set with
/// bit i set iff vertex i is a mutant (little-endian by vertex id), so state
/// 0 is the empty set and state 2^N - 1 is V.
struct ChainModel {
  using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, Index>;

  Index n = 0;
  UpdateRule rule = UpdateRule::BD_B;
  double r = 1.0;
  SparseMatrix transitions;

  std::uint64_t n_states() const { return std::uint64_t{1} << n; }
  std::uint64_t full_state() const { return n_states() - 1; }
};

/// Exact one-event transition probabilities under `rule` with mutant fitness
/// r. Neutral rule names use their birth-biased variant. Throws
/// Error("oracle_too_large") when N exceeds `cap`.
ChainModel build_chain(const Graph& g, UpdateRule rule, double r, Index cap = kOracleCap);

/// Fixation probabilities and conditional mean absorption times for every
/// state, from one factorization of (I - Q) over the transient states.
class ChainSolution {
 public:
  explicit ChainSolution(const ChainModel& chain);

  double fixation(std::uint64_t state) const { return fixation_[static_cast<Index>(state)]; }
  /// E[T | fixation]; NaN when fixation is impossible from `state`.
  double mean_fixation_time(std::uint64_t state) const {
    return fix_time_[static_cast<Index>(state)];
  }
  /// E[T | extinction]; NaN when extinction is impossible from `state`.
  double mean_extinction_time(std::uint64_t state) const {
    return ext_time_[static_cast<Index>(state)];
  }
  double mean_absorption_time(std::uint64_t state) const {
    return abs_time_[static_cast<Index>(state)];
  }

 private:
  Eigen::VectorXd fixation_;
  Eigen::VectorXd fix_time_;
  Eigen::VectorXd ext_time_;
  Eigen::VectorXd abs_time_;
};

/// Probability of absorbing in V from the configuration's state.
double fixation_exact(const ChainModel& chain, const Configuration& config);

struct MeanTimes {
  double mean_fixation = std::numeric_limits<double>::quiet_NaN();
  double mean_extinction = std::numeric_limits<double>::quiet_NaN();
  double mean_absorption = std::numeric_limits<double>::quiet_NaN();
  bool fixation_defined = false;
  bool extinction_defined = false;
};

MeanTimes mean_times_exact(const ChainModel& chain, const Configuration& config);

/// Advances a distribution over configurations by one event.
Eigen::VectorXd propagate(const ChainModel& chain, const Eigen::VectorXd& distribution);

/// Vertex probabilities P_i = sum over states containing i of the state's mass.
Eigen::VectorXd vertex_marginals(Index n, const Eigen::VectorXd& distribution);

}  // namespace fixlab
