#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "fixlab/dynamics.hpp"
#include "fixlab/graph.hpp"

namespace fixlab {

using Engine = std::mt19937_64;

/// Engine for run `run_index` of a batch seeded with `master_seed`: an
/// mt19937_64 seeded through std::seed_seq with the 32-bit words
/// (lo(master), hi(master), lo(run), hi(run)). Independent of run order and
/// thread count.
Engine run_engine(std::uint64_t master_seed, std::uint64_t run_index);

/// Exact event-by-event simulation of one update rule with mutant fitness r.
/// One instance per thread; not thread-safe.
class Simulator {
 public:
  Simulator(const Graph& g, UpdateRule rule, double r);

  void reset(const Configuration& config);
  /// Applies one update event (which may leave the state unchanged).
  void step(Engine& rng);

  Index size() const { return n_; }
  Index mutant_count() const { return static_cast<Index>(mutants_.size()); }
  bool absorbed() const { return mutants_.empty() || mutant_count() == n_; }
  bool is_mutant(Index v) const { return mutant_[static_cast<std::size_t>(v)] != 0; }
  /// Bit i set iff vertex i is a mutant; requires N <= 64.
  std::uint64_t state_mask() const;
  UpdateRule rule() const { return rule_; }

 private:
  Index uniform_vertex(Engine& rng);
  Index uniform_member(const std::vector<Index>& pool, Engine& rng);
  Index sample_out(Index i, Engine& rng);
  bool accept(double probability, Engine& rng);
  void set_type(Index v, bool mutant);

  const Graph* graph_;
  Index n_;
  UpdateRule rule_;
  double r_;
  double max_fitness_;
  double max_inverse_fitness_;

  std::vector<char> mutant_;
  std::vector<Index> mutants_;
  std::vector<Index> residents_;
  std::vector<Index> position_;
  std::vector<std::discrete_distribution<Index>> out_choice_;
  std::vector<Index> edge_source_;
  std::vector<Index> edge_target_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

struct RunResult {
  bool fixated = false;
  std::uint64_t steps = 0;
  bool capped = false;
};

/// Default per-run event cap: 10^6 * N.
std::uint64_t default_step_cap(Index n);

RunResult simulate_run(const Graph& g, const Configuration& config, UpdateRule rule, double r,
                       std::uint64_t seed, std::uint64_t step_cap = 0);

struct SimulationOptions {
  UpdateRule rule = UpdateRule::BD;
  double r = 1.0;
  std::size_t runs = 2000;
  std::uint64_t seed = 0;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// 0 selects default_step_cap(N).
  std::uint64_t step_cap = 0;
};

struct SimulationSummary {
  UpdateRule rule = UpdateRule::BD_B;
  double r = 1.0;
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::size_t fixations = 0;
  std::size_t extinctions = 0;
  std::size_t capped = 0;
  double fixation_frequency = 0.0;
  /// sqrt(f (1 - f) / (R - 1)) over completed runs.
  double std_error = 0.0;
  double mean_fixation_time = 0.0;
  double fixation_time_std_error = 0.0;
  double mean_extinction_time = 0.0;
  double mean_absorption_time = 0.0;
  double absorption_time_std_error = 0.0;
  double wall_time = 0.0;
};

/// Estimated standard error of a Monte Carlo fixation frequency f from R runs.
double standard_error(double frequency, std::size_t runs);

/// R independent runs, possibly in parallel; the summary (apart from
/// wall_time) depends only on the inputs, never on scheduling.
SimulationSummary estimate(const Graph& g, const Configuration& config,
                           const SimulationOptions& options);

struct RunEstimate {
  std::size_t runs = 2;
  /// S in {0, 1}: any run count reproduces the answer.
  bool degenerate = false;
};

/// Runs needed for the Monte Carlo standard error to match epsilon:
/// R = ceil(S (1 - S) / epsilon^2) + 1.
RunEstimate required_runs(double solution, double epsilon);

struct SpeedupOptions {
  UpdateRule rule = UpdateRule::BD;
  std::size_t mc_runs = 2000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Unset: stop the solver once avg(p) enters the Monte Carlo standard-error
  /// band or stdev(p) drops to that standard error. Set: stop once
  /// stdev(p) <= epsilon. Throws Error("not_converged") at max_iters.
  std::optional<double> epsilon;
  std::size_t max_iters = 10'000'000;
};

struct SpeedupResult {
  Index n = 0;
  UpdateRule rule = UpdateRule::BD;
  double mc_time = 0.0;
  double solver_time = 0.0;
  double speedup = 0.0;
  double mc_estimate = 0.0;
  double mc_std_error = 0.0;
  double solver_estimate = 0.0;
  std::size_t solver_iterations = 0;
  bool within_band = false;
};

SpeedupResult speedup_benchmark(const Graph& g, const Configuration& config,
                                const SpeedupOptions& options);

}  // namespace fixlab
