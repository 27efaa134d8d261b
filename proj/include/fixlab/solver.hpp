#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "fixlab/dynamics.hpp"
#include "fixlab/error.hpp"
#include "fixlab/graph.hpp"

namespace fixlab {

enum class Criterion {
  Range,  ///< tau = (max p - min p) / 2, return min p + tau; guaranteed within +-epsilon.
  Stdev,  ///< tau = stdev(p), return avg p; faster in practice, no guarantee.
};

template <typename Scalar = double>
struct SolveOptions {
  UpdateRule rule = UpdateRule::BD;
  Scalar epsilon = Scalar(1e-6);
  Criterion criterion = Criterion::Range;
  std::size_t max_iters = 10'000'000;
  /// Abort once tau has not improved for this many consecutive steps.
  std::size_t stagnation_window = 1000;
  bool record_trajectory = false;
};

template <typename Scalar = double>
struct TraceRow {
  std::size_t t = 0;
  Scalar min = 0;
  Scalar max = 0;
  Scalar avg = 0;
  Scalar stdev = 0;
  Scalar expected_mutants = 0;
  /// BD only: Ex predicted from the previous row by the temperature identity
  /// (NaN for other rules and for t = 0).
  Scalar ex_recurrence = std::numeric_limits<Scalar>::quiet_NaN();
};

template <typename Scalar = double>
struct SolveReport {
  Scalar fixation = 0;
  /// Final value of the convergence statistic tau.
  Scalar tau = 0;
  Scalar lower = 0;
  Scalar upper = 0;
  std::size_t iterations = 0;
  bool converged = false;
  bool stagnated = false;
  std::vector<TraceRow<Scalar>> trajectory;
  Vector<Scalar> final_vector;
};

/// Synchronous iteration of a neutral kernel from an initial configuration.
template <typename Scalar = double>
class ProbabilityIteration {
 public:
  ProbabilityIteration(const EvolutionaryGraph<Scalar>& g, const Configuration& config,
                       UpdateRule rule)
      : graph_(&g), kernel_(g, rule), current_(init_vector(g, config)), previous_(current_) {}

  void advance() {
    current_.swap(previous_);
    kernel_.apply(previous_, current_);
    ++t_;
  }

  std::size_t t() const { return t_; }
  const Vector<Scalar>& current() const { return current_; }
  const Vector<Scalar>& previous() const { return previous_; }
  UpdateRule rule() const { return kernel_.rule(); }

  TraceRow<Scalar> row() const {
    const auto s = summarize(current_);
    TraceRow<Scalar> r{t_, s.min, s.max, s.avg, s.stdev, s.sum};
    if (t_ > 0 && kernel_.rule() == UpdateRule::BD) {
      r.ex_recurrence = expected_mutants_recurrence(*graph_, previous_);
    }
    return r;
  }

 private:
  const EvolutionaryGraph<Scalar>* graph_;
  NeutralKernel<Scalar> kernel_;
  Vector<Scalar> current_;
  Vector<Scalar> previous_;
  std::size_t t_ = 0;
};

namespace detail {

template <typename Scalar>
Scalar convergence_statistic(const VectorSummary<Scalar>& s, Criterion criterion) {
  return criterion == Criterion::Range ? (s.max - s.min) / Scalar(2) : s.stdev;
}

template <typename Scalar>
void require_strongly_connected(const EvolutionaryGraph<Scalar>& g) {
  if (!is_strongly_connected(g)) {
    throw Error("not_strongly_connected",
                "fixation probability requires a strongly connected graph; "
                "use the trajectory tools instead");
  }
}

}  // namespace detail

/// Iterates the neutral kernel from C until tau <= epsilon (or a cap). With
/// Criterion::Range the estimate is within +-epsilon of F_C on convergence.
template <typename Scalar>
SolveReport<Scalar> solve(const EvolutionaryGraph<Scalar>& g, const Configuration& config,
                          const SolveOptions<Scalar>& options = {}) {
  config.check(g.size());
  detail::require_strongly_connected(g);

  ProbabilityIteration<Scalar> it(g, config, options.rule);
  SolveReport<Scalar> report;
  auto s = summarize(it.current());
  Scalar tau = detail::convergence_statistic(s, options.criterion);
  if (options.record_trajectory) report.trajectory.push_back(it.row());

  Scalar best = tau;
  std::size_t since_progress = 0;
  while (tau > options.epsilon && it.t() < options.max_iters) {
    it.advance();
    s = summarize(it.current());
    tau = detail::convergence_statistic(s, options.criterion);
    if (options.record_trajectory) report.trajectory.push_back(it.row());
    if (tau < best) {
      best = tau;
      since_progress = 0;
    } else if (++since_progress >= options.stagnation_window) {
      report.stagnated = true;
      break;
    }
  }

  report.tau = tau;
  report.lower = s.min;
  report.upper = s.max;
  report.iterations = it.t();
  report.converged = tau <= options.epsilon;
  report.fixation = options.criterion == Criterion::Range ? s.min + tau : s.avg;
  report.final_vector = it.current();
  return report;
}

/// (min_i P_i, max_i P_i); under neutral drift F_C lies inside.
template <typename Derived>
std::pair<typename Derived::Scalar, typename Derived::Scalar> bracket(
    const Eigen::MatrixBase<Derived>& p) {
  return {p.minCoeff(), p.maxCoeff()};
}

template <typename Scalar = double>
struct AdditivityReport {
  Scalar first = 0;
  Scalar second = 0;
  Scalar combined = 0;
  /// |F_C + F_D - F_{C u D}|
  Scalar defect = 0;
};

template <typename Scalar>
AdditivityReport<Scalar> additivity_check(const EvolutionaryGraph<Scalar>& g,
                                          const Configuration& c1, const Configuration& c2,
                                          const SolveOptions<Scalar>& options = {}) {
  if (c1.intersects(c2)) {
    throw Error("overlapping_configurations", "additivity requires disjoint configurations");
  }
  AdditivityReport<Scalar> r;
  r.first = solve(g, c1, options).fixation;
  r.second = solve(g, c2, options).fixation;
  r.combined = solve(g, c1.unite(c2), options).fixation;
  using std::abs;
  r.defect = abs(r.first + r.second - r.combined);
  return r;
}

template <typename Scalar = double>
struct ClosedForm {
  Scalar lim_expected_mutants = 0;
  Scalar fixation = 0;
};

/// Single-mutant closed forms on undirected, unweighted graphs:
/// BD: lim Ex = 1 / (k_i <k^{-1}>), F = lim Ex / N;
/// DB: F = k_i / (2 Theta) with Theta the number of undirected edges.
template <typename Scalar>
ClosedForm<Scalar> undirected_closed_form(const EvolutionaryGraph<Scalar>& g, Index i,
                                          UpdateRule rule = UpdateRule::BD) {
  if (i < 0 || i >= g.size()) {
    throw Error("invalid_configuration", "vertex " + std::to_string(i) + " out of range");
  }
  const auto st = stats(g);
  if (!st.mean_inverse_degree) {
    throw Error("not_undirected_unweighted",
                "closed form requires an undirected, unweighted graph with no isolated vertex");
  }
  const Scalar n = static_cast<Scalar>(g.size());
  const Scalar k = static_cast<Scalar>(g.out_degree(i));
  ClosedForm<Scalar> out;
  switch (neutral_rule(rule)) {
    case UpdateRule::BD:
      out.lim_expected_mutants = Scalar(1) / (k * *st.mean_inverse_degree);
      out.fixation = out.lim_expected_mutants / n;
      break;
    case UpdateRule::DB: {
      const Scalar theta = static_cast<Scalar>(g.edge_count()) / Scalar(2);
      out.fixation = k / (Scalar(2) * theta);
      out.lim_expected_mutants = out.fixation * n;
      break;
    }
    default:
      throw Error("unsupported_rule", "no closed form for link dynamics");
  }
  return out;
}

/// Per-step (t, min, max, avg, stdev, Ex) for t = 0..steps. Valid on any
/// graph, strongly connected or not.
template <typename Scalar>
std::vector<TraceRow<Scalar>> trajectory(const EvolutionaryGraph<Scalar>& g,
                                         const Configuration& config, UpdateRule rule,
                                         std::size_t steps) {
  ProbabilityIteration<Scalar> it(g, config, rule);
  std::vector<TraceRow<Scalar>> rows;
  rows.reserve(steps + 1);
  rows.push_back(it.row());
  while (it.t() < steps) {
    it.advance();
    rows.push_back(it.row());
  }
  return rows;
}

}  // namespace fixlab
