#pragma once

#include <cstddef>
#include <vector>

#include "fixlab/dynamics.hpp"
#include "fixlab/error.hpp"
#include "fixlab/graph.hpp"
#include "fixlab/oracle.hpp"
#include "fixlab/solver.hpp"

namespace fixlab {

template <typename Scalar = double>
struct MttfRow {
  std::size_t t = 0;
  Scalar p_min = 0;
  Scalar increment = 0;
  Scalar running_sum = 0;
};

template <typename Scalar = double>
struct MttfReport {
  Scalar lower_bound = 0;
  /// sum_t t (min p_t - min p_{t-1}) at termination.
  Scalar partial_sum = 0;
  /// avg(p) at termination, the estimate of F_C.
  Scalar normalizer = 0;
  std::size_t iterations = 0;
  bool truncated = false;
  /// Steps whose min-trace increment was negative (never under BD).
  std::size_t negative_increments = 0;
  std::vector<MttfRow<Scalar>> trace;
};

template <typename Scalar = double>
struct MttfOptions {
  UpdateRule rule = UpdateRule::BD;
  Scalar stop_stdev = Scalar(2.5e-6);
  std::size_t max_iters = 10'000'000;
  bool record_trace = false;
};

/// Lower bound on the mean time to fixation:
///   (1/F_C) sum_t t (P_min,t - P_min,t-1),
/// accumulated until stdev(p) <= stop_stdev and normalized by avg(p).
template <typename Scalar>
MttfReport<Scalar> mttf_lower_bound(const EvolutionaryGraph<Scalar>& g,
                                    const Configuration& config,
                                    const MttfOptions<Scalar>& options = {}) {
  config.check(g.size());
  detail::require_strongly_connected(g);
  if (config.empty()) {
    throw Error("invalid_configuration",
                "mean time to fixation undefined: empty configuration never fixates");
  }

  ProbabilityIteration<Scalar> it(g, config, options.rule);
  MttfReport<Scalar> report;
  auto s = summarize(it.current());
  if (options.record_trace) report.trace.push_back({0, s.min, Scalar(0), Scalar(0)});

  Scalar sum = 0;
  while (s.stdev > options.stop_stdev) {
    if (it.t() >= options.max_iters) {
      report.truncated = true;
      break;
    }
    const Scalar previous_min = s.min;
    it.advance();
    s = summarize(it.current());
    const Scalar increment = s.min - previous_min;
    if (increment < Scalar(0)) ++report.negative_increments;
    sum += static_cast<Scalar>(it.t()) * increment;
    if (options.record_trace) report.trace.push_back({it.t(), s.min, increment, sum});
  }

  report.partial_sum = sum;
  report.normalizer = s.avg;
  report.iterations = it.t();
  report.lower_bound = sum / s.avg;
  return report;
}

/// Exact conditional mean times from the configuration chain (small N only).
inline MeanTimes mttf_exact(const Graph& g, const Configuration& config, UpdateRule rule,
                            double r = 1.0, Index cap = kOracleCap) {
  return mean_times_exact(build_chain(g, rule, r, cap), config);
}

}  // namespace fixlab
