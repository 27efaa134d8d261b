#pragma once

#include <algorithm>
#include <limits>

#include "fixlab/dynamics.hpp"
#include "fixlab/error.hpp"
#include "fixlab/graph.hpp"
#include "fixlab/solver.hpp"

namespace fixlab {

/// The neutral fixation probability F^(1)_C, which bounds F^(r)_C from below
/// for r > 1 under every biased rule of the same family.
template <typename Scalar>
Scalar lower_bound(const EvolutionaryGraph<Scalar>& g, const Configuration& config,
                   UpdateRule rule, Scalar epsilon = Scalar(1e-6)) {
  SolveOptions<Scalar> options;
  options.rule = neutral_rule(rule);
  options.epsilon = epsilon;
  return solve(g, config, options).fixation;
}

template <typename Scalar = double>
struct UpperBound {
  Scalar value = 1;
  /// The raw formula exceeded 1 and was clamped.
  bool vacuous = false;
  /// No formula exists for the rule (LD); value is 1.
  bool has_formula = true;
};

/// Closed-form upper bound on F^(r)_{i} for a single mutant at i.
///   BD-B: r / (r + sum_j w_ji)
///   BD-D: (sum_j w_ji / (r - r w_ji + w_ji))^{-1}
///   DB-B: sum_j r w_ij / (1 - w_ij + r w_ij)
///   DB-D: r sum_j w_ij
/// BD sums run over incoming edges, DB sums over outgoing edges.
template <typename Scalar>
UpperBound<Scalar> upper_bound_single(const EvolutionaryGraph<Scalar>& g, Index i, Scalar r,
                                      UpdateRule rule) {
  using SparseMatrix = typename EvolutionaryGraph<Scalar>::SparseMatrix;
  if (i < 0 || i >= g.size()) {
    throw Error("invalid_configuration", "vertex " + std::to_string(i) + " out of range");
  }
  if (!(r > Scalar(0))) throw Error("invalid_argument", "fitness r must be positive");

  UpperBound<Scalar> out;
  Scalar raw = 0;
  switch (rule) {
    case UpdateRule::BD_B:
      raw = r / (r + g.temperatures()[i]);
      break;
    case UpdateRule::BD_D: {
      Scalar sum = 0;
      for (typename SparseMatrix::InnerIterator it(g.incoming(), i); it; ++it) {
        sum += it.value() / (r - r * it.value() + it.value());
      }
      raw = sum > Scalar(0) ? Scalar(1) / sum : std::numeric_limits<Scalar>::infinity();
      break;
    }
    case UpdateRule::DB_B:
      for (typename SparseMatrix::InnerIterator it(g.weights(), i); it; ++it) {
        raw += r * it.value() / (Scalar(1) - it.value() + r * it.value());
      }
      break;
    case UpdateRule::DB_D:
      raw = r * g.weights().row(i).sum();
      break;
    case UpdateRule::LD:
      out.has_formula = false;
      return out;
    default:
      throw Error("unsupported_rule", std::string("upper bounds need a biased rule, got ") +
                                          std::string(to_string(rule)));
  }
  out.vacuous = raw > Scalar(1);
  out.value = std::clamp(raw, Scalar(0), Scalar(1));
  return out;
}

template <typename Scalar = double>
struct BoundReport {
  UpdateRule rule = UpdateRule::BD_B;
  Scalar r = 1;
  Scalar lower = 0;
  Scalar upper = 1;
  bool vacuous = false;
  bool has_formula = true;
};

/// Lower (neutral solve) and upper (closed form) bounds on F^(r)_{i}.
template <typename Scalar>
BoundReport<Scalar> bound_report(const EvolutionaryGraph<Scalar>& g, Index i, Scalar r,
                                 UpdateRule rule, Scalar epsilon = Scalar(1e-6)) {
  BoundReport<Scalar> report;
  report.rule = rule;
  report.r = r;
  report.lower = lower_bound(g, Configuration{i}, rule, epsilon);
  const auto upper = upper_bound_single(g, i, r, rule);
  report.upper = upper.value;
  report.vacuous = upper.vacuous;
  report.has_formula = upper.has_formula;
  if (report.lower > report.upper + epsilon) {
    throw Error("inconsistent_bounds", "lower bound exceeds upper bound");
  }
  return report;
}

}  // namespace fixlab
