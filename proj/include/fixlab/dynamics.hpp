#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fixlab/error.hpp"
#include "fixlab/graph.hpp"

namespace fixlab {

/// Update-rule taxonomy. BD, DB and LD are the neutral-drift families; the
/// -B/-D suffix says whether fitness biases the birth or the death draw.
enum class UpdateRule { BD, DB, LD, BD_B, BD_D, DB_B, DB_D };

enum class RuleFamily { BirthDeath, DeathBirth, Link };

inline RuleFamily family(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::BD:
    case UpdateRule::BD_B:
    case UpdateRule::BD_D:
      return RuleFamily::BirthDeath;
    case UpdateRule::DB:
    case UpdateRule::DB_B:
    case UpdateRule::DB_D:
      return RuleFamily::DeathBirth;
    case UpdateRule::LD:
      return RuleFamily::Link;
  }
  return RuleFamily::BirthDeath;
}

/// The neutral-drift kernel every rule of a family collapses to at r = 1.
inline UpdateRule neutral_rule(UpdateRule rule) {
  switch (family(rule)) {
    case RuleFamily::BirthDeath: return UpdateRule::BD;
    case RuleFamily::DeathBirth: return UpdateRule::DB;
    case RuleFamily::Link: return UpdateRule::LD;
  }
  return UpdateRule::BD;
}

/// Concrete stochastic rule used when simulating with fitness r. The neutral
/// names are read as their birth-biased variant (LD has a single variant).
inline UpdateRule biased_rule(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::BD: return UpdateRule::BD_B;
    case UpdateRule::DB: return UpdateRule::DB_B;
    default: return rule;
  }
}

inline std::string_view to_string(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::BD: return "bd";
    case UpdateRule::DB: return "db";
    case UpdateRule::LD: return "ld";
    case UpdateRule::BD_B: return "bd-b";
    case UpdateRule::BD_D: return "bd-d";
    case UpdateRule::DB_B: return "db-b";
    case UpdateRule::DB_D: return "db-d";
  }
  return "?";
}

inline std::optional<UpdateRule> parse_rule(std::string_view text) {
  for (auto rule : {UpdateRule::BD, UpdateRule::DB, UpdateRule::LD, UpdateRule::BD_B,
                    UpdateRule::BD_D, UpdateRule::DB_B, UpdateRule::DB_D}) {
    if (to_string(rule) == text) return rule;
  }
  return std::nullopt;
}

/// P_{i,0} = 1 for i in C, 0 otherwise.
template <typename Scalar = double>
Vector<Scalar> init_vector(Index n, const Configuration& config) {
  config.check(n);
  Vector<Scalar> p = Vector<Scalar>::Zero(n);
  for (Index i : config.members()) p[i] = Scalar(1);
  return p;
}

template <typename Scalar>
Vector<Scalar> init_vector(const EvolutionaryGraph<Scalar>& g, const Configuration& config) {
  return init_vector<Scalar>(g.size(), config);
}

/// A neutral-drift vertex-probability update in difference form,
///
///   P_{i,t} = P_{i,t-1} + sum_{(j,i) in E} c_ji (P_{j,t-1} - P_{i,t-1}),
///
/// with c_ji = w_ji / N (BD), 1 / (N k_in(i)) (DB) or 1 / |E| (LD). Constant
/// vectors are exact fixed points and every output is a convex combination
/// of the inputs.
template <typename Scalar = double>
class NeutralKernel {
 public:
  using SparseMatrix = typename EvolutionaryGraph<Scalar>::SparseMatrix;

  NeutralKernel(const EvolutionaryGraph<Scalar>& g, UpdateRule rule)
      : rule_(neutral_rule(rule)), coupling_(g.incoming()) {
    const Index n = g.size();
    const Scalar scale_n = static_cast<Scalar>(n);
    switch (rule_) {
      case UpdateRule::BD:
        coupling_ /= scale_n;
        break;
      case UpdateRule::DB:
        for (Index i = 0; i < n; ++i) {
          const Index k = g.in_degree(i);
          if (k == 0 && n > 1) {
            throw Error("missing_in_edges", "death-birth update undefined: vertex " +
                                                std::to_string(i) + " has no incoming edge");
          }
          for (typename SparseMatrix::InnerIterator it(coupling_, i); it; ++it) {
            it.valueRef() = Scalar(1) / (scale_n * static_cast<Scalar>(k));
          }
        }
        break;
      case UpdateRule::LD: {
        const Index edges = g.edge_count();
        if (edges == 0 && n > 1) {
          throw Error("no_edges", "link dynamics undefined on a graph without edges");
        }
        for (Index i = 0; i < n; ++i) {
          for (typename SparseMatrix::InnerIterator it(coupling_, i); it; ++it) {
            it.valueRef() = Scalar(1) / static_cast<Scalar>(edges);
          }
        }
        break;
      }
      default:
        break;
    }
  }

  UpdateRule rule() const { return rule_; }
  Index size() const { return coupling_.rows(); }

  /// Row i holds c_ji over incoming neighbours j.
  const SparseMatrix& coupling() const { return coupling_; }

  /// Writes step(p) into `out`; `out` must not alias `p`.
  template <typename In, typename Out>
  void apply(const Eigen::MatrixBase<In>& p, Eigen::MatrixBase<Out>& out) const {
    const Index n = size();
    for (Index i = 0; i < n; ++i) {
      const Scalar self = p[i];
      Scalar sum = 0;
      for (typename SparseMatrix::InnerIterator it(coupling_, i); it; ++it) {
        sum += it.value() * (p[it.col()] - self);
      }
      out[i] = self + sum;
    }
  }

  template <typename In>
  Vector<Scalar> operator()(const Eigen::MatrixBase<In>& p) const {
    if (p.size() != size()) {
      throw Error("size_mismatch", "probability vector has length " + std::to_string(p.size()) +
                                       ", graph has " + std::to_string(size()) + " vertices");
    }
    Vector<Scalar> out(size());
    apply(p, out);
    return out;
  }

 private:
  UpdateRule rule_;
  SparseMatrix coupling_;
};

template <typename Scalar, typename Derived>
Vector<Scalar> step(const EvolutionaryGraph<Scalar>& g, UpdateRule rule,
                    const Eigen::MatrixBase<Derived>& p) {
  return NeutralKernel<Scalar>(g, rule)(p);
}

template <typename Scalar, typename Derived>
Vector<Scalar> step_bd(const EvolutionaryGraph<Scalar>& g, const Eigen::MatrixBase<Derived>& p) {
  return step(g, UpdateRule::BD, p);
}

template <typename Scalar, typename Derived>
Vector<Scalar> step_db(const EvolutionaryGraph<Scalar>& g, const Eigen::MatrixBase<Derived>& p) {
  return step(g, UpdateRule::DB, p);
}

template <typename Scalar, typename Derived>
Vector<Scalar> step_ld(const EvolutionaryGraph<Scalar>& g, const Eigen::MatrixBase<Derived>& p) {
  return step(g, UpdateRule::LD, p);
}

/// Ex^(t) = sum_i P_{i,t}.
template <typename Derived>
typename Derived::Scalar expected_mutants(const Eigen::MatrixBase<Derived>& p) {
  return p.sum();
}

/// One-step BD prediction of the expected mutant count from the temperature
/// identity Ex^(t) = Ex^(t-1) + Ex^(t-1)/N - (1/N) sum_i T_i P_{i,t-1}.
template <typename Scalar, typename Derived>
Scalar expected_mutants_recurrence(const EvolutionaryGraph<Scalar>& g,
                                   const Eigen::MatrixBase<Derived>& p_prev) {
  const Scalar n = static_cast<Scalar>(g.size());
  const Scalar ex = p_prev.sum();
  return ex + ex / n - g.temperatures().dot(p_prev) / n;
}

/// |sum p_next - recurrence(p_prev)|; expected <= 1e-12 * N when p_next is
/// the BD step of p_prev.
template <typename Scalar, typename Prev, typename Next>
Scalar expected_mutants_recurrence_check(const EvolutionaryGraph<Scalar>& g,
                                         const Eigen::MatrixBase<Prev>& p_prev,
                                         const Eigen::MatrixBase<Next>& p_next) {
  using std::abs;
  return abs(p_next.sum() - expected_mutants_recurrence(g, p_prev));
}

/// min, max, mean and population standard deviation of a vector.
template <typename Scalar>
struct VectorSummary {
  Scalar min = 0;
  Scalar max = 0;
  Scalar avg = 0;
  Scalar stdev = 0;
  Scalar sum = 0;
};

template <typename Derived>
VectorSummary<typename Derived::Scalar> summarize(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  VectorSummary<Scalar> s;
  if (p.size() == 0) return s;
  s.min = p.minCoeff();
  s.max = p.maxCoeff();
  s.sum = p.sum();
  s.avg = s.sum / static_cast<Scalar>(p.size());
  using std::sqrt;
  s.stdev = sqrt((p.array() - s.avg).square().sum() / static_cast<Scalar>(p.size()));
  return s;
}

}  // namespace fixlab
