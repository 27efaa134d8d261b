#include "fixlab/oracle.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <vector>

#include "fixlab/error.hpp"

namespace fixlab {

namespace {

using Triplet = Eigen::Triplet<double, Index>;

std::uint64_t with_vertex(std::uint64_t state, Index v, bool mutant) {
  const std::uint64_t bit = std::uint64_t{1} << v;
  return mutant ? (state | bit) : (state & ~bit);
}

bool is_mutant(std::uint64_t state, Index v) { return (state >> v) & 1U; }

}  // namespace

ChainModel build_chain(const Graph& g, UpdateRule rule, double r, Index cap) {
  const Index n = g.size();
  if (n > cap || n > 30) {
    throw Error("oracle_too_large", "exact chain limited to N <= " + std::to_string(cap) +
                                        ", got N = " + std::to_string(n));
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error("invalid_argument", "fitness r must be positive");
  }
  rule = biased_rule(rule);
  if (n > 1) {
    if (family(rule) == RuleFamily::DeathBirth) {
      for (Index i = 0; i < n; ++i) {
        if (g.in_degree(i) == 0) {
          throw Error("missing_in_edges", "death-birth update undefined: vertex " +
                                              std::to_string(i) + " has no incoming edge");
        }
      }
    }
    if (rule == UpdateRule::LD && g.edge_count() == 0) {
      throw Error("no_edges", "link dynamics undefined on a graph without edges");
    }
  }

  const auto& out = g.weights();
  const auto& in = g.incoming();
  const double dn = static_cast<double>(n);
  const std::uint64_t states = std::uint64_t{1} << n;

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(states) *
                   static_cast<std::size_t>(std::max<Index>(1, g.edge_count())));

  for (std::uint64_t s = 0; s < states; ++s) {
    const auto row = static_cast<Index>(s);
    auto fitness = [&](Index v) { return is_mutant(s, v) ? r : 1.0; };
    auto add = [&](std::uint64_t dest, double p) {
      if (p > 0.0) triplets.emplace_back(row, static_cast<Index>(dest), p);
    };
    // `parent`'s offspring replaces `child`.
    auto replace = [&](Index parent, Index child, double p) {
      add(with_vertex(s, child, is_mutant(s, parent)), p);
    };
    if (s == 0 || s == states - 1) {
      add(s, 1.0);
      continue;
    }

    switch (rule) {
      case UpdateRule::BD_B: {
        double total = 0.0;
        for (Index i = 0; i < n; ++i) total += fitness(i);
        for (Index i = 0; i < n; ++i) {
          const double pick = fitness(i) / total;
          if (g.out_degree(i) == 0) {
            add(s, pick);
            continue;
          }
          for (ChainModel::SparseMatrix::InnerIterator it(out, i); it; ++it) {
            replace(i, it.col(), pick * it.value());
          }
        }
        break;
      }
      case UpdateRule::BD_D: {
        for (Index i = 0; i < n; ++i) {
          if (g.out_degree(i) == 0) {
            add(s, 1.0 / dn);
            continue;
          }
          double denom = 0.0;
          for (ChainModel::SparseMatrix::InnerIterator it(out, i); it; ++it) {
            denom += it.value() / fitness(it.col());
          }
          for (ChainModel::SparseMatrix::InnerIterator it(out, i); it; ++it) {
            replace(i, it.col(), (it.value() / fitness(it.col())) / (dn * denom));
          }
        }
        break;
      }
      case UpdateRule::DB_B: {
        for (Index j = 0; j < n; ++j) {
          if (g.in_degree(j) == 0) {
            add(s, 1.0 / dn);
            continue;
          }
          double denom = 0.0;
          for (ChainModel::SparseMatrix::InnerIterator it(in, j); it; ++it) {
            denom += fitness(it.col());
          }
          for (ChainModel::SparseMatrix::InnerIterator it(in, j); it; ++it) {
            replace(it.col(), j, fitness(it.col()) / (dn * denom));
          }
        }
        break;
      }
      case UpdateRule::DB_D: {
        double inverse_total = 0.0;
        for (Index j = 0; j < n; ++j) inverse_total += 1.0 / fitness(j);
        for (Index j = 0; j < n; ++j) {
          const double death = (1.0 / fitness(j)) / inverse_total;
          const Index k = g.in_degree(j);
          if (k == 0) {
            add(s, death);
            continue;
          }
          for (ChainModel::SparseMatrix::InnerIterator it(in, j); it; ++it) {
            replace(it.col(), j, death / static_cast<double>(k));
          }
        }
        break;
      }
      case UpdateRule::LD: {
        double total = 0.0;
        for (Index i = 0; i < n; ++i) total += fitness(i) * static_cast<double>(g.out_degree(i));
        if (total == 0.0) {
          add(s, 1.0);
          break;
        }
        for (Index i = 0; i < n; ++i) {
          for (ChainModel::SparseMatrix::InnerIterator it(out, i); it; ++it) {
            replace(i, it.col(), fitness(i) / total);
          }
        }
        break;
      }
      default:
        break;
    }
  }

  ChainModel chain;
  chain.n = n;
  chain.rule = rule;
  chain.r = r;
  chain.transitions.resize(static_cast<Index>(states), static_cast<Index>(states));
  chain.transitions.setFromTriplets(triplets.begin(), triplets.end());
  chain.transitions.makeCompressed();
  return chain;
}

ChainSolution::ChainSolution(const ChainModel& chain) {
  const auto states = static_cast<Index>(chain.n_states());
  const auto full = static_cast<Index>(chain.full_state());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  fixation_ = Eigen::VectorXd::Zero(states);
  fix_time_ = Eigen::VectorXd::Constant(states, nan);
  ext_time_ = Eigen::VectorXd::Constant(states, nan);
  abs_time_ = Eigen::VectorXd::Zero(states);
  fixation_[full] = 1.0;
  fix_time_[full] = 0.0;
  ext_time_[0] = 0.0;
  if (states <= 2) return;

  // Transient state s maps to unknown s - 1.
  const Index m = states - 2;
  std::vector<Eigen::Triplet<double, Index>> triplets;
  triplets.reserve(static_cast<std::size_t>(chain.transitions.nonZeros()));
  Eigen::VectorXd to_full = Eigen::VectorXd::Zero(m);
  for (Index s = 1; s < full; ++s) {
    triplets.emplace_back(s - 1, s - 1, 1.0);
    for (ChainModel::SparseMatrix::InnerIterator it(chain.transitions, s); it; ++it) {
      const Index d = it.col();
      if (d == full) {
        to_full[s - 1] += it.value();
      } else if (d != 0) {
        triplets.emplace_back(s - 1, d - 1, -it.value());
      }
    }
  }
  Eigen::SparseMatrix<double, Eigen::ColMajor, Index> system(m, m);
  system.setFromTriplets(triplets.begin(), triplets.end());
  system.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, Index>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) {
    throw Error("singular_system",
                "absorbing-chain system is singular: some configuration never absorbs");
  }

  const Eigen::VectorXd h = lu.solve(to_full);
  const Eigen::VectorXd g = Eigen::VectorXd::Ones(m) - h;
  // u = E[T 1_fix], v = E[T 1_ext], w = E[T] satisfy (I - Q) x = rhs.
  const Eigen::VectorXd u = lu.solve(h);
  const Eigen::VectorXd v = lu.solve(g);
  const Eigen::VectorXd w = lu.solve(Eigen::VectorXd::Ones(m));
  if (lu.info() != Eigen::Success || !h.allFinite() || !w.allFinite()) {
    throw Error("singular_system", "absorbing-chain solve failed");
  }

  constexpr double kImpossible = 1e-15;
  for (Index k = 0; k < m; ++k) {
    const Index s = k + 1;
    fixation_[s] = h[k];
    abs_time_[s] = w[k];
    if (h[k] > kImpossible) fix_time_[s] = u[k] / h[k];
    if (g[k] > kImpossible) ext_time_[s] = v[k] / g[k];
  }
}

double fixation_exact(const ChainModel& chain, const Configuration& config) {
  config.check(chain.n);
  return ChainSolution(chain).fixation(config.bitmask());
}

MeanTimes mean_times_exact(const ChainModel& chain, const Configuration& config) {
  config.check(chain.n);
  const ChainSolution solution(chain);
  const auto state = config.bitmask();
  MeanTimes t;
  t.mean_fixation = solution.mean_fixation_time(state);
  t.mean_extinction = solution.mean_extinction_time(state);
  t.mean_absorption = solution.mean_absorption_time(state);
  t.fixation_defined = !std::isnan(t.mean_fixation);
  t.extinction_defined = !std::isnan(t.mean_extinction);
  return t;
}

Eigen::VectorXd propagate(const ChainModel& chain, const Eigen::VectorXd& distribution) {
  return chain.transitions.transpose() * distribution;
}

Eigen::VectorXd vertex_marginals(Index n, const Eigen::VectorXd& distribution) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  for (Index s = 0; s < distribution.size(); ++s) {
    for (Index i = 0; i < n; ++i) {
      if (is_mutant(static_cast<std::uint64_t>(s), i)) p[i] += distribution[s];
    }
  }
  return p;
}

}  // namespace fixlab
