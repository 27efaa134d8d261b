#include "fixlab/monte_carlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "fixlab/error.hpp"
#include "fixlab/solver.hpp"

namespace fixlab {

Engine run_engine(std::uint64_t master_seed, std::uint64_t run_index) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffU); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master_seed), hi(master_seed), lo(run_index), hi(run_index)};
  return Engine(seq);
}

Simulator::Simulator(const Graph& g, UpdateRule rule, double r)
    : graph_(&g), n_(g.size()), rule_(biased_rule(rule)), r_(r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error("invalid_argument", "fitness r must be positive");
  }
  max_fitness_ = std::max(1.0, r_);
  max_inverse_fitness_ = std::max(1.0, 1.0 / r_);

  if (n_ > 1) {
    if (family(rule_) == RuleFamily::DeathBirth) {
      for (Index i = 0; i < n_; ++i) {
        if (g.in_degree(i) == 0) {
          throw Error("missing_in_edges", "death-birth update undefined: vertex " +
                                              std::to_string(i) + " has no incoming edge");
        }
      }
    }
    if (rule_ == UpdateRule::LD && g.edge_count() == 0) {
      throw Error("no_edges", "link dynamics undefined on a graph without edges");
    }
  }

  const auto& w = g.weights();
  out_choice_.reserve(static_cast<std::size_t>(n_));
  for (Index i = 0; i < n_; ++i) {
    const auto begin = w.valuePtr() + w.outerIndexPtr()[i];
    const auto end = w.valuePtr() + w.outerIndexPtr()[i + 1];
    out_choice_.emplace_back(begin, end);
    for (Graph::SparseMatrix::InnerIterator it(w, i); it; ++it) {
      edge_source_.push_back(i);
      edge_target_.push_back(it.col());
    }
  }
  mutant_.assign(static_cast<std::size_t>(n_), 0);
  position_.assign(static_cast<std::size_t>(n_), 0);
}

void Simulator::reset(const Configuration& config) {
  config.check(n_);
  mutants_.clear();
  residents_.clear();
  for (Index v = 0; v < n_; ++v) {
    const bool m = config.contains(v);
    mutant_[static_cast<std::size_t>(v)] = m;
    auto& pool = m ? mutants_ : residents_;
    position_[static_cast<std::size_t>(v)] = static_cast<Index>(pool.size());
    pool.push_back(v);
  }
}

std::uint64_t Simulator::state_mask() const {
  std::uint64_t mask = 0;
  for (Index v : mutants_) mask |= std::uint64_t{1} << v;
  return mask;
}

Index Simulator::uniform_vertex(Engine& rng) {
  return std::uniform_int_distribution<Index>(0, n_ - 1)(rng);
}

Index Simulator::uniform_member(const std::vector<Index>& pool, Engine& rng) {
  const auto k = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
  return pool[k];
}

Index Simulator::sample_out(Index i, Engine& rng) {
  const auto& w = graph_->weights();
  const Index k = out_choice_[static_cast<std::size_t>(i)](rng);
  return w.innerIndexPtr()[w.outerIndexPtr()[i] + k];
}

bool Simulator::accept(double probability, Engine& rng) {
  return probability >= 1.0 || unit_(rng) < probability;
}

void Simulator::set_type(Index v, bool mutant) {
  const auto uv = static_cast<std::size_t>(v);
  if ((mutant_[uv] != 0) == mutant) return;
  auto& from = mutant ? residents_ : mutants_;
  auto& to = mutant ? mutants_ : residents_;
  const Index slot = position_[uv];
  const Index moved = from.back();
  from[static_cast<std::size_t>(slot)] = moved;
  position_[static_cast<std::size_t>(moved)] = slot;
  from.pop_back();
  position_[uv] = static_cast<Index>(to.size());
  to.push_back(v);
  mutant_[uv] = mutant;
}

void Simulator::step(Engine& rng) {
  auto fitness = [&](Index v) { return is_mutant(v) ? r_ : 1.0; };
  const auto& in = graph_->incoming();
  auto uniform_in = [&](Index j) {
    const Index k = graph_->in_degree(j);
    const auto pick = std::uniform_int_distribution<Index>(0, k - 1)(rng);
    return in.innerIndexPtr()[in.outerIndexPtr()[j] + pick];
  };
  const double m = static_cast<double>(mutants_.size());
  const double residents = static_cast<double>(n_) - m;

  switch (rule_) {
    case UpdateRule::BD_B: {
      // Birth proportional to fitness: pick the class, then uniformly within it.
      const bool from_mutants = unit_(rng) * (r_ * m + residents) < r_ * m;
      const Index i = uniform_member(from_mutants ? mutants_ : residents_, rng);
      if (graph_->out_degree(i) == 0) return;
      set_type(sample_out(i, rng), is_mutant(i));
      return;
    }
    case UpdateRule::BD_D: {
      const Index i = uniform_vertex(rng);
      if (graph_->out_degree(i) == 0) return;
      Index j;
      do {
        j = sample_out(i, rng);
      } while (!accept((1.0 / fitness(j)) / max_inverse_fitness_, rng));
      set_type(j, is_mutant(i));
      return;
    }
    case UpdateRule::DB_B: {
      const Index j = uniform_vertex(rng);
      if (graph_->in_degree(j) == 0) return;
      Index i;
      do {
        i = uniform_in(j);
      } while (!accept(fitness(i) / max_fitness_, rng));
      set_type(j, is_mutant(i));
      return;
    }
    case UpdateRule::DB_D: {
      // Death proportional to 1/fitness.
      const bool mutant_dies = unit_(rng) * (m / r_ + residents) < m / r_;
      const Index j = uniform_member(mutant_dies ? mutants_ : residents_, rng);
      if (graph_->in_degree(j) == 0) return;
      set_type(j, is_mutant(uniform_in(j)));
      return;
    }
    case UpdateRule::LD: {
      if (edge_source_.empty()) return;
      std::size_t e;
      do {
        e = std::uniform_int_distribution<std::size_t>(0, edge_source_.size() - 1)(rng);
      } while (!accept(fitness(edge_source_[e]) / max_fitness_, rng));
      set_type(edge_target_[e], is_mutant(edge_source_[e]));
      return;
    }
    default:
      return;
  }
}

std::uint64_t default_step_cap(Index n) {
  return std::uint64_t{1'000'000} * static_cast<std::uint64_t>(std::max<Index>(1, n));
}

namespace {

RunResult run_once(Simulator& sim, const Configuration& config, Engine& rng,
                   std::uint64_t cap) {
  sim.reset(config);
  RunResult result;
  while (!sim.absorbed()) {
    if (result.steps >= cap) {
      result.capped = true;
      return result;
    }
    sim.step(rng);
    ++result.steps;
  }
  result.fixated = sim.mutant_count() == sim.size();
  return result;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanAndError mean_and_error(const std::vector<double>& xs) {
  MeanAndError out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    out.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return out;
}

}  // namespace

RunResult simulate_run(const Graph& g, const Configuration& config, UpdateRule rule, double r,
                       std::uint64_t seed, std::uint64_t step_cap) {
  Simulator sim(g, rule, r);
  Engine rng(seed);
  const auto cap = step_cap ? step_cap : default_step_cap(g.size());
  auto result = run_once(sim, config, rng, cap);
  if (result.capped) {
    throw Error("step_cap_exceeded", "run did not absorb within " + std::to_string(cap) +
                                         " events");
  }
  return result;
}

double standard_error(double frequency, std::size_t runs) {
  if (runs < 2) return std::numeric_limits<double>::infinity();
  return std::sqrt(frequency * (1.0 - frequency) / static_cast<double>(runs - 1));
}

SimulationSummary estimate(const Graph& g, const Configuration& config,
                           const SimulationOptions& options) {
  if (options.runs < 2) throw Error("invalid_argument", "Monte Carlo estimate needs R >= 2");
  config.check(g.size());
  const auto start = std::chrono::steady_clock::now();
  const auto cap = options.step_cap ? options.step_cap : default_step_cap(g.size());
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(options.threads), options.runs));

  std::vector<RunResult> results(options.runs);
  auto worker = [&](unsigned id) {
    Simulator sim(g, options.rule, options.r);
    for (std::size_t k = id; k < options.runs; k += threads) {
      auto rng = run_engine(options.seed, k);
      results[k] = run_once(sim, config, rng, cap);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(worker, id);
  }

  SimulationSummary s;
  s.rule = biased_rule(options.rule);
  s.r = options.r;
  s.seed = options.seed;
  std::vector<double> fix_times, ext_times, abs_times;
  for (const auto& run : results) {
    if (run.capped) {
      ++s.capped;
      continue;
    }
    const auto t = static_cast<double>(run.steps);
    abs_times.push_back(t);
    if (run.fixated) {
      fix_times.push_back(t);
    } else {
      ext_times.push_back(t);
    }
  }
  s.runs = abs_times.size();
  s.fixations = fix_times.size();
  s.extinctions = ext_times.size();
  if (s.runs > 0) {
    s.fixation_frequency = static_cast<double>(s.fixations) / static_cast<double>(s.runs);
    s.std_error = standard_error(s.fixation_frequency, s.runs);
  }
  const auto fix = mean_and_error(fix_times);
  const auto absorb = mean_and_error(abs_times);
  s.mean_fixation_time = fix.mean;
  s.fixation_time_std_error = fix.std_error;
  s.mean_extinction_time = mean_and_error(ext_times).mean;
  s.mean_absorption_time = absorb.mean;
  s.absorption_time_std_error = absorb.std_error;
  s.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

RunEstimate required_runs(double solution, double epsilon) {
  if (!(epsilon > 0.0)) throw Error("invalid_argument", "epsilon must be positive");
  if (!(solution >= 0.0 && solution <= 1.0)) {
    throw Error("invalid_argument", "solution must lie in [0,1]");
  }
  RunEstimate out;
  if (solution == 0.0 || solution == 1.0) {
    out.degenerate = true;
    return out;
  }
  const double ratio = solution * (1.0 - solution) / (epsilon * epsilon);
  // Guard against ratios such as 0.25 / 1e-4 landing one ulp above an integer.
  out.runs = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12))) + 1;
  out.runs = std::max<std::size_t>(out.runs, 2);
  return out;
}

SpeedupResult speedup_benchmark(const Graph& g, const Configuration& config,
                                const SpeedupOptions& options) {
  using Clock = std::chrono::steady_clock;
  if (!is_strongly_connected(g)) {
    throw Error("not_strongly_connected", "speedup benchmark requires a strongly connected graph");
  }
  SpeedupResult out;
  out.n = g.size();
  out.rule = neutral_rule(options.rule);

  SimulationOptions mc;
  mc.rule = out.rule;
  mc.r = 1.0;
  mc.runs = options.mc_runs;
  mc.seed = options.seed;
  mc.threads = options.threads;
  const auto summary = estimate(g, config, mc);
  out.mc_time = summary.wall_time;
  out.mc_estimate = summary.fixation_frequency;
  out.mc_std_error = summary.std_error;

  const auto start = Clock::now();
  ProbabilityIteration<double> it(g, config, out.rule);
  VectorSummary<double> s = summarize(it.current());
  // f in {0, 1} gives a zero standard error; fall back to the resolution 1/R.
  const double band = std::max(out.mc_std_error, 1.0 / static_cast<double>(summary.runs));
  const double floor = options.epsilon ? *options.epsilon : band;
  for (;;) {
    if (!options.epsilon && std::abs(s.avg - out.mc_estimate) <= band) break;
    if (s.stdev <= floor) break;
    if (it.t() >= options.max_iters) {
      throw Error("not_converged", "solver did not reach the Monte Carlo precision within " +
                                       std::to_string(options.max_iters) + " iterations");
    }
    it.advance();
    s = summarize(it.current());
  }
  out.solver_time = std::chrono::duration<double>(Clock::now() - start).count();
  out.solver_estimate = s.avg;
  out.solver_iterations = it.t();
  out.within_band = std::abs(s.avg - out.mc_estimate) <= band;
  const double denominator = std::max(out.solver_time, 1e-9);
  out.speedup = out.mc_time / denominator;
  return out;
}

}  // namespace fixlab
