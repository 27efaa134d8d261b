// Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "fixlab/bounds.hpp"
#include "fixlab/generators.hpp"
#include "fixlab/monte_carlo.hpp"
#include "fixlab/mttf.hpp"
#include "fixlab/oracle.hpp"
#include "fixlab/solver.hpp"
#include "support.hpp"

using namespace fixlab;
using namespace fixlab::testing;

namespace {

using Clock = std::chrono::steady_clock;

constexpr UpdateRule kNeutral[] = {UpdateRule::BD, UpdateRule::DB, UpdateRule::LD};
constexpr UpdateRule kBiased[] = {UpdateRule::BD_B, UpdateRule::BD_D, UpdateRule::DB_B,
                                  UpdateRule::DB_D, UpdateRule::LD};
constexpr UpdateRule kWithBounds[] = {UpdateRule::BD_B, UpdateRule::BD_D, UpdateRule::DB_B,
                                      UpdateRule::DB_D};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Index pick(std::mt19937_64& rng, Index n) {
  return std::uniform_int_distribution<Index>(0, n - 1)(rng);
}

SolveOptions<double> tight(UpdateRule rule, double epsilon) {
  SolveOptions<double> o;
  o.rule = rule;
  o.epsilon = epsilon;
  return o;
}

Graph generated(GeneratorKind kind, Index n, std::uint64_t seed, Weighting weighting,
                double p = 0.5, Index m = 1, Index k = 2) {
  GeneratorSpec spec;
  spec.kind = kind;
  spec.n = n;
  spec.seed = seed;
  spec.weighting = weighting;
  spec.p = p;
  spec.m = m;
  spec.k = k;
  return generate(spec);
}

Index lowest_degree_vertex(const Graph& g) {
  Index best = 0;
  for (Index i = 1; i < g.size(); ++i)
    if (g.out_degree(i) < g.out_degree(best)) best = i;
  return best;
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Index n = 4 + k % 5;
    auto g = random_digraph(n, 10'000 + static_cast<std::uint64_t>(k));
    const Configuration c{pick(rng, n)};
    for (auto rule : kNeutral) {
      const double iterative = solve(g, c, tight(rule, 1e-8)).fixation;
      const double exact = fixation_exact(build_chain(g, rule, 1.0), c);
      worst = std::max(worst, std::abs(iterative - exact));
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-6 && elapsed < 60.0,
          fmt("max |solve - exact| = %.3g over 150 solves, %.2f s", worst, elapsed)};
}

Outcome additivity() {
  const double eps = 1e-8;
  std::mt19937_64 rng(202);
  double worst_partition = 0.0;
  double worst_pair = 0.0;
  bool pass = true;
  for (int k = 0; k < 20; ++k) {
    const Index n = 4 + k % 5;
    auto g = random_digraph(n, 20'000 + static_cast<std::uint64_t>(k));
    for (auto rule : kNeutral) {
      const auto o = tight(rule, eps);
      std::vector<double> single(static_cast<std::size_t>(n));
      double total = 0.0;
      for (Index i = 0; i < n; ++i) {
        single[static_cast<std::size_t>(i)] = solve(g, Configuration{i}, o).fixation;
        total += single[static_cast<std::size_t>(i)];
      }
      const double partition = std::abs(total - 1.0);
      worst_partition = std::max(worst_partition, partition);
      pass = pass && partition <= static_cast<double>(n) * eps;
      for (int trial = 0; trial < 3; ++trial) {
        std::vector<Index> ids(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
        std::shuffle(ids.begin(), ids.end(), rng);
        const auto split = static_cast<std::size_t>(1 + pick(rng, n - 2));
        const auto rest = static_cast<std::size_t>(1 + pick(rng, n - static_cast<Index>(split) - 1));
        const Configuration c(std::vector<Index>(ids.begin(), ids.begin() + split));
        const Configuration d(
            std::vector<Index>(ids.begin() + split, ids.begin() + split + rest));
        const double defect = additivity_check(g, c, d, o).defect;
        worst_pair = std::max(worst_pair, defect);
        pass = pass && defect <= 3 * eps;
      }
    }
  }
  return {pass, fmt("max |sum F_i - 1| = %.3g, max pairwise defect = %.3g", worst_partition,
                    worst_pair)};
}

Outcome closed_form() {
  double worst_bd = 0.0;
  double worst_db = 0.0;
  constexpr GeneratorKind kinds[] = {GeneratorKind::ErdosRenyi, GeneratorKind::PreferentialAttachment,
                                     GeneratorKind::SmallWorld};
  for (int k = 0; k < 20; ++k) {
    const Index n = 10 + (k * 7) % 21;
    const auto kind = kinds[k % 3];
    auto g = generated(kind, n, 30'000 + static_cast<std::uint64_t>(k), Weighting::Unweighted,
                       kind == GeneratorKind::ErdosRenyi ? 0.25 : 0.3, 1 + k % 2, 2 + 2 * (k % 2));
    for (Index i = 0; i < n; ++i) {
      const Configuration c{i};
      const double bd = solve(g, c, tight(UpdateRule::BD, 1e-7)).fixation;
      const double db = solve(g, c, tight(UpdateRule::DB, 1e-7)).fixation;
      worst_bd = std::max(worst_bd, std::abs(bd - undirected_closed_form(g, i, UpdateRule::BD).fixation));
      worst_db = std::max(worst_db, std::abs(db - undirected_closed_form(g, i, UpdateRule::DB).fixation));
    }
  }
  return {worst_bd <= 1e-5 && worst_db <= 1e-5,
          fmt("max error BD = %.3g, DB = %.3g", worst_bd, worst_db)};
}

Outcome bracket_discipline() {
  std::mt19937_64 rng(404);
  std::size_t monotone_violations = 0;
  std::size_t outside = 0;
  std::size_t rows = 0;
  for (int k = 0; k < 30; ++k) {
    const Index n = 4 + k % 5;
    auto g = random_digraph(n, 40'000 + static_cast<std::uint64_t>(k));
    const Configuration c{pick(rng, n)};
    auto o = tight(UpdateRule::BD, 1e-9);
    o.record_trajectory = true;
    const auto report = solve(g, c, o);
    const double exact = fixation_exact(build_chain(g, UpdateRule::BD, 1.0), c);
    const auto& trace = report.trajectory;
    for (std::size_t t = 0; t < trace.size(); ++t) {
      ++rows;
      if (exact < trace[t].min - 1e-14 || exact > trace[t].max + 1e-14) ++outside;
      if (t == 0) continue;
      if (trace[t].min < trace[t - 1].min - 1e-14) ++monotone_violations;
      if (trace[t].max > trace[t - 1].max + 1e-14) ++monotone_violations;
    }
  }
  return {monotone_violations == 0 && outside == 0,
          fmt("%zu trace rows, %zu monotonicity violations, %zu brackets missing the oracle",
              rows, monotone_violations, outside)};
}

Outcome advantage_helps() {
  std::mt19937_64 rng(505);
  std::size_t violations = 0;
  std::size_t checks = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 30; ++k) {
    const Index n = 3 + k % 5;
    auto g = random_digraph(n, 50'000 + static_cast<std::uint64_t>(k));
    const Configuration c{pick(rng, n)};
    for (auto rule : kBiased) {
      const double neutral = fixation_exact(build_chain(g, rule, 1.0), c);
      for (double r : {1.5, 2.0}) {
        const double biased = fixation_exact(build_chain(g, rule, r), c);
        worst = std::min(worst, biased - neutral);
        ++checks;
        if (biased < neutral) ++violations;
      }
    }
  }
  return {violations == 0,
          fmt("%zu comparisons, %zu violations, min(F_r - F_1) = %.3g", checks, violations, worst)};
}

Outcome upper_bounds() {
  std::mt19937_64 rng(606);
  std::size_t violations = 0;
  std::size_t checks = 0;
  std::size_t vacuous = 0;
  for (int k = 0; k < 30; ++k) {
    const Index n = 3 + k % 5;
    auto g = random_digraph(n, 60'000 + static_cast<std::uint64_t>(k));
    const Index i = pick(rng, n);
    for (auto rule : kWithBounds) {
      for (double r : {1.5, 2.0}) {
        const double exact = fixation_exact(build_chain(g, rule, r), Configuration{i});
        const auto ub = upper_bound_single(g, i, r, rule);
        ++checks;
        if (ub.vacuous) ++vacuous;
        if (exact > ub.value + 1e-12) ++violations;
      }
    }
  }
  return {violations == 0, fmt("%zu comparisons, %zu violations (%zu bounds clamped at 1)", checks,
                               violations, vacuous)};
}

Outcome mttf() {
  std::mt19937_64 rng(707);
  std::size_t violations = 0;
  std::size_t checks = 0;
  double tightest_exact = 0.0;
  for (Index n : {6, 8}) {
    for (int k = 0; k < 5; ++k) {
      auto g = random_er_weighted(n, 70'000 + static_cast<std::uint64_t>(n * 10 + k));
      const Configuration c{pick(rng, n)};
      const double bound = mttf_lower_bound(g, c).lower_bound;
      const double exact = mttf_exact(g, c, UpdateRule::BD).mean_fixation;
      ++checks;
      if (bound > exact) ++violations;
      tightest_exact = std::max(tightest_exact, bound / exact);
    }
  }
  double tightest_sim = 0.0;
  for (Index n : {10, 20}) {
    for (int k = 0; k < 5; ++k) {
      auto g = random_er_weighted(n, 71'000 + static_cast<std::uint64_t>(n * 10 + k));
      const Configuration c{pick(rng, n)};
      const double bound = mttf_lower_bound(g, c).lower_bound;
      SimulationOptions o;
      o.runs = 10'000;
      o.seed = 7'000 + static_cast<std::uint64_t>(n * 10 + k);
      const auto sim = estimate(g, c, o);
      ++checks;
      if (sim.fixations == 0 ||
          bound > sim.mean_fixation_time + 3 * sim.fixation_time_std_error) {
        ++violations;
      }
      if (sim.fixations > 0) tightest_sim = std::max(tightest_sim, bound / sim.mean_fixation_time);
    }
  }
  return {violations == 0,
          fmt("%zu comparisons, %zu violations; max bound/exact = %.3f, max bound/simulated = %.3f",
              checks, violations, tightest_exact, tightest_sim)};
}

Outcome calibration() {
  std::mt19937_64 rng(808);
  std::size_t frequency_misses = 0;
  std::size_t frequency_checks = 0;
  double worst_z = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Index n = 4 + k;
    auto g = random_digraph(n, 80'000 + static_cast<std::uint64_t>(k));
    const Configuration c{pick(rng, n)};
    for (auto rule : kBiased) {
      for (double r : {1.0, 1.5, 2.0}) {
        SimulationOptions o;
        o.rule = rule;
        o.r = r;
        o.runs = 4000;
        o.seed = 8'000 + static_cast<std::uint64_t>(k);
        const auto sim = estimate(g, c, o);
        const double exact = fixation_exact(build_chain(g, rule, r), c);
        const double z = std::abs(sim.fixation_frequency - exact) / sim.std_error;
        worst_z = std::max(worst_z, z);
        ++frequency_checks;
        if (!(z <= 4.0)) ++frequency_misses;
      }
    }
  }

  // One event from a fixed mutant set, tallied against the exact transition row.
  constexpr int kEvents = 100'000;
  std::size_t transition_misses = 0;
  std::size_t transition_checks = 0;
  for (int k = 0; k < 3; ++k) {
    const Index n = 5 + k;
    auto g = random_digraph(n, 81'000 + static_cast<std::uint64_t>(k), 0.4);
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    const std::uint64_t start = 0b1011 & full;
    std::vector<Index> ids;
    for (Index v = 0; v < n; ++v)
      if (start >> v & 1U) ids.push_back(v);
    const Configuration c(ids);
    for (auto rule : kBiased) {
      for (double r : {1.0, 1.5, 2.0}) {
        const auto chain = build_chain(g, rule, r);
        Simulator sim(g, rule, r);
        auto engine = run_engine(81'000 + static_cast<std::uint64_t>(k), 0);
        std::vector<int> counts(static_cast<std::size_t>(full + 1), 0);
        for (int e = 0; e < kEvents; ++e) {
          sim.reset(c);
          sim.step(engine);
          ++counts[static_cast<std::size_t>(sim.state_mask())];
        }
        for (std::uint64_t dest = 0; dest <= full; ++dest) {
          const double p =
              chain.transitions.coeff(static_cast<Index>(start), static_cast<Index>(dest));
          const double f = counts[static_cast<std::size_t>(dest)] / static_cast<double>(kEvents);
          ++transition_checks;
          if (std::abs(f - p) > 4 * std::sqrt(p * (1 - p) / kEvents) + 1e-12) ++transition_misses;
        }
      }
    }
  }
  return {frequency_misses == 0 && transition_misses == 0,
          fmt("%zu fixation checks (max |z| = %.2f, %zu beyond 4 SE); %zu transition cells, %zu "
              "beyond 4 sigma",
              frequency_checks, worst_z, frequency_misses, transition_checks, transition_misses)};
}

// Speedup averaged on a log scale (geometric mean) over several initial mutants.
Outcome speedup() {
  auto g = generated(GeneratorKind::PreferentialAttachment, 100, 90'001, Weighting::Random);
  std::mt19937_64 rng(909);
  constexpr int kConfigs = 5;
  double log_total = 0.0;
  int in_band = 0;
  std::string each;
  for (int k = 0; k < kConfigs; ++k) {
    SpeedupOptions o;
    o.mc_runs = 2000;
    o.seed = 9'000 + static_cast<std::uint64_t>(k);
    o.threads = 1;
    const auto s = speedup_benchmark(g, Configuration{pick(rng, 100)}, o);
    log_total += std::log(s.speedup);
    if (s.within_band) ++in_band;
    each += fmt("%s%.3g", k ? ", " : "", s.speedup);
  }
  const double mean = std::exp(log_total / kConfigs);
  return {mean >= 10.0, fmt("geometric mean speedup %.1fx over %d initial mutants (%s; %d/%d "
                            "inside the standard-error band)",
                            mean, kConfigs, each.c_str(), in_band, kConfigs)};
}

// Singleton fixation probabilities of every vertex at once: the left fixed
// vector of the BD kernel, from a dense solve.
Eigen::VectorXd stationary_fixation(const Graph& g) {
  const Index n = g.size();
  const NeutralKernel<double> kernel(g, UpdateRule::BD);
  Eigen::MatrixXd m(n, n);
  for (Index j = 0; j < n; ++j) m.col(j) = kernel(Eigen::VectorXd::Unit(n, j));
  Eigen::MatrixXd a = m.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[n - 1] = 1.0;
  return a.partialPivLu().solve(b);
}

struct TraceHits {
  std::size_t avg = 0;
  std::size_t min = 0;
  std::size_t max = 0;
  std::size_t rises = 0;
  std::size_t checkpoints = 0;
};

TraceHits trace_hits(const Graph& g, Index mutant, double final_value) {
  constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
  TraceHits h{kNever, kNever, kNever, 0, 0};
  ProbabilityIteration<double> it(g, Configuration{mutant}, UpdateRule::BD);
  double last_stdev = std::numeric_limits<double>::infinity();
  std::size_t next_checkpoint = 1;
  for (;;) {
    const auto s = summarize(it.current());
    const std::size_t t = it.t();
    if (h.avg == kNever && std::abs(s.avg - final_value) <= 1e-3) h.avg = t;
    if (h.min == kNever && std::abs(s.min - final_value) <= 1e-3) h.min = t;
    if (h.max == kNever && std::abs(s.max - final_value) <= 1e-3) h.max = t;
    if (t == next_checkpoint) {
      if (s.stdev > last_stdev) ++h.rises;
      last_stdev = s.stdev;
      ++h.checkpoints;
      next_checkpoint *= 2;
    }
    if (h.avg != kNever && h.min != kNever && h.max != kNever) return h;
    it.advance();
  }
}

// Random-weight BA graphs with the mutant on a random vertex whose fixation
// probability is at least 1/N, so the 1e-3 band is at most a tenth of it.
Outcome convergence_traces() {
  constexpr Index n = 100;
  constexpr int kInstances = 3;
  int passed = 0;
  std::string each;
  for (int k = 0; k < kInstances; ++k) {
    auto g = generated(GeneratorKind::PreferentialAttachment, n,
                       100'001 + static_cast<std::uint64_t>(k), Weighting::Random);
    const Eigen::VectorXd fixation = stationary_fixation(g);
    std::mt19937_64 rng(static_cast<std::uint64_t>(k));
    Index mutant = pick(rng, n);
    while (fixation[mutant] < 1.0 / static_cast<double>(n)) mutant = pick(rng, n);
    const auto h = trace_hits(g, mutant, fixation[mutant]);
    const bool ok = h.avg < h.min && h.avg < h.max && h.rises == 0;
    if (ok) ++passed;
    each += fmt("%s[F=%.4f: avg t=%zu, min t=%zu, max t=%zu, stdev rises %zu/%zu]",
                k ? " " : "", fixation[mutant], h.avg, h.min, h.max, h.rises, h.checkpoints);
  }
  return {passed == kInstances, fmt("%d/%d instances show both properties %s", passed,
                                    kInstances, each.c_str())};
}

// An ER core plus a mutant source mn and a resident source rn, each with a
// single edge into the core.
Graph sources_into_core(const EdgeList& core, Index con_mn, Index con_rn) {
  EdgeList list = core;
  const Index mn = core.n;
  const Index rn = core.n + 1;
  list.n = core.n + 2;
  list.edges.push_back({mn, con_mn, 1.0});
  list.edges.push_back({rn, con_rn, 1.0});
  return Graph(list);
}

double long_run_ex_fraction(const Graph& g) {
  const Index mn = g.size() - 2;
  ProbabilityIteration<double> it(g, Configuration{mn}, UpdateRule::BD);
  double previous = -1.0;
  for (std::size_t t = 0; t < 5'000'000; ++t) {
    it.advance();
    if (it.t() % 1000 == 0) {
      const double ex = it.current().sum();
      if (std::abs(ex - previous) < 1e-10) break;
      previous = ex;
    }
  }
  return it.current().sum() / static_cast<double>(g.size());
}

Outcome trajectory_phenomena() {
  constexpr int kSeeds = 50;
  constexpr Index n = 100;
  // "Early" is the first fifth of a generation: t = 1 .. N/5 events.
  constexpr std::size_t kEarly = static_cast<std::size_t>(n / 5);
  struct Family {
    const char* name;
    GeneratorKind kind;
    std::vector<double> early = std::vector<double>(kEarly + 1, 0.0);
    double plateau = 0.0;
  };
  Family families[] = {{"BA", GeneratorKind::PreferentialAttachment},
                       {"ER", GeneratorKind::ErdosRenyi},
                       {"NWS", GeneratorKind::SmallWorld}};
  for (auto& family : families) {
    for (int s = 0; s < kSeeds; ++s) {
      auto g = generated(family.kind, n, 110'000 + static_cast<std::uint64_t>(s),
                         Weighting::Unweighted, 0.5, 1, 2);
      const Configuration c{lowest_degree_vertex(g)};
      const auto rows = trajectory(g, c, UpdateRule::BD, kEarly);
      for (std::size_t t = 0; t <= kEarly; ++t) family.early[t] += rows[t].expected_mutants / kSeeds;
      family.plateau +=
          static_cast<double>(n) * solve(g, c, tight(UpdateRule::BD, 1e-7)).fixation / kSeeds;
    }
  }
  const auto& ba = families[0];
  std::size_t early_losses = 0;
  for (std::size_t t = 1; t <= kEarly; ++t) {
    if (!(ba.early[t] > families[1].early[t] && ba.early[t] > families[2].early[t])) {
      ++early_losses;
    }
  }
  const bool ordering = early_losses == 0 && ba.plateau < families[1].plateau &&
                        ba.plateau < families[2].plateau;

  GeneratorSpec spec;
  spec.kind = GeneratorKind::ErdosRenyi;
  spec.n = n;
  spec.p = 0.1;
  spec.seed = 111'111;
  spec.weighting = Weighting::Unweighted;
  const auto core = generate_edges(spec);
  const Graph plain(core);
  std::vector<Index> by_degree(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) by_degree[static_cast<std::size_t>(i)] = i;
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](Index a, Index b) { return plain.out_degree(a) < plain.out_degree(b); });
  Index a = -1, b = -1;
  for (std::size_t k = static_cast<std::size_t>(n / 2); k + 1 < by_degree.size(); ++k) {
    if (plain.out_degree(by_degree[k]) == plain.out_degree(by_degree[k + 1])) {
      a = by_degree[k];
      b = by_degree[k + 1];
      break;
    }
  }
  const double equal = long_run_ex_fraction(sources_into_core(core, a, b));
  const double low_mn =
      long_run_ex_fraction(sources_into_core(core, by_degree.front(), by_degree.back()));
  const bool sources = std::abs(equal - 0.5) <= 0.05 && low_mn > 0.5;

  return {ordering && sources,
          fmt("Ex(t=N/5): BA %.3f, ER %.3f, NWS %.3f (BA behind at %zu of %zu early steps); "
              "plateau: BA %.3f, ER %.3f, NWS %.3f; mn/rn equal degree (k=%lld) Ex/N = %.3f, "
              "k_mn < k_rn Ex/N = %.3f",
              ba.early[kEarly], families[1].early[kEarly], families[2].early[kEarly], early_losses,
              kEarly, ba.plateau, families[1].plateau,
              families[2].plateau, static_cast<long long>(a >= 0 ? plain.out_degree(a) : -1),
              equal, low_mn)};
}

}  // namespace

int main() {
  struct Check {
    const char* name;
    std::function<Outcome()> run;
  };
  const Check criteria[] = {
      {"oracle equivalence", oracle_equivalence},
      {"additivity", additivity},
      {"undirected closed form", closed_form},
      {"bracket discipline", bracket_discipline},
      {"advantage never hurts", advantage_helps},
      {"upper bounds", upper_bounds},
      {"MTTF lower bound", mttf},
      {"Monte Carlo calibration", calibration},
      {"speedup", speedup},
      {"convergence traces", convergence_traces},
      {"trajectory phenomena", trajectory_phenomena},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %2d %-24s %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL", index, c.name,
                outcome.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
