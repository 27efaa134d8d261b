#include <doctest.h>

#include "fixlab/mttf.hpp"
#include "fixlab/monte_carlo.hpp"
#include "support.hpp"

using namespace fixlab;
using namespace fixlab::testing;

TEST_CASE("MTTF lower bound on the 2-cycle is tight") {
  MttfOptions<double> o;
  o.record_trace = true;
  auto r = mttf_lower_bound(two_cycle(), Configuration{0}, o);
  CHECK(r.partial_sum == 0.5);
  CHECK(r.normalizer == 0.5);
  CHECK(r.lower_bound == 1.0);
  CHECK(r.iterations == 1);
  REQUIRE(r.trace.size() == 2);
  CHECK(r.trace[1].increment == 0.5);
  CHECK(r.trace[1].running_sum == 0.5);

  auto exact = mttf_exact(two_cycle(), Configuration{0}, UpdateRule::BD);
  CHECK(exact.mean_fixation == doctest::Approx(1.0));
  CHECK(exact.mean_absorption == doctest::Approx(1.0));
}

TEST_CASE("already fixated configurations have zero time") {
  auto r = mttf_lower_bound(directed_cycle(4), Configuration::all(4));
  CHECK(r.lower_bound == 0.0);
  CHECK(r.iterations == 0);
  auto exact = mttf_exact(directed_cycle(4), Configuration::all(4), UpdateRule::BD);
  CHECK(exact.mean_fixation == 0.0);
  CHECK(exact.fixation_defined);
  CHECK_FALSE(exact.extinction_defined);
}

TEST_CASE("MTTF lower bound errors") {
  CHECK_THROWS_AS(mttf_lower_bound(directed_cycle(3), Configuration{}), Error);
  CHECK_THROWS_AS(mttf_lower_bound(Graph(EdgeList{2, {{0, 1, 1.0}}}), Configuration{0}), Error);
}

TEST_CASE("MTTF lower bound stays below the exact conditional time") {
  const auto g3 = directed_cycle(3);
  auto bound = mttf_lower_bound(g3, Configuration{0});
  auto exact = mttf_exact(g3, Configuration{0}, UpdateRule::BD);
  CHECK(bound.lower_bound <= exact.mean_fixation);
  CHECK(bound.lower_bound > 0.0);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = random_digraph(6, seed + 1200);
    for (auto rule : {UpdateRule::BD, UpdateRule::DB, UpdateRule::LD}) {
      MttfOptions<double> o;
      o.rule = rule;
      auto b = mttf_lower_bound(g, Configuration{1}, o);
      auto e = mttf_exact(g, Configuration{1}, rule);
      CHECK(b.lower_bound <= e.mean_fixation);
      if (rule == UpdateRule::BD) CHECK(b.negative_increments == 0);
    }
  }
}

TEST_CASE("truncated MTTF accumulation is still a lower bound") {
  auto g = random_digraph(6, 42);
  MttfOptions<double> o;
  o.max_iters = 5;
  auto b = mttf_lower_bound(g, Configuration{0}, o);
  CHECK(b.truncated);
  CHECK(b.iterations == 5);
  CHECK(b.lower_bound <= mttf_exact(g, Configuration{0}, UpdateRule::BD).mean_fixation);
}

TEST_CASE("exact mean fixation time on the 3-cycle agrees with simulation") {
  const auto g = directed_cycle(3);
  auto exact = mttf_exact(g, Configuration{0}, UpdateRule::BD);
  SimulationOptions o;
  o.runs = 20000;
  o.seed = 5;
  o.threads = 2;
  auto sim = estimate(g, Configuration{0}, o);
  CHECK(std::abs(sim.mean_fixation_time - exact.mean_fixation) <=
        3 * sim.fixation_time_std_error);
  CHECK(std::abs(sim.mean_absorption_time - exact.mean_absorption) <=
        3 * sim.absorption_time_std_error);
}
