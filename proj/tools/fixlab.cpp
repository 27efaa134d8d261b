// fixlab command-line front end.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "fixlab/bounds.hpp"
#include "fixlab/error.hpp"
#include "fixlab/generators.hpp"
#include "fixlab/graph_io.hpp"
#include "fixlab/monte_carlo.hpp"
#include "fixlab/mttf.hpp"
#include "fixlab/oracle.hpp"
#include "fixlab/solver.hpp"

using json = nlohmann::ordered_json;
using namespace fixlab;

namespace {

constexpr const char* kCommands[] = {"generate", "solve",    "trajectory", "simulate", "bounds",
                                     "mttf",     "compare",  "oracle",     "amplifier"};

// Everything a command needs; serialized as the run manifest.
struct Request {
  std::string command;
  std::string graph;
  std::string generate;
  std::string config = "0";
  std::string rule = "bd";
  double r = 1.0;
  double epsilon = 1e-6;
  std::string criterion = "range";
  std::size_t runs = 2000;
  std::uint64_t seed = 0;
  std::size_t steps = 100;
  double stop_stdev = 2.5e-6;
  std::size_t max_iters = 10'000'000;
  bool exact = false;
  std::string out;
  unsigned threads = 0;
};

json to_manifest(const Request& q) {
  json j;
  j["command"] = q.command;
  if (!q.graph.empty()) j["graph"] = q.graph;
  if (!q.generate.empty()) j["generate"] = q.generate;
  j["config"] = q.config;
  j["rule"] = q.rule;
  j["r"] = q.r;
  j["epsilon"] = q.epsilon;
  j["criterion"] = q.criterion;
  j["runs"] = q.runs;
  j["seed"] = q.seed;
  j["steps"] = q.steps;
  j["stop_stdev"] = q.stop_stdev;
  j["max_iters"] = q.max_iters;
  j["exact"] = q.exact;
  if (!q.out.empty()) j["out"] = q.out;
  return j;
}

Request from_manifest(const json& j) {
  Request q;
  try {
    q.command = j.at("command").get<std::string>();
    q.graph = j.value("graph", q.graph);
    q.generate = j.value("generate", q.generate);
    q.config = j.value("config", q.config);
    q.rule = j.value("rule", q.rule);
    q.r = j.value("r", q.r);
    q.epsilon = j.value("epsilon", q.epsilon);
    q.criterion = j.value("criterion", q.criterion);
    q.runs = j.value("runs", q.runs);
    q.seed = j.value("seed", q.seed);
    q.steps = j.value("steps", q.steps);
    q.stop_stdev = j.value("stop_stdev", q.stop_stdev);
    q.max_iters = j.value("max_iters", q.max_iters);
    q.exact = j.value("exact", q.exact);
    q.out = j.value("out", q.out);
  } catch (const json::exception& e) {
    throw Error("invalid_argument", std::string("bad manifest: ") + e.what());
  }
  return q;
}

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("FIXLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw Error("invalid_argument", std::string("FIXLAB_THREADS must be a positive integer"));
  }
  return 0;
}

EdgeList load_edges(const Request& q) {
  if (!q.graph.empty() && !q.generate.empty()) {
    throw Error("invalid_argument", "give either --graph or --generate, not both");
  }
  EdgeList list;
  if (!q.generate.empty()) {
    list = generate_edges(parse_generator_spec(q.generate));
  } else if (!q.graph.empty()) {
    list = read_graph(q.graph);
  } else {
    throw Error("invalid_argument", "one of --graph or --generate is required");
  }
  const auto check = validate(list);
  if (!check.ok()) throw Error("invalid_graph", check.summary());
  return list;
}

UpdateRule rule_of(const Request& q) {
  auto rule = parse_rule(q.rule);
  if (!rule) throw Error("invalid_argument", "unknown rule '" + q.rule + "'");
  return *rule;
}

Criterion criterion_of(const Request& q) {
  if (q.criterion == "range") return Criterion::Range;
  if (q.criterion == "stdev") return Criterion::Stdev;
  throw Error("invalid_argument", "unknown criterion '" + q.criterion + "'");
}

Index single_vertex(const Configuration& c) {
  if (c.size() != 1) {
    throw Error("invalid_configuration", "this command takes a single-vertex configuration");
  }
  return c.members().front();
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("io_error", "cannot write " + path);
  out.precision(17);
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow<double>>& rows) {
  out.precision(17);
  out << "t,min,max,avg,stdev,ex\n";
  for (const auto& row : rows) {
    out << row.t << ',' << row.min << ',' << row.max << ',' << row.avg << ',' << row.stdev
        << ',' << row.expected_mutants << '\n';
  }
}

json cmd_generate(const Request& q) {
  if (q.generate.empty()) throw Error("invalid_argument", "generate needs --generate");
  const auto list = load_edges(q);
  const auto text = to_json(list);
  if (q.out.empty()) return json::parse(text);
  open_out(q.out) << text << '\n';
  Graph g(list);
  return {{"n", g.size()}, {"edges", g.edge_count()}, {"out", q.out}};
}

json cmd_solve(const Request& q) {
  Graph g(load_edges(q));
  const auto config = parse_configuration(q.config);
  SolveOptions<double> o;
  o.rule = neutral_rule(rule_of(q));
  o.epsilon = q.epsilon;
  o.criterion = criterion_of(q);
  o.max_iters = q.max_iters;
  o.record_trajectory = !q.out.empty();
  const auto report = solve(g, config, o);
  if (!q.out.empty()) {
    auto out = open_out(q.out);
    write_trace_csv(out, report.trajectory);
  }
  return {{"fixation", report.fixation},   {"tau", report.tau},
          {"lower", report.lower},         {"upper", report.upper},
          {"iterations", report.iterations}, {"converged", report.converged},
          {"stagnated", report.stagnated}, {"rule", to_string(o.rule)},
          {"criterion", q.criterion},      {"epsilon", q.epsilon}};
}

json cmd_trajectory(const Request& q) {
  Graph g(load_edges(q));
  const auto config = parse_configuration(q.config);
  config.check(g.size());
  const auto rule = neutral_rule(rule_of(q));
  const auto rows = trajectory(g, config, rule, q.steps);
  if (q.out.empty()) {
    write_trace_csv(std::cout, rows);
    return nullptr;
  }
  auto out = open_out(q.out);
  write_trace_csv(out, rows);
  const auto& last = rows.back();
  return {{"steps", q.steps},
          {"rule", to_string(rule)},
          {"final_ex", last.expected_mutants},
          {"final_ex_over_n", last.expected_mutants / static_cast<double>(g.size())},
          {"out", q.out}};
}

json cmd_simulate(const Request& q) {
  Graph g(load_edges(q));
  const auto config = parse_configuration(q.config);
  SimulationOptions o;
  o.rule = rule_of(q);
  o.r = q.r;
  o.runs = q.runs;
  o.seed = q.seed;
  o.threads = resolve_threads(q.threads);
  const auto s = estimate(g, config, o);
  return {{"rule", to_string(s.rule)},
          {"r", s.r},
          {"seed", s.seed},
          {"runs", s.runs},
          {"fixations", s.fixations},
          {"extinctions", s.extinctions},
          {"capped", s.capped},
          {"fixation", s.fixation_frequency},
          {"std_error", s.std_error},
          {"mean_fixation_time", s.fixations ? number(s.mean_fixation_time) : json(nullptr)},
          {"fixation_time_std_error", s.fixation_time_std_error},
          {"mean_extinction_time",
           s.extinctions ? number(s.mean_extinction_time) : json(nullptr)},
          {"mean_absorption_time", s.mean_absorption_time},
          {"wall_time", s.wall_time}};
}

json cmd_bounds(const Request& q) {
  Graph g(load_edges(q));
  const Index i = single_vertex(parse_configuration(q.config));
  const auto report = bound_report(g, i, q.r, biased_rule(rule_of(q)), q.epsilon);
  return {{"vertex", i},
          {"rule", to_string(report.rule)},
          {"r", report.r},
          {"lower", report.lower},
          {"upper", report.upper},
          {"vacuous", report.vacuous},
          {"has_formula", report.has_formula}};
}

json cmd_mttf(const Request& q) {
  Graph g(load_edges(q));
  const auto config = parse_configuration(q.config);
  MttfOptions<double> o;
  o.rule = neutral_rule(rule_of(q));
  o.stop_stdev = q.stop_stdev;
  o.max_iters = q.max_iters;
  o.record_trace = !q.out.empty();
  const auto report = mttf_lower_bound(g, config, o);
  if (!q.out.empty()) {
    auto out = open_out(q.out);
    out << "t,p_min,increment,running_sum\n";
    for (const auto& row : report.trace) {
      out << row.t << ',' << row.p_min << ',' << row.increment << ',' << row.running_sum << '\n';
    }
  }
  json j = {{"rule", to_string(o.rule)},
            {"lower_bound", report.lower_bound},
            {"partial_sum", report.partial_sum},
            {"normalizer", report.normalizer},
            {"iterations", report.iterations},
            {"truncated", report.truncated},
            {"negative_increments", report.negative_increments}};
  if (q.exact) j["exact_mean_fixation"] = number(mttf_exact(g, config, o.rule).mean_fixation);
  return j;
}

json cmd_compare(const Request& q) {
  Graph g(load_edges(q));
  const auto config = parse_configuration(q.config);
  if (q.r != 1.0) throw Error("invalid_argument", "the speedup benchmark runs at r = 1");
  SpeedupOptions o;
  o.rule = neutral_rule(rule_of(q));
  o.mc_runs = q.runs;
  o.seed = q.seed;
  o.threads = resolve_threads(q.threads);
  o.max_iters = q.max_iters;
  const auto s = speedup_benchmark(g, config, o);
  if (!q.out.empty()) {
    const bool fresh = !std::filesystem::exists(q.out) || std::filesystem::file_size(q.out) == 0;
    std::ofstream out(q.out, std::ios::app);
    if (!out) throw Error("io_error", "cannot write " + q.out);
    out.precision(17);
    if (fresh) out << "n,rule,r,mc_time,solver_time,speedup\n";
    out << s.n << ',' << to_string(s.rule) << ',' << q.r << ',' << s.mc_time << ','
        << s.solver_time << ',' << s.speedup << '\n';
  }
  return {{"n", s.n},
          {"rule", to_string(s.rule)},
          {"r", q.r},
          {"mc_estimate", s.mc_estimate},
          {"mc_std_error", s.mc_std_error},
          {"solver_estimate", s.solver_estimate},
          {"solver_iterations", s.solver_iterations},
          {"within_band", s.within_band},
          {"mc_time", s.mc_time},
          {"solver_time", s.solver_time},
          {"speedup", s.speedup}};
}

json cmd_oracle(const Request& q) {
  Graph g(load_edges(q));
  const auto config = parse_configuration(q.config);
  config.check(g.size());
  const auto chain = build_chain(g, rule_of(q), q.r);
  ChainSolution sol(chain);
  const auto state = config.bitmask();
  return {{"rule", to_string(chain.rule)},
          {"r", q.r},
          {"states", chain.n_states()},
          {"fixation", sol.fixation(state)},
          {"mean_fixation_time", number(sol.mean_fixation_time(state))},
          {"mean_extinction_time", number(sol.mean_extinction_time(state))},
          {"mean_absorption_time", sol.mean_absorption_time(state)}};
}

json cmd_amplifier(const Request& q) {
  Graph g(load_edges(q));
  const auto st = stats(g);
  if (!st.mean_inverse_degree) {
    throw Error("not_undirected_unweighted",
                "classification needs an undirected, unweighted graph without isolated vertices");
  }
  const double threshold = 1.0 / *st.mean_inverse_degree;
  json vertices = json::array();
  for (Index i = 0; i < g.size(); ++i) {
    const double k = static_cast<double>(g.out_degree(i));
    std::string label = "neutral";
    if (std::abs(k - threshold) > 1e-9 * threshold) label = k < threshold ? "amplifier" : "suppressor";
    vertices.push_back({{"vertex", i}, {"degree", g.out_degree(i)}, {"label", label}});
  }
  return {{"threshold", threshold}, {"vertices", vertices}};
}

json dispatch(const Request& q) {
  if (q.command == "generate") return cmd_generate(q);
  if (q.command == "solve") return cmd_solve(q);
  if (q.command == "trajectory") return cmd_trajectory(q);
  if (q.command == "simulate") return cmd_simulate(q);
  if (q.command == "bounds") return cmd_bounds(q);
  if (q.command == "mttf") return cmd_mttf(q);
  if (q.command == "compare") return cmd_compare(q);
  if (q.command == "oracle") return cmd_oracle(q);
  if (q.command == "amplifier") return cmd_amplifier(q);
  throw Error("invalid_argument", "unknown command '" + q.command + "'");
}

void add_common(CLI::App* sub, Request& q, std::string& save) {
  sub->add_option("--graph", q.graph, "graph file (JSON or edge list)");
  sub->add_option("--generate", q.generate, "generator spec, e.g. ba:n=100,m=1,seed=3");
  sub->add_option("--config", q.config, "mutant vertices, e.g. 0,3 or [0,3]")
      ->capture_default_str();
  sub->add_option("--rule", q.rule, "bd, db, ld, bd-b, bd-d, db-b or db-d")
      ->capture_default_str();
  sub->add_option("--r", q.r, "mutant fitness")->capture_default_str();
  sub->add_option("--epsilon", q.epsilon, "solver tolerance")->capture_default_str();
  sub->add_option("--criterion", q.criterion, "range or stdev")->capture_default_str();
  sub->add_option("--runs", q.runs, "Monte Carlo runs")->capture_default_str();
  sub->add_option("--seed", q.seed, "master seed")->capture_default_str();
  sub->add_option("--steps", q.steps, "trajectory length")->capture_default_str();
  sub->add_option("--stop-stdev", q.stop_stdev, "MTTF stopping threshold")
      ->capture_default_str();
  sub->add_option("--max-iters", q.max_iters, "iteration cap")->capture_default_str();
  sub->add_flag("--exact", q.exact, "mttf: also solve the exact chain");
  sub->add_option("--threads", q.threads, "worker threads (default FIXLAB_THREADS or all cores)");
  sub->add_option("--out", q.out, "CSV or JSON output file");
  sub->add_option("--save-manifest", save, "write the resolved request as a manifest");
}

int fail(const std::string& reason, const std::string& message) {
  json j = {{"reason", reason}, {"message", message}};
  std::cout << j.dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixlab: fixation probabilities on evolutionary graphs"};
  app.require_subcommand(1);

  Request request;
  std::string save;
  for (const char* name : kCommands) add_common(app.add_subcommand(name), request, save);
  std::string manifest;
  auto* run = app.add_subcommand("run", "replay a saved manifest");
  run->add_option("manifest", manifest, "manifest file")->required();
  run->add_option("--threads", request.threads, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "run") {
      std::ifstream in(manifest);
      if (!in) throw Error("io_error", "cannot read " + manifest);
      const unsigned threads = request.threads;
      json parsed;
      try {
        parsed = json::parse(in);
      } catch (const json::exception& e) {
        throw Error("invalid_argument", std::string("bad manifest: ") + e.what());
      }
      request = from_manifest(parsed);
      request.threads = threads;
    } else {
      request.command = sub->get_name();
    }
    if (!save.empty()) open_out(save) << to_manifest(request).dump(2) << '\n';
    const auto result = dispatch(request);
    if (!result.is_null()) std::cout << result.dump(2) << '\n';
    return 0;
  } catch (const Error& e) {
    return fail(e.reason(), e.what());
  } catch (const std::exception& e) {
    return fail("internal_error", e.what());
  }
}
