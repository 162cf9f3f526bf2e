// Copyright 2026 The ssmatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// ssmatch: command-line front end (gen, solve, round, verify, bench, report).
// Exit codes: 0 success, 2 budget or width violation, 3 verification
// failure, 1 anything else.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ssmatch/bench.hpp"
#include "ssmatch/generators.hpp"
#include "ssmatch/lp_model.hpp"
#include "ssmatch/mwu_engine.hpp"
#include "ssmatch/rounding.hpp"
#include "ssmatch/stream_core.hpp"

namespace {

using namespace ssmatch;

struct Options {
  std::string input;
  std::string output;
  std::string duals;
  std::string fractional;
  std::string matching;
  std::string model;
  std::uint64_t seed = 1;
  double eps = 0.1;
  std::string mode = "card";
  std::string cls = "bipartite";
  std::optional<std::uint64_t> order_seed;
  long long budget_bytes = 0;
  std::string oracle;
  std::string stop = "gap";
  double tmax_scale = 4;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::budget_exceeded:
    case ErrorKind::width_violation:
      return 2;
    case ErrorKind::verification_failed:
    case ErrorKind::certificate_invalid:
      return 3;
    default:
      return 1;
  }
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw Error(ErrorKind::io_failure, "cannot write " + path);
  return file;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_failure, "cannot read " + path);
  return in;
}

void write_stats(std::ostream& out, const RunStats& s) {
  out << "passes " << s.passes << "  iterations " << s.iterations << "  tmax " << s.tmax
      << "  converged " << (s.converged ? "yes" : "no") << '\n'
      << "peak_bytes " << s.peak_bytes << "  budget_bytes " << s.budget_bytes << '\n'
      << "fractional " << detail::format_double(s.fractional_value) << "  best_iterate "
      << detail::format_double(s.best_iterate_value) << "  gap "
      << detail::format_double(s.certificate_gap) << "  wall_ms "
      << detail::format_double(std::chrono::duration<double, std::milli>(s.wall_time).count())
      << '\n';
}

MatchingLP lp_for(const EdgeStream& stream, const Options& o) {
  GraphClass cls = parse_class(o.cls);
  std::optional<std::size_t> left;
  if (cls == GraphClass::bipartite) left = stream.left_size();
  return build_matching_lp(stream.vertex_count(), cls, left, parse_mode(o.mode), o.eps);
}

int cmd_gen(const Options& o) {
  GraphSpec spec = parse_graph_spec(o.model);
  if (o.model.find('@') == std::string::npos) spec.seed = o.seed;
  EdgeList g = generate_graph(spec);
  std::ofstream file;
  write_edge_list(open_out(o.output, file), g);
  return 0;
}

int cmd_solve(const Options& o) {
  EdgeStream stream = open_edge_stream(o.input, o.order_seed);
  MatchingLP lp = lp_for(stream, o);
  SpaceMeter meter(o.budget_bytes > 0 ? o.budget_bytes : SpaceMeter::default_budget(lp.n, o.eps));
  auto oracle = make_oracle(o.oracle, lp);
  MWUConfig cfg = MWUConfig::defaults(o.eps);
  cfg.stop = parse_stop(o.stop);
  cfg.tmax_scale = o.tmax_scale;
  SolveResult res = solve_fractional(stream, lp, cfg, *oracle, meter);
  std::ofstream file;
  write_fractional(open_out(o.output, file), res.x);
  if (!o.duals.empty()) {
    std::ofstream d(o.duals);
    if (!d) throw Error(ErrorKind::io_failure, "cannot write " + o.duals);
    write_duals(d, res.duals);
  }
  write_stats(o.output.empty() || o.output == "-" ? std::cerr : std::cout, res.stats);
  return 0;
}

int cmd_round(const Options& o) {
  auto in = open_in(o.input);
  FractionalMatching x = read_fractional(in);
  const MatchingMode mode = parse_mode(o.mode);
  const double tau = default_support_threshold(o.eps, std::max<std::size_t>(1, x.vertex_count()));
  RoundingReport rep;
  if (parse_class(o.cls) == GraphClass::bipartite) {
    rep = round_bipartite(x, mode, tau);
  } else {
    MatchingLP lp = build_matching_lp(std::max<std::size_t>(1, x.vertex_count()), GraphClass::general,
                                      std::nullopt, mode, o.eps);
    rep = round_general(x, lp, tau);
  }
  std::ofstream file;
  write_matching(open_out(o.output, file), rep.matching);
  std::cerr << "fractional " << detail::format_double(rep.input_value) << "  matching "
            << detail::format_double(rep.matching_value) << "  threshold_loss "
            << detail::format_double(rep.threshold_loss) << '\n';
  return 0;
}

int cmd_verify(const Options& o) {
  StreamOrder order = o.order_seed ? StreamOrder::seeded(*o.order_seed) : StreamOrder::identity();
  EdgeStream stream = looks_like_graph_spec(o.input) ? EdgeStream::from_edges(generate_graph(o.input), order)
                                                     : EdgeStream::open(o.input, order);
  bool ok = true;
  if (!o.matching.empty()) {
    auto in = open_in(o.matching);
    Matching m = read_matching(in);
    const bool present = verify_matching_stream(stream, m);
    std::cout << "matching " << m.size() << " edges: " << (present ? "ok" : "edge missing from stream")
              << '\n';
    ok = ok && present;
  }
  if (!o.fractional.empty() || !o.duals.empty()) {
    if (o.fractional.empty() || o.duals.empty())
      throw Error(ErrorKind::invalid_argument, "certificate check needs --fractional and --duals");
    auto xf = open_in(o.fractional);
    auto df = open_in(o.duals);
    Certificate c = certify_from_artifacts(stream, xf, df, o.eps);
    std::cout << "certificate primal " << detail::format_double(c.primal) << "  dual "
              << detail::format_double(c.dual) << "  gap " << detail::format_double(c.gap) << '\n';
    ok = ok && c.gap <= o.eps;
  }
  if (!ok) throw Error(ErrorKind::verification_failed, "verification failed");
  return 0;
}

int cmd_bench(const Options& o) {
  auto in = open_in(o.input);
  std::ofstream file;
  auto rows = run_benchmark(in, &open_out(o.output, file));
  std::size_t failed = 0;
  for (const auto& r : rows) failed += !r.error.empty();
  std::cerr << rows.size() << " runs, " << failed << " failed\n";
  return 0;
}

int cmd_report(const Options& o) {
  auto in = open_in(o.input);
  std::ofstream file;
  write_report(open_out(o.output, file), read_bench_csv(in));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-streaming maximum matching via multiplicative weights"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--epsilon", o.eps, "Accuracy parameter in (0, 1/2]");
    c->add_option("--mode", o.mode, "card or weighted")->check(CLI::IsMember({"card", "weighted"}));
    c->add_option("--class", o.cls, "bipartite or general")->check(CLI::IsMember({"bipartite", "general"}));
  };

  auto* gen = app.add_subcommand("gen", "Write a generated graph as an edge list");
  gen->add_option("--model", o.model, "e.g. random-bipartite(100,50,0.1) or path(5,weighted)")->required();
  gen->add_option("--seed", o.seed, "Generator seed");
  gen->add_option("--output", o.output, "Edge-list file (default stdout)");

  auto* solve = app.add_subcommand("solve", "Solve the fractional matching LP in passes over the stream");
  solve->add_option("--input", o.input, "Edge-list file or generator spec")->required();
  solve->add_option("--output", o.output, "Fractional solution file (default stdout)");
  solve->add_option("--duals", o.duals, "Write the dual certificate here");
  add_common(solve);
  solve->add_option("--order-seed", o.order_seed, "Seeded stream permutation");
  solve->add_option("--budget-bytes", o.budget_bytes, "Space budget (default 64 n ceil(eps^-3) records)");
  solve->add_option("--oracle", o.oracle, "greedy, weighted or general")
      ->check(CLI::IsMember({"greedy", "weighted", "general"}));
  solve->add_option("--stop", o.stop, "fixed or gap")->check(CLI::IsMember({"fixed", "gap"}));
  solve->add_option("--tmax-scale", o.tmax_scale, "c in T_max = ceil(c rho ln n / eps^2)");

  auto* round = app.add_subcommand("round", "Round a fractional solution to a matching");
  round->add_option("--input", o.input, "Fractional solution file")->required();
  round->add_option("--output", o.output, "Matching file (default stdout)");
  add_common(round);

  auto* verify = app.add_subcommand("verify", "Check a matching and/or a certificate against the stream");
  verify->add_option("--input", o.input, "Edge-list file or generator spec")->required();
  verify->add_option("--matching", o.matching, "Matching file");
  verify->add_option("--fractional", o.fractional, "Fractional solution file");
  verify->add_option("--duals", o.duals, "Dual certificate file");
  verify->add_option("--epsilon", o.eps, "Feasibility slack and gap bound");
  verify->add_option("--order-seed", o.order_seed, "Seeded stream permutation");

  auto* bench = app.add_subcommand("bench", "Run a benchmark config and write CSV");
  bench->add_option("--input", o.input, "Config file")->required();
  bench->add_option("--output", o.output, "CSV file (default stdout)");

  auto* report = app.add_subcommand("report", "Summarize a benchmark CSV");
  report->add_option("--input", o.input, "CSV file")->required();
  report->add_option("--output", o.output, "Report file (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen(o);
    if (*solve) return cmd_solve(o);
    if (*round) return cmd_round(o);
    if (*verify) return cmd_verify(o);
    if (*bench) return cmd_bench(o);
    if (*report) return cmd_report(o);
  } catch (const RunFailure& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    write_stats(std::cerr, e.stats());
    return exit_code(e.kind());
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 1;
}
