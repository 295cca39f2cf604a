// Command-line front end: solve, trace, bench and gen subcommands.

#include "walras/harness.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace walras;

int main(int argc, char** argv) {
  CLI::App app{"Regularized price equilibria via bilevel fixed-point iteration"};
  app.require_subcommand(1);

  std::string eta_text = "auto";
  std::string domain_text = "orthant";

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve one instance and write the report as JSON");
  s->add_option("instance", solve.instance_path, "Instance JSON file")->required();
  s->add_option("--eps", solve.eps, "Relative step stopping threshold")->capture_default_str();
  s->add_option("--max-iter", solve.max_iter, "Iteration cap")->capture_default_str();
  s->add_option("--eta", eta_text, "Natural-map step: a number or 'auto' (= mu_F)")->capture_default_str();
  s->add_option("--schedule", solve.schedule, "Step schedule")->check(CLI::IsMember({"sqrt"}))->capture_default_str();
  s->add_option("--trace-every", solve.trace_every, "Sample the VI residual every N iterations")->capture_default_str();
  s->add_option("-o,--out", solve.out_path, "Report JSON path (stdout if omitted)");
  s->add_option("--trace", solve.trace_path, "Optional trace CSV path");

  TraceArgs trace;
  auto* t = app.add_subcommand("trace", "Solve one instance and write the per-iteration trace CSV");
  t->add_option("instance", trace.instance_path, "Instance JSON file")->required();
  t->add_option("--csv", trace.csv_path, "Trace CSV path (stdout if omitted)");
  t->add_option("--eps", trace.eps)->capture_default_str();
  t->add_option("--max-iter", trace.max_iter)->capture_default_str();
  t->add_option("--eta", eta_text)->capture_default_str();
  t->add_option("--schedule", trace.schedule)->check(CLI::IsMember({"sqrt"}))->capture_default_str();
  t->add_option("--trace-every", trace.trace_every)->capture_default_str();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Benchmark sweep over generated instances");
  b->add_option("--n", bench.n_list, "Dimensions, paired with --m by position")->required()->delimiter(',');
  b->add_option("--m", bench.m_list, "Constraint counts")->required()->delimiter(',');
  b->add_option("--trials", bench.trials)->capture_default_str();
  b->add_option("--domain", domain_text)->check(CLI::IsMember({"orthant", "box"}))->capture_default_str();
  b->add_option("--seed", bench.seed)->capture_default_str();
  b->add_option("--eps", bench.eps)->capture_default_str();
  b->add_option("--max-iter", bench.max_iter)->capture_default_str();
  b->add_option("--eta", eta_text)->capture_default_str();
  b->add_option("--schedule", bench.schedule)->check(CLI::IsMember({"sqrt"}))->capture_default_str();
  b->add_option("--jobs", bench.jobs, "Trials solved concurrently")->capture_default_str();
  b->add_option("--csv", bench.csv_path, "Results CSV path (stdout if omitted)");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write one generated instance as JSON");
  g->add_option("--n", gen.config.n)->capture_default_str();
  g->add_option("--m", gen.config.m)->capture_default_str();
  g->add_option("--domain", domain_text)->check(CLI::IsMember({"orthant", "box"}))->capture_default_str();
  g->add_option("--seed", gen.config.seed)->capture_default_str();
  g->add_option("-o,--out", gen.out_path, "Output path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    const EtaSetting eta = EtaSetting::parse(eta_text);
    const PriceDomain::Kind domain = parse_domain(domain_text);
    if (s->parsed()) {
      solve.eta = eta;
      return cmd_solve(solve, std::cout, std::cerr);
    }
    if (t->parsed()) {
      trace.eta = eta;
      return cmd_trace(trace, std::cout, std::cerr);
    }
    if (b->parsed()) {
      bench.eta = eta;
      bench.domain_kind = domain;
      return cmd_bench(bench, std::cout, std::cerr);
    }
    gen.config.domain_kind = domain;
    return cmd_gen(gen, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
