#pragma once

#include "walras/bilevel.hpp"
#include "walras/instance_gen.hpp"
#include "walras/model.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace walras {

/// Exit codes shared by all subcommands.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitIterLimit = 2 };

/// One averaged benchmark line per (n, m).
struct BenchRow {
  int n = 0;
  int m = 0;
  double avg_time_s = 0.0;
  double avg_iterations = 0.0;
  int trials = 0;
  PriceDomain::Kind domain_kind = PriceDomain::Kind::NonnegOrthant;
  std::uint64_t seed_base = 0;
  int iter_limit_trials = 0;  // trials that stopped on the iteration cap

  bool operator==(const BenchRow&) const = default;
};

/// %.17g, which round-trips every finite double.
std::string format_double(double v);

const char* domain_name(PriceDomain::Kind kind);
/// "orthant" or "box"; throws InvalidInput otherwise.
PriceDomain::Kind parse_domain(const std::string& name);

/// Header n,m,avg_time_s,avg_iterations,trials followed by the metadata
/// columns domain,seed_base,iter_limit_trials.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
std::vector<BenchRow> read_bench_csv(std::istream& in);

/// Header k,step_residual,vi_residual,f_value; unsampled vi_residual is an
/// empty field.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(std::istream& in);

nlohmann::json report_to_json(const SolveReport& report, double eps, double eta, const std::string& schedule);

/// Step size option: "auto" means mu_F of each instance.
struct EtaSetting {
  std::optional<double> value;

  static EtaSetting parse(const std::string& text);
  double resolve(const ModelInstance& instance) const { return value.value_or(instance.constants.eta); }
};

struct SolveArgs {
  std::string instance_path;
  double eps = 1e-4;
  int max_iter = 10000;
  EtaSetting eta;
  std::string schedule = "sqrt";
  int trace_every = 10;
  std::string out_path;    // report JSON; stdout when empty
  std::string trace_path;  // optional trace CSV
};

struct BenchArgs {
  std::vector<int> n_list;
  std::vector<int> m_list;
  int trials = 10;
  PriceDomain::Kind domain_kind = PriceDomain::Kind::NonnegOrthant;
  std::uint64_t seed = 42;
  double eps = 1e-4;
  int max_iter = 10000;
  EtaSetting eta;
  std::string schedule = "sqrt";
  int jobs = 1;
  std::string csv_path;  // stdout when empty
};

struct TraceArgs {
  std::string instance_path;
  std::string csv_path;  // stdout when empty
  double eps = 1e-4;
  int max_iter = 10000;
  EtaSetting eta;
  std::string schedule = "sqrt";
  int trace_every = 10;
};

struct GenArgs {
  GenConfig config;
  std::string out_path;  // stdout when empty
};

/// Per-trial outcome of a sweep, ordered by trial index (seed = seed_base + t).
struct TrialResult {
  int iterations = 0;
  double wall_time = 0.0;
  Termination termination = Termination::IterLimit;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<std::vector<TrialResult>> trials;  // parallel to rows
};

/// Generates and solves every trial of a sweep. Throws InvalidInput when the
/// size lists are empty or have different lengths.
BenchResult run_bench(const BenchArgs& args);

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);
int cmd_trace(const TraceArgs& args, std::ostream& out, std::ostream& err);
int cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& err);

}  // namespace walras
