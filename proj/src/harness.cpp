#include "walras/harness.hpp"

#include "walras/equilibrium.hpp"
#include "walras/model_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace walras {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* domain_name(PriceDomain::Kind kind) {
  return kind == PriceDomain::Kind::Box ? "box" : "orthant";
}

PriceDomain::Kind parse_domain(const std::string& name) {
  if (name == "orthant") return PriceDomain::Kind::NonnegOrthant;
  if (name == "box") return PriceDomain::Kind::Box;
  throw Error(ErrorCode::InvalidInput, "unknown domain '" + name + "' (expected orthant or box)");
}

EtaSetting EtaSetting::parse(const std::string& text) {
  if (text == "auto") return {};
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !(v > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "--eta must be a positive number or 'auto'");
  }
  return EtaSetting{v};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s) {
  if (s.empty() || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidInput, "bad numeric CSV field '" + s + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidInput, "bad integer CSV field '" + s + "'");
  }
  return v;
}

constexpr const char* kBenchHeader = "n,m,avg_time_s,avg_iterations,trials,domain,seed_base,iter_limit_trials";
constexpr const char* kTraceHeader = "k,step_residual,vi_residual,f_value";

// Runs `body` against `out_path` (or the fallback stream when empty).
template <typename Body>
void with_output(const std::string& out_path, std::ostream& fallback, Body&& body) {
  if (out_path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidInput, "cannot write '" + out_path + "'");
  body(file);
}

ModelInstance load_checked(const std::string& path, std::ostream& err) {
  ModelInstance inst = load_instance(path);
  const ValidationReport report = validate_instance(inst);
  if (!report.ok()) throw Error(ErrorCode::InvalidInput, "instance failed validation:\n" + report.summary());
  if (!report.issues.empty()) err << report.summary();
  return inst;
}

SolveReport solve_loaded(ModelInstance& inst, const EtaSetting& eta, const std::string& schedule, double eps,
                         int max_iter, int trace_every, std::ostream& err) {
  inst.constants.eta = eta.resolve(inst);
  if (!eta_in_range(inst.constants, inst.constants.eta)) {
    err << "warning: eta=" << format_double(inst.constants.eta) << " is outside (0, 2 mu_F] with mu_F="
        << format_double(inst.constants.mu_F) << "; the natural map may be expansive\n";
  }
  SolverConfig cfg;
  cfg.options.eps = eps;
  cfg.options.max_iter = max_iter;
  cfg.options.trace_every = trace_every;
  cfg.schedule = schedule;
  return solve_instance(inst, cfg);
}

int exit_for(Termination t) { return t == Termination::IterLimit ? kExitIterLimit : kExitOk; }

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kBenchHeader << "\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.m << ',' << format_double(r.avg_time_s) << ',' << format_double(r.avg_iterations) << ','
        << r.trials << ',' << domain_name(r.domain_kind) << ',' << r.seed_base << ',' << r.iter_limit_trials << "\n";
  }
}

std::vector<BenchRow> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,m,avg_time_s,avg_iterations,trials", 0) != 0) {
    throw Error(ErrorCode::InvalidInput, "bench CSV header missing");
  }
  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw Error(ErrorCode::InvalidInput, "bench CSV row has " + std::to_string(f.size()) + " fields");
    BenchRow r;
    r.n = parse_int<int>(f[0]);
    r.m = parse_int<int>(f[1]);
    r.avg_time_s = parse_double(f[2]);
    r.avg_iterations = parse_double(f[3]);
    r.trials = parse_int<int>(f[4]);
    r.domain_kind = parse_domain(f[5]);
    r.seed_base = parse_int<std::uint64_t>(f[6]);
    r.iter_limit_trials = parse_int<int>(f[7]);
    rows.push_back(r);
  }
  return rows;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << kTraceHeader << "\n";
  for (const auto& r : rows) {
    out << r.k << ',' << format_double(r.step_residual) << ','
        << (std::isnan(r.vi_residual) ? std::string() : format_double(r.vi_residual)) << ','
        << format_double(r.f_value) << "\n";
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw Error(ErrorCode::InvalidInput, "trace CSV header missing");
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) throw Error(ErrorCode::InvalidInput, "trace CSV row has " + std::to_string(f.size()) + " fields");
    rows.push_back(TraceRow{parse_int<int>(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3])});
  }
  return rows;
}

json report_to_json(const SolveReport& report, double eps, double eta, const std::string& schedule) {
  json j;
  j["solution"] = std::vector<double>(report.solution.data(), report.solution.data() + report.solution.size());
  j["iterations"] = report.iterations;
  j["wall_time"] = report.wall_time;
  j["termination"] = to_string(report.termination);
  j["eps"] = eps;
  j["eta"] = eta;
  j["schedule"] = schedule;
  if (!report.trace.empty()) {
    j["final_step_residual"] = report.trace.back().step_residual;
    const double vi = report.trace.back().vi_residual;
    j["final_vi_residual"] = std::isnan(vi) ? json(nullptr) : json(vi);
  }
  return j;
}

BenchResult run_bench(const BenchArgs& args) {
  if (args.n_list.empty() || args.n_list.size() != args.m_list.size()) {
    throw Error(ErrorCode::InvalidInput, "n and m lists must be nonempty and of equal length");
  }
  if (args.trials < 1) throw Error(ErrorCode::InvalidInput, "trials must be at least 1");
  const StepSchedule schedule = schedule_by_name(args.schedule);

  BenchResult result;
  for (std::size_t s = 0; s < args.n_list.size(); ++s) {
    const int n = args.n_list[s];
    const int m = args.m_list[s];
    std::vector<TrialResult> trials(static_cast<std::size_t>(args.trials));

    auto run_trial = [&](int t) {
      GenConfig cfg;
      cfg.n = n;
      cfg.m = m;
      cfg.domain_kind = args.domain_kind;
      cfg.seed = args.seed + static_cast<std::uint64_t>(t);
      GeneratedInstance g = random_instance(cfg);
      g.instance.constants.eta = args.eta.resolve(g.instance);
      SolverConfig sc;
      sc.options.eps = args.eps;
      sc.options.max_iter = args.max_iter;
      sc.schedule = schedule.name;
      const SolveReport rep = solve_instance(g.instance, sc);
      trials[static_cast<std::size_t>(t)] = TrialResult{rep.iterations, rep.wall_time, rep.termination};
    };

    const int jobs = std::max(1, std::min(args.jobs, args.trials));
    if (jobs == 1) {
      for (int t = 0; t < args.trials; ++t) run_trial(t);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
      for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (int t = w; t < args.trials; t += jobs) run_trial(t);
          } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }

    // Fixed reduction order (by trial index) keeps the averages bit-identical.
    BenchRow row;
    row.n = n;
    row.m = m;
    row.trials = args.trials;
    row.domain_kind = args.domain_kind;
    row.seed_base = args.seed;
    double time_sum = 0.0;
    double iter_sum = 0.0;
    for (const auto& tr : trials) {
      time_sum += tr.wall_time;
      iter_sum += tr.iterations;
      if (tr.termination == Termination::IterLimit) ++row.iter_limit_trials;
    }
    row.avg_time_s = time_sum / args.trials;
    row.avg_iterations = iter_sum / args.trials;
    result.rows.push_back(row);
    result.trials.push_back(std::move(trials));
  }
  return result;
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ModelInstance inst = load_checked(args.instance_path, err);
    const SolveReport rep =
        solve_loaded(inst, args.eta, args.schedule, args.eps, args.max_iter, args.trace_every, err);
    with_output(args.out_path, out, [&](std::ostream& os) {
      os << report_to_json(rep, args.eps, inst.constants.eta, args.schedule).dump(2) << "\n";
    });
    if (!args.trace_path.empty()) with_output(args.trace_path, out, [&](std::ostream& os) { write_trace_csv(os, rep.trace); });
    if (rep.termination == Termination::IterLimit) {
      err << "iteration limit " << args.max_iter << " reached; final step residual "
          << format_double(rep.trace.back().step_residual) << "\n";
    }
    return exit_for(rep.termination);
  });
}

int cmd_trace(const TraceArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ModelInstance inst = load_checked(args.instance_path, err);
    const SolveReport rep =
        solve_loaded(inst, args.eta, args.schedule, args.eps, args.max_iter, args.trace_every, err);
    with_output(args.csv_path, out, [&](std::ostream& os) { write_trace_csv(os, rep.trace); });
    return exit_for(rep.termination);
  });
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const BenchResult res = run_bench(args);
    with_output(args.csv_path, out, [&](std::ostream& os) { write_bench_csv(os, res.rows); });
    if (!args.csv_path.empty()) {
      json meta;
      meta["seed"] = args.seed;
      meta["trials"] = args.trials;
      meta["eps"] = args.eps;
      meta["max_iter"] = args.max_iter;
      meta["eta"] = args.eta.value ? json(*args.eta.value) : json("auto (mu_F per instance)");
      meta["schedule"] = args.schedule;
      meta["domain"] = domain_name(args.domain_kind);
      meta["timing"] = "wall clock per solve, excluding generation and I/O";
      meta["note"] =
          "random data, l, M, box bounds and eta are generator choices; averages are not a reproduction of "
          "any published table";
      std::ofstream(args.csv_path + ".meta.json") << meta.dump(2) << "\n";
    }
    int limited = 0;
    for (const auto& r : res.rows) {
      if (r.iter_limit_trials > 0) {
        err << "n=" << r.n << " m=" << r.m << ": " << r.iter_limit_trials << " of " << r.trials
            << " trials hit the iteration limit\n";
        limited += r.iter_limit_trials;
      }
    }
    return limited > 0 ? kExitIterLimit : kExitOk;
  });
}

int cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GeneratedInstance g = random_instance(args.config);
    with_output(args.out_path, out,
                [&](std::ostream& os) { os << instance_to_json(g.instance, &g.meta).dump(2) << "\n"; });
    return kExitOk;
  });
}

}  // namespace walras
