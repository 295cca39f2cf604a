#include "walras/bilevel.hpp"

#include "walras/equilibrium.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace walras {

StepSchedule schedule_default() {
  auto rule = [](int k) { return 1.0 / std::sqrt(static_cast<double>(k) + 1.0); };
  return StepSchedule{"sqrt", rule, rule};
}

StepSchedule schedule_by_name(const std::string& name) {
  if (name == "sqrt") return schedule_default();
  throw Error(ErrorCode::InvalidInput, "unknown step schedule '" + name + "'");
}

double gamma_k(double beta, double L, double alpha) {
  const double radicand = 1.0 - 2.0 * beta * alpha + L * L * alpha * alpha;
  return 1.0 - std::sqrt(std::max(radicand, 0.0));
}

Vector gradient_step(const Objective& objective, const Vector& p, double alpha, const PriceDomain& domain) {
  return domain.project(p - alpha * objective.gradient(p));
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::ExactFixedPoint: return "ExactFixedPoint";
    case Termination::IterLimit: return "IterLimit";
  }
  return "?";
}

namespace {

// Single-entry memo: T(p^{k+1}) computed for a trace sample is reused by the
// next iteration.
class MemoMap {
 public:
  explicit MemoMap(const MapOracle& map) : map_(map) {}

  const Vector& operator()(const Vector& p) {
    if (!filled_ || last_p_ != p) {
      last_Tp_ = map_(p);
      last_p_ = p;
      filled_ = true;
    }
    return last_Tp_;
  }

 private:
  const MapOracle& map_;
  bool filled_ = false;
  Vector last_p_;
  Vector last_Tp_;
};

bool same_point(const Vector& a, const Vector& b) {
  return (a - b).norm() <= 1e-14 * norm_floor_one(a);
}

}  // namespace

SolveReport bilevel_solve(const MapOracle& map, const Objective& objective, const PriceDomain& domain,
                          const StepSchedule& schedule, const BilevelOptions& options) {
  if (!(options.eps > 0.0)) throw Error(ErrorCode::InvalidInput, "eps must be positive");
  if (options.max_iter < 1) throw Error(ErrorCode::InvalidInput, "max_iter must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  MemoMap T(map);
  const int every = std::max(options.trace_every, 1);

  SolveReport report;
  report.trace.reserve(static_cast<std::size_t>(std::min(options.max_iter, 100000)));
  Vector p = options.start ? domain.project(*options.start) : domain.project(objective.p0);

  for (int k = 1; k <= options.max_iter; ++k) {
    const double lambda = schedule.lambda_of(k);
    const double alpha = schedule.alpha_of(k);
    const Vector Tp = T(p);
    const Vector g = objective.gradient(p);
    const Vector q = domain.project(p - alpha * g);
    Vector p_next = lambda * q + (1.0 - lambda) * Tp;

    TraceRow row;
    row.k = k;
    row.step_residual = (p_next - p).norm() / norm_floor_one(p_next);
    row.f_value = objective.value(p_next);

    const bool exact = same_point(p, q) && same_point(p, p_next);
    const bool converged = row.step_residual < options.eps;
    const bool last = exact || converged || k == options.max_iter;

    if (options.observer) options.observer(IterationState{k, p, q, g, Tp, p_next, row.step_residual});

    if (exact) {
      row.vi_residual = (p - Tp).norm() / norm_floor_one(p);
      p_next = p;
    } else if (last || k % every == 0) {
      row.vi_residual = (p_next - T(p_next)).norm() / norm_floor_one(p_next);
    } else {
      row.vi_residual = std::numeric_limits<double>::quiet_NaN();
    }
    report.trace.push_back(row);
    p = std::move(p_next);
    report.iterations = k;

    if (exact) {
      report.termination = Termination::ExactFixedPoint;
      break;
    }
    if (converged) {
      report.termination = Termination::Converged;
      break;
    }
  }

  report.solution = std::move(p);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

KmResult km_fixed_point(const MapOracle& map, const PriceDomain& domain, const Vector& start, double theta,
                        double eps, int max_iter) {
  if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorCode::InvalidInput, "theta must lie in (0,1)");
  KmResult out;
  Vector p = domain.project(start);
  for (int k = 1; k <= max_iter; ++k) {
    Vector next = (1.0 - theta) * p + theta * map(p);
    const double step = (next - p).norm() / norm_floor_one(next);
    p = std::move(next);
    out.iterations = k;
    if (step < eps) {
      out.converged = true;
      break;
    }
  }
  out.solution = std::move(p);
  return out;
}

SolveReport solve_instance(const ModelInstance& instance, const SolverConfig& config) {
  const double eta = config.eta.value_or(instance.constants.eta);
  if (!(eta > 0.0)) throw Error(ErrorCode::InvalidInput, "eta must be positive");
  MapEvaluator evaluator(instance);
  const MapOracle T = [&evaluator, eta](const Vector& p) { return evaluator.nat_map(p, eta); };
  return bilevel_solve(T, Objective::distance_to(instance.p0), instance.domain, schedule_by_name(config.schedule),
                       config.options);
}

}  // namespace walras
