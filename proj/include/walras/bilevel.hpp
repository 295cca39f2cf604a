#pragma once

#include "walras/common.hpp"
#include "walras/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace walras {

/// Regularizer f(p) = |p - p0|^2: strongly convex with modulus beta = 2 and
/// gradient Lipschitz constant L = 2.
struct Objective {
  Vector p0;
  double beta = 2.0;
  double L = 2.0;

  static Objective distance_to(Vector p0) { return Objective{std::move(p0), 2.0, 2.0}; }

  double value(const Vector& p) const { return (p - p0).squaredNorm(); }
  Vector gradient(const Vector& p) const { return 2.0 * (p - p0); }
};

/// Step sequences lambda_k in (0,1) and alpha_k > 0, both decreasing to zero.
struct StepSchedule {
  std::string name;
  std::function<double(int)> lambda_of;
  std::function<double(int)> alpha_of;
};

/// lambda_k = alpha_k = 1/sqrt(k+1). sum lambda_k alpha_k = sum 1/(k+1)
/// diverges and both sequences are monotone and bounded, so their total
/// variation is finite.
StepSchedule schedule_default();

/// Looks up a schedule by name; only "sqrt" is defined. Throws InvalidInput.
StepSchedule schedule_by_name(const std::string& name);

/// gamma = 1 - sqrt(1 - 2 beta alpha + L^2 alpha^2), the contraction margin of
/// the gradient step. The radicand equals (L alpha - beta/L)^2 + 1 - beta^2/L^2,
/// nonnegative whenever beta <= L.
double gamma_k(double beta, double L, double alpha);

/// q = P(p - alpha grad f(p)).
Vector gradient_step(const Objective& objective, const Vector& p, double alpha, const PriceDomain& domain);

using MapOracle = std::function<Vector(const Vector&)>;

enum class Termination { Converged, ExactFixedPoint, IterLimit };

const char* to_string(Termination t);

/// One row per iteration k. All quantities refer to the new iterate p^{k+1};
/// vi_residual is NaN on rows that were not sampled.
struct TraceRow {
  int k = 0;
  double step_residual = 0.0;
  double vi_residual = 0.0;
  double f_value = 0.0;
};

struct IterationState {
  int k = 0;
  Vector p;   // p^k
  Vector q;   // gradient-step point
  Vector g;   // grad f(p^k)
  Vector Tp;  // T(p^k)
  Vector p_next;
  double step_residual = 0.0;
};

struct SolveReport {
  Vector solution;
  int iterations = 0;
  double wall_time = 0.0;  // seconds
  std::vector<TraceRow> trace;
  Termination termination = Termination::IterLimit;
};

struct BilevelOptions {
  double eps = 1e-4;
  int max_iter = 10000;
  /// vi_residual is recorded on rows with k % trace_every == 0 and on the last row.
  int trace_every = 10;
  /// Defaults to the projection of the objective's anchor onto the domain.
  std::optional<Vector> start;
  std::function<void(const IterationState&)> observer;
};

/// Minimizes the objective over Fix(T) with the hybrid iteration
///   q^k     = P(p^k - alpha_k grad f(p^k))
///   p^{k+1} = lambda_k q^k + (1 - lambda_k) T(p^k)
/// stopping when |p^{k+1} - p^k| / max(|p^{k+1}|, 1) < eps. The map must be
/// nonexpansive on the domain with a nonempty fixed-point set.
SolveReport bilevel_solve(const MapOracle& map, const Objective& objective, const PriceDomain& domain,
                          const StepSchedule& schedule, const BilevelOptions& options = {});

struct KmResult {
  Vector solution;
  int iterations = 0;
  bool converged = false;
};

/// Krasnoselskii-Mann baseline p <- (1 - theta) p + theta T(p), stopped on the
/// same relative step rule. converged == false means the iteration limit hit.
KmResult km_fixed_point(const MapOracle& map, const PriceDomain& domain, const Vector& start, double theta = 0.5,
                        double eps = 1e-4, int max_iter = 10000);

struct SolverConfig {
  BilevelOptions options;
  std::optional<double> eta;  // defaults to the instance's eta
  std::string schedule = "sqrt";
};

/// Bilevel solve of an economic instance: T is the natural map of the excess
/// supply with step eta, f is the distance to the instance's p0.
SolveReport solve_instance(const ModelInstance& instance, const SolverConfig& config = {});

}  // namespace walras
