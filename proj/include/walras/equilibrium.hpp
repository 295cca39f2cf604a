#pragma once

#include "walras/model.hpp"
#include "walras/qp.hpp"

#include <optional>

namespace walras {

struct MapEvaluation {
  Vector supply;
  Vector demand;
  Vector excess;  // supply - demand
  int inner_iterations = 0;
};

/// Componentwise projection onto the price domain.
Vector project_price(const PriceDomain& domain, const Vector& p);

/// True when 0 < eta <= 2 mu_F, the range where the natural map is
/// guaranteed nonexpansive.
bool eta_in_range(const ModelConstants& constants, double eta);

/// Evaluation context for the supply, demand and excess maps of one instance.
///
/// Keeps the last excess evaluation keyed on the exact bits of p, and warm
/// starts each inner QP from the previous inner solution. Not thread-safe:
/// give each concurrent solve its own evaluator over the shared instance.
class MapEvaluator {
 public:
  explicit MapEvaluator(const ModelInstance& instance);

  const ModelInstance& instance() const { return *instance_; }

  /// argmax_x { p'x - x'Cx : x in X }.
  Vector supply(const Vector& p);
  /// argmin_x { p'x + x'Bx : x in X, l'x >= M }.
  Vector demand(const Vector& p);
  const MapEvaluation& excess(const Vector& p);

  /// T(p) = P(p - eta F(p)). eta must be positive; values above 2 mu_F are
  /// accepted (see eta_in_range).
  Vector nat_map(const Vector& p, double eta);
  /// |p - T(p)| / max(|p|, 1).
  double vi_residual(const Vector& p, double eta);

  /// Number of inner QP solves performed so far (cache hits excluded).
  long qp_solves() const { return qp_solves_; }

 private:
  QpSolution solve_inner(QpProblem& problem, std::optional<Vector>& warm, const char* which);

  const ModelInstance* instance_;
  QpProblem supply_qp_;
  QpProblem demand_qp_;
  std::optional<Vector> supply_warm_;
  std::optional<Vector> demand_warm_;
  std::optional<Vector> cached_p_;
  MapEvaluation cached_;
  long qp_solves_ = 0;
};

// Stateless conveniences; each builds a throwaway evaluator.
Vector supply(const ModelInstance& instance, const Vector& p);
Vector demand(const ModelInstance& instance, const Vector& p);
MapEvaluation excess(const ModelInstance& instance, const Vector& p);
Vector nat_map(const ModelInstance& instance, const Vector& p, double eta);
double vi_residual(const ModelInstance& instance, const Vector& p, double eta);

}  // namespace walras
