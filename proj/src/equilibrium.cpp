#include "walras/equilibrium.hpp"

#include <string>

namespace walras {

Vector project_price(const PriceDomain& domain, const Vector& p) { return domain.project(p); }

bool eta_in_range(const ModelConstants& constants, double eta) {
  return eta > 0.0 && eta <= 2.0 * constants.mu_F;
}

MapEvaluator::MapEvaluator(const ModelInstance& instance) : instance_(&instance) {
  const auto& c = instance.costs;
  const auto& X = instance.feasible;
  supply_qp_.Q = c.C;
  supply_qp_.A = X.A;
  supply_qp_.b = X.b;
  supply_qp_.nonneg = true;
  demand_qp_.Q = c.B;
  demand_qp_.A = X.A;
  demand_qp_.b = X.b;
  demand_qp_.floor = LinearFloor{c.l, c.M};
  demand_qp_.nonneg = true;
}

QpSolution MapEvaluator::solve_inner(QpProblem& problem, std::optional<Vector>& warm, const char* which) {
  const int max_iter = QpDefaults::max_iter(problem.dim(), problem.num_constraints());
  QpSolution sol = solve_qp(problem, QpDefaults::tol, max_iter, warm);
  ++qp_solves_;
  if (sol.status != QpStatus::Optimal) {
    throw Error(ErrorCode::InnerSolveFailed, std::string(which) + " subproblem returned " + to_string(sol.status) +
                                                 " (kkt residual " + std::to_string(sol.kkt_residual) + ")");
  }
  warm = sol.x;
  return sol;
}

Vector MapEvaluator::supply(const Vector& p) {
  if (cached_p_ && *cached_p_ == p) return cached_.supply;
  supply_qp_.q = -p;
  return solve_inner(supply_qp_, supply_warm_, "supply").x;
}

Vector MapEvaluator::demand(const Vector& p) {
  if (cached_p_ && *cached_p_ == p) return cached_.demand;
  demand_qp_.q = p;
  return solve_inner(demand_qp_, demand_warm_, "demand").x;
}

const MapEvaluation& MapEvaluator::excess(const Vector& p) {
  if (cached_p_ && *cached_p_ == p) return cached_;
  supply_qp_.q = -p;
  demand_qp_.q = p;
  const QpSolution s = solve_inner(supply_qp_, supply_warm_, "supply");
  const QpSolution d = solve_inner(demand_qp_, demand_warm_, "demand");
  cached_.supply = s.x;
  cached_.demand = d.x;
  cached_.excess = s.x - d.x;
  cached_.inner_iterations = s.iterations + d.iterations;
  cached_p_ = p;
  return cached_;
}

Vector MapEvaluator::nat_map(const Vector& p, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorCode::InvalidInput, "natural map step eta must be positive");
  const MapEvaluation& ev = excess(p);
  return instance_->domain.project(p - eta * ev.excess);
}

double MapEvaluator::vi_residual(const Vector& p, double eta) {
  return (p - nat_map(p, eta)).norm() / norm_floor_one(p);
}

Vector supply(const ModelInstance& instance, const Vector& p) { return MapEvaluator(instance).supply(p); }

Vector demand(const ModelInstance& instance, const Vector& p) { return MapEvaluator(instance).demand(p); }

MapEvaluation excess(const ModelInstance& instance, const Vector& p) { return MapEvaluator(instance).excess(p); }

Vector nat_map(const ModelInstance& instance, const Vector& p, double eta) {
  return MapEvaluator(instance).nat_map(p, eta);
}

double vi_residual(const ModelInstance& instance, const Vector& p, double eta) {
  return MapEvaluator(instance).vi_residual(p, eta);
}

}  // namespace walras
