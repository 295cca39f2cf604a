#include "walras/model.hpp"

#include "walras/qp.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace walras {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::InnerSolveFailed: return "InnerSolveFailed";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
  }
  return "?";
}

PriceDomain PriceDomain::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw Error(ErrorCode::InvalidInput, "box bounds have different lengths");
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    if (!std::isfinite(lower(j)) || !std::isfinite(upper(j)) || lower(j) > upper(j)) {
      std::ostringstream os;
      os << "box bound " << j << " is invalid: [" << lower(j) << ", " << upper(j) << "]";
      throw Error(ErrorCode::InvalidInput, os.str());
    }
  }
  return PriceDomain(Kind::Box, std::move(lower), std::move(upper));
}

Vector PriceDomain::project(const Vector& p) const {
  if (kind_ == Kind::NonnegOrthant) return p.cwiseMax(0.0);
  return p.cwiseMax(lower_).cwiseMin(upper_);
}

bool PriceDomain::contains(const Vector& p, double tol) const {
  if (kind_ == Kind::NonnegOrthant) return (p.array() >= -tol).all();
  if (p.size() != lower_.size()) return false;
  return (p.array() >= lower_.array() - tol).all() && (p.array() <= upper_.array() + tol).all();
}

double min_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

ModelConstants compute_constants(const AgentCosts& costs) {
  const double lc = min_eigenvalue(costs.C);
  const double lt = min_eigenvalue(costs.B);
  if (!(lc > 1e-12)) throw Error(ErrorCode::NotPositiveDefinite, "cost matrix C is not positive definite");
  if (!(lt > 1e-12)) throw Error(ErrorCode::NotPositiveDefinite, "tax matrix B is not positive definite");

  ModelConstants k;
  k.mu_c = 2.0 * lc;
  k.mu_t = 2.0 * lt;
  k.mu_F = 0.5 * std::min(k.mu_c, k.mu_t);
  k.L_c = 1.0 / k.mu_c;
  k.L_t = 1.0 / k.mu_t;
  k.eta = k.mu_F;
  return k;
}

ModelInstance make_instance(AgentCosts costs, FeasibleSet feasible, PriceDomain domain, Vector p0,
                            std::optional<double> eta) {
  const auto n = costs.C.rows();
  auto require = [](bool cond, const char* what) {
    if (!cond) throw Error(ErrorCode::InvalidInput, what);
  };
  require(n > 0, "dimension n must be positive");
  require(costs.C.cols() == n, "C must be n x n");
  require(costs.B.rows() == n && costs.B.cols() == n, "B must be n x n");
  require(costs.l.size() == n, "l must have length n");
  require(feasible.A.cols() == n, "A must have n columns");
  require(feasible.b.size() == feasible.A.rows(), "b must have length m");
  require(p0.size() == n, "p0 must have length n");
  if (domain.kind() == PriceDomain::Kind::Box) require(domain.lower().size() == n, "box bounds must have length n");

  ModelInstance inst;
  inst.n = static_cast<int>(n);
  inst.m = static_cast<int>(feasible.A.rows());
  inst.constants = compute_constants(costs);
  if (eta) inst.constants.eta = *eta;
  inst.costs = std::move(costs);
  inst.feasible = std::move(feasible);
  inst.p0 = domain.project(p0);
  inst.p0_projected = (inst.p0 - p0).lpNorm<Eigen::Infinity>() > 0.0;
  inst.domain = std::move(domain);
  return inst;
}

const char* to_string(Violation v) {
  switch (v) {
    case Violation::DimensionMismatch: return "DimensionMismatch";
    case Violation::NonFinite: return "NonFinite";
    case Violation::NotSymmetric: return "NotSymmetric";
    case Violation::NotPositiveDefinite: return "NotPositiveDefinite";
    case Violation::NonPositiveUtilityFloor: return "NonPositiveUtilityFloor";
    case Violation::EmptyFeasibleSet: return "EmptyFeasibleSet";
    case Violation::DemandInfeasible: return "DemandInfeasible";
    case Violation::BadBox: return "BadBox";
    case Violation::PriceOutsideDomain: return "PriceOutsideDomain";
    case Violation::BadConstants: return "BadConstants";
    case Violation::StepOutOfRange: return "StepOutOfRange";
    case Violation::P0Projected: return "P0Projected";
  }
  return "?";
}

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(), [](const ValidationIssue& i) { return !i.warning; });
}

bool ValidationReport::contains(Violation v) const {
  return std::any_of(issues.begin(), issues.end(), [v](const ValidationIssue& i) { return i.kind == v; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& i : issues) {
    os << (i.warning ? "warning: " : "error: ") << to_string(i.kind);
    if (!i.detail.empty()) os << " (" << i.detail << ")";
    os << "\n";
  }
  return os.str();
}

namespace {

bool all_finite(const Matrix& M) { return M.allFinite(); }

}  // namespace

ValidationReport validate_instance(const ModelInstance& inst) {
  ValidationReport report;
  auto add = [&](Violation v, std::string detail, bool warning = false) {
    report.issues.push_back({v, std::move(detail), warning});
  };

  const Eigen::Index n = inst.n;
  const Eigen::Index m = inst.m;
  const auto& c = inst.costs;
  const auto& X = inst.feasible;
  const bool dims_ok = n > 0 && c.C.rows() == n && c.C.cols() == n && c.B.rows() == n && c.B.cols() == n &&
                       c.l.size() == n && X.A.rows() == m && X.A.cols() == n && X.b.size() == m &&
                       inst.p0.size() == n &&
                       (inst.domain.kind() == PriceDomain::Kind::NonnegOrthant ||
                        (inst.domain.lower().size() == n && inst.domain.upper().size() == n));
  if (!dims_ok) {
    add(Violation::DimensionMismatch, "array sizes disagree with n and m");
    return report;
  }

  if (!all_finite(c.C) || !all_finite(c.B) || !all_finite(c.l) || !std::isfinite(c.M) || !all_finite(X.A) ||
      !all_finite(X.b) || !all_finite(inst.p0)) {
    add(Violation::NonFinite, "non-finite entry in instance data");
    return report;
  }

  bool pd = true;
  for (const auto* mat : {&c.C, &c.B}) {
    const char* name = mat == &c.C ? "C" : "B";
    if (((*mat) - mat->transpose()).lpNorm<Eigen::Infinity>() > 1e-10) {
      add(Violation::NotSymmetric, name);
      pd = false;
      continue;
    }
    const double lmin = min_eigenvalue(*mat);
    if (!(lmin > 1e-12)) {
      add(Violation::NotPositiveDefinite, std::string(name) + " lambda_min=" + std::to_string(lmin));
      pd = false;
    }
  }

  if (!(c.M > 0.0)) add(Violation::NonPositiveUtilityFloor, "M must be positive");

  if (inst.domain.kind() == PriceDomain::Kind::Box) {
    const auto& lo = inst.domain.lower();
    const auto& hi = inst.domain.upper();
    if (!lo.allFinite() || !hi.allFinite() || (lo.array() > hi.array()).any()) add(Violation::BadBox, "");
  }
  if (!inst.domain.contains(inst.p0, 1e-12)) add(Violation::PriceOutsideDomain, "p0");
  if (inst.p0_projected) add(Violation::P0Projected, "p0 was projected onto the price domain", true);

  if ((X.b.array() < 0.0).any()) {
    add(Violation::EmptyFeasibleSet, "x = 0 violates A x <= b");
  } else {
    const FeasibilityResult fr = feasible_point(X.A, X.b, LinearFloor{c.l, c.M}, true);
    if (!fr.feasible) add(Violation::DemandInfeasible, "no x in X with l'x >= M");
  }

  if (pd) {
    const ModelConstants k = compute_constants(c);
    const auto& g = inst.constants;
    const double tol = 1e-12 * std::max(1.0, k.mu_F);
    if (std::abs(g.mu_c - k.mu_c) > tol * std::max(1.0, k.mu_c) ||
        std::abs(g.mu_t - k.mu_t) > tol * std::max(1.0, k.mu_t) || std::abs(g.mu_F - k.mu_F) > tol ||
        std::abs(g.L_c * g.mu_c - 1.0) > 1e-12 || std::abs(g.L_t * g.mu_t - 1.0) > 1e-12) {
      add(Violation::BadConstants, "constants do not match the cost matrices");
    }
    if (!(g.eta > 0.0)) {
      add(Violation::BadConstants, "eta must be positive");
    } else if (g.eta > 2.0 * g.mu_F * (1.0 + 1e-12)) {
      add(Violation::StepOutOfRange, "eta exceeds 2 mu_F; nonexpansiveness is not guaranteed", true);
    }
  }
  return report;
}

}  // namespace walras
