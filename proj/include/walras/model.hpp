#pragma once

#include "walras/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace walras {

/// The price set P: either the nonnegative orthant or a box [lower, upper].
class PriceDomain {
 public:
  enum class Kind { NonnegOrthant, Box };

  static PriceDomain orthant() { return PriceDomain(Kind::NonnegOrthant, {}, {}); }
  /// Throws InvalidInput unless lower <= upper componentwise with finite bounds.
  static PriceDomain box(Vector lower, Vector upper);

  Kind kind() const { return kind_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  /// Closed-form metric projection onto P (componentwise clamp).
  Vector project(const Vector& p) const;
  bool contains(const Vector& p, double tol = 0.0) const;

 private:
  PriceDomain(Kind kind, Vector lower, Vector upper)
      : kind_(kind), lower_(std::move(lower)), upper_(std::move(upper)) {}

  Kind kind_;
  Vector lower_;
  Vector upper_;
};

/// X = { x : x >= 0, A x <= b }.
struct FeasibleSet {
  Matrix A;
  Vector b;
};

/// Producer cost c(x) = x'Cx, tax t(x) = x'Bx, utility u(x) = l'x >= M.
struct AgentCosts {
  Matrix C;
  Matrix B;
  Vector l;
  double M = 0.0;
};

struct ModelConstants {
  double mu_c = 0.0;
  double mu_t = 0.0;
  double mu_F = 0.0;
  double L_c = 0.0;
  double L_t = 0.0;
  double eta = 0.0;
};

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& sym);

/// Moduli under the convention h is mu-strongly convex iff h - (mu/2)|x|^2 is
/// convex, so a quadratic x'Cx has mu = 2 lambda_min(C). eta defaults to mu_F.
/// Throws NotPositiveDefinite if lambda_min <= 1e-12 for C or B.
ModelConstants compute_constants(const AgentCosts& costs);

struct ModelInstance {
  int n = 0;
  int m = 0;
  AgentCosts costs;
  FeasibleSet feasible;
  PriceDomain domain = PriceDomain::orthant();
  Vector p0;
  ModelConstants constants;
  /// Set when the supplied p0 was outside the domain and got projected.
  bool p0_projected = false;
};

/// Assembles an instance: checks dimensions (InvalidInput), projects p0 onto
/// the domain, and computes the constants (NotPositiveDefinite). eta, when
/// given, overrides the default mu_F.
ModelInstance make_instance(AgentCosts costs, FeasibleSet feasible, PriceDomain domain,
                            Vector p0, std::optional<double> eta = std::nullopt);

enum class Violation {
  DimensionMismatch,
  NonFinite,
  NotSymmetric,
  NotPositiveDefinite,
  NonPositiveUtilityFloor,
  EmptyFeasibleSet,
  DemandInfeasible,
  BadBox,
  PriceOutsideDomain,
  BadConstants,
  StepOutOfRange,  // warning: eta outside (0, 2 mu_F]
  P0Projected,     // warning: p0 was projected at construction
};

const char* to_string(Violation v);

struct ValidationIssue {
  Violation kind;
  std::string detail;
  bool warning = false;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const;  // true iff no non-warning issues
  bool contains(Violation v) const;
  std::string summary() const;
};

ValidationReport validate_instance(const ModelInstance& instance);

}  // namespace walras
