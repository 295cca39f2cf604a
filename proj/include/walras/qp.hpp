#pragma once

#include "walras/common.hpp"

#include <optional>

namespace walras {

/// Linear floor constraint g'x >= M.
struct LinearFloor {
  Vector g;
  double M = 0.0;
};

/// minimize x'Qx + q'x  subject to  A x <= b,  g'x >= M (if floor),  x >= 0 (if nonneg).
///
/// Internally every constraint is normalized to a row of G x <= h in the order
/// A rows, floor, nonnegativity bounds.
struct QpProblem {
  Matrix Q;
  Vector q;
  Matrix A;
  Vector b;
  std::optional<LinearFloor> floor;
  bool nonneg = true;

  int dim() const { return static_cast<int>(Q.rows()); }
  int num_constraints() const;
  /// Stacked inequality rows G x <= h.
  void inequality_form(Matrix& G, Vector& h) const;
  double objective(const Vector& x) const { return x.dot(Q * x) + q.dot(x); }
};

enum class QpStatus { Optimal, Infeasible, IterLimit };

const char* to_string(QpStatus s);

struct QpSolution {
  Vector x;
  double kkt_residual = 0.0;
  int iterations = 0;
  QpStatus status = QpStatus::IterLimit;
  /// True when h was relaxed by ~1e-12 on some rows to break cycling at a
  /// degenerate vertex.
  bool perturbed = false;
};

struct QpDefaults {
  static constexpr double tol = 1e-9;
  static int max_iter(int n, int m) { return 50 * (n + m); }
};

/// Primal active-set method. A feasible start is obtained by projecting
/// `start` (or the origin) onto the feasible region; a supplied feasible
/// start acts as a warm start.
QpSolution solve_qp(const QpProblem& problem, double tol, int max_iter,
                    const std::optional<Vector>& start = std::nullopt);

/// Max of primal infeasibility, stationarity residual (2-norm) and
/// complementarity gap, with multipliers fitted by nonnegative least squares
/// on the constraints active at x (slack <= tol * (1 + |h_i|)).
double check_kkt(const QpProblem& problem, const Vector& x, double tol);

struct FeasibilityResult {
  bool feasible = false;
  /// Feasible point (within 1e-9) when feasible.
  Vector x;
  /// Otherwise y >= 0 over the rows of G with G'y = 0 and h'y < 0.
  Vector certificate;
};

/// Nearest feasible point to `anchor` (origin by default) via a dual
/// active-set projection, or a Farkas certificate of emptiness. A must be
/// m x n even when m == 0.
FeasibilityResult feasible_point(const Matrix& A, const Vector& b,
                                 const std::optional<LinearFloor>& floor, bool nonneg,
                                 const std::optional<Vector>& anchor = std::nullopt);

}  // namespace walras
