#include "walras/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace walras {

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "Optimal";
    case QpStatus::Infeasible: return "Infeasible";
    case QpStatus::IterLimit: return "IterLimit";
  }
  return "?";
}

int QpProblem::num_constraints() const {
  return static_cast<int>(A.rows()) + (floor ? 1 : 0) + (nonneg ? dim() : 0);
}

namespace {

void stack_constraints(const Matrix& A, const Vector& b, const std::optional<LinearFloor>& floor,
                       bool nonneg, int n, Matrix& G, Vector& h) {
  const Eigen::Index m = A.rows();
  const Eigen::Index rows = m + (floor ? 1 : 0) + (nonneg ? n : 0);
  G.setZero(rows, n);
  h.setZero(rows);
  Eigen::Index r = 0;
  if (m > 0) {
    G.topRows(m) = A;
    h.head(m) = b;
    r = m;
  }
  if (floor) {
    G.row(r) = -floor->g.transpose();
    h(r) = -floor->M;
    ++r;
  }
  if (nonneg) {
    for (int j = 0; j < n; ++j) G(r + j, j) = -1.0;
  }
}

double feas_tol(double h) { return 1e-11 * (1.0 + std::abs(h)); }

// Goldfarb-Idnani dual active-set method for min 1/2 x'Hx + c'x s.t. Gx <= h.
// Starts at the unconstrained minimizer and adds violated constraints one at a
// time; when a violated constraint cannot be satisfied, the dual ray gives a
// Farkas certificate.
struct DualResult {
  bool feasible = false;
  Vector x;
  Vector certificate;
};

DualResult dual_active_set(const Matrix& H, const Vector& c, const Matrix& G, const Vector& h) {
  const Eigen::Index n = H.rows();
  const Eigen::Index rows = G.rows();
  Eigen::LLT<Matrix> llt(H);
  const Matrix Hinv = llt.solve(Matrix::Identity(n, n));

  DualResult out;
  Vector x = -llt.solve(c);
  std::vector<Eigen::Index> active;
  std::vector<double> u;

  const int max_outer = 10 * static_cast<int>(rows + n) + 10;
  for (int outer = 0; outer < max_outer; ++outer) {
    // Most violated constraint, scaled by row norm.
    Eigen::Index p = -1;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double viol = G.row(i).dot(x) - h(i);
      if (viol <= feas_tol(h(i))) continue;
      const double scaled = viol / std::max(G.row(i).norm(), 1e-300);
      if (scaled > worst) {
        worst = scaled;
        p = i;
      }
    }
    if (p < 0) {
      out.feasible = true;
      out.x = std::move(x);
      return out;
    }

    // In the a'x >= b convention the normal of row p is -G_p.
    const Vector ap = -G.row(p).transpose();
    double up = 0.0;
    for (int inner = 0; inner < max_outer; ++inner) {
      const Eigen::Index q = static_cast<Eigen::Index>(active.size());
      Vector z = Hinv * ap;
      Vector r(q);
      if (q > 0) {
        Matrix N(n, q);
        for (Eigen::Index j = 0; j < q; ++j) N.col(j) = -G.row(active[j]).transpose();
        const Matrix HinvN = Hinv * N;
        const Matrix S = N.transpose() * HinvN;
        r = S.ldlt().solve(N.transpose() * z);
        z -= HinvN * r;
      }

      double t1 = std::numeric_limits<double>::infinity();
      Eigen::Index drop = -1;
      for (Eigen::Index j = 0; j < q; ++j) {
        if (r(j) > 1e-14) {
          const double ratio = u[j] / r(j);
          if (ratio < t1) {
            t1 = ratio;
            drop = j;
          }
        }
      }

      const double slack = h(p) - G.row(p).dot(x);  // negative while violated
      const double za = z.dot(ap);
      double t2 = std::numeric_limits<double>::infinity();
      if (z.norm() > 1e-12 * (1.0 + (Hinv * ap).norm()) && za > 0.0) t2 = -slack / za;

      if (!std::isfinite(t1) && !std::isfinite(t2)) {
        out.certificate = Vector::Zero(rows);
        out.certificate(p) = 1.0;
        for (Eigen::Index j = 0; j < q; ++j) out.certificate(active[j]) = std::max(0.0, -r(j));
        out.x = std::move(x);
        return out;
      }
      if (!std::isfinite(t2)) {
        for (Eigen::Index j = 0; j < q; ++j) u[j] -= t1 * r(j);
        up += t1;
        active.erase(active.begin() + drop);
        u.erase(u.begin() + drop);
        continue;
      }
      const double t = std::min(t1, t2);
      x += t * z;
      for (Eigen::Index j = 0; j < q; ++j) u[j] -= t * r(j);
      up += t;
      if (t2 <= t1) {
        active.push_back(p);
        u.push_back(up);
        break;
      }
      active.erase(active.begin() + drop);
      u.erase(u.begin() + drop);
    }
  }
  // Iteration budget exhausted; report as infeasible without a certificate.
  out.x = std::move(x);
  return out;
}

// Lawson-Hanson nonnegative least squares: min |E y - f| s.t. y >= 0.
Vector nnls(const Matrix& E, const Vector& f) {
  const Eigen::Index w = E.cols();
  Vector y = Vector::Zero(w);
  if (w == 0) return y;
  std::vector<bool> passive(w, false);
  const double tol = 1e-13 * std::max(1.0, E.cwiseAbs().maxCoeff() * std::max(1.0, f.lpNorm<Eigen::Infinity>()));

  auto solve_passive = [&](Vector& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < w; ++j)
      if (passive[j]) idx.push_back(j);
    s = Vector::Zero(w);
    if (idx.empty()) return;
    Matrix Ep(E.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ep.col(static_cast<Eigen::Index>(k)) = E.col(idx[k]);
    const Vector sp = Ep.completeOrthogonalDecomposition().solve(f);
    for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(static_cast<Eigen::Index>(k));
  };

  for (int outer = 0; outer < 3 * static_cast<int>(w) + 3; ++outer) {
    const Vector grad = E.transpose() * (f - E * y);
    Eigen::Index best = -1;
    double best_val = tol;
    for (Eigen::Index j = 0; j < w; ++j) {
      if (!passive[j] && grad(j) > best_val) {
        best_val = grad(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[best] = true;

    for (int inner = 0; inner < 3 * static_cast<int>(w) + 3; ++inner) {
      Vector s;
      solve_passive(s);
      bool all_positive = true;
      for (Eigen::Index j = 0; j < w; ++j)
        if (passive[j] && s(j) <= 0.0) all_positive = false;
      if (all_positive) {
        y = s;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < w; ++j) {
        if (passive[j] && s(j) <= 0.0) {
          const double denom = y(j) - s(j);
          if (denom > 0.0) alpha = std::min(alpha, y(j) / denom);
        }
      }
      y += alpha * (s - y);
      for (Eigen::Index j = 0; j < w; ++j) {
        if (passive[j] && y(j) <= 1e-300) {
          passive[j] = false;
          y(j) = 0.0;
        }
      }
    }
  }
  return y;
}

// Rows are added to `basis` (orthonormalized) only when independent.
bool try_add_independent(Matrix& basis, Eigen::Index& rank, const Vector& row) {
  Vector v = row;
  for (Eigen::Index k = 0; k < rank; ++k) v -= basis.col(k).dot(v) * basis.col(k);
  for (Eigen::Index k = 0; k < rank; ++k) v -= basis.col(k).dot(v) * basis.col(k);
  const double nv = v.norm();
  if (nv <= 1e-9 * row.norm()) return false;
  basis.col(rank++) = v / nv;
  return true;
}

// Minimizer of 1/2 x'Hx + q'x on { G_W x = h_W } by the null-space method,
// with multipliers y solving G_W' y = -(H x + q). Computing the point directly
// (rather than as a step from the current iterate) keeps active rows exact
// even when H is nearly singular.
void subspace_minimizer(const Matrix& H, const Eigen::LLT<Matrix>& llt, const Vector& q, const Matrix& G,
                        const Vector& h, const std::vector<Eigen::Index>& work, Vector& xs, Vector& y) {
  const Eigen::Index n = H.rows();
  const auto w = static_cast<Eigen::Index>(work.size());
  if (w == 0) {
    xs = -llt.solve(q);
    y.resize(0);
    return;
  }
  Matrix GWt(n, w);
  Vector hW(w);
  for (Eigen::Index k = 0; k < w; ++k) {
    GWt.col(k) = G.row(work[k]).transpose();
    hW(k) = h(work[k]);
  }
  Eigen::HouseholderQR<Matrix> qr(GWt);
  const Matrix Qfull = qr.householderQ();
  const Matrix R = qr.matrixQR().topLeftCorner(w, w).triangularView<Eigen::Upper>();
  const auto Q1 = Qfull.leftCols(w);
  // G_W x_p = h_W with x_p in range(G_W'): R' u = h_W, x_p = Q1 u.
  const Vector u = R.transpose().triangularView<Eigen::Lower>().solve(hW);
  xs = Q1 * u;
  if (w < n) {
    const auto Q2 = Qfull.rightCols(n - w);
    const Matrix Hr = Q2.transpose() * H * Q2;
    const Vector z = Hr.llt().solve(-(Q2.transpose() * (H * xs + q)));
    xs += Q2 * z;
  }
  y = R.triangularView<Eigen::Upper>().solve(-(Q1.transpose() * (H * xs + q)));
}

}  // namespace

void QpProblem::inequality_form(Matrix& G, Vector& h) const {
  stack_constraints(A, b, floor, nonneg, dim(), G, h);
}

FeasibilityResult feasible_point(const Matrix& A, const Vector& b,
                                 const std::optional<LinearFloor>& floor, bool nonneg,
                                 const std::optional<Vector>& anchor) {
  const int n = static_cast<int>(A.cols());
  Matrix G;
  Vector h;
  stack_constraints(A, b, floor, nonneg, n, G, h);
  const Vector c = anchor ? Vector(-*anchor) : Vector(Vector::Zero(n));
  DualResult dr = dual_active_set(Matrix::Identity(n, n), c, G, h);

  FeasibilityResult out;
  out.feasible = dr.feasible;
  if (dr.feasible) {
    out.x = std::move(dr.x);
  } else {
    out.certificate = std::move(dr.certificate);
  }
  return out;
}

double check_kkt(const QpProblem& problem, const Vector& x, double tol) {
  Matrix G;
  Vector h;
  problem.inequality_form(G, h);
  const Vector slack = h - G * x;

  double primal = 0.0;
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    primal = std::max(primal, -slack(i));
    if (slack(i) <= tol * (1.0 + std::abs(h(i)))) active.push_back(i);
  }

  const Vector grad = 2.0 * (problem.Q * x) + problem.q;
  Matrix E(x.size(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t k = 0; k < active.size(); ++k) E.col(static_cast<Eigen::Index>(k)) = G.row(active[k]).transpose();
  const Vector y = nnls(E, -grad);

  const double stationarity = (grad + E * y).norm();
  double comp = 0.0;
  for (std::size_t k = 0; k < active.size(); ++k) {
    comp = std::max(comp, y(static_cast<Eigen::Index>(k)) * std::max(0.0, slack(active[k])));
  }
  return std::max({primal, stationarity, comp});
}

QpSolution solve_qp(const QpProblem& problem, double tol, int max_iter,
                    const std::optional<Vector>& start) {
  const int n = problem.dim();
  Matrix G;
  Vector h;
  problem.inequality_form(G, h);
  const Eigen::Index rows = G.rows();

  QpSolution sol;

  // Phase 1.
  Vector x;
  bool start_feasible = false;
  if (start && start->size() == n) {
    start_feasible = true;
    for (Eigen::Index i = 0; i < rows && start_feasible; ++i)
      if (G.row(i).dot(*start) - h(i) > feas_tol(h(i))) start_feasible = false;
  }
  if (start_feasible) {
    x = *start;
  } else {
    FeasibilityResult fp = feasible_point(problem.A, problem.b, problem.floor, problem.nonneg, start);
    if (!fp.feasible) {
      sol.status = QpStatus::Infeasible;
      sol.x = Vector::Zero(n);
      return sol;
    }
    x = std::move(fp.x);
  }

  const Matrix H = 2.0 * problem.Q;
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "QP Hessian is not positive definite");

  // Initial working set: independent constraints active at x.
  std::vector<Eigen::Index> work;
  std::vector<bool> in_work(rows, false);
  {
    Matrix basis(n, n);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < rows && rank < n; ++i) {
      if (h(i) - G.row(i).dot(x) <= feas_tol(h(i)) && try_add_independent(basis, rank, G.row(i).transpose())) {
        work.push_back(i);
        in_work[i] = true;
      }
    }
  }

  int zero_steps = 0;
  bool done = false;
  int it = 0;
  Vector xs;
  Vector y;
  for (; it < max_iter; ++it) {
    subspace_minimizer(H, llt, problem.q, G, h, work, xs, y);
    const Vector d = xs - x;

    if (d.norm() <= 1e-11 * (1.0 + x.norm())) {
      x = xs;
      const double scale = std::max(1.0, (H * x + problem.q).lpNorm<Eigen::Infinity>());
      Eigen::Index worst = -1;
      double worst_y = -1e-12 * scale;
      for (Eigen::Index k = 0; k < y.size(); ++k) {
        if (y(k) < worst_y) {
          worst_y = y(k);
          worst = k;
        }
      }
      if (worst < 0) {
        done = true;
        break;
      }
      in_work[work[worst]] = false;
      work.erase(work.begin() + worst);
      continue;
    }

    double alpha = 1.0;
    Eigen::Index block = -1;
    const double dn = d.norm();
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (in_work[i]) continue;
      const double gd = G.row(i).dot(d);
      if (gd <= 1e-14 * G.row(i).norm() * dn) continue;
      const double step = std::max(0.0, h(i) - G.row(i).dot(x)) / gd;
      if (step < alpha) {
        alpha = step;
        block = i;
      }
    }
    if (block >= 0) {
      x += alpha * d;
      work.push_back(block);
      in_work[block] = true;
    } else {
      x = xs;
    }

    // Degenerate vertex: relax rows that are active but outside the working set.
    zero_steps = alpha == 0.0 ? zero_steps + 1 : 0;
    if (zero_steps > 2 * (n + static_cast<int>(rows))) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (!in_work[i] && h(i) - G.row(i).dot(x) <= feas_tol(h(i))) h(i) += 1e-12 * (1.0 + std::abs(h(i)));
      }
      sol.perturbed = true;
      zero_steps = 0;
    }
  }

  sol.x = std::move(x);
  sol.iterations = it;
  sol.kkt_residual = check_kkt(problem, sol.x, tol);
  if (done && sol.kkt_residual <= tol) {
    sol.status = QpStatus::Optimal;
  } else {
    sol.status = QpStatus::IterLimit;
  }
  return sol;
}

}  // namespace walras
