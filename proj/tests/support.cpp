#include "support.hpp"

#include <Eigen/LU>

#include <limits>

namespace walras::testing {

std::optional<Vector> brute_force_qp(const QpProblem& problem) {
  Matrix G;
  Vector h;
  problem.inequality_form(G, h);
  const Eigen::Index n = problem.dim();
  const Eigen::Index rows = G.rows();
  const Matrix H = 2.0 * problem.Q;

  std::optional<Vector> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << rows); ++mask) {
    std::vector<Eigen::Index> S;
    for (Eigen::Index i = 0; i < rows; ++i)
      if (mask & (1u << i)) S.push_back(i);
    const auto s = static_cast<Eigen::Index>(S.size());
    if (s > n) continue;

    Matrix K = Matrix::Zero(n + s, n + s);
    Vector rhs(n + s);
    K.topLeftCorner(n, n) = H;
    rhs.head(n) = -problem.q;
    for (Eigen::Index k = 0; k < s; ++k) {
      K.block(0, n + k, n, 1) = G.row(S[k]).transpose();
      K.block(n + k, 0, 1, n) = G.row(S[k]);
      rhs(n + k) = h(S[k]);
    }
    Eigen::FullPivLU<Matrix> lu(K);
    if (lu.rank() < n + s) continue;
    const Vector sol = lu.solve(rhs);
    const Vector x = sol.head(n);
    const Vector y = sol.tail(s);

    if ((y.array() < -1e-9).any()) continue;
    if (((G * x - h).array() > 1e-9).any()) continue;
    const double obj = problem.objective(x);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

QpProblem random_small_qp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_int_distribution<int> cons(0, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  const int n = dim(rng);
  const int m = cons(rng);
  QpProblem qp;
  const Matrix F = 3.0 * Matrix::NullaryExpr(n, n, [&] { return u(rng); });
  qp.Q = F.transpose() * F + 0.1 * Matrix::Identity(n, n);
  qp.q = random_vector(rng, n, -10.0, 10.0);
  qp.nonneg = coin(rng);

  // Known feasible point, nonnegative so that the bounds can be switched on.
  const Vector xf = random_vector(rng, n, 0.0, 2.0);
  qp.A = 5.0 * Matrix::NullaryExpr(m, n, [&] { return u(rng); });
  qp.b = qp.A * xf + random_vector(rng, m, 0.0, 2.0);
  if (coin(rng)) {
    const Vector g = random_vector(rng, n, 0.0, 1.0);
    qp.floor = LinearFloor{g, g.dot(xf) - std::abs(u(rng))};
  }
  return qp;
}

}  // namespace walras::testing
