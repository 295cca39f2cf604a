#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include "walras/bilevel.hpp"
#include "walras/equilibrium.hpp"
#include "walras/instance_gen.hpp"
#include "walras/model.hpp"
#include "walras/qp.hpp"

#include <algorithm>
#include <optional>
#include <random>

namespace walras::testing {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Matrix mat1(double v) { return Matrix::Constant(1, 1, v); }

/// 1-D instance C = B = [[1]], l = [1], M = 2, A = [[1]], b = [upper], P = R+.
/// For p >= 0: S(p) = min(p/2, upper), D(p) = 2, so the equilibria are p = 4
/// when upper > 2 and the ray [4, inf) when upper == 2.
inline ModelInstance one_dim(double upper, double p0, std::optional<double> eta = std::nullopt) {
  AgentCosts costs{mat1(1.0), mat1(1.0), vec({1.0}), 2.0};
  FeasibleSet X{mat1(1.0), vec({upper})};
  return make_instance(costs, X, PriceDomain::orthant(), vec({p0}), eta);
}

inline ModelInstance combined_1d(double p0 = 0.0) { return one_dim(10.0, p0); }
inline ModelInstance saturated_1d(double p0 = 0.0) { return one_dim(2.0, p0); }

/// Analytic maps of the 1-D family (any real p).
inline double supply_1d(double p, double upper) { return std::clamp(p / 2.0, 0.0, upper); }
inline double demand_1d(double p, double upper) { return std::clamp(-p / 2.0, 2.0, upper); }

/// Enumerates every subset of at most n constraint rows, solves the
/// equality-constrained KKT system with a full-pivot LU, keeps the primal and
/// dual feasible points and returns the one with the lowest objective.
std::optional<Vector> brute_force_qp(const QpProblem& problem);

/// Random strongly convex QP with n <= 3, m <= 3 that has a known feasible point.
QpProblem random_small_qp(std::mt19937_64& rng);

/// Random point in a box, for property tests.
Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi);

}  // namespace walras::testing
