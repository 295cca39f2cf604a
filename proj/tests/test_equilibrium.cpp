#include "doctest.h"
#include "support.hpp"

using namespace walras;
using namespace walras::testing;

TEST_CASE("supply and demand on the scalar instance") {
  const ModelInstance inst = combined_1d();
  CHECK(supply(inst, vec({4.0}))(0) == doctest::Approx(2.0));
  CHECK(supply(inst, vec({30.0}))(0) == doctest::Approx(10.0));
  CHECK(std::abs(supply(inst, vec({-2.0}))(0)) < 1e-12);

  CHECK(demand(inst, vec({1.0}))(0) == doctest::Approx(2.0));
  CHECK(demand(inst, vec({-6.0}))(0) == doctest::Approx(3.0));
  CHECK(demand(inst, vec({-30.0}))(0) == doctest::Approx(10.0));

  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const double p = std::uniform_real_distribution<double>(-40.0, 40.0)(rng);
    CHECK(supply(inst, vec({p}))(0) == doctest::Approx(supply_1d(p, 10.0)).epsilon(1e-9));
    CHECK(demand(inst, vec({p}))(0) == doctest::Approx(demand_1d(p, 10.0)).epsilon(1e-9));
  }
}

TEST_CASE("excess supply") {
  const ModelInstance inst = combined_1d();
  const MapEvaluation at4 = excess(inst, vec({4.0}));
  CHECK(std::abs(at4.excess(0)) < 1e-12);
  CHECK(at4.supply(0) == doctest::Approx(2.0));
  CHECK(at4.demand(0) == doctest::Approx(2.0));
  CHECK(excess(inst, vec({0.0})).excess(0) == doctest::Approx(-2.0));
  const MapEvaluation at30 = excess(inst, vec({30.0}));
  CHECK(at30.excess(0) == doctest::Approx(8.0));
  CHECK(at30.demand(0) == doctest::Approx(2.0));
}

TEST_CASE("project_price") {
  CHECK(project_price(PriceDomain::orthant(), vec({1.0, -2.0})) == vec({1.0, 0.0}));
  const PriceDomain box = PriceDomain::box(vec({0.0, 0.0}), vec({10.0, 10.0}));
  CHECK(project_price(box, vec({12.0, 5.0})) == vec({10.0, 5.0}));
  CHECK(project_price(PriceDomain::orthant(), vec({3.0, 4.0})) == vec({3.0, 4.0}));

  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const Vector p = random_vector(rng, 3, -20.0, 20.0);
    const Vector p2 = random_vector(rng, 3, -20.0, 20.0);
    for (const PriceDomain& d : {PriceDomain::orthant(), PriceDomain::box(Vector::Zero(3), Vector::Constant(3, 10.0))}) {
      const Vector pp = project_price(d, p);
      CHECK(project_price(d, pp) == pp);
      CHECK((pp - project_price(d, p2)).norm() <= (p - p2).norm() + 1e-15);
    }
  }
}

TEST_CASE("natural map and residual") {
  const ModelInstance inst = combined_1d();
  CHECK(inst.constants.eta == doctest::Approx(1.0));
  CHECK(nat_map(inst, vec({4.0}), 1.0)(0) == doctest::Approx(4.0));
  CHECK(nat_map(inst, vec({0.0}), 1.0)(0) == doctest::Approx(2.0));
  CHECK(nat_map(inst, vec({2.0}), 1.0)(0) == doctest::Approx(3.0));

  CHECK(vi_residual(inst, vec({4.0}), 1.0) <= 1e-8);
  CHECK(vi_residual(inst, vec({0.0}), 1.0) == doctest::Approx(2.0));
  CHECK(vi_residual(saturated_1d(), vec({8.0}), 1.0) <= 1e-8);

  CHECK_THROWS_AS(nat_map(inst, vec({1.0}), 0.0), Error);
  CHECK_THROWS_AS(nat_map(inst, vec({1.0}), -1.0), Error);
  // Outside the guaranteed range the map still evaluates.
  CHECK_FALSE(eta_in_range(inst.constants, 3.0));
  CHECK(eta_in_range(inst.constants, 2.0));
  CHECK(nat_map(inst, vec({0.0}), 3.0)(0) == doctest::Approx(6.0));
}

TEST_CASE("evaluator memoizes on the exact price") {
  const ModelInstance inst = combined_1d();
  MapEvaluator eval(inst);
  eval.excess(vec({3.0}));
  const long after_first = eval.qp_solves();
  CHECK(after_first == 2);
  eval.nat_map(vec({3.0}), 1.0);
  eval.vi_residual(vec({3.0}), 1.0);
  CHECK(eval.qp_solves() == after_first);
  eval.excess(vec({std::nextafter(3.0, 4.0)}));
  CHECK(eval.qp_solves() == after_first + 2);
}

namespace {

void check_map_properties(const ModelInstance& inst, std::mt19937_64& rng, int pairs) {
  MapEvaluator eval(inst);
  const double eta = inst.constants.mu_F;
  const int n = inst.n;
  for (int t = 0; t < pairs; ++t) {
    const Vector p = random_vector(rng, n, 0.0, 100.0);
    const Vector p2 = random_vector(rng, n, 0.0, 100.0);
    const MapEvaluation e = eval.excess(p);
    const MapEvaluation e2 = eval.excess(p2);
    const Vector d = p - p2;
    const Vector ds = e.supply - e2.supply;
    const Vector dd = e.demand - e2.demand;

    CHECK(ds.dot(d) >= inst.constants.mu_c * ds.squaredNorm() - 1e-7);
    CHECK(-dd.dot(d) >= inst.constants.mu_t * dd.squaredNorm() - 1e-7);
    CHECK((e.excess - e2.excess).dot(d) >= -1e-7);
    CHECK(ds.norm() <= inst.constants.L_c * d.norm() + 1e-7);
    CHECK(dd.norm() <= inst.constants.L_t * d.norm() + 1e-7);

    const Vector Tp = eval.nat_map(p, eta);
    const Vector Tp2 = eval.nat_map(p2, eta);
    CHECK((Tp - Tp2).norm() <= d.norm() + 1e-7);
  }
}

}  // namespace

TEST_CASE("natural map properties on generated instances") {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 100; seed < 103; ++seed) {
    GenConfig cfg;
    cfg.n = 5;
    cfg.m = 3;
    cfg.seed = seed;
    check_map_properties(random_instance(cfg).instance, rng, 40);
  }
  GenConfig box;
  box.n = 4;
  box.m = 2;
  box.domain_kind = PriceDomain::Kind::Box;
  check_map_properties(random_instance(box).instance, rng, 40);
}

TEST_CASE("fixed points of the natural map are equilibria") {
  // On the saturated instance every p >= 4 is fixed and nothing below is.
  const ModelInstance inst = saturated_1d();
  for (double p : {4.0, 5.5, 10.0, 80.0}) CHECK(nat_map(inst, vec({p}), 1.0)(0) == doctest::Approx(p));
  for (double p : {0.0, 1.0, 3.9}) CHECK(nat_map(inst, vec({p}), 1.0)(0) > p);
}
