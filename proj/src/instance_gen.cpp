#include "walras/instance_gen.hpp"

#include "walras/qp.hpp"

#include <cmath>

namespace walras {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

Xoshiro256 Xoshiro256::stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t a = seed;
  std::uint64_t b = stream ^ 0xd1b54a32d192ed03ULL;
  return Xoshiro256(splitmix64(a) ^ (splitmix64(b) * 0x9e3779b97f4a7c15ULL));
}

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Stream ids per drawn object; attempts are spaced by kStreamStride.
enum Stream : std::uint64_t { kCostFactor = 1, kTaxFactor, kConstraintA, kConstraintB, kAnchor, kUtility };
constexpr std::uint64_t kStreamStride = 16;

}  // namespace

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Xoshiro256::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Xoshiro256::uniform_open(double lo, double hi) {
  for (;;) {
    const double v = uniform(lo, hi);
    if (v > lo && v < hi) return v;
  }
}

void validate_config(const GenConfig& c) {
  auto require = [](bool cond, const char* what) {
    if (!cond) throw Error(ErrorCode::InvalidInput, what);
  };
  require(c.n >= 1, "n must be at least 1");
  require(c.m >= 1, "m must be at least 1");
  require(c.factor.lo < c.factor.hi, "factor range is empty");
  require(c.constraint.lo < c.constraint.hi, "constraint range is empty");
  require(c.constraint.lo >= 0.0, "constraint entries must be nonnegative");
  require(c.p0.lo < c.p0.hi, "p0 range is empty");
  require(c.box.lo < c.box.hi, "box range is empty");
  require(c.l_max > 0.0, "l_max must be positive");
  require(c.floor_fraction > 0.0 && c.floor_fraction < 1.0, "floor fraction must lie in (0,1)");
}

Matrix gram(const Matrix& factor) { return factor.transpose() * factor; }

Matrix pd_from_factor(int n, Interval range, Xoshiro256& rng, double min_eig, int* redraws) {
  int count = 0;
  for (;;) {
    Matrix F(n, n);
    // Row-major draw order so the stream layout does not depend on storage order.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) F(i, j) = rng.uniform(range.lo, range.hi);
    Matrix P = gram(F);
    P = 0.5 * (P + P.transpose());
    if (min_eigenvalue(P) >= min_eig) {
      if (redraws) *redraws = count;
      return P;
    }
    ++count;
  }
}

namespace {

// max l'x over X, solved as a QP with a 1e-10 ridge.
double max_utility(const Vector& l, const Matrix& A, const Vector& b) {
  const auto n = static_cast<int>(l.size());
  QpProblem lp;
  lp.Q = 1e-10 * Matrix::Identity(n, n);
  lp.q = -l;
  lp.A = A;
  lp.b = b;
  lp.nonneg = true;
  const QpSolution sol = solve_qp(lp, 1e-9, QpDefaults::max_iter(n, lp.num_constraints()));
  if (sol.status != QpStatus::Optimal) return -1.0;
  return l.dot(sol.x);
}

}  // namespace

GeneratedInstance random_instance(const GenConfig& config) {
  validate_config(config);
  const int n = config.n;
  const int m = config.m;

  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::uint64_t base = kStreamStride * static_cast<std::uint64_t>(attempt);
    auto rng = [&](Stream s) { return Xoshiro256::stream(config.seed, base + s); };

    GenMetadata meta;
    meta.seed = config.seed;
    meta.config = config;
    meta.attempts = attempt + 1;

    AgentCosts costs;
    int redraws_c = 0;
    int redraws_b = 0;
    auto rc = rng(kCostFactor);
    costs.C = pd_from_factor(n, config.factor, rc, config.min_eigenvalue, &redraws_c);
    auto rb = rng(kTaxFactor);
    costs.B = pd_from_factor(n, config.factor, rb, config.min_eigenvalue, &redraws_b);
    meta.factor_redraws = redraws_c + redraws_b;

    FeasibleSet X;
    X.A.resize(m, n);
    X.b.resize(m);
    auto ra = rng(kConstraintA);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) X.A(i, j) = ra.uniform_open(config.constraint.lo, config.constraint.hi);
    auto rbv = rng(kConstraintB);
    for (int i = 0; i < m; ++i) X.b(i) = rbv.uniform_open(config.constraint.lo, config.constraint.hi);

    auto rl = rng(kUtility);
    costs.l.resize(n);
    for (int j = 0; j < n; ++j) costs.l(j) = config.l_max * (1.0 - rl.uniform01());

    const double umax = max_utility(costs.l, X.A, X.b);
    if (!(umax > 0.0)) continue;
    costs.M = config.floor_fraction * umax;

    auto rp = rng(kAnchor);
    Vector p0(n);
    for (int j = 0; j < n; ++j) p0(j) = rp.uniform(config.p0.lo, config.p0.hi);

    PriceDomain domain = config.domain_kind == PriceDomain::Kind::Box
                             ? PriceDomain::box(Vector::Constant(n, config.box.lo), Vector::Constant(n, config.box.hi))
                             : PriceDomain::orthant();

    ModelInstance inst;
    try {
      inst = make_instance(std::move(costs), std::move(X), std::move(domain), std::move(p0));
    } catch (const Error&) {
      continue;
    }
    if (!validate_instance(inst).ok()) continue;
    return GeneratedInstance{std::move(inst), meta};
  }
  throw Error(ErrorCode::GenerationFailed, "no valid instance after 100 resampling attempts");
}

}  // namespace walras
