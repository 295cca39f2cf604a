#pragma once

#include "walras/model.hpp"

#include <cstdint>

namespace walras {

/// xoshiro256** 1.0 seeded through splitmix64. The output sequence is fully
/// specified, so generated benchmark data is identical on every platform.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  /// Independent substream for (seed, stream): the pair is hashed through
  /// splitmix64 before seeding.
  static Xoshiro256 stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform on (lo, hi).
  double uniform_open(double lo, double hi);

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct GenConfig {
  int n = 5;
  int m = 3;
  PriceDomain::Kind domain_kind = PriceDomain::Kind::NonnegOrthant;
  std::uint64_t seed = 42;
  Interval factor{-10.0, 10.0};   // entries of C1, B1
  Interval constraint{0.0, 20.0};  // entries of A and b, open interval
  Interval p0{0.0, 100.0};
  double l_max = 10.0;             // l uniform in (0, l_max]
  Interval box{0.0, 100.0};        // bounds of the rectangle domain
  double floor_fraction = 0.5;     // M = floor_fraction * max{l'x : x in X}
  double min_eigenvalue = 1e-8;    // re-draw threshold for F'F
};

/// Throws InvalidInput on n, m < 1 or an empty range.
void validate_config(const GenConfig& config);

struct GenMetadata {
  std::uint64_t seed = 0;
  GenConfig config;
  int factor_redraws = 0;  // F'F re-draws below the eigenvalue threshold
  int attempts = 1;        // whole-instance resamples until validation passed
};

struct GeneratedInstance {
  ModelInstance instance;
  GenMetadata meta;
};

/// F'F for a square factor F.
Matrix gram(const Matrix& factor);

/// F'F with F n x n uniform on `range`, re-drawn while lambda_min(F'F) < min_eig.
/// `redraws` (optional) receives the number of re-draws.
Matrix pd_from_factor(int n, Interval range, Xoshiro256& rng, double min_eig = 1e-8, int* redraws = nullptr);

/// Random instance. Throws GenerationFailed after 100 failed resamples.
GeneratedInstance random_instance(const GenConfig& config);

}  // namespace walras
