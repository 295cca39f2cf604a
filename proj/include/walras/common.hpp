#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace walras {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  InvalidInput,
  NotPositiveDefinite,
  InnerSolveFailed,
  GenerationFailed,
};

const char* to_string(ErrorCode code);

/// Exception type for all library failures. The code identifies the
/// failure class; the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// max(||v||, 1), the normalizer shared by the stopping rule and residuals.
inline double norm_floor_one(const Vector& v) {
  const double n = v.norm();
  return n > 1.0 ? n : 1.0;
}

}  // namespace walras
