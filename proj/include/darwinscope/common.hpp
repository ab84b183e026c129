#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace darwinscope {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Largest total Hilbert-space dimension the dense backend accepts.
inline constexpr int kDimensionCap = 1 << 14;

enum class ErrorCode {
  InvalidSubset,
  InvalidOperator,
  DegenerateSet,
  NullComponent,
  MalformedPartition,
  LayoutMismatch,
  EnumerationTooLarge,
  AlignmentFailed,
  DegeneratePointer,
  DimensionCap,
  InvalidArgument,
  ParseError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

/// Tolerances shared by every module. One record so callers can tighten or
/// loosen the whole stack consistently.
struct NumericPolicy {
  double orthonormality_tol = 1e-10;
  double hermiticity_tol = 1e-10;
  double normalization_tol = 1e-9;
  double rank_tol = 1e-8;          // numerical-rank cutoff for singular values
  double eigenvalue_clamp = 1e-10; // eigenvalues in [-clamp, 0) are set to 0
  double zero_probability = 1e-12; // probabilities below this contribute 0 bits
};

inline const NumericPolicy& default_policy() {
  static const NumericPolicy policy{};
  return policy;
}

using Rng = std::mt19937_64;

/// Unit-norm complex Gaussian vector (Haar-distributed direction).
VectorXcd random_state_vector(int dim, Rng& rng);

/// Haar-distributed unitary via QR with positive-diagonal phase fix.
MatrixXcd random_unitary(int dim, Rng& rng);

/// First `count` columns of a Haar unitary.
MatrixXcd random_orthonormal_frame(int dim, int count, Rng& rng);

}  // namespace darwinscope
