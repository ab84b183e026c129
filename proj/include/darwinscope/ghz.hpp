#pragma once

#include <optional>
#include <string>
#include <vector>

#include "darwinscope/common.hpp"
#include "darwinscope/hilbert.hpp"
#include "darwinscope/partitions.hpp"

namespace darwinscope {

// Branch expansion sum_i alpha_i (x)_j |psi_i^(j)> of a state over the
// fractions of a partition. Branch vectors are normalized per fraction and
// linearly independent across branches; the orthonormal flag marks the
// stricter pairwise-orthogonal case.
struct SemiGHZDecomposition {
  Partition partition;
  std::vector<Complex> coefficients;
  // branch_vectors[i][j]: vector of branch i on fraction j (partition order)
  std::vector<std::vector<VectorXcd>> branch_vectors;
  bool orthonormal = false;

  int branch_count() const { return static_cast<int>(coefficients.size()); }
  // Tensor product of branch i's fraction vectors on the global space.
  VectorXcd branch_global(const SystemLayout& layout, int i) const;
  VectorXcd reconstruct(const SystemLayout& layout) const;
};

struct VerifyReport {
  bool valid = false;
  double reconstruction_error = 0.0;
  std::vector<int> gram_ranks;      // per fraction
  bool orthonormal = false;         // measured, not copied from the input
  double coefficient_weight = 0.0;  // sum |alpha_i|^2
  std::string failure;              // empty when valid
};

VerifyReport verify_semi_ghz(const PureState& state,
                             const SemiGHZDecomposition& dec, double tol,
                             const NumericPolicy& policy = default_policy());

struct DetectOptions {
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int max_restarts = 0;  // per deflation level; 0 picks the default budget
};

// Searches for an orthonormal branch decomposition with reconstruction
// residual <= tol. Branches come back sorted by descending |alpha| with a
// fixed phase convention (first significant amplitude of each fraction vector
// real positive). Returns nullopt when no such decomposition is found.
std::optional<SemiGHZDecomposition> detect_ghz(const PureState& state,
                                               const Partition& partition,
                                               const DetectOptions& opts = {});

// Finds `count` pairwise-orthogonal product vectors (w.r.t. the dim_left x
// dim_right split) spanning the column space of `basis` (orthonormal columns,
// count == columns). Rank-1 alternating eigen-iteration with random restarts
// and deflation inside the subspace.
std::optional<std::vector<VectorXcd>> product_vectors_in_subspace(
    const MatrixXcd& basis, int dim_left, int dim_right, int count,
    const DetectOptions& opts = {});

struct BranchMatch {
  std::vector<int> permutation;  // branch i of a <-> permutation[i] of b
  std::vector<Complex> phases;   // unit phases applied to b's branches
  double max_residual = 0.0;
};

// Greedy overlap assignment between the global branch vectors of the two
// decompositions; nullopt when branch counts differ or the best assignment
// leaves a residual above tol.
std::optional<BranchMatch> match_decompositions(
    const SemiGHZDecomposition& a, const SemiGHZDecomposition& b,
    const SystemLayout& layout, double tol);

// Greedily splits fractions (binary splits, smallest fraction first) while
// detection still succeeds on the refined partition; the marked system
// fraction is never split. Returns the decomposition on the finest partition
// reached.
SemiGHZDecomposition fine_grain(const PureState& state,
                                const SemiGHZDecomposition& dec,
                                const DetectOptions& opts = {});

struct EtutScanOptions {
  double detect_tol = 1e-8;
  double match_tol = 1e-6;
  std::uint64_t seed = 0;
  int cap = 10;
  bool allow_large = false;
};

struct EtutScanResult {
  bool reference_found = false;
  std::optional<SemiGHZDecomposition> reference;
  long long scanned = 0;           // candidate partitions enumerated
  long long comparable_count = 0;  // mutually comparable candidates
  long long detections = 0;        // decompositions found among those
  long long violations = 0;        // detections that fail to match
  std::vector<Partition> violating;
};

// Detects a reference decomposition w.r.t. `reference`, then enumerates every
// candidate partition (environment partitions when the reference marks a
// system fraction), runs detection on the mutually comparable ones, and counts
// candidates whose decomposition fails to match the reference.
EtutScanResult etut_scan(const PureState& state, const Partition& reference,
                         const EtutScanOptions& opts = {});

}  // namespace darwinscope
