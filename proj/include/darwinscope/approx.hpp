#pragma once

#include <optional>
#include <vector>

#include "darwinscope/common.hpp"
#include "darwinscope/ghz.hpp"
#include "darwinscope/hilbert.hpp"
#include "darwinscope/partitions.hpp"

namespace darwinscope {

// Candidate branch system: per fraction, an ordered orthonormal set of
// branch-count vectors (columns).
struct ProductBasisFrame {
  Partition partition;
  std::vector<MatrixXcd> frames;  // frames[j]: dim_j x branch_count

  int branch_count() const {
    return frames.empty() ? 0 : static_cast<int>(frames[0].cols());
  }
  VectorXcd branch_global(const SystemLayout& layout, int i) const;
};

// Off-branch weight 1 - sum_i |<branch_i|Psi>|^2, clamped to [0, 1].
double delta2(const PureState& state, const ProductBasisFrame& frame,
              const NumericPolicy& policy = default_policy());

struct FitOptions {
  std::uint64_t seed = 0;
  int restarts = 16;
  int max_iters = 500;
  double conv_tol = 1e-12;
};

struct GhzFitResult {
  ProductBasisFrame frame;
  double delta2 = 1.0;
  std::vector<Complex> coefficients;  // <branch_i|Psi>
  double objective = 0.0;             // sum_i |<branch_i|Psi>|^2
  bool converged = false;
  int iterations = 0;
  int restart_winner = -1;
  std::vector<double> objective_trace;  // winning restart, per iteration
};

// Alternating maximization of sum_i |<branch_i|Psi>|^2 over per-fraction
// orthonormal frames: each fraction's frame is refreshed by a weighted polar
// alignment to its conditional vectors, which never decreases the objective.
// Multi-start; the best (objective, restart index) result wins.
GhzFitResult fit_ghz(const PureState& state, const Partition& partition,
                     int branches, const FitOptions& opts = {},
                     const NumericPolicy& policy = default_policy());

struct EpsilonMatrices {
  std::vector<int> alignment;  // reference branch i <-> fit branch alignment[i]
  VectorXd theta;              // phases of the aligned full overlaps
  MatrixXcd eps;               // full-overlap deviation from identity
  VectorXd theta_s;
  MatrixXcd eps_s;             // system-factor overlaps only
  VectorXd theta_env;
  MatrixXcd eps_env;           // environment-factor overlaps only
  double max_abs_eps = 0.0;
  double max_abs_eps_s_diag = 0.0;
  double consistency_residual = 0.0;
};

// Overlap matrices between the reference branches and the fitted frame after
// greedy branch alignment. Both partitions must mark the same system
// fraction; phases are fixed so diagonal overlaps come out real nonnegative.
EpsilonMatrices epsilon_matrices(const SemiGHZDecomposition& reference,
                                 const SystemLayout& layout,
                                 const GhzFitResult& fit);

}  // namespace darwinscope
