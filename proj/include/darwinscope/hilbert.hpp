#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "darwinscope/common.hpp"

namespace darwinscope {

/// Ordered list of elementary-system local dimensions. Elementary systems are
/// 1-based; system 1 is the most significant index of the global row-major
/// amplitude ordering.
class SystemLayout {
 public:
  SystemLayout() = default;
  explicit SystemLayout(std::vector<int> dims);

  int size() const { return static_cast<int>(dims_.size()); }
  int dim(int system) const;  // 1-based
  int total_dim() const { return total_dim_; }
  const std::vector<int>& dims() const { return dims_; }

  bool operator==(const SystemLayout& other) const {
    return dims_ == other.dims_;
  }

  /// Local dimension of the row-major product space of a subset (ascending
  /// 1-based system indices).
  int subset_dim(const std::vector<int>& subset) const;

  /// Validates a subset: nonempty, strictly ascending, in range.
  void check_subset(const std::vector<int>& subset) const;

  /// Ascending complement of a subset.
  std::vector<int> complement(const std::vector<int>& subset) const;

 private:
  std::vector<int> dims_;
  int total_dim_ = 0;
};

/// Normalized amplitude vector over a SystemLayout.
struct PureState {
  SystemLayout layout;
  VectorXcd amplitudes;

  PureState() = default;
  PureState(SystemLayout layout_, VectorXcd amplitudes_,
            const NumericPolicy& policy = default_policy());
};

/// Square operator over the product space of `dims`. Hermiticity and unit
/// trace are checked at construction; positivity is checked where spectra are
/// actually computed.
struct DensityOperator {
  std::vector<int> dims;
  MatrixXcd matrix;

  DensityOperator() = default;
  DensityOperator(std::vector<int> dims_, MatrixXcd matrix_,
                  const NumericPolicy& policy = default_policy());

  int total_dim() const { return static_cast<int>(matrix.rows()); }
};

struct SchmidtResult {
  VectorXd singular_values;  // nonincreasing, nonnegative
  MatrixXcd left_vectors;    // columns, on the left subset's product space
  MatrixXcd right_vectors;   // columns, on the complement's product space
  int rank = 0;              // count of singular values above the rank cutoff
  double entropy_bits = 0.0;
};

/// Hermitian observable on a subset of elementary systems, stored as one
/// eigenvalue per eigenvector column. Degenerate spectra are allowed; outcome
/// probabilities group columns whose eigenvalues agree within `value_tol`.
struct HermitianObservable {
  std::vector<int> systems;  // ascending 1-based
  VectorXd eigenvalues;      // size = subspace dim
  MatrixXcd eigenvectors;    // orthonormal columns

  HermitianObservable() = default;
  HermitianObservable(std::vector<int> systems_, VectorXd eigenvalues_,
                      MatrixXcd eigenvectors_,
                      const NumericPolicy& policy = default_policy());

  bool nondegenerate(double value_tol = 1e-9) const;

  struct Outcome {
    double value;
    std::vector<int> columns;
  };
  std::vector<Outcome> outcomes(double value_tol = 1e-9) const;

  /// Computational-basis observable with eigenvalues 0,1,...,d-1.
  static HermitianObservable computational(const SystemLayout& layout,
                                           std::vector<int> systems);
};

// ---------------------------------------------------------------------------
// Tensor reshaping and contraction
// ---------------------------------------------------------------------------

/// Reshapes the state into a (subset_dim x rest_dim) matrix: rows indexed by
/// the subset's row-major local index, columns by the complement's.
MatrixXcd reshape_subset(const PureState& state, const std::vector<int>& subset);

/// <v (x) I | state>: contracts a vector on `subset` against the state,
/// returning the unnormalized coefficient vector on the complement.
VectorXcd contract_subset(const PureState& state, const std::vector<int>& subset,
                          const VectorXcd& v);

/// Assembles the amplitude vector of a product of per-part vectors on the
/// union of the parts (row-major over the union's ascending systems). The
/// parts must be disjoint.
VectorXcd assemble_product(const SystemLayout& layout,
                           const std::vector<std::pair<std::vector<int>, VectorXcd>>& parts);

/// Row-major local index of `subset` for every global basis index
/// (length layout.total_dim()).
std::vector<int> subset_index_map(const SystemLayout& layout,
                                  const std::vector<int>& subset);

/// Applies an operator supported on `subset` to the amplitude vector. The
/// operator is (subset_dim x subset_dim); the result is not renormalized.
VectorXcd apply_subset_operator(const PureState& state,
                                const std::vector<int>& subset,
                                const MatrixXcd& op);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

DensityOperator partial_trace(const PureState& state, const std::vector<int>& keep,
                              const NumericPolicy& policy = default_policy());

DensityOperator partial_trace(const DensityOperator& rho, const SystemLayout& layout,
                              const std::vector<int>& keep,
                              const NumericPolicy& policy = default_policy());

SchmidtResult schmidt(const PureState& state, const std::vector<int>& left,
                      const NumericPolicy& policy = default_policy());

double von_neumann_entropy(const DensityOperator& rho,
                           const NumericPolicy& policy = default_policy());

/// Unit vector in span{vectors} orthogonal to every vectors[j] except j == k
/// (1-based k). Errors with DegenerateSet when the set is not independent.
VectorXcd dual_vector(const std::vector<VectorXcd>& vectors, int k,
                      const NumericPolicy& policy = default_policy());

/// Normalized (|v><v| (x) I)|state>. Errors with NullComponent when the
/// overlap vanishes.
PureState project_component(const PureState& state, const std::vector<int>& subset,
                            const VectorXcd& projector_vector,
                            const NumericPolicy& policy = default_policy());

/// -sum p log2 p with clamping per policy.
double shannon_entropy_bits(const VectorXd& probabilities,
                            const NumericPolicy& policy = default_policy());

/// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityOperator& a, const DensityOperator& b);

}  // namespace darwinscope
