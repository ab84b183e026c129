#include "darwinscope/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace darwinscope {

// ============================================================================
// Random helpers
// ============================================================================

VectorXcd random_state_vector(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  return v / v.norm();
}

MatrixXcd random_unitary(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ();
  MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    double mag = std::abs(d);
    Complex phase = mag > 0 ? d / mag : Complex(1, 0);
    q.col(j) *= phase;
  }
  return q;
}

MatrixXcd random_orthonormal_frame(int dim, int count, Rng& rng) {
  if (count > dim)
    fail(ErrorCode::InvalidArgument, "frame size exceeds dimension");
  return random_unitary(dim, rng).leftCols(count);
}

// ============================================================================
// SystemLayout
// ============================================================================

SystemLayout::SystemLayout(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty())
    fail(ErrorCode::InvalidArgument, "layout needs at least one system");
  long total = 1;
  for (int d : dims_) {
    if (d < 2) fail(ErrorCode::InvalidArgument, "local dimensions must be >= 2");
    total *= d;
    if (total > kDimensionCap)
      fail(ErrorCode::DimensionCap,
           "total dimension exceeds dense backend cap " +
               std::to_string(kDimensionCap));
  }
  total_dim_ = static_cast<int>(total);
}

int SystemLayout::dim(int system) const {
  if (system < 1 || system > size())
    fail(ErrorCode::InvalidSubset, "system index out of range");
  return dims_[system - 1];
}

int SystemLayout::subset_dim(const std::vector<int>& subset) const {
  long d = 1;
  for (int s : subset) d *= dim(s);
  return static_cast<int>(d);
}

void SystemLayout::check_subset(const std::vector<int>& subset) const {
  if (subset.empty()) fail(ErrorCode::InvalidSubset, "empty subset");
  for (size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 1 || subset[i] > size())
      fail(ErrorCode::InvalidSubset,
           "system index " + std::to_string(subset[i]) + " out of range");
    if (i > 0 && subset[i] <= subset[i - 1])
      fail(ErrorCode::InvalidSubset, "subset must be strictly ascending");
  }
}

std::vector<int> SystemLayout::complement(const std::vector<int>& subset) const {
  std::vector<int> rest;
  size_t pos = 0;
  for (int s = 1; s <= size(); ++s) {
    if (pos < subset.size() && subset[pos] == s) {
      ++pos;
    } else {
      rest.push_back(s);
    }
  }
  return rest;
}

// ============================================================================
// Value types
// ============================================================================

PureState::PureState(SystemLayout layout_, VectorXcd amplitudes_,
                     const NumericPolicy& policy)
    : layout(std::move(layout_)), amplitudes(std::move(amplitudes_)) {
  if (amplitudes.size() != layout.total_dim())
    fail(ErrorCode::InvalidArgument, "amplitude count does not match layout");
  if (std::abs(amplitudes.norm() - 1.0) > policy.normalization_tol)
    fail(ErrorCode::InvalidArgument, "state vector is not normalized");
}

DensityOperator::DensityOperator(std::vector<int> dims_, MatrixXcd matrix_,
                                 const NumericPolicy& policy)
    : dims(std::move(dims_)), matrix(std::move(matrix_)) {
  long d = 1;
  for (int x : dims) d *= x;
  if (matrix.rows() != matrix.cols() || matrix.rows() != d)
    fail(ErrorCode::InvalidOperator, "operator shape does not match dims");
  double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > policy.hermiticity_tol)
    fail(ErrorCode::InvalidOperator, "operator is not Hermitian");
  if (std::abs(matrix.trace().real() - 1.0) > policy.normalization_tol ||
      std::abs(matrix.trace().imag()) > policy.normalization_tol)
    fail(ErrorCode::InvalidOperator, "operator trace is not 1");
}

HermitianObservable::HermitianObservable(std::vector<int> systems_,
                                         VectorXd eigenvalues_,
                                         MatrixXcd eigenvectors_,
                                         const NumericPolicy& policy)
    : systems(std::move(systems_)),
      eigenvalues(std::move(eigenvalues_)),
      eigenvectors(std::move(eigenvectors_)) {
  if (eigenvectors.rows() != eigenvectors.cols() ||
      eigenvalues.size() != eigenvectors.cols())
    fail(ErrorCode::InvalidOperator, "observable needs one eigenvalue per column");
  MatrixXcd gram = eigenvectors.adjoint() * eigenvectors;
  gram.diagonal().array() -= 1.0;
  if (gram.cwiseAbs().maxCoeff() > policy.orthonormality_tol)
    fail(ErrorCode::InvalidOperator, "eigenvectors are not orthonormal");
}

bool HermitianObservable::nondegenerate(double value_tol) const {
  for (int i = 0; i < eigenvalues.size(); ++i)
    for (int j = i + 1; j < eigenvalues.size(); ++j)
      if (std::abs(eigenvalues[i] - eigenvalues[j]) <= value_tol) return false;
  return true;
}

std::vector<HermitianObservable::Outcome> HermitianObservable::outcomes(
    double value_tol) const {
  std::vector<int> order(eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return eigenvalues[a] < eigenvalues[b]; });
  std::vector<Outcome> out;
  for (int col : order) {
    if (!out.empty() &&
        std::abs(out.back().value - eigenvalues[col]) <= value_tol) {
      out.back().columns.push_back(col);
    } else {
      out.push_back({eigenvalues[col], {col}});
    }
  }
  return out;
}

HermitianObservable HermitianObservable::computational(
    const SystemLayout& layout, std::vector<int> systems) {
  layout.check_subset(systems);
  int d = layout.subset_dim(systems);
  VectorXd values(d);
  for (int i = 0; i < d; ++i) values[i] = i;
  return HermitianObservable(std::move(systems), std::move(values),
                             MatrixXcd::Identity(d, d));
}

// ============================================================================
// Index machinery
// ============================================================================

namespace {

// Per-global-index local coordinates of a subset and of its complement.
struct SubsetSplit {
  int sub_dim = 1;
  int rest_dim = 1;
  std::vector<int> sub_index;   // size = total_dim
  std::vector<int> rest_index;  // size = total_dim
};

SubsetSplit split_indices(const SystemLayout& layout,
                          const std::vector<int>& subset) {
  const auto& dims = layout.dims();
  int n = layout.size();
  int total = layout.total_dim();

  std::vector<char> in_subset(n + 1, 0);
  for (int s : subset) in_subset[s] = 1;

  SubsetSplit split;
  for (int s = 1; s <= n; ++s)
    (in_subset[s] ? split.sub_dim : split.rest_dim) *= dims[s - 1];
  split.sub_index.resize(total);
  split.rest_index.resize(total);

  std::vector<int> digits(n, 0);
  for (int g = 0; g < total; ++g) {
    int sub = 0, rest = 0;
    for (int s = 1; s <= n; ++s)
      (in_subset[s] ? sub : rest) =
          (in_subset[s] ? sub : rest) * dims[s - 1] + digits[s - 1];
    split.sub_index[g] = sub;
    split.rest_index[g] = rest;
    for (int s = n - 1; s >= 0; --s) {  // odometer increment
      if (++digits[s] < dims[s]) break;
      digits[s] = 0;
    }
  }
  return split;
}

MatrixXcd state_matrix(const PureState& state, const std::vector<int>& subset) {
  SubsetSplit split = split_indices(state.layout, subset);
  MatrixXcd m(split.sub_dim, split.rest_dim);
  for (int g = 0; g < state.layout.total_dim(); ++g)
    m(split.sub_index[g], split.rest_index[g]) = state.amplitudes[g];
  return m;
}

}  // namespace

MatrixXcd reshape_subset(const PureState& state, const std::vector<int>& subset) {
  state.layout.check_subset(subset);
  return state_matrix(state, subset);
}

VectorXcd contract_subset(const PureState& state, const std::vector<int>& subset,
                          const VectorXcd& v) {
  state.layout.check_subset(subset);
  if (v.size() != state.layout.subset_dim(subset))
    fail(ErrorCode::InvalidArgument, "vector does not match subset dimension");
  MatrixXcd m = state_matrix(state, subset);
  return (v.adjoint() * m).transpose();
}

VectorXcd assemble_product(
    const SystemLayout& layout,
    const std::vector<std::pair<std::vector<int>, VectorXcd>>& parts) {
  std::vector<int> all;
  for (const auto& [systems, vec] : parts) {
    layout.check_subset(systems);
    if (vec.size() != layout.subset_dim(systems))
      fail(ErrorCode::InvalidArgument, "part vector does not match its systems");
    all.insert(all.end(), systems.begin(), systems.end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    fail(ErrorCode::InvalidArgument, "product parts overlap");

  int union_dim = layout.subset_dim(all);
  std::vector<int> union_dims;
  for (int s : all) union_dims.push_back(layout.dim(s));
  // position of each system inside the union's digit string
  std::vector<int> pos_of(layout.size() + 1, -1);
  for (size_t i = 0; i < all.size(); ++i) pos_of[all[i]] = static_cast<int>(i);

  VectorXcd out(union_dim);
  std::vector<int> digits(all.size(), 0);
  for (int u = 0; u < union_dim; ++u) {
    Complex amp(1.0, 0.0);
    for (const auto& [systems, vec] : parts) {
      int loc = 0;
      for (int s : systems) loc = loc * layout.dim(s) + digits[pos_of[s]];
      amp *= vec[loc];
    }
    out[u] = amp;
    for (int i = static_cast<int>(all.size()) - 1; i >= 0; --i) {
      if (++digits[i] < union_dims[i]) break;
      digits[i] = 0;
    }
  }
  return out;
}

std::vector<int> subset_index_map(const SystemLayout& layout,
                                  const std::vector<int>& subset) {
  layout.check_subset(subset);
  return split_indices(layout, subset).sub_index;
}

VectorXcd apply_subset_operator(const PureState& state,
                                const std::vector<int>& subset,
                                const MatrixXcd& op) {
  state.layout.check_subset(subset);
  SubsetSplit split = split_indices(state.layout, subset);
  if (op.rows() != split.sub_dim || op.cols() != split.sub_dim)
    fail(ErrorCode::InvalidOperator, "operator does not match subset dimension");
  MatrixXcd m(split.sub_dim, split.rest_dim);
  for (int g = 0; g < state.layout.total_dim(); ++g)
    m(split.sub_index[g], split.rest_index[g]) = state.amplitudes[g];
  m = op * m;
  VectorXcd out(state.layout.total_dim());
  for (int g = 0; g < state.layout.total_dim(); ++g)
    out[g] = m(split.sub_index[g], split.rest_index[g]);
  return out;
}

// ============================================================================
// Operations
// ============================================================================

DensityOperator partial_trace(const PureState& state,
                              const std::vector<int>& keep,
                              const NumericPolicy& policy) {
  state.layout.check_subset(keep);
  MatrixXcd m = state_matrix(state, keep);
  MatrixXcd rho = m * m.adjoint();
  rho = (rho + rho.adjoint().eval()) / 2.0;  // scrub roundoff asymmetry
  std::vector<int> dims;
  for (int s : keep) dims.push_back(state.layout.dim(s));
  return DensityOperator(std::move(dims), std::move(rho), policy);
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const SystemLayout& layout,
                              const std::vector<int>& keep,
                              const NumericPolicy& policy) {
  layout.check_subset(keep);
  if (rho.total_dim() != layout.total_dim())
    fail(ErrorCode::LayoutMismatch, "operator does not match layout");
  SubsetSplit split = split_indices(layout, keep);
  MatrixXcd red = MatrixXcd::Zero(split.sub_dim, split.sub_dim);
  // group global indices by complement coordinate
  std::vector<std::vector<int>> by_rest(split.rest_dim);
  for (int g = 0; g < layout.total_dim(); ++g)
    by_rest[split.rest_index[g]].push_back(g);
  for (const auto& group : by_rest)
    for (int g1 : group)
      for (int g2 : group)
        red(split.sub_index[g1], split.sub_index[g2]) += rho.matrix(g1, g2);
  red = (red + red.adjoint().eval()) / 2.0;
  std::vector<int> dims;
  for (int s : keep) dims.push_back(layout.dim(s));
  return DensityOperator(std::move(dims), std::move(red), policy);
}

SchmidtResult schmidt(const PureState& state, const std::vector<int>& left,
                      const NumericPolicy& policy) {
  state.layout.check_subset(left);
  if (static_cast<int>(left.size()) == state.layout.size())
    fail(ErrorCode::InvalidSubset, "left subset must be proper");
  MatrixXcd m = state_matrix(state, left);
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SchmidtResult res;
  res.singular_values = svd.singularValues();
  res.left_vectors = svd.matrixU();
  res.right_vectors = svd.matrixV().conjugate();
  res.rank = 0;
  double entropy = 0.0;
  for (int i = 0; i < res.singular_values.size(); ++i) {
    double s = res.singular_values[i];
    if (s > policy.rank_tol) ++res.rank;
    double p = s * s;
    if (p > policy.zero_probability) entropy -= p * std::log2(p);
  }
  res.entropy_bits = entropy;
  return res;
}

double shannon_entropy_bits(const VectorXd& probabilities,
                            const NumericPolicy& policy) {
  double h = 0.0;
  for (int i = 0; i < probabilities.size(); ++i) {
    double p = probabilities[i];
    if (p < -policy.eigenvalue_clamp)
      fail(ErrorCode::InvalidArgument, "negative probability");
    if (p > policy.zero_probability) h -= p * std::log2(p);
  }
  return h;
}

double von_neumann_entropy(const DensityOperator& rho,
                           const NumericPolicy& policy) {
  double herm = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > policy.hermiticity_tol)
    fail(ErrorCode::InvalidOperator, "operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.matrix,
                                              Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double p = es.eigenvalues()[i];
    if (p < -policy.eigenvalue_clamp)
      fail(ErrorCode::InvalidOperator, "operator has a negative eigenvalue");
    if (p > policy.zero_probability) entropy -= p * std::log2(p);
  }
  return std::max(entropy, 0.0);
}

VectorXcd dual_vector(const std::vector<VectorXcd>& vectors, int k,
                      const NumericPolicy& policy) {
  int r = static_cast<int>(vectors.size());
  if (r == 0) fail(ErrorCode::InvalidArgument, "empty vector set");
  if (k < 1 || k > r) fail(ErrorCode::InvalidArgument, "dual index out of range");
  int d = static_cast<int>(vectors[0].size());
  MatrixXcd basis(d, r);
  for (int i = 0; i < r; ++i) {
    if (vectors[i].size() != d)
      fail(ErrorCode::InvalidArgument, "vectors have mixed dimensions");
    basis.col(i) = vectors[i];
  }
  MatrixXcd gram = basis.adjoint() * basis;
  if (std::abs(gram.determinant()) <= 1e-12)
    fail(ErrorCode::DegenerateSet, "vector set is linearly dependent");
  VectorXcd rhs = VectorXcd::Zero(r);
  rhs[k - 1] = 1.0;
  VectorXcd coeffs = gram.ldlt().solve(rhs);
  VectorXcd dual = basis * coeffs;
  double norm = dual.norm();
  if (norm <= policy.zero_probability)
    fail(ErrorCode::DegenerateSet, "dual vector degenerated to zero");
  return dual / norm;
}

PureState project_component(const PureState& state,
                            const std::vector<int>& subset,
                            const VectorXcd& projector_vector,
                            const NumericPolicy& policy) {
  double vnorm = projector_vector.norm();
  if (vnorm <= policy.zero_probability)
    fail(ErrorCode::InvalidArgument, "projector vector is zero");
  VectorXcd unit = projector_vector / vnorm;
  VectorXcd rest = contract_subset(state, subset, unit);
  double norm = rest.norm();
  if (norm <= 1e-12)
    fail(ErrorCode::NullComponent, "projection annihilates the state");
  rest /= norm;
  VectorXcd out = assemble_product(
      state.layout,
      {{subset, unit}, {state.layout.complement(subset), rest}});
  return PureState(state.layout, std::move(out), policy);
}

double fidelity(const DensityOperator& a, const DensityOperator& b) {
  if (a.total_dim() != b.total_dim())
    fail(ErrorCode::InvalidOperator, "fidelity needs equal dimensions");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a.matrix);
  VectorXd eigs = es.eigenvalues().cwiseMax(0.0);
  MatrixXcd sqrt_a = es.eigenvectors() *
                     eigs.cwiseSqrt().asDiagonal() *
                     es.eigenvectors().adjoint();
  MatrixXcd inner = sqrt_a * b.matrix * sqrt_a;
  inner = (inner + inner.adjoint().eval()) / 2.0;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es2(inner, Eigen::EigenvaluesOnly);
  double root_sum = 0.0;
  for (int i = 0; i < es2.eigenvalues().size(); ++i)
    root_sum += std::sqrt(std::max(es2.eigenvalues()[i], 0.0));
  return root_sum * root_sum;
}

}  // namespace darwinscope
