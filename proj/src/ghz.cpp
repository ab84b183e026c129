#include "darwinscope/ghz.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "darwinscope/approx.hpp"

namespace darwinscope {

namespace {

constexpr double kSignificant = 1e-9;

std::vector<std::pair<std::vector<int>, VectorXcd>> branch_parts(
    const SemiGHZDecomposition& dec, int i) {
  std::vector<std::pair<std::vector<int>, VectorXcd>> parts;
  for (int j = 0; j < dec.partition.size(); ++j)
    parts.emplace_back(dec.partition.fractions[j], dec.branch_vectors[i][j]);
  return parts;
}

// 1-based positions of subset members inside an ascending universe.
std::vector<int> positions_in(const std::vector<int>& universe,
                              const std::vector<int>& subset) {
  std::vector<int> pos;
  size_t u = 0;
  for (int s : subset) {
    while (u < universe.size() && universe[u] != s) ++u;
    if (u == universe.size())
      fail(ErrorCode::InvalidSubset, "subset member outside universe");
    pos.push_back(static_cast<int>(u + 1));
  }
  return pos;
}

std::vector<int> dims_of(const SystemLayout& layout,
                         const std::vector<int>& systems) {
  std::vector<int> d;
  for (int s : systems) d.push_back(layout.dim(s));
  return d;
}

}  // namespace

VectorXcd SemiGHZDecomposition::branch_global(const SystemLayout& layout,
                                              int i) const {
  return assemble_product(layout, branch_parts(*this, i));
}

VectorXcd SemiGHZDecomposition::reconstruct(const SystemLayout& layout) const {
  VectorXcd out = VectorXcd::Zero(layout.total_dim());
  for (int i = 0; i < branch_count(); ++i)
    out += coefficients[i] * branch_global(layout, i);
  return out;
}

VerifyReport verify_semi_ghz(const PureState& state,
                             const SemiGHZDecomposition& dec, double tol,
                             const NumericPolicy& policy) {
  const SystemLayout& layout = state.layout;
  if (dec.partition.n_systems != layout.size())
    fail(ErrorCode::LayoutMismatch, "decomposition partition does not match state layout");
  int m = dec.partition.size();
  int r = dec.branch_count();
  if (static_cast<int>(dec.branch_vectors.size()) != r)
    fail(ErrorCode::InvalidArgument, "coefficient and branch counts differ");
  for (const auto& vecs : dec.branch_vectors) {
    if (static_cast<int>(vecs.size()) != m)
      fail(ErrorCode::InvalidArgument, "branch is missing fraction vectors");
    for (int j = 0; j < m; ++j)
      if (vecs[j].size() != layout.subset_dim(dec.partition.fractions[j]))
        fail(ErrorCode::LayoutMismatch, "branch vector does not match fraction dimension");
  }

  VerifyReport rep;
  rep.gram_ranks.assign(m, 0);
  std::string why;

  if (r < 2) why = "fewer than 2 branches";

  for (int i = 0; i < r && why.empty(); ++i) {
    if (std::abs(dec.coefficients[i]) <= policy.zero_probability)
      why = "zero branch coefficient";
    for (int j = 0; j < m && why.empty(); ++j)
      if (std::abs(dec.branch_vectors[i][j].norm() - 1.0) >
          policy.normalization_tol)
        why = "branch vector not normalized";
  }

  bool ortho = true;
  for (int j = 0; j < m; ++j) {
    int d = static_cast<int>(dec.branch_vectors.empty()
                                 ? 0
                                 : dec.branch_vectors[0][j].size());
    MatrixXcd stack(d, r);
    for (int i = 0; i < r; ++i) stack.col(i) = dec.branch_vectors[i][j];
    Eigen::JacobiSVD<MatrixXcd> svd(stack);
    int rank = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()[k] > policy.rank_tol) ++rank;
    rep.gram_ranks[j] = rank;
    if (rank < r && why.empty()) why = "branch vectors dependent on a fraction";
    MatrixXcd gram = stack.adjoint() * stack;
    gram.diagonal().array() -= 1.0;
    if (gram.cwiseAbs().maxCoeff() > 1e-8) ortho = false;
  }
  rep.orthonormal = ortho;

  double weight = 0.0;
  for (int i = 0; i < r; ++i) weight += std::norm(dec.coefficients[i]);
  rep.coefficient_weight = weight;
  if (weight > 1.0 + 1e-9 && why.empty()) why = "coefficient weight exceeds 1";

  rep.reconstruction_error =
      (state.amplitudes - dec.reconstruct(layout)).norm();
  if (rep.reconstruction_error > tol && why.empty())
    why = "reconstruction residual above tolerance";

  rep.valid = why.empty();
  rep.failure = why;
  return rep;
}

// ============================================================================
// Product-vector search
// ============================================================================

namespace {

struct ProductPair {
  VectorXcd left;
  VectorXcd right;
  VectorXcd coords;  // coordinates in the current subspace basis
};

double product_fit(const MatrixXcd& basis, int d1, int d2, const VectorXcd& u,
                   const VectorXcd& v, VectorXcd& coords) {
  int rk = static_cast<int>(basis.cols());
  coords.resize(rk);
  for (int b = 0; b < rk; ++b) {
    Complex y = 0;
    for (int a = 0; a < d1; ++a) {
      Complex row = 0;
      const Complex* col = basis.col(b).data() + a * d2;
      for (int c = 0; c < d2; ++c) row += std::conj(col[c]) * v[c];
      y += row * u[a];
    }
    coords[b] = y;
  }
  return coords.squaredNorm();
}

std::optional<std::vector<ProductPair>> product_pairs_in_subspace(
    const MatrixXcd& basis, int d1, int d2, int count,
    const DetectOptions& opts) {
  if (basis.rows() != static_cast<long>(d1) * d2)
    fail(ErrorCode::InvalidArgument, "basis rows do not match the split");
  if (count > basis.cols() || count < 0)
    fail(ErrorCode::InvalidArgument, "requested more vectors than subspace dimensions");
  {
    MatrixXcd gram = basis.adjoint() * basis;
    gram.diagonal().array() -= 1.0;
    if (gram.cwiseAbs().maxCoeff() > 1e-8)
      fail(ErrorCode::InvalidOperator, "subspace basis is not orthonormal");
  }

  double accept = std::max(1e-13, 10.0 * opts.tol * opts.tol);
  int budget = opts.max_restarts > 0 ? opts.max_restarts : 64;
  Rng rng(opts.seed);

  MatrixXcd cur = basis.leftCols(count);
  std::vector<ProductPair> found;
  for (int level = 0; level < count; ++level) {
    int rk = static_cast<int>(cur.cols());
    // per-column matricization: col b viewed as a d1 x d2 matrix, row-major
    double best_f = -1.0;
    VectorXcd best_u, best_v;
    bool accepted = false;
    for (int t = 0; t < budget && !accepted; ++t) {
      if (t == 16 && best_f < 0.999) break;
      VectorXcd v = random_state_vector(d2, rng);
      VectorXcd u = random_state_vector(d1, rng);
      double f = 0.0, prev = -1.0;
      for (int iter = 0; iter < 200; ++iter) {
        // u-step: maximize over conj(u) the quadratic form of the stacked
        // contractions c_b = conj(M_b) v
        MatrixXcd c(d1, rk);
        for (int b = 0; b < rk; ++b)
          for (int a = 0; a < d1; ++a) {
            Complex s = 0;
            const Complex* col = cur.col(b).data() + a * d2;
            for (int cc = 0; cc < d2; ++cc) s += std::conj(col[cc]) * v[cc];
            c(a, b) = s;
          }
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eu(c * c.adjoint());
        u = eu.eigenvectors().col(d1 - 1).conjugate();
        // v-step
        MatrixXcd e(d2, rk);
        for (int b = 0; b < rk; ++b)
          for (int cc = 0; cc < d2; ++cc) {
            Complex s = 0;
            for (int a = 0; a < d1; ++a)
              s += std::conj(cur.col(b)[a * d2 + cc]) * u[a];
            e(cc, b) = std::conj(s);
          }
        Eigen::SelfAdjointEigenSolver<MatrixXcd> ev(e * e.adjoint());
        v = ev.eigenvectors().col(d2 - 1);
        f = ev.eigenvalues()[d2 - 1];
        if (f - prev < 1e-15) break;
        prev = f;
      }
      VectorXcd coords;
      f = product_fit(cur, d1, d2, u, v, coords);
      if (f > best_f) {
        best_f = f;
        best_u = u;
        best_v = v;
      }
      if (1.0 - f <= accept) accepted = true;
    }
    if (!accepted) return std::nullopt;

    ProductPair p;
    p.left = best_u;
    p.right = best_v;
    product_fit(cur, d1, d2, best_u, best_v, p.coords);
    VectorXcd y = p.coords.normalized();
    found.push_back(std::move(p));
    // restrict the remaining search to the in-subspace complement of y
    if (level + 1 < count) {
      Eigen::HouseholderQR<MatrixXcd> qr(y);
      MatrixXcd q = qr.householderQ();
      cur = cur * q.rightCols(rk - 1);
    }
  }
  return found;
}

}  // namespace

std::optional<std::vector<VectorXcd>> product_vectors_in_subspace(
    const MatrixXcd& basis, int dim_left, int dim_right, int count,
    const DetectOptions& opts) {
  auto pairs = product_pairs_in_subspace(basis, dim_left, dim_right, count, opts);
  if (!pairs) return std::nullopt;
  std::vector<VectorXcd> out;
  for (const auto& p : *pairs) {
    VectorXcd w(static_cast<long>(dim_left) * dim_right);
    for (int a = 0; a < dim_left; ++a)
      for (int c = 0; c < dim_right; ++c) w[a * dim_right + c] = p.left[a] * p.right[c];
    out.push_back(std::move(w));
  }
  return out;
}

// ============================================================================
// Detection
// ============================================================================

namespace {

// Sorts branches by descending |alpha|, breaking ties by the global branch
// vector, and fixes per-fraction phases (first significant amplitude real
// positive, compensation moved into alpha).
void canonicalize(SemiGHZDecomposition& dec, const SystemLayout& layout) {
  int r = dec.branch_count();
  int m = dec.partition.size();
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < m; ++j) {
      VectorXcd& v = dec.branch_vectors[i][j];
      for (int k = 0; k < v.size(); ++k) {
        if (std::abs(v[k]) > kSignificant) {
          Complex phase = v[k] / std::abs(v[k]);
          v /= phase;
          dec.coefficients[i] *= phase;
          break;
        }
      }
    }
  }
  std::vector<VectorXcd> globals(r);
  for (int i = 0; i < r; ++i) globals[i] = dec.branch_global(layout, i);

  std::vector<int> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ma = std::abs(dec.coefficients[a]);
    double mb = std::abs(dec.coefficients[b]);
    if (std::abs(ma - mb) > kSignificant) return ma > mb;
    const VectorXcd& va = globals[a];
    const VectorXcd& vb = globals[b];
    for (int k = 0; k < va.size(); ++k) {
      if (std::abs(va[k].real() - vb[k].real()) > kSignificant)
        return va[k].real() < vb[k].real();
      if (std::abs(va[k].imag() - vb[k].imag()) > kSignificant)
        return va[k].imag() < vb[k].imag();
    }
    return a < b;
  });
  SemiGHZDecomposition sorted = dec;
  for (int i = 0; i < r; ++i) {
    sorted.coefficients[i] = dec.coefficients[order[i]];
    sorted.branch_vectors[i] = dec.branch_vectors[order[i]];
  }
  dec = std::move(sorted);
}

// Factorizes a conditional vector across the remaining fractions by repeated
// rank-1 Schmidt cuts. Returns false when some cut is not rank 1.
bool split_factors(const SystemLayout& layout, VectorXcd rest,
                   std::vector<int> remaining_systems,
                   const std::vector<std::vector<int>>& fractions,
                   double stall_tol, std::vector<VectorXcd>& out,
                   const NumericPolicy& policy) {
  for (size_t fi = 0; fi + 1 < fractions.size(); ++fi) {
    SystemLayout sub(dims_of(layout, remaining_systems));
    PureState cur(sub, rest.normalized(), policy);
    std::vector<int> pos = positions_in(remaining_systems, fractions[fi]);
    SchmidtResult sch = schmidt(cur, pos, policy);
    if (sch.singular_values.size() > 1 && sch.singular_values[1] > stall_tol)
      return false;
    out.push_back(sch.left_vectors.col(0));
    rest = sch.right_vectors.col(0);
    std::vector<int> next;
    size_t p = 0;
    for (int s : remaining_systems) {
      if (p < fractions[fi].size() && fractions[fi][p] == s) {
        ++p;
      } else {
        next.push_back(s);
      }
    }
    remaining_systems = std::move(next);
  }
  out.push_back(rest.normalized());
  return true;
}

std::optional<SemiGHZDecomposition> finish_detection(
    const PureState& state, const Partition& partition,
    std::vector<std::vector<VectorXcd>> branch_vectors, double tol,
    const NumericPolicy& policy) {
  const SystemLayout& layout = state.layout;
  int r = static_cast<int>(branch_vectors.size());
  SemiGHZDecomposition dec;
  dec.partition = partition;
  dec.branch_vectors = std::move(branch_vectors);
  dec.coefficients.assign(r, Complex(0, 0));
  dec.orthonormal = true;
  for (int i = 0; i < r; ++i) {
    VectorXcd g = dec.branch_global(layout, i);
    dec.coefficients[i] = g.dot(state.amplitudes);
    if (std::abs(dec.coefficients[i]) <= policy.zero_probability)
      return std::nullopt;
  }
  // per-fraction orthonormality across branches
  for (int j = 0; j < partition.size(); ++j) {
    for (int i = 0; i < r; ++i)
      for (int k = i + 1; k < r; ++k)
        if (std::abs(dec.branch_vectors[i][j].dot(dec.branch_vectors[k][j])) >
            std::max(tol, 1e-10))
          return std::nullopt;
  }
  if ((state.amplitudes - dec.reconstruct(layout)).norm() > tol)
    return std::nullopt;
  canonicalize(dec, layout);
  return dec;
}

std::optional<SemiGHZDecomposition> detect_via_fit(const PureState& state,
                                                   const Partition& partition,
                                                   int r,
                                                   const DetectOptions& opts,
                                                   const NumericPolicy& policy) {
  // Small budget: the fallback only has to confirm a near-exact expansion,
  // and for those the spectral restart converges in a handful of sweeps.
  FitOptions fopts;
  fopts.seed = opts.seed;
  fopts.restarts = 6;
  fopts.max_iters = 200;
  GhzFitResult fit = fit_ghz(state, partition, r, fopts, policy);
  if (fit.delta2 > opts.tol * opts.tol) return std::nullopt;
  std::vector<std::vector<VectorXcd>> vecs(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < partition.size(); ++j)
      vecs[i].push_back(fit.frame.frames[j].col(i));
  return finish_detection(state, partition, std::move(vecs), opts.tol, policy);
}

}  // namespace

std::optional<SemiGHZDecomposition> detect_ghz(const PureState& state,
                                               const Partition& partition,
                                               const DetectOptions& opts) {
  const NumericPolicy policy = default_policy();
  const SystemLayout& layout = state.layout;
  if (partition.n_systems != layout.size())
    fail(ErrorCode::LayoutMismatch, "partition does not match state layout");
  int m = partition.size();
  if (m < 2)
    fail(ErrorCode::InvalidArgument, "detection needs at least 2 fractions");

  if (m == 2) {
    SchmidtResult sch = schmidt(state, partition.fractions[0], policy);
    int r = sch.rank;
    if (r < 2) return std::nullopt;
    double tail = 0.0;
    for (int k = r; k < sch.singular_values.size(); ++k)
      tail += sch.singular_values[k] * sch.singular_values[k];
    if (std::sqrt(tail) > opts.tol) return std::nullopt;
    std::vector<std::vector<VectorXcd>> vecs(r);
    for (int i = 0; i < r; ++i) {
      vecs[i].push_back(sch.left_vectors.col(i));
      vecs[i].push_back(sch.right_vectors.col(i));
    }
    return finish_detection(state, partition, std::move(vecs), opts.tol, policy);
  }

  // all per-fraction supports must share one rank r >= 2
  int r = -1;
  std::vector<int> ranks(m);
  for (int j = 0; j < m; ++j) {
    ranks[j] = schmidt(state, partition.fractions[j], policy).rank;
    if (j == 0) r = ranks[j];
    if (ranks[j] != r) return std::nullopt;
  }
  if (r < 2) return std::nullopt;

  // seed pair: the two smallest fractions by dimension
  std::vector<int> by_dim(m);
  std::iota(by_dim.begin(), by_dim.end(), 0);
  std::sort(by_dim.begin(), by_dim.end(), [&](int a, int b) {
    int da = layout.subset_dim(partition.fractions[a]);
    int db = layout.subset_dim(partition.fractions[b]);
    return da != db ? da < db : a < b;
  });
  int j1 = std::min(by_dim[0], by_dim[1]);
  int j2 = std::max(by_dim[0], by_dim[1]);
  const std::vector<int>& f1 = partition.fractions[j1];
  const std::vector<int>& f2 = partition.fractions[j2];
  int d1 = layout.subset_dim(f1);
  int d2 = layout.subset_dim(f2);

  std::vector<int> pair_systems;
  std::merge(f1.begin(), f1.end(), f2.begin(), f2.end(),
             std::back_inserter(pair_systems));
  SchmidtResult pair_sch = schmidt(state, pair_systems, policy);
  if (pair_sch.rank != r)
    return detect_via_fit(state, partition, r, opts, policy);

  // reorder the support basis from ascending-union coordinates to the
  // (fraction j1 | fraction j2) block layout
  MatrixXcd basis(static_cast<long>(d1) * d2, r);
  {
    std::vector<int> union_dims = dims_of(layout, pair_systems);
    int k = static_cast<int>(pair_systems.size());
    std::vector<char> in_f1(k, 0);
    for (size_t p = 0; p < pair_systems.size(); ++p)
      in_f1[p] = std::binary_search(f1.begin(), f1.end(), pair_systems[p]);
    std::vector<int> digits(k, 0);
    int total = d1 * d2;
    for (int g = 0; g < total; ++g) {
      int i1 = 0, i2 = 0;
      for (int p = 0; p < k; ++p)
        (in_f1[p] ? i1 : i2) = (in_f1[p] ? i1 : i2) * union_dims[p] + digits[p];
      basis.row(static_cast<long>(i1) * d2 + i2) =
          pair_sch.left_vectors.row(g).leftCols(r);
      for (int p = k - 1; p >= 0; --p) {
        if (++digits[p] < union_dims[p]) break;
        digits[p] = 0;
      }
    }
  }

  auto pairs = product_pairs_in_subspace(basis, d1, d2, r, opts);
  if (!pairs) return detect_via_fit(state, partition, r, opts, policy);

  // fraction order for factor extraction: j1 conditioned on, the rest split
  std::vector<std::vector<int>> rest_fractions;
  std::vector<int> rest_ids;
  for (int j = 0; j < m; ++j)
    if (j != j1) {
      rest_fractions.push_back(partition.fractions[j]);
      rest_ids.push_back(j);
    }

  double stall_tol = std::max(opts.tol, 1e-9);
  std::vector<std::vector<VectorXcd>> branch_vectors(r);
  for (int i = 0; i < r; ++i) {
    VectorXcd rest = contract_subset(state, f1, (*pairs)[i].left);
    if (rest.norm() <= 1e-10)
      return detect_via_fit(state, partition, r, opts, policy);
    std::vector<VectorXcd> factors;
    if (!split_factors(layout, rest, layout.complement(f1), rest_fractions,
                       stall_tol, factors, policy))
      return detect_via_fit(state, partition, r, opts, policy);
    std::vector<VectorXcd> ordered(m);
    ordered[j1] = (*pairs)[i].left;
    for (size_t k = 0; k < rest_ids.size(); ++k)
      ordered[rest_ids[k]] = factors[k];
    branch_vectors[i] = std::move(ordered);
  }

  auto dec = finish_detection(state, partition, std::move(branch_vectors),
                              opts.tol, policy);
  if (!dec) return detect_via_fit(state, partition, r, opts, policy);
  return dec;
}

// ============================================================================
// Matching, fine-graining, scanning
// ============================================================================

std::optional<BranchMatch> match_decompositions(
    const SemiGHZDecomposition& a, const SemiGHZDecomposition& b,
    const SystemLayout& layout, double tol) {
  int r = a.branch_count();
  if (b.branch_count() != r) return std::nullopt;

  MatrixXcd overlaps(r, r);
  for (int i = 0; i < r; ++i) {
    VectorXcd ga = a.branch_global(layout, i);
    for (int j = 0; j < r; ++j)
      overlaps(i, j) = ga.dot(b.branch_global(layout, j));
  }

  BranchMatch match;
  match.permutation.assign(r, -1);
  match.phases.assign(r, Complex(1, 0));
  std::vector<char> used_a(r, 0), used_b(r, 0);
  for (int step = 0; step < r; ++step) {
    int bi = -1, bj = -1;
    double best = -1.0;
    for (int i = 0; i < r; ++i) {
      if (used_a[i]) continue;
      for (int j = 0; j < r; ++j) {
        if (used_b[j]) continue;
        if (std::abs(overlaps(i, j)) > best) {
          best = std::abs(overlaps(i, j));
          bi = i;
          bj = j;
        }
      }
    }
    used_a[bi] = used_b[bj] = 1;
    match.permutation[bi] = bj;
    Complex o = overlaps(bi, bj);
    match.phases[bi] = std::abs(o) > 1e-300 ? Complex(std::conj(o) / std::abs(o))
                                            : Complex(1, 0);
    double residual2 = std::max(0.0, 2.0 - 2.0 * std::abs(o));
    match.max_residual = std::max(match.max_residual, std::sqrt(residual2));
  }
  if (match.max_residual > tol) return std::nullopt;
  return match;
}

SemiGHZDecomposition fine_grain(const PureState& state,
                                const SemiGHZDecomposition& dec,
                                const DetectOptions& opts) {
  VerifyReport rep = verify_semi_ghz(state, dec, std::max(opts.tol, 1e-8));
  if (!rep.valid || !rep.orthonormal)
    fail(ErrorCode::InvalidArgument,
         "fine-graining needs a valid orthonormal decomposition");

  SemiGHZDecomposition current = dec;
  bool progressed = true;
  while (progressed) {
    progressed = false;
    const Partition part = current.partition;
    std::vector<int> order(part.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      size_t sa = part.fractions[a].size();
      size_t sb = part.fractions[b].size();
      return sa != sb ? sa < sb : a < b;
    });
    for (int f : order) {
      if (f == part.system_index) continue;
      const std::vector<int> fraction = part.fractions[f];
      int len = static_cast<int>(fraction.size());
      if (len < 2) continue;
      for (int mask = 1; mask < (1 << (len - 1)) && !progressed; ++mask) {
        std::vector<int> keep{fraction[0]}, split;
        for (int k = 1; k < len; ++k)
          ((mask >> (k - 1)) & 1 ? split : keep).push_back(fraction[k]);
        std::vector<std::vector<int>> fractions = part.fractions;
        fractions[f] = keep;
        fractions.push_back(split);
        int marked = part.system_index;
        Partition refined =
            make_partition(part.n_systems, std::move(fractions), marked);
        if (auto next = detect_ghz(state, refined, opts)) {
          current = std::move(*next);
          progressed = true;
        }
      }
      if (progressed) break;
    }
  }
  return current;
}

EtutScanResult etut_scan(const PureState& state, const Partition& reference,
                         const EtutScanOptions& opts) {
  EtutScanResult result;
  DetectOptions dopts;
  dopts.tol = opts.detect_tol;
  dopts.seed = opts.seed;
  result.reference = detect_ghz(state, reference, dopts);
  result.reference_found = result.reference.has_value();
  if (!result.reference_found) return result;

  std::vector<int> elements;
  if (reference.has_system()) {
    elements = reference.environment_systems();
  } else {
    elements.resize(reference.n_systems);
    std::iota(elements.begin(), elements.end(), 1);
  }
  if (static_cast<int>(elements.size()) > opts.cap && !opts.allow_large)
    fail(ErrorCode::EnumerationTooLarge,
         std::to_string(elements.size()) +
             " elements to partition; raise the cap to proceed");

  enumerate_set_partitions(
      elements, [&](const std::vector<std::vector<int>>& blocks) {
        ++result.scanned;
        std::vector<std::vector<int>> fractions = blocks;
        int marked = -1;
        if (reference.has_system()) {
          marked = static_cast<int>(fractions.size());
          fractions.push_back(reference.system_fraction());
        }
        Partition candidate =
            make_partition(reference.n_systems, std::move(fractions), marked);
        if (!mutually_comparable(candidate, reference)) return true;
        ++result.comparable_count;
        if (auto found = detect_ghz(state, candidate, dopts)) {
          ++result.detections;
          if (!match_decompositions(*result.reference, *found, state.layout,
                                    opts.match_tol)) {
            ++result.violations;
            result.violating.push_back(candidate);
          }
        }
        return true;
      });
  return result;
}

}  // namespace darwinscope
