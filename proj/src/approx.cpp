#include "darwinscope/approx.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace darwinscope {

namespace {

void check_frame(const PureState& state, const ProductBasisFrame& frame,
                 const NumericPolicy& policy) {
  const Partition& part = frame.partition;
  if (part.n_systems != state.layout.size())
    fail(ErrorCode::LayoutMismatch, "frame partition does not match state layout");
  if (static_cast<int>(frame.frames.size()) != part.size())
    fail(ErrorCode::InvalidArgument, "frame needs one block per fraction");
  int r = frame.branch_count();
  if (r < 1) fail(ErrorCode::InvalidArgument, "frame has no branches");
  for (int j = 0; j < part.size(); ++j) {
    const MatrixXcd& f = frame.frames[j];
    if (f.rows() != state.layout.subset_dim(part.fractions[j]) || f.cols() != r)
      fail(ErrorCode::LayoutMismatch, "frame block shape mismatch");
    MatrixXcd gram = f.adjoint() * f;
    gram.diagonal().array() -= 1.0;
    if (gram.cwiseAbs().maxCoeff() > 100 * policy.orthonormality_tol)
      fail(ErrorCode::InvalidOperator, "frame block is not orthonormal");
  }
}

}  // namespace

VectorXcd ProductBasisFrame::branch_global(const SystemLayout& layout,
                                           int i) const {
  std::vector<std::pair<std::vector<int>, VectorXcd>> parts;
  for (int j = 0; j < partition.size(); ++j)
    parts.emplace_back(partition.fractions[j], frames[j].col(i));
  return assemble_product(layout, parts);
}

double delta2(const PureState& state, const ProductBasisFrame& frame,
              const NumericPolicy& policy) {
  check_frame(state, frame, policy);
  double captured = 0.0;
  for (int i = 0; i < frame.branch_count(); ++i)
    captured += std::norm(
        frame.branch_global(state.layout, i).dot(state.amplitudes));
  return std::clamp(1.0 - captured, 0.0, 1.0);
}

namespace {

// Conditional vectors of every branch on fraction x: w_i = <other factors|Psi>,
// living on fraction x's subspace. The overlap <phi_i^(x)|w_i> equals the full
// branch overlap <branch_i|Psi>.
MatrixXcd conditional_vectors(const PureState& state,
                              const std::vector<MatrixXcd>& frames,
                              const Partition& part, int x) {
  int r = static_cast<int>(frames[0].cols());
  int dx = static_cast<int>(frames[x].rows());
  MatrixXcd w(dx, r);
  for (int i = 0; i < r; ++i) {
    std::vector<std::pair<std::vector<int>, VectorXcd>> parts;
    for (int j = 0; j < part.size(); ++j)
      if (j != x) parts.emplace_back(part.fractions[j], frames[j].col(i));
    VectorXcd other = assemble_product(state.layout, parts);
    w.col(i) = contract_subset(
        state, state.layout.complement(part.fractions[x]), other);
  }
  return w;
}

double frame_objective(const std::vector<MatrixXcd>& frames,
                       const PureState& state, const Partition& part) {
  double sum = 0.0;
  int r = static_cast<int>(frames[0].cols());
  ProductBasisFrame f{part, frames};
  for (int i = 0; i < r; ++i)
    sum += std::norm(f.branch_global(state.layout, i).dot(state.amplitudes));
  return sum;
}

}  // namespace

GhzFitResult fit_ghz(const PureState& state, const Partition& partition,
                     int branches, const FitOptions& opts,
                     const NumericPolicy& policy) {
  const SystemLayout& layout = state.layout;
  if (partition.n_systems != layout.size())
    fail(ErrorCode::LayoutMismatch, "partition does not match state layout");
  int m = partition.size();
  if (m < 2) fail(ErrorCode::InvalidArgument, "fit needs at least 2 fractions");
  if (branches < 2) fail(ErrorCode::InvalidArgument, "fit needs at least 2 branches");
  std::vector<int> dims(m);
  for (int j = 0; j < m; ++j) {
    dims[j] = layout.subset_dim(partition.fractions[j]);
    if (branches > dims[j])
      fail(ErrorCode::InvalidArgument,
           "branch count exceeds the dimension of a fraction");
  }

  // restart 0 seeds from the top eigenvectors of the reduced operators
  std::vector<MatrixXcd> spectral_init(m);
  for (int j = 0; j < m; ++j) {
    DensityOperator rho = partial_trace(state, partition.fractions[j], policy);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.matrix);
    MatrixXcd f(dims[j], branches);
    for (int k = 0; k < branches; ++k)
      f.col(k) = es.eigenvectors().col(dims[j] - 1 - k);
    spectral_init[j] = std::move(f);
  }

  Rng rng(opts.seed);
  GhzFitResult best;
  best.objective = -1.0;

  for (int t = 0; t < std::max(1, opts.restarts); ++t) {
    std::vector<MatrixXcd> frames(m);
    if (t == 0) {
      frames = spectral_init;
    } else {
      for (int j = 0; j < m; ++j)
        frames[j] = random_orthonormal_frame(dims[j], branches, rng);
    }

    double obj = frame_objective(frames, state, partition);
    std::vector<double> trace{obj};
    bool converged = false;
    int iter = 0;
    while (iter < opts.max_iters) {
      ++iter;
      for (int x = 0; x < m; ++x) {
        MatrixXcd w = conditional_vectors(state, frames, partition, x);
        VectorXcd z0(branches);
        for (int i = 0; i < branches; ++i) z0[i] = frames[x].col(i).dot(w.col(i));
        MatrixXcd target = w * z0.conjugate().asDiagonal();
        Eigen::JacobiSVD<MatrixXcd> svd(
            target, Eigen::ComputeThinU | Eigen::ComputeThinV);
        MatrixXcd cand = svd.matrixU() * svd.matrixV().adjoint();
        double before = 0.0, after = 0.0;
        for (int i = 0; i < branches; ++i) {
          before += std::norm(z0[i]);
          after += std::norm(cand.col(i).dot(w.col(i)));
        }
        if (after > before) frames[x] = std::move(cand);
      }
      double next = frame_objective(frames, state, partition);
      trace.push_back(next);
      if (std::abs(next - obj) < opts.conv_tol * std::max(1.0, next)) {
        obj = next;
        converged = true;
        break;
      }
      obj = next;
    }

    if (obj > best.objective) {
      best.objective = obj;
      best.frame = ProductBasisFrame{partition, frames};
      best.converged = converged;
      best.iterations = iter;
      best.restart_winner = t;
      best.objective_trace = std::move(trace);
    }
  }

  best.delta2 = std::clamp(1.0 - best.objective, 0.0, 1.0);
  best.coefficients.assign(branches, Complex(0, 0));
  for (int i = 0; i < branches; ++i)
    best.coefficients[i] =
        best.frame.branch_global(layout, i).dot(state.amplitudes);
  return best;
}

EpsilonMatrices epsilon_matrices(const SemiGHZDecomposition& reference,
                                 const SystemLayout& layout,
                                 const GhzFitResult& fit) {
  int r = reference.branch_count();
  if (fit.frame.branch_count() != r)
    fail(ErrorCode::InvalidArgument, "branch counts differ");
  const Partition& pa = reference.partition;
  const Partition& pb = fit.frame.partition;
  if (!pa.has_system() || !pb.has_system() ||
      pa.system_fraction() != pb.system_fraction())
    fail(ErrorCode::InvalidArgument,
         "overlap split needs a shared marked system fraction");

  MatrixXcd full(r, r);
  for (int i = 0; i < r; ++i) {
    VectorXcd ga = reference.branch_global(layout, i);
    for (int j = 0; j < r; ++j)
      full(i, j) = ga.dot(fit.frame.branch_global(layout, j));
  }

  // greedy alignment of fit branches to reference branches
  std::vector<int> align(r, -1);
  {
    std::vector<char> used_i(r, 0), used_j(r, 0);
    for (int s = 0; s < r; ++s) {
      int bi = -1, bj = -1;
      double bestv = -1.0;
      for (int i = 0; i < r; ++i) {
        if (used_i[i]) continue;
        for (int j = 0; j < r; ++j) {
          if (used_j[j]) continue;
          if (std::abs(full(i, j)) > bestv) {
            bestv = std::abs(full(i, j));
            bi = i;
            bj = j;
          }
        }
      }
      used_i[bi] = used_j[bj] = 1;
      align[bi] = bj;
    }
  }
  for (int i = 0; i < r; ++i)
    if (std::abs(full(i, align[i])) < 0.5)
      fail(ErrorCode::AlignmentFailed,
           "fitted branches do not line up with the reference");

  EpsilonMatrices out;
  out.alignment = align;

  auto phase_split = [&](const MatrixXcd& overlaps, VectorXd& theta,
                         MatrixXcd& eps) {
    theta.resize(r);
    eps.resize(r, r);
    for (int j = 0; j < r; ++j) {
      theta[j] = std::arg(overlaps(j, j));
      Complex unphase = std::exp(Complex(0, -theta[j]));
      for (int i = 0; i < r; ++i)
        eps(i, j) = unphase * overlaps(i, j) - (i == j ? 1.0 : 0.0);
    }
  };

  MatrixXcd aligned(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) aligned(i, j) = full(i, align[j]);
  phase_split(aligned, out.theta, out.eps);

  // system-factor overlaps
  MatrixXcd sys(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      sys(i, j) = reference.branch_vectors[i][pa.system_index].dot(
          fit.frame.frames[pb.system_index].col(align[j]));
  phase_split(sys, out.theta_s, out.eps_s);

  // environment-factor overlaps, assembled on the shared environment space
  auto env_vector = [&](bool from_reference, int idx) {
    std::vector<std::pair<std::vector<int>, VectorXcd>> parts;
    if (from_reference) {
      for (int j = 0; j < pa.size(); ++j)
        if (j != pa.system_index)
          parts.emplace_back(pa.fractions[j], reference.branch_vectors[idx][j]);
    } else {
      for (int j = 0; j < pb.size(); ++j)
        if (j != pb.system_index)
          parts.emplace_back(pb.fractions[j], fit.frame.frames[j].col(idx));
    }
    return assemble_product(layout, parts);
  };
  MatrixXcd env(r, r);
  for (int i = 0; i < r; ++i) {
    VectorXcd ea = env_vector(true, i);
    for (int j = 0; j < r; ++j)
      env(i, j) = ea.dot(env_vector(false, align[j]));
  }
  phase_split(env, out.theta_env, out.eps_env);

  out.max_abs_eps = out.eps.cwiseAbs().maxCoeff();
  out.max_abs_eps_s_diag = 0.0;
  for (int i = 0; i < r; ++i)
    out.max_abs_eps_s_diag =
        std::max(out.max_abs_eps_s_diag, std::abs(out.eps_s(i, i)));

  double resid = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      double d = i == j ? 1.0 : 0.0;
      Complex lhs = std::exp(Complex(0, out.theta[j])) * (d + out.eps(i, j));
      Complex rhs = std::exp(Complex(0, out.theta_s[j] + out.theta_env[j])) *
                    (d + d * out.eps_s(i, j) + d * out.eps_env(i, j) +
                     out.eps_s(i, j) * out.eps_env(i, j));
      resid = std::max(resid, std::abs(lhs - rhs));
    }
  out.consistency_residual = resid;
  return out;
}

}  // namespace darwinscope
