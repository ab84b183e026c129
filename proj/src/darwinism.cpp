#include "darwinscope/darwinism.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace darwinscope {

namespace {

// outcome index for every eigenvector column, grouping degenerate values
std::vector<int> outcome_of_column(const HermitianObservable& obs,
                                   std::vector<double>* values) {
  auto outs = obs.outcomes();
  std::vector<int> col2out(obs.eigenvectors.cols(), -1);
  for (size_t o = 0; o < outs.size(); ++o) {
    if (values) values->push_back(outs[o].value);
    for (int c : outs[o].columns) col2out[c] = static_cast<int>(o);
  }
  return col2out;
}

double mi_from_joint(const MatrixXd& joint, double zero) {
  VectorXd pr = joint.rowwise().sum();
  VectorXd pc = joint.colwise().sum().transpose();
  double info = 0.0;
  for (int i = 0; i < joint.rows(); ++i)
    for (int j = 0; j < joint.cols(); ++j) {
      double p = joint(i, j);
      if (p > zero) info += p * std::log2(p / (pr[i] * pc[j]));
    }
  return info;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Reorders a density operator's tensor factors into (sub | complement) block
// order.
MatrixXcd permute_front(const MatrixXcd& rho, const SystemLayout& lay,
                        const std::vector<int>& sub) {
  std::vector<int> rest = lay.complement(sub);
  std::vector<int> smap = subset_index_map(lay, sub);
  std::vector<int> rmap = subset_index_map(lay, rest);
  int rd = lay.subset_dim(rest);
  std::vector<int> perm(lay.total_dim());
  for (int g = 0; g < lay.total_dim(); ++g) perm[g] = smap[g] * rd + rmap[g];
  MatrixXcd out(rho.rows(), rho.cols());
  for (int g = 0; g < rho.rows(); ++g)
    for (int h = 0; h < rho.cols(); ++h) out(perm[g], perm[h]) = rho(g, h);
  return out;
}

}  // namespace

MeasurementDistribution joint_distribution(const PureState& state,
                                           const HermitianObservable& first,
                                           const HermitianObservable& second,
                                           const NumericPolicy& policy) {
  const SystemLayout& layout = state.layout;
  layout.check_subset(first.systems);
  layout.check_subset(second.systems);
  for (int s : first.systems)
    if (std::binary_search(second.systems.begin(), second.systems.end(), s))
      fail(ErrorCode::InvalidSubset, "measurement supports overlap");
  if (first.eigenvectors.rows() != layout.subset_dim(first.systems) ||
      second.eigenvectors.rows() != layout.subset_dim(second.systems))
    fail(ErrorCode::InvalidOperator, "observable does not match its systems");

  // rotate the state into both eigenbases, then bin probabilities by outcome
  VectorXcd rotated = apply_subset_operator(state, first.systems,
                                            first.eigenvectors.adjoint());
  PureState mid(layout, std::move(rotated), policy);
  rotated = apply_subset_operator(mid, second.systems,
                                  second.eigenvectors.adjoint());

  MeasurementDistribution out;
  std::vector<int> map1 = outcome_of_column(first, &out.first_values);
  std::vector<int> map2 = outcome_of_column(second, &out.second_values);
  std::vector<int> idx1 = subset_index_map(layout, first.systems);
  std::vector<int> idx2 = subset_index_map(layout, second.systems);

  out.joint = MatrixXd::Zero(static_cast<int>(out.first_values.size()),
                             static_cast<int>(out.second_values.size()));
  for (int g = 0; g < layout.total_dim(); ++g)
    out.joint(map1[idx1[g]], map2[idx2[g]]) += std::norm(rotated[g]);
  out.first_marginal = out.joint.rowwise().sum();
  out.second_marginal = out.joint.colwise().sum().transpose();
  return out;
}

double mutual_information(const PureState& state,
                          const HermitianObservable& system_obs,
                          const HermitianObservable& fragment_obs,
                          const NumericPolicy& policy) {
  MeasurementDistribution d =
      joint_distribution(state, system_obs, fragment_obs, policy);
  return mi_from_joint(d.joint, policy.zero_probability);
}

RedundancyReport redundancy(const PureState& state,
                            const HermitianObservable& pointer, double delta,
                            const RedundancyOptions& opts,
                            const NumericPolicy& policy) {
  const SystemLayout& layout = state.layout;
  layout.check_subset(pointer.systems);
  if (pointer.eigenvectors.rows() != layout.subset_dim(pointer.systems))
    fail(ErrorCode::InvalidOperator, "pointer does not match its systems");
  if (delta < 0.0 || delta >= 1.0)
    fail(ErrorCode::InvalidArgument, "delta must lie in [0, 1)");
  if (!pointer.nondegenerate())
    fail(ErrorCode::DegeneratePointer, "pointer observable is degenerate");
  std::vector<int> env = layout.complement(pointer.systems);
  if (env.empty())
    fail(ErrorCode::InvalidSubset, "pointer leaves no environment");
  int ne = static_cast<int>(env.size());

  std::vector<int> env_dims;
  for (int s : env) env_dims.push_back(layout.dim(s));
  SystemLayout env_layout(env_dims);

  // pointer-conditional environment states
  std::vector<double> probs;
  std::vector<PureState> branch_env;
  for (int i = 0; i < pointer.eigenvectors.cols(); ++i) {
    VectorXcd c =
        contract_subset(state, pointer.systems, pointer.eigenvectors.col(i));
    double p = c.squaredNorm();
    if (p <= policy.zero_probability) continue;
    probs.push_back(p);
    branch_env.emplace_back(env_layout, c / std::sqrt(p), policy);
  }
  int nb = static_cast<int>(probs.size());
  VectorXd pvec(nb);
  for (int i = 0; i < nb; ++i) pvec[i] = probs[i];
  double entropy = shannon_entropy_bits(pvec, policy);
  if (entropy <= 1e-9)
    fail(ErrorCode::DegeneratePointer,
         "pointer outcome distribution carries no information");

  // Fragment record test, cached per environment-position bitmask. delta = 0
  // asks for orthogonal conditional fragment states; delta > 0 compares the
  // information captured by a fragment observable against (1-delta) H.
  std::unordered_map<std::uint32_t, bool> cache;
  auto qualifies = [&](std::uint32_t mask) {
    auto it = cache.find(mask);
    if (it != cache.end()) return it->second;
    std::vector<int> pos;
    for (int b = 0; b < ne; ++b)
      if (mask >> b & 1u) pos.push_back(b + 1);
    std::vector<DensityOperator> rhos;
    rhos.reserve(nb);
    for (int i = 0; i < nb; ++i)
      rhos.push_back(partial_trace(branch_env[i], pos, policy));
    bool ok = true;
    if (delta == 0.0) {
      for (int i = 0; i < nb && ok; ++i)
        for (int k = i + 1; k < nb && ok; ++k)
          if (fidelity(rhos[i], rhos[k]) > opts.record_tol) ok = false;
    } else {
      int df = rhos[0].total_dim();
      MatrixXcd t = MatrixXcd::Zero(df, df);
      for (int i = 0; i < nb; ++i) t += double(i + 1) * probs[i] * rhos[i].matrix;
      t = (t + t.adjoint().eval()) / 2.0;
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(t);
      MatrixXd joint(nb, df);
      for (int i = 0; i < nb; ++i)
        for (int f = 0; f < df; ++f) {
          VectorXcd v = es.eigenvectors().col(f);
          joint(i, f) =
              probs[i] * std::max(0.0, v.dot(rhos[i].matrix * v).real());
        }
      double info = mi_from_joint(joint, policy.zero_probability);
      ok = info + 1e-12 >= (1.0 - delta) * entropy;
    }
    cache[mask] = ok;
    return ok;
  };

  std::vector<int> env_bit(layout.size() + 1, -1);
  for (int b = 0; b < ne; ++b) env_bit[env[b]] = b;

  RedundancyReport report;
  report.delta = delta;
  report.environment_size = ne;
  report.pointer_entropy_bits = entropy;

  if (ne <= opts.exact_cap) {
    int best_count = -1;
    std::vector<int> best_sizes;
    std::vector<std::vector<int>> best_frags;
    enumerate_set_partitions(
        env, [&](const std::vector<std::vector<int>>& blocks) {
          std::vector<std::vector<int>> qual;
          for (const auto& block : blocks) {
            std::uint32_t mask = 0;
            for (int s : block) mask |= 1u << env_bit[s];
            if (qualifies(mask)) qual.push_back(block);
          }
          if (qual.empty()) return true;
          std::vector<int> sizes;
          for (const auto& q : qual) sizes.push_back(static_cast<int>(q.size()));
          std::sort(sizes.begin(), sizes.end());
          int count = static_cast<int>(qual.size());
          if (count > best_count ||
              (count == best_count && sizes < best_sizes)) {
            best_count = count;
            best_sizes = std::move(sizes);
            best_frags = qual;
          }
          return true;
        });
    if (best_count > 0) {
      report.r_delta = best_count;
      report.fragments = std::move(best_frags);
    }
  } else if (opts.allow_greedy) {
    report.greedy = true;
    std::vector<int> cur;
    std::uint32_t mask = 0;
    for (int b = 0; b < ne; ++b) {
      cur.push_back(env[b]);
      mask |= 1u << b;
      if (qualifies(mask)) {
        report.fragments.push_back(cur);
        cur.clear();
        mask = 0;
      }
    }
    report.r_delta = static_cast<int>(report.fragments.size());
  } else {
    fail(ErrorCode::EnumerationTooLarge,
         "environment too large for exhaustive fragmentation; enable the "
         "greedy strategy");
  }
  return report;
}

SbsReport sbs_check(const PureState& state, const Partition& partition,
                    const HermitianObservable& pointer, int traced_fraction,
                    double tol, const NumericPolicy& policy) {
  const SystemLayout& layout = state.layout;
  if (partition.n_systems != layout.size())
    fail(ErrorCode::LayoutMismatch, "partition does not match state layout");
  if (!partition.has_system())
    fail(ErrorCode::InvalidArgument, "partition needs a marked system fraction");
  if (traced_fraction < 1 || traced_fraction > partition.size())
    fail(ErrorCode::InvalidSubset, "traced fraction id out of range");
  int traced = traced_fraction - 1;
  if (traced == partition.system_index)
    fail(ErrorCode::InvalidSubset, "cannot trace out the system fraction");
  const std::vector<int>& sys = partition.system_fraction();
  if (pointer.systems != sys)
    fail(ErrorCode::InvalidArgument, "pointer must act on the system fraction");
  if (pointer.eigenvectors.rows() != layout.subset_dim(sys))
    fail(ErrorCode::InvalidOperator, "pointer does not match its systems");
  if (!pointer.nondegenerate())
    fail(ErrorCode::DegeneratePointer, "pointer observable is degenerate");

  std::vector<int> env = layout.complement(sys);
  std::vector<int> env_dims;
  for (int s : env) env_dims.push_back(layout.dim(s));
  SystemLayout env_layout(env_dims);
  std::vector<int> env_pos(layout.size() + 1, -1);
  for (size_t b = 0; b < env.size(); ++b)
    env_pos[env[b]] = static_cast<int>(b) + 1;

  SbsReport report;
  std::vector<double> probs;
  std::vector<PureState> branch_env;
  for (int i = 0; i < pointer.eigenvectors.cols(); ++i) {
    VectorXcd c =
        contract_subset(state, sys, pointer.eigenvectors.col(i));
    double p = c.squaredNorm();
    if (p <= policy.zero_probability) continue;
    probs.push_back(p);
    branch_env.emplace_back(env_layout, c / std::sqrt(p), policy);
  }
  report.branch_count = static_cast<int>(probs.size());
  if (report.branch_count < 2) {
    report.failure = "fewer than two pointer branches";
    return report;
  }
  int nb = report.branch_count;

  std::vector<int> t_pos;
  for (int s : partition.fractions[traced]) t_pos.push_back(env_pos[s]);
  std::sort(t_pos.begin(), t_pos.end());

  // decoherence: Tr_t |e_i><e_k| must vanish for i != k
  std::vector<MatrixXcd> reshaped;
  for (int i = 0; i < nb; ++i)
    reshaped.push_back(reshape_subset(branch_env[i], t_pos));
  for (int i = 0; i < nb; ++i)
    for (int k = i + 1; k < nb; ++k)
      report.max_cross_norm =
          std::max(report.max_cross_norm,
                   (reshaped[i].transpose() * reshaped[k].conjugate()).norm());
  bool cross_ok = report.max_cross_norm <= tol;

  std::vector<int> remaining;
  for (int j = 0; j < partition.size(); ++j)
    if (j != partition.system_index && j != traced) remaining.push_back(j);

  // per-branch fraction marginals, peeling fractions off in partition order
  std::vector<std::vector<DensityOperator>> frac_states(remaining.size());
  if (!remaining.empty()) {
    std::vector<int> rest_pos = env_layout.complement(t_pos);
    std::vector<int> rest_ids;  // original system ids, ascending
    for (int p : rest_pos) rest_ids.push_back(env[p - 1]);
    for (int i = 0; i < nb; ++i) {
      DensityOperator current = partial_trace(branch_env[i], rest_pos, policy);
      std::vector<int> ids = rest_ids;
      for (size_t q = 0; q + 1 < remaining.size(); ++q) {
        SystemLayout cur_layout(current.dims);
        std::vector<int> f_pos;
        for (int s : partition.fractions[remaining[q]]) {
          auto it = std::lower_bound(ids.begin(), ids.end(), s);
          f_pos.push_back(static_cast<int>(it - ids.begin()) + 1);
        }
        DensityOperator rho_f = partial_trace(current, cur_layout, f_pos, policy);
        std::vector<int> o_pos = cur_layout.complement(f_pos);
        DensityOperator rho_o = partial_trace(current, cur_layout, o_pos, policy);
        report.max_factor_error = std::max(
            report.max_factor_error,
            (permute_front(current.matrix, cur_layout, f_pos) -
             kron(rho_f.matrix, rho_o.matrix))
                .norm());
        frac_states[q].push_back(std::move(rho_f));
        std::vector<int> next_ids;
        for (int p : o_pos) next_ids.push_back(ids[p - 1]);
        ids = std::move(next_ids);
        current = std::move(rho_o);
      }
      frac_states.back().push_back(std::move(current));
    }
  }
  bool factor_ok = report.max_factor_error <= tol;

  for (size_t q = 0; q < remaining.size(); ++q)
    for (int i = 0; i < nb; ++i)
      for (int k = i + 1; k < nb; ++k) {
        double f = fidelity(frac_states[q][i], frac_states[q][k]);
        if (f > tol)
          report.violations.push_back(
              {static_cast<int>(q) + 1, i + 1, k + 1, f});
      }

  report.is_sbs = cross_ok && factor_ok && report.violations.empty();
  if (!cross_ok)
    report.failure = "branch coherence survives tracing";
  else if (!factor_ok)
    report.failure = "branch states are not products over the fractions";
  else if (!report.violations.empty())
    report.failure = "fragment states are not pairwise distinguishable";
  return report;
}

}  // namespace darwinscope
