#pragma once

#include <string>
#include <vector>

#include "darwinscope/common.hpp"
#include "darwinscope/ghz.hpp"
#include "darwinscope/hilbert.hpp"
#include "darwinscope/partitions.hpp"

namespace darwinscope {

// Joint outcome distribution of two projective measurements on disjoint
// subsets, with marginals.
struct MeasurementDistribution {
  MatrixXd joint;  // rows: first observable's outcomes, cols: second's
  VectorXd first_marginal;
  VectorXd second_marginal;
  std::vector<double> first_values;
  std::vector<double> second_values;
};

MeasurementDistribution joint_distribution(
    const PureState& state, const HermitianObservable& first,
    const HermitianObservable& second,
    const NumericPolicy& policy = default_policy());

// Classical mutual information I(S:F) in bits between the two measurements.
double mutual_information(const PureState& state,
                          const HermitianObservable& system_obs,
                          const HermitianObservable& fragment_obs,
                          const NumericPolicy& policy = default_policy());

struct RedundancyOptions {
  double record_tol = 1e-8;  // fidelity threshold for a perfect record
  int exact_cap = 8;         // exhaustive fragmentation up to this many systems
  bool allow_greedy = false; // permit the greedy strategy beyond the cap
};

struct RedundancyReport {
  double delta = 0.0;
  int r_delta = 0;
  std::vector<std::vector<int>> fragments;  // witnessing disjoint fragments
  int environment_size = 0;
  bool greedy = false;  // set when the non-exhaustive strategy was used
  double pointer_entropy_bits = 0.0;
};

// Number of disjoint environment fragments that each carry all but a fraction
// delta of the pointer information. The pointer observable must be
// nondegenerate with nonzero outcome entropy on the state.
RedundancyReport redundancy(const PureState& state,
                            const HermitianObservable& pointer, double delta,
                            const RedundancyOptions& opts = {},
                            const NumericPolicy& policy = default_policy());

struct SbsReport {
  bool is_sbs = false;
  int branch_count = 0;
  double max_cross_norm = 0.0;     // residual coherence between branches
  double max_factor_error = 0.0;   // per-branch deviation from product form
  struct Violation {
    int fragment = 0;  // 1-based index into the remaining fractions
    int branch_a = 0;  // 1-based branch ids
    int branch_b = 0;
    double fidelity = 0.0;
  };
  std::vector<Violation> violations;
  std::string failure;  // first failed condition, empty when is_sbs
};

// Traces out environment fraction `traced_fraction` (1-based id within the
// partition) and checks the remainder for spectrum broadcast structure in the
// given pointer basis: decohered pointer blocks, product fragment states, and
// pairwise-distinguishable fragment states.
SbsReport sbs_check(const PureState& state, const Partition& partition,
                    const HermitianObservable& pointer, int traced_fraction,
                    double tol = 1e-8,
                    const NumericPolicy& policy = default_policy());

}  // namespace darwinscope
