#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "darwinscope/darwinism.hpp"
#include "darwinscope/fixtures.hpp"
#include "doctest.h"

using namespace darwinscope;

namespace {

// |0...0> + |1...1> over n qubits with the given (unnormalized) weights.
PureState cat_state(int n, double w0, double w1) {
  SystemLayout layout(std::vector<int>(n, 2));
  VectorXcd amps = VectorXcd::Zero(layout.total_dim());
  double s = std::sqrt(w0 * w0 + w1 * w1);
  amps(0) = w0 / s;
  amps(layout.total_dim() - 1) = w1 / s;
  return PureState(layout, amps);
}

HermitianObservable basis_observable(std::vector<int> systems,
                                     const MatrixXcd& columns) {
  VectorXd values(columns.cols());
  for (int i = 0; i < columns.cols(); ++i) values(i) = i;
  return HermitianObservable(std::move(systems), values, columns);
}

}  // namespace

TEST_CASE("joint distribution of a shared-bit state") {
  PureState ghz = cat_state(2, 1.0, 1.0);
  auto first = HermitianObservable::computational(ghz.layout, {1});
  auto second = HermitianObservable::computational(ghz.layout, {2});
  MeasurementDistribution d = joint_distribution(ghz, first, second);
  REQUIRE(d.joint.rows() == 2);
  REQUIRE(d.joint.cols() == 2);
  CHECK(d.joint(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.joint(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(d.joint(0, 1)) <= 1e-12);
  CHECK(d.first_marginal.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.second_marginal(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.first_values == std::vector<double>{0.0, 1.0});

  auto wide = HermitianObservable::computational(ghz.layout, {1, 2});
  CHECK_THROWS_AS(joint_distribution(ghz, wide, second), Error);
}

TEST_CASE("mutual information of perfect, partial, and absent records") {
  Fixture f = build_fixture("ambiguity4");
  const PureState& state = *f.state;
  const SemiGHZDecomposition& dec = f.decomposition("A");

  MatrixXcd sys_cols(4, 4), rec_cols(4, 4);
  for (int i = 0; i < 4; ++i) {
    sys_cols.col(i) = dec.branch_vectors[i][0];
    rec_cols.col(i) = dec.branch_vectors[i][1];
  }
  auto pointer = basis_observable({1}, sys_cols);
  auto record = basis_observable({2, 3}, rec_cols);

  CHECK(mutual_information(state, pointer, record) ==
        doctest::Approx(2.0).epsilon(1e-9));

  auto comp23 = HermitianObservable::computational(state.layout, {2, 3});
  CHECK(mutual_information(state, pointer, comp23) ==
        doctest::Approx(1.0).epsilon(1e-9));

  auto comp2 = HermitianObservable::computational(state.layout, {2});
  CHECK(std::abs(mutual_information(state, pointer, comp2)) <= 1e-9);
}

TEST_CASE("every cat-state qubit is a full record") {
  PureState state = cat_state(4, 1.0, 1.0);
  auto pointer = HermitianObservable::computational(state.layout, {1});
  for (int q = 2; q <= 4; ++q) {
    auto frag = HermitianObservable::computational(state.layout, {q});
    CHECK(mutual_information(state, pointer, frag) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("redundancy of the ambiguous state is two") {
  Fixture f = build_fixture("ambiguity4");
  const SemiGHZDecomposition& dec = f.decomposition("A");
  MatrixXcd sys_cols(4, 4);
  for (int i = 0; i < 4; ++i) sys_cols.col(i) = dec.branch_vectors[i][0];
  auto pointer = basis_observable({1}, sys_cols);

  RedundancyReport rep = redundancy(*f.state, pointer, 0.0);
  CHECK(rep.r_delta == 2);
  CHECK_FALSE(rep.greedy);
  CHECK(rep.environment_size == 4);
  CHECK(rep.pointer_entropy_bits == doctest::Approx(2.0).epsilon(1e-9));
  REQUIRE(rep.fragments.size() == 2);
  CHECK(rep.fragments[0] == std::vector<int>{2, 3});
  CHECK(rep.fragments[1] == std::vector<int>{4, 5});
}

TEST_CASE("cat-state redundancy equals the environment size") {
  for (int ne = 2; ne <= 5; ++ne) {
    PureState state = cat_state(1 + ne, 1.0, 1.0);
    auto pointer = HermitianObservable::computational(state.layout, {1});
    RedundancyReport rep = redundancy(state, pointer, 0.0);
    CHECK(rep.r_delta == ne);
    CHECK(static_cast<int>(rep.fragments.size()) == ne);
    for (const auto& fr : rep.fragments) CHECK(fr.size() == 1);
  }
}

TEST_CASE("loose information thresholds keep single-qubit fragments") {
  PureState state = cat_state(5, 1.0, 1.0);
  auto pointer = HermitianObservable::computational(state.layout, {1});
  RedundancyReport rep = redundancy(state, pointer, 0.1);
  CHECK(rep.delta == 0.1);
  CHECK(rep.r_delta == 4);

  PureState skewed = cat_state(4, std::sqrt(3.0), 1.0);
  RedundancyReport srep = redundancy(
      skewed, HermitianObservable::computational(skewed.layout, {1}), 0.1);
  CHECK(srep.pointer_entropy_bits ==
        doctest::Approx(0.8112781244591328).epsilon(1e-12));
  CHECK(srep.r_delta == 3);
}

TEST_CASE("degenerate or uninformative pointers are rejected") {
  PureState state = cat_state(3, 1.0, 1.0);
  VectorXd flat(2);
  flat << 1.0, 1.0;
  HermitianObservable degen({1}, flat, MatrixXcd::Identity(2, 2));
  CHECK_THROWS_AS(redundancy(state, degen, 0.0), Error);

  SystemLayout layout(std::vector<int>(3, 2));
  VectorXcd amps = VectorXcd::Zero(8);
  amps(0) = 1.0;
  PureState product(layout, amps);
  auto pointer = HermitianObservable::computational(layout, {1});
  CHECK_THROWS_AS(redundancy(product, pointer, 0.0), Error);

  CHECK_THROWS_AS(redundancy(state, pointer, -0.5), Error);
  CHECK_THROWS_AS(redundancy(state, pointer, 1.0), Error);
}

TEST_CASE("large environments need the greedy strategy") {
  PureState state = cat_state(10, 1.0, 1.0);
  auto pointer = HermitianObservable::computational(state.layout, {1});
  CHECK_THROWS_AS(redundancy(state, pointer, 0.0), Error);

  RedundancyOptions opts;
  opts.allow_greedy = true;
  RedundancyReport rep = redundancy(state, pointer, 0.0, opts);
  CHECK(rep.greedy);
  CHECK(rep.r_delta == 9);
}

TEST_CASE("broadcast structure of a cat state survives tracing one qubit") {
  PureState state = cat_state(4, 1.0, 1.0);
  Partition p = parse_partition("S:1|2|3|4", 4);
  auto pointer = HermitianObservable::computational(state.layout, {1});
  SbsReport rep = sbs_check(state, p, pointer, 4);
  CHECK(rep.is_sbs);
  CHECK(rep.branch_count == 2);
  CHECK(rep.max_cross_norm <= 1e-10);
  CHECK(rep.max_factor_error <= 1e-10);
  CHECK(rep.violations.empty());
  CHECK(rep.failure.empty());
}

TEST_CASE("a misaligned pointer basis leaves branch coherence") {
  PureState state = cat_state(4, 1.0, 1.0);
  Partition p = parse_partition("S:1|2|3|4", 4);
  MatrixXcd had(2, 2);
  double r = 1.0 / std::sqrt(2.0);
  had << r, r, r, -r;
  auto rotated = basis_observable({1}, had);
  SbsReport rep = sbs_check(state, p, rotated, 4);
  CHECK_FALSE(rep.is_sbs);
  CHECK(rep.failure == "branch coherence survives tracing");
  CHECK(rep.max_cross_norm > 0.5);
}

TEST_CASE("entangled fragments break the product condition") {
  SystemLayout layout(std::vector<int>(4, 2));
  double r = 1.0 / std::sqrt(2.0);
  VectorXcd amps = VectorXcd::Zero(16);
  // |0>(|00>+|11>)|0> + |1>(|01>+|10>)|1>, all over 2
  amps(0b0000) = 0.5;
  amps(0b0110) = 0.5;
  amps(0b1011) = 0.5;
  amps(0b1101) = 0.5;
  PureState state(layout, amps);
  Partition p = parse_partition("S:1|2|3|4", 4);
  auto pointer = HermitianObservable::computational(layout, {1});
  SbsReport rep = sbs_check(state, p, pointer, 4);
  CHECK_FALSE(rep.is_sbs);
  CHECK(rep.max_cross_norm <= 1e-10);
  CHECK(rep.failure == "branch states are not products over the fractions");
  (void)r;
}

TEST_CASE("overlapping fragment states are flagged as indistinguishable") {
  SystemLayout layout(std::vector<int>(4, 2));
  double r = 1.0 / std::sqrt(2.0);
  VectorXcd amps = VectorXcd::Zero(16);
  // |0>|0>|0>|0> + |1>|1>|+>|1>, all over sqrt(2)
  amps(0b0000) = r;
  amps(0b1101) = 0.5;
  amps(0b1111) = 0.5;
  PureState state(layout, amps);
  Partition p = parse_partition("S:1|2|3|4", 4);
  auto pointer = HermitianObservable::computational(layout, {1});
  SbsReport rep = sbs_check(state, p, pointer, 4);
  CHECK_FALSE(rep.is_sbs);
  CHECK(rep.failure == "fragment states are not pairwise distinguishable");
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].fragment == 2);
  CHECK(rep.violations[0].branch_a == 1);
  CHECK(rep.violations[0].branch_b == 2);
  CHECK(rep.violations[0].fidelity == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("broadcast check input validation") {
  PureState state = cat_state(4, 1.0, 1.0);
  Partition p = parse_partition("S:1|2|3|4", 4);
  auto pointer = HermitianObservable::computational(state.layout, {1});
  CHECK_THROWS_AS(sbs_check(state, p, pointer, 1), Error);   // system fraction
  CHECK_THROWS_AS(sbs_check(state, p, pointer, 5), Error);   // out of range
  auto wrong = HermitianObservable::computational(state.layout, {2});
  CHECK_THROWS_AS(sbs_check(state, p, wrong, 4), Error);
  Partition unmarked = parse_partition("1|2|3|4", 4);
  CHECK_THROWS_AS(sbs_check(state, unmarked, pointer, 4), Error);

  VectorXcd amps = VectorXcd::Zero(16);
  amps(0) = 1.0;
  PureState product(state.layout, amps);
  SbsReport rep = sbs_check(product, p, pointer, 4);
  CHECK_FALSE(rep.is_sbs);
  CHECK(rep.failure == "fewer than two pointer branches");
}
