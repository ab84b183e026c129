#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "darwinscope/hilbert.hpp"
#include "doctest.h"

using namespace darwinscope;

namespace {

PureState ghz_state(int n_qubits) {
  SystemLayout layout(std::vector<int>(n_qubits, 2));
  VectorXcd amps = VectorXcd::Zero(layout.total_dim());
  amps[0] = amps[layout.total_dim() - 1] = 1.0 / std::sqrt(2.0);
  return PureState(layout, amps);
}

}  // namespace

TEST_CASE("layout basics") {
  SystemLayout layout({2, 3, 2});
  CHECK(layout.size() == 3);
  CHECK(layout.total_dim() == 12);
  CHECK(layout.dim(2) == 3);
  CHECK(layout.subset_dim({1, 3}) == 4);
  CHECK(layout.complement({2}) == std::vector<int>{1, 3});

  CHECK_THROWS_AS(layout.check_subset({}), Error);
  CHECK_THROWS_AS(layout.check_subset({0}), Error);
  CHECK_THROWS_AS(layout.check_subset({4}), Error);
  CHECK_THROWS_AS(layout.check_subset({2, 1}), Error);
  CHECK_THROWS_AS(layout.check_subset({1, 1}), Error);
  CHECK_THROWS_AS(SystemLayout({2, 1}), Error);
  CHECK_THROWS_AS(SystemLayout(std::vector<int>(15, 2)), Error);
}

TEST_CASE("pure state normalization is enforced") {
  SystemLayout layout({2});
  VectorXcd v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(PureState(layout, v), Error);
  v << 1.0, 0.0;
  CHECK_NOTHROW(PureState(layout, v));
}

TEST_CASE("reshape and contract agree") {
  Rng rng(7);
  SystemLayout layout({2, 3, 2, 2});
  PureState state(layout, random_state_vector(layout.total_dim(), rng));
  std::vector<int> subset{2, 4};
  VectorXcd v = random_state_vector(layout.subset_dim(subset), rng);

  MatrixXcd m = reshape_subset(state, subset);
  VectorXcd direct = (v.adjoint() * m).transpose();
  VectorXcd via = contract_subset(state, subset, v);
  CHECK((direct - via).norm() < 1e-14);
  CHECK(std::abs(m.norm() - 1.0) < 1e-12);
}

TEST_CASE("assemble_product interleaves systems correctly") {
  SystemLayout layout({2, 3, 2});
  Rng rng(11);
  VectorXcd a = random_state_vector(4, rng);   // systems 1 and 3
  VectorXcd b = random_state_vector(3, rng);   // system 2
  VectorXcd full = assemble_product(layout, {{{1, 3}, a}, {{2}, b}});
  REQUIRE(full.size() == 12);
  // global index (i, j, k) = i*6 + j*2 + k; part index of {1,3} is i*2 + k
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 2; ++k)
        CHECK(std::abs(full[i * 6 + j * 2 + k] - a[i * 2 + k] * b[j]) < 1e-15);

  CHECK_THROWS_AS(assemble_product(layout, {{{1, 2}, a}, {{2}, b}}), Error);
}

TEST_CASE("subset index map and operator application") {
  SystemLayout layout({2, 2, 2});
  std::vector<int> map2 = subset_index_map(layout, {2});
  CHECK(map2[0] == 0);
  CHECK(map2[2] == 1);
  CHECK(map2[5] == 0);
  CHECK(map2[6] == 1);

  Rng rng(3);
  PureState state(layout, random_state_vector(8, rng));
  MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  VectorXcd flipped = apply_subset_operator(state, {1}, x);
  for (int g = 0; g < 8; ++g) CHECK(flipped[g] == state.amplitudes[g ^ 4]);
  CHECK_THROWS_AS(apply_subset_operator(state, {1, 2}, x), Error);
}

TEST_CASE("schmidt reconstructs and grades entanglement") {
  Rng rng(23);
  SystemLayout layout({2, 2, 3, 2});
  PureState state(layout, random_state_vector(layout.total_dim(), rng));
  std::vector<int> left{1, 3};
  SchmidtResult sch = schmidt(state, left);

  VectorXcd rebuilt = VectorXcd::Zero(layout.total_dim());
  for (int k = 0; k < sch.singular_values.size(); ++k)
    rebuilt += sch.singular_values[k] *
               assemble_product(layout, {{left, sch.left_vectors.col(k)},
                                         {{2, 4}, sch.right_vectors.col(k)}});
  CHECK((rebuilt - state.amplitudes).norm() < 1e-12);
  for (int k = 1; k < sch.singular_values.size(); ++k)
    CHECK(sch.singular_values[k] <= sch.singular_values[k - 1] + 1e-15);

  PureState bell = ghz_state(2);
  SchmidtResult bsch = schmidt(bell, {1});
  CHECK(bsch.rank == 2);
  CHECK(bsch.entropy_bits == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entropy values") {
  VectorXd p(2);
  p << 0.75, 0.25;
  CHECK(shannon_entropy_bits(p) ==
        doctest::Approx(0.8112781244591328).epsilon(1e-13));

  PureState g = ghz_state(3);
  CHECK(von_neumann_entropy(partial_trace(g, {1})) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(partial_trace(g, {1, 2})) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partial trace marginals") {
  PureState g = ghz_state(3);
  DensityOperator rho = partial_trace(g, {2});
  CHECK(std::abs(rho.matrix(0, 0) - 0.5) < 1e-14);
  CHECK(std::abs(rho.matrix(1, 1) - 0.5) < 1e-14);
  CHECK(std::abs(rho.matrix(0, 1)) < 1e-14);

  Rng rng(5);
  SystemLayout layout({2, 3});
  VectorXcd a = random_state_vector(2, rng), b = random_state_vector(3, rng);
  PureState prod(layout, assemble_product(layout, {{{1}, a}, {{2}, b}}));
  DensityOperator ra = partial_trace(prod, {1});
  CHECK((ra.matrix - a * a.adjoint()).norm() < 1e-13);

  // tracing a density operator further matches tracing the state directly
  DensityOperator r12 = partial_trace(ghz_state(3), {1, 2});
  DensityOperator r1 = partial_trace(r12, SystemLayout({2, 2}), {1});
  CHECK((r1.matrix - partial_trace(ghz_state(3), {1}).matrix).norm() < 1e-13);
}

TEST_CASE("dual vectors invert the gram pairing") {
  Rng rng(9);
  std::vector<VectorXcd> set;
  for (int k = 0; k < 3; ++k) set.push_back(random_state_vector(5, rng));
  for (int k = 1; k <= 3; ++k) {
    VectorXcd d = dual_vector(set, k);
    CHECK(std::abs(d.norm() - 1.0) < 1e-12);
    for (int j = 0; j < 3; ++j)
      if (j != k - 1) CHECK(std::abs(d.dot(set[j])) < 1e-10);
    CHECK(d.dot(set[k - 1]).real() > 0.0);
    CHECK(std::abs(d.dot(set[k - 1]).imag()) < 1e-12);
  }

  std::vector<VectorXcd> dependent{set[0], set[1], set[0]};
  CHECK_THROWS_AS(dual_vector(dependent, 1), Error);
}

TEST_CASE("project_component") {
  PureState g = ghz_state(3);
  VectorXcd e0(2), e1(2);
  e0 << 1, 0;
  e1 << 0, 1;
  PureState p0 = project_component(g, {1}, e0);
  CHECK(std::abs(p0.amplitudes[0] - 1.0) < 1e-12);

  SystemLayout layout({2, 2, 2});
  VectorXcd zeros = VectorXcd::Zero(8);
  zeros[0] = 1.0;
  PureState all0(layout, zeros);
  CHECK_THROWS_AS(project_component(all0, {1}, e1), Error);
}

TEST_CASE("fidelity") {
  SystemLayout layout({2});
  VectorXcd e0(2), e1(2), plus(2);
  e0 << 1, 0;
  e1 << 0, 1;
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  DensityOperator r0({2}, e0 * e0.adjoint());
  DensityOperator r1({2}, e1 * e1.adjoint());
  DensityOperator rp({2}, plus * plus.adjoint());
  CHECK(fidelity(r0, r0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fidelity(r0, r1) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(fidelity(r0, rp) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("observables group outcomes") {
  SystemLayout layout({2, 2});
  VectorXd vals(2);
  vals << 1.0, 1.0 + 1e-12;
  MatrixXcd vecs = MatrixXcd::Identity(2, 2);
  HermitianObservable degenerate({1}, vals, vecs);
  CHECK_FALSE(degenerate.nondegenerate());
  CHECK(degenerate.outcomes().size() == 1);

  HermitianObservable comp = HermitianObservable::computational(layout, {1, 2});
  CHECK(comp.nondegenerate());
  CHECK(comp.outcomes().size() == 4);
  CHECK(comp.eigenvalues[3] == 3.0);

  MatrixXcd bad = MatrixXcd::Ones(2, 2);
  CHECK_THROWS_AS(HermitianObservable({1}, vals, bad), Error);
}

TEST_CASE("random generators are deterministic and unitary") {
  Rng a(42), b(42);
  CHECK((random_state_vector(6, a) - random_state_vector(6, b)).norm() == 0.0);
  MatrixXcd u = random_unitary(5, a);
  CHECK((u.adjoint() * u - MatrixXcd::Identity(5, 5)).norm() < 1e-12);
  MatrixXcd f = random_orthonormal_frame(5, 3, a);
  CHECK((f.adjoint() * f - MatrixXcd::Identity(3, 3)).norm() < 1e-12);
}
