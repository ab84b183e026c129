#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "darwinscope/fixtures.hpp"
#include "darwinscope/ghz.hpp"
#include "darwinscope/hilbert.hpp"
#include "doctest.h"

using namespace darwinscope;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Random branch expansion with orthonormal per-fraction vectors; weights are
// kept away from ties so the canonical branch order is unambiguous.
SemiGHZDecomposition random_ghz(const SystemLayout& layout,
                                const Partition& partition, int branches,
                                Rng& rng) {
  SemiGHZDecomposition dec;
  dec.partition = partition;
  dec.orthonormal = true;
  std::uniform_real_distribution<double> mag(0.5, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.14159265358979);
  double w2 = 0.0;
  for (int i = 0; i < branches; ++i) {
    double m = mag(rng) + 0.2 * i;
    dec.coefficients.push_back(std::polar(m, phase(rng)));
    w2 += m * m;
  }
  for (Complex& c : dec.coefficients) c /= std::sqrt(w2);
  std::vector<MatrixXcd> frames;
  for (const auto& fr : partition.fractions)
    frames.push_back(random_orthonormal_frame(layout.subset_dim(fr), branches, rng));
  dec.branch_vectors.resize(branches);
  for (int i = 0; i < branches; ++i)
    for (size_t j = 0; j < partition.fractions.size(); ++j)
      dec.branch_vectors[i].push_back(frames[j].col(i));
  return dec;
}

}  // namespace

TEST_CASE("both fixture decompositions reconstruct the same state") {
  Fixture f = build_fixture("ambiguity4");
  REQUIRE(f.state.has_value());
  const SystemLayout& layout = f.state->layout;

  for (const char* key : {"A", "B"}) {
    const SemiGHZDecomposition& dec = f.decomposition(key);
    VerifyReport rep = verify_semi_ghz(*f.state, dec, 1e-12);
    CHECK(rep.valid);
    CHECK(rep.orthonormal);
    CHECK(rep.reconstruction_error <= 1e-12);
    CHECK(rep.coefficient_weight == doctest::Approx(1.0).epsilon(1e-12));
    for (int r : rep.gram_ranks) CHECK(r == 4);
  }
  VectorXcd a = f.decomposition("A").reconstruct(layout);
  VectorXcd b = f.decomposition("B").reconstruct(layout);
  CHECK((a - b).norm() <= 1e-12);
}

TEST_CASE("detection recovers both expansions of the ambiguous state") {
  Fixture f = build_fixture("ambiguity4");
  const SystemLayout& layout = f.state->layout;
  for (const char* key : {"A", "B"}) {
    const Partition& p = f.partition(key);
    auto found = detect_ghz(*f.state, p);
    REQUIRE(found.has_value());
    CHECK(verify_semi_ghz(*f.state, *found, 1e-8).valid);
    auto match = match_decompositions(*found, f.decomposition(key), layout, 1e-8);
    REQUIRE(match.has_value());
    CHECK(match->max_residual <= 1e-8);
  }
}

TEST_CASE("detection result does not depend on the seed") {
  Fixture f = build_fixture("ambiguity4");
  const Partition& p = f.partition("A");
  DetectOptions o1;
  o1.seed = 11;
  DetectOptions o2;
  o2.seed = 977;
  auto d1 = detect_ghz(*f.state, p, o1);
  auto d2 = detect_ghz(*f.state, p, o2);
  REQUIRE(d1.has_value());
  REQUIRE(d2.has_value());
  REQUIRE(d1->branch_count() == d2->branch_count());
  for (int i = 0; i < d1->branch_count(); ++i) {
    CHECK(std::abs(d1->coefficients[i] - d2->coefficients[i]) <= 1e-9);
    VectorXcd g1 = d1->branch_global(f.state->layout, i);
    VectorXcd g2 = d2->branch_global(f.state->layout, i);
    CHECK((g1 - g2).norm() <= 1e-8);
  }
}

TEST_CASE("two fractions reduce to the Schmidt decomposition") {
  SystemLayout layout({2, 2});
  VectorXcd amps(4);
  amps << 0.8, 0.0, 0.0, 0.6;
  PureState bell(layout, amps);
  auto dec = detect_ghz(bell, parse_partition("1|2", 2));
  REQUIRE(dec.has_value());
  CHECK(dec->branch_count() == 2);
  CHECK(std::abs(dec->coefficients[0]) == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(std::abs(dec->coefficients[1]) == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(verify_semi_ghz(bell, *dec, 1e-10).valid);
}

TEST_CASE("product states carry no branch structure") {
  SystemLayout layout({2, 2, 2});
  Rng rng(5);
  VectorXcd v = assemble_product(layout, {{{1}, random_state_vector(2, rng)},
                                          {{2}, random_state_vector(2, rng)},
                                          {{3}, random_state_vector(2, rng)}});
  PureState product(layout, v);
  CHECK_FALSE(detect_ghz(product, parse_partition("1|2|3", 3)).has_value());
  CHECK_FALSE(detect_ghz(product, parse_partition("1|2,3", 3)).has_value());
}

TEST_CASE("random expansions are recovered across shapes") {
  struct Shape {
    std::vector<int> dims;
    const char* partition;
    int branches;
  };
  const Shape shapes[] = {
      {{2, 2, 2, 2, 2}, "S:1|2,3|4,5", 2},
      {{3, 2, 2, 3}, "S:1|2,3|4", 3},
      {{4, 2, 2, 2, 2}, "S:1|2,3|4,5", 4},
      {{2, 2, 2, 2}, "1|2|3|4", 2},
  };
  Rng rng(42);
  for (const Shape& s : shapes) {
    SystemLayout layout(s.dims);
    Partition p = parse_partition(s.partition,
                                  static_cast<int>(s.dims.size()));
    SemiGHZDecomposition planted = random_ghz(layout, p, s.branches, rng);
    PureState state(layout, planted.reconstruct(layout));
    REQUIRE(verify_semi_ghz(state, planted, 1e-10).valid);
    auto found = detect_ghz(state, p);
    REQUIRE(found.has_value());
    CHECK(found->branch_count() == s.branches);
    auto match = match_decompositions(*found, planted, layout, 1e-7);
    CHECK(match.has_value());
  }
}

TEST_CASE("fine graining splits separable fractions to singletons") {
  SystemLayout layout({2, 2, 2, 2, 2});
  Partition coarse = parse_partition("S:1|2,3|4,5", 5);
  SemiGHZDecomposition dec;
  dec.partition = coarse;
  dec.orthonormal = true;
  dec.coefficients = {Complex(kInvSqrt2, 0), Complex(kInvSqrt2, 0)};
  VectorXcd e0 = VectorXcd::Zero(2), e1 = VectorXcd::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  VectorXcd p00 = VectorXcd::Zero(4), p11 = VectorXcd::Zero(4);
  p00(0) = 1.0;
  p11(3) = 1.0;
  dec.branch_vectors = {{e0, p00, p00}, {e1, p11, p11}};
  PureState state(layout, dec.reconstruct(layout));

  SemiGHZDecomposition fine = fine_grain(state, dec);
  CHECK(fine.partition.size() == 5);
  CHECK(fine.partition.system_fraction() == std::vector<int>{1});
  CHECK(verify_semi_ghz(state, fine, 1e-8).valid);
}

TEST_CASE("fine graining keeps entangled record pairs together") {
  Fixture f = build_fixture("ambiguity4");
  const SemiGHZDecomposition& dec = f.decomposition("A");
  SemiGHZDecomposition fine = fine_grain(*f.state, dec);
  CHECK(fine.partition == dec.partition);
}

TEST_CASE("cross matching the two rival expansions fails") {
  Fixture f = build_fixture("ambiguity4");
  auto match = match_decompositions(f.decomposition("A"), f.decomposition("B"),
                                    f.state->layout, 1e-6);
  CHECK_FALSE(match.has_value());
}

TEST_CASE("product vectors inside a spanned subspace") {
  MatrixXcd basis = MatrixXcd::Zero(4, 2);
  basis(0, 0) = kInvSqrt2;
  basis(3, 0) = kInvSqrt2;
  basis(0, 1) = kInvSqrt2;
  basis(3, 1) = -kInvSqrt2;
  auto vs = product_vectors_in_subspace(basis, 2, 2, 2);
  REQUIRE(vs.has_value());
  REQUIRE(vs->size() == 2);
  for (const VectorXcd& v : *vs) {
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-10));
    Eigen::Map<const MatrixXcd> m(v.data(), 2, 2);
    Eigen::JacobiSVD<MatrixXcd> svd(m);
    CHECK(svd.singularValues()(1) <= 1e-9);
  }
  CHECK(std::abs((*vs)[0].dot((*vs)[1])) <= 1e-9);
}

TEST_CASE("the antisymmetric line contains no product vector") {
  MatrixXcd basis = MatrixXcd::Zero(4, 1);
  basis(1, 0) = kInvSqrt2;
  basis(2, 0) = -kInvSqrt2;
  CHECK_FALSE(product_vectors_in_subspace(basis, 2, 2, 1).has_value());
}

TEST_CASE("verification rejects tampered expansions") {
  Fixture f = build_fixture("ambiguity4");
  SemiGHZDecomposition dec = f.decomposition("A");

  SemiGHZDecomposition off = dec;
  off.coefficients[0] *= 1.01;
  VerifyReport rep = verify_semi_ghz(*f.state, off, 1e-8);
  CHECK_FALSE(rep.valid);
  CHECK(rep.failure != "");

  SemiGHZDecomposition skew = dec;
  skew.branch_vectors[0][1] *= 0.9;
  CHECK_FALSE(verify_semi_ghz(*f.state, skew, 1e-8).valid);
}

TEST_CASE("scanning the ambiguous state against its first expansion") {
  Fixture f = build_fixture("ambiguity4");
  EtutScanResult res = etut_scan(*f.state, f.partition("A"));
  CHECK(res.reference_found);
  CHECK(res.scanned == 15);
  CHECK(res.comparable_count == 12);
  CHECK(res.detections == 1);
  CHECK(res.violations == 0);
  CHECK(res.violating.empty());
}

TEST_CASE("scan without a detectable reference reports failure") {
  SystemLayout layout({2, 2, 2});
  Rng rng(9);
  PureState st(layout, random_state_vector(8, rng));
  EtutScanResult res = etut_scan(st, parse_partition("S:1|2|3", 3));
  CHECK_FALSE(res.reference_found);
  CHECK(res.scanned == 0);
}
