#include "darwinscope/fixtures.hpp"

#include <cmath>

namespace darwinscope {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kPi = 3.14159265358979323846;

VectorXcd vec4(Complex a, Complex b, Complex c, Complex d) {
  VectorXcd v(4);
  v << a, b, c, d;
  return v;
}

// Four branches: system qudit marker times a repeated two-qubit record. The
// same state also expands over the crosswise qubit pairing, so it carries two
// inequivalent branch structures at once.
Fixture build_ambiguity4() {
  SystemLayout layout({4, 2, 2, 2, 2});
  Partition pa = parse_partition("S:1|2,3|4,5", 5);
  Partition pb = parse_partition("S:1|2,4|3,5", 5);

  const Complex im(0.0, 1.0);
  const double r = kInvSqrt2;
  std::vector<VectorXcd> sys(4);
  for (int k = 0; k < 4; ++k) {
    sys[k] = VectorXcd::Zero(4);
    sys[k][k] = 1.0;
  }
  std::vector<VectorXcd> rec = {vec4(r, 0, 0, r), vec4(0, r, r, 0),
                                vec4(0, -im * r, im * r, 0),
                                vec4(r, 0, 0, -r)};

  SemiGHZDecomposition da;
  da.partition = pa;
  da.orthonormal = true;
  for (int k = 0; k < 4; ++k) {
    da.coefficients.push_back(Complex(0.5, 0.0));
    da.branch_vectors.push_back({sys[k], rec[k], rec[k]});
  }

  // crosswise expansion of the same amplitudes
  std::vector<VectorXcd> pair = {vec4(r, 0, 0, r), vec4(r, 0, 0, -r),
                                 vec4(0, r, r, 0), vec4(0, r, -r, 0)};
  std::vector<VectorXcd> sys2(4, VectorXcd(4));
  sys2[0] << 0.5, 0.5, -0.5, 0.5;
  sys2[1] << 0.5, -0.5, 0.5, 0.5;
  sys2[2] << 0.5, 0.5, 0.5, -0.5;
  sys2[3] << 0.5, -0.5, -0.5, -0.5;
  SemiGHZDecomposition db;
  db.partition = pb;
  db.orthonormal = true;
  for (int k = 0; k < 4; ++k) {
    db.coefficients.push_back(Complex(0.5, 0.0));
    db.branch_vectors.push_back({sys2[k], pair[k], pair[k]});
  }

  Fixture f;
  f.name = "ambiguity4";
  f.state = PureState(layout, da.reconstruct(layout));
  f.partitions = {{"A", pa}, {"B", pb}};
  f.decompositions = {{"A", da}, {"B", db}};
  f.manifest = {{"branches", "4"},
                {"class_B_vs_A", "nonlocal-overlap"},
                {"class_A_vs_B", "nonlocal-overlap"},
                {"r_zero", "2"}};
  return f;
}

Fixture build_fig1a() {
  Fixture f;
  f.name = "fig1a";
  f.partitions = {{"A", parse_partition("1|2,3,4|5,6", 6)},
                  {"B", parse_partition("1|2,4|3,5,6", 6)}};
  f.manifest = {{"comparable_B_vs_A", "true"}, {"witness_B_vs_A", "1,2"},
                {"comparable_A_vs_B", "true"}, {"witness_A_vs_B", "1,3"},
                {"paircover_A_B", "true"},    {"paircover_B_A", "true"},
                {"sufficient_A_B", "false"}};
  return f;
}

// Incomparable pair whose overlap pattern still touches every fraction: no
// two fractions of either partition jointly cover the other side.
Fixture build_footnote() {
  Fixture f;
  f.name = "footnote-overlap";
  auto [a, b] = realize_incidence({{1, 2, 3},
                                   {1, 4, 5},
                                   {1, 6, 7},
                                   {2, 4, 5, 6},
                                   {2, 3, 5, 7},
                                   {3, 4, 6, 7}});
  f.partitions = {{"A", a}, {"B", b}};
  f.manifest = {{"n_systems", "21"},
                {"comparable_B_vs_A", "false"},
                {"comparable_A_vs_B", "false"},
                {"paircover_A_B", "false"},
                {"paircover_B_A", "false"}};
  return f;
}

// Two-branch state over four qubits plus two single-qubit records. It has a
// branch decomposition over the merged four-qubit fraction but none over
// either of the finer pairings.
Fixture build_comdec(const FixtureParams& p) {
  double s = std::sqrt(2.0 * (std::norm(p.alpha) + std::norm(p.beta)));
  if (s < 1e-12 || std::abs(p.alpha) < 1e-9 * s || std::abs(p.beta) < 1e-9 * s)
    fail(ErrorCode::InvalidArgument, "both branch weights must be nonzero");
  Complex a = p.alpha / s;
  Complex b = p.beta / s;
  double t3 = p.angle3_deg * kPi / 180.0;
  double t4 = p.angle4_deg * kPi / 180.0;

  VectorXcd a3(2), a3p(2), a4(2), a4p(2);
  a3 << std::cos(t3), std::sin(t3);
  a3p << -std::sin(t3), std::cos(t3);
  a4 << std::cos(t4), std::sin(t4);
  a4p << -std::sin(t4), std::cos(t4);

  VectorXcd v1 = VectorXcd::Zero(16), v2 = VectorXcd::Zero(16);
  v1[0] = kInvSqrt2;   // |0000>
  v1[15] = kInvSqrt2;  // |1111>
  v2[5] = kInvSqrt2;   // |0101>
  v2[10] = kInvSqrt2;  // |1010>

  SystemLayout layout({2, 2, 2, 2, 2, 2});
  SemiGHZDecomposition merged;
  merged.partition = parse_partition("1,2,3,4|5|6", 6);
  merged.orthonormal = true;
  merged.coefficients = {a * std::sqrt(2.0), b * std::sqrt(2.0)};
  merged.branch_vectors = {{v1, a3, a4}, {v2, a3p, a4p}};

  Fixture f;
  f.name = "comdec";
  f.state = PureState(layout, merged.reconstruct(layout));
  f.partitions = {{"A", parse_partition("1,2|3,4|5|6", 6)},
                  {"B", parse_partition("1,4|2,3|5|6", 6)},
                  {"merged", merged.partition}};
  f.decompositions = {{"merged", merged}};
  f.manifest = {{"detect_A", "none"},
                {"detect_B", "none"},
                {"detect_merged", "found"},
                {"paircover_A_B", "false"},
                {"paircover_B_A", "false"}};
  return f;
}

}  // namespace

const Partition& Fixture::partition(const std::string& key) const {
  for (const auto& [k, v] : partitions)
    if (k == key) return v;
  fail(ErrorCode::InvalidArgument, name + " has no partition named " + key);
}

const SemiGHZDecomposition& Fixture::decomposition(const std::string& key) const {
  for (const auto& [k, v] : decompositions)
    if (k == key) return v;
  fail(ErrorCode::InvalidArgument, name + " has no decomposition named " + key);
}

Fixture build_fixture(const std::string& name, const FixtureParams& params) {
  if (name == "ambiguity4") return build_ambiguity4();
  if (name == "fig1a") return build_fig1a();
  if (name == "footnote-overlap") return build_footnote();
  if (name == "comdec") return build_comdec(params);
  fail(ErrorCode::InvalidArgument, "unknown fixture: " + name);
}

std::vector<std::string> fixture_names() {
  return {"ambiguity4", "fig1a", "footnote-overlap", "comdec"};
}

}  // namespace darwinscope
