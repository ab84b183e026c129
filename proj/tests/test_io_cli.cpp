#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "darwinscope/fixtures.hpp"
#include "darwinscope/io.hpp"
#include "doctest.h"

using namespace darwinscope;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "darwinscope-io-tests";
  fs::create_directories(dir);
  return dir;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const char* bin = std::getenv("DARWINSCOPE_BIN");
  if (!bin) FAIL("DARWINSCOPE_BIN is not set");
  std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  while (size_t got = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, got);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

double value_of(const std::string& out, const std::string& key) {
  size_t pos = out.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(out.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("doubles survive a text round trip bit for bit") {
  for (double x : {1.0 / 3.0, -2.7182818284590452, 1e-300, 0.0, 3.5e17}) {
    std::string s = format_double(x);
    CHECK(std::stod(s) == x);
  }
}

TEST_CASE("state files round trip exactly") {
  Fixture f = build_fixture("ambiguity4");
  fs::path p = work_dir() / "ambiguity4.state";
  write_state_file(p.string(), *f.state, "round trip check");
  StateFileResult r = read_state_file(p.string());
  CHECK_FALSE(r.renormalized);
  CHECK(r.state.layout == f.state->layout);
  CHECK(r.state.amplitudes == f.state->amplitudes);
}

TEST_CASE("slightly denormalized states are fixed, badly broken ones refused") {
  fs::path near = work_dir() / "near.state";
  {
    std::ofstream out(near);
    out << "dims: 2\n" << format_complex(Complex(1.0 + 5e-8, 0.0)) << "\n"
        << format_complex(Complex(0.0, 0.0)) << "\n";
  }
  StateFileResult r = read_state_file(near.string());
  CHECK(r.renormalized);
  CHECK(r.norm_deviation > 1e-9);
  CHECK(std::abs(r.state.amplitudes.norm() - 1.0) <= 1e-12);

  fs::path far = work_dir() / "far.state";
  {
    std::ofstream out(far);
    out << "dims: 2\n" << format_complex(Complex(1.1, 0.0)) << "\n"
        << format_complex(Complex(0.0, 0.0)) << "\n";
  }
  CHECK_THROWS_AS(read_state_file(far.string()), Error);
}

TEST_CASE("parse failures carry the line number") {
  fs::path bad = work_dir() / "bad.state";
  {
    std::ofstream out(bad);
    out << "dims: 2\n# comment\n0.5 0.0\nnot-a-number 0.0\n";
  }
  try {
    read_state_file(bad.string());
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(contains(e.what(), ":4:"));
  }
  CHECK_THROWS_AS(read_state_file((work_dir() / "missing.state").string()),
                  Error);
}

TEST_CASE("decomposition files round trip exactly") {
  Fixture f = build_fixture("ambiguity4");
  const SemiGHZDecomposition& dec = f.decomposition("A");
  fs::path p = work_dir() / "ambiguity4.A.dec";
  write_decomposition_file(p.string(), f.state->layout, dec);
  auto [layout, back] = read_decomposition_file(p.string());
  CHECK(layout == f.state->layout);
  CHECK(back.partition == dec.partition);
  CHECK(back.orthonormal == dec.orthonormal);
  REQUIRE(back.branch_count() == dec.branch_count());
  for (int i = 0; i < dec.branch_count(); ++i) {
    CHECK(back.coefficients[i] == dec.coefficients[i]);
    for (size_t j = 0; j < dec.branch_vectors[i].size(); ++j)
      CHECK(back.branch_vectors[i][j] == dec.branch_vectors[i][j]);
  }
}

TEST_CASE("observable files round trip exactly") {
  SystemLayout layout({2, 2, 2});
  auto obs = HermitianObservable::computational(layout, {2, 3});
  fs::path p = work_dir() / "comp23.obs";
  write_observable_file(p.string(), layout, obs);
  auto [back_layout, back] = read_observable_file(p.string());
  CHECK(back_layout == layout);
  CHECK(back.systems == obs.systems);
  CHECK(back.eigenvalues == obs.eigenvalues);
  CHECK(back.eigenvectors == obs.eigenvectors);
}

TEST_CASE("cli: comparability queries") {
  CliResult r = run_cli("comparable fig1a.A fig1a.B");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "comparable=true"));
  CHECK(contains(r.out, "witness=(1,2)"));
  CHECK(contains(r.out, "reverse=true"));
  CHECK(contains(r.out, "reverse_witness=(1,3)"));
  CHECK(contains(r.out, "mutual=true"));

  CliResult fixed = run_cli("comparable ambiguity4.B ambiguity4.A --system-fixed");
  CHECK(fixed.exit_code == 1);
  CHECK(contains(fixed.out, "comparable=false"));
  CHECK(contains(fixed.out, "class=nonlocal-overlap"));

  CliResult text = run_cli("comparable \"1|2,3|4,5\" \"1|2,4|3,5\"");
  CHECK(text.exit_code == 1);
}

TEST_CASE("cli: comparable set size") {
  CliResult r = run_cli("comparable-set fig1a.A");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "count=85"));
}

TEST_CASE("cli: pair cover on the footnote pattern") {
  CliResult r = run_cli("paircover footnote-overlap.A footnote-overlap.B");
  CHECK(r.exit_code == 1);
  CHECK(contains(r.out, "paircover=false"));
  CHECK(contains(r.out, "reverse=false"));
}

TEST_CASE("cli: detection, verification, and matching through files") {
  fs::path dir = work_dir();
  fs::path dec_path = dir / "detected.dec";
  CliResult det = run_cli("detect ambiguity4.state ambiguity4.A --out " +
                          dec_path.string());
  CHECK(det.exit_code == 0);
  CHECK(contains(det.out, "result=found"));
  CHECK(contains(det.out, "branches=4"));
  REQUIRE(fs::exists(dec_path));

  Fixture f = build_fixture("ambiguity4");
  fs::path state_path = dir / "cli.state";
  write_state_file(state_path.string(), *f.state);
  CliResult ver =
      run_cli("verify " + state_path.string() + " " + dec_path.string());
  CHECK(ver.exit_code == 0);
  CHECK(contains(ver.out, "valid=true"));
  CHECK(contains(ver.out, "orthonormal=true"));

  CliResult m = run_cli("match " + dec_path.string() + " ambiguity4.A");
  CHECK(m.exit_code == 0);
  CHECK(contains(m.out, "match=true"));

  CliResult cross = run_cli("match ambiguity4.A ambiguity4.B");
  CHECK(cross.exit_code == 1);
  CHECK(contains(cross.out, "match=false"));
}

TEST_CASE("cli: information and redundancy") {
  Fixture f = build_fixture("ambiguity4");
  fs::path dir = work_dir();
  fs::path state_path = dir / "amb.state";
  write_state_file(state_path.string(), *f.state);

  const SemiGHZDecomposition& dec = f.decomposition("A");
  MatrixXcd cols(4, 4);
  for (int i = 0; i < 4; ++i) cols.col(i) = dec.branch_vectors[i][0];
  VectorXd vals(4);
  vals << 0, 1, 2, 3;
  HermitianObservable pointer({1}, vals, cols);
  fs::path obs_path = dir / "pointer.obs";
  write_observable_file(obs_path.string(), f.state->layout, pointer);

  CliResult red = run_cli("redundancy " + state_path.string() + " --pointer " +
                          obs_path.string());
  CHECK(red.exit_code == 0);
  CHECK(contains(red.out, "R_delta=2"));
  CHECK(contains(red.out, "fragments=2,3|4,5"));
  CHECK(contains(red.out, "greedy=false"));

  CliResult mi = run_cli("mutualinfo " + state_path.string() +
                         " --pointer " + obs_path.string() +
                         " --fragment comp:2,3");
  CHECK(mi.exit_code == 0);
  CHECK(value_of(mi.out, "I") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(value_of(mi.out, "H_pointer_bits") == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("cli: fitting with a reference decomposition") {
  fs::path dir = work_dir();
  Fixture f = build_fixture("ambiguity4");
  fs::path state_path = dir / "fit.state";
  write_state_file(state_path.string(), *f.state);
  fs::path dec_path = dir / "ref.dec";
  write_decomposition_file(dec_path.string(), f.state->layout,
                           f.decomposition("A"));

  CliResult r = run_cli("fit " + state_path.string() +
                        " \"S:1|2,3|4,5\" --branches 4 --reference " +
                        dec_path.string());
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "converged=true"));
  CHECK(contains(r.out, "max_abs_eps="));
  CHECK(contains(r.out, "consistency_residual="));
  CHECK(contains(r.out, "alignment="));
}

TEST_CASE("cli: decomposition scan") {
  CliResult r = run_cli("etut-scan ambiguity4.state ambiguity4.A");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "reference=found"));
  CHECK(contains(r.out, "scanned=15"));
  CHECK(contains(r.out, "violations=0"));
}

TEST_CASE("cli: fixture export and manifest") {
  fs::path dir = work_dir() / "fixture-out";
  fs::create_directories(dir);
  CliResult r = run_cli("fixture comdec --out " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "name=comdec"));
  CHECK(contains(r.out, "detect_merged=found"));
  CHECK(contains(r.out, "wrote="));
  REQUIRE(fs::exists(dir / "comdec.state"));
  StateFileResult st = read_state_file((dir / "comdec.state").string());
  CHECK(st.state.layout.size() == 6);
}

TEST_CASE("cli: bad input exits with the error code") {
  CHECK(run_cli("comparable \"1|2\" \"1|\"").exit_code == 2);
  CHECK(run_cli("detect missing-file.state \"1|2\"").exit_code == 2);
  CHECK(run_cli("fixture no-such-fixture").exit_code == 2);
}
