// darwinscope: redundant-record structure analysis for pure multipartite
// states. Exit codes: 0 positive result, 1 analysis-negative, 2 input error.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "darwinscope/approx.hpp"
#include "darwinscope/darwinism.hpp"
#include "darwinscope/fixtures.hpp"
#include "darwinscope/ghz.hpp"
#include "darwinscope/hilbert.hpp"
#include "darwinscope/io.hpp"
#include "darwinscope/partitions.hpp"

using namespace darwinscope;

namespace {

constexpr int kExitNegative = 1;
constexpr int kExitError = 2;

std::uint64_t env_seed() {
  const char* s = std::getenv("DARWINSCOPE_SEED");
  return s ? std::strtoull(s, nullptr, 10) : 0;
}

std::string fmt(double x) { return format_double(x); }

// "name.key" fixture reference, e.g. ambiguity4.state or fig1a.A
std::optional<std::pair<std::string, std::string>> fixture_ref(
    const std::string& arg) {
  auto dot = arg.find('.');
  if (dot == std::string::npos) return std::nullopt;
  std::string name = arg.substr(0, dot);
  for (const std::string& known : fixture_names())
    if (known == name) return std::make_pair(name, arg.substr(dot + 1));
  return std::nullopt;
}

PureState resolve_state(const std::string& arg) {
  if (auto ref = fixture_ref(arg)) {
    if (ref->second != "state")
      fail(ErrorCode::InvalidArgument,
           arg + ": fixture state references end in .state");
    Fixture f = build_fixture(ref->first);
    if (!f.state)
      fail(ErrorCode::InvalidArgument, ref->first + " has no state");
    return *f.state;
  }
  StateFileResult r = read_state_file(arg);
  if (r.renormalized)
    std::cerr << "note: " << arg << " renormalized (norm deviation "
              << fmt(r.norm_deviation) << ")\n";
  return r.state;
}

Partition resolve_partition(const std::string& arg, int n_systems) {
  if (auto ref = fixture_ref(arg)) {
    Partition p = build_fixture(ref->first).partition(ref->second);
    if (n_systems > 0 && p.n_systems != n_systems)
      fail(ErrorCode::LayoutMismatch,
           arg + " covers " + std::to_string(p.n_systems) +
               " systems, expected " + std::to_string(n_systems));
    return p;
  }
  return parse_partition(arg, n_systems);
}

std::pair<SystemLayout, SemiGHZDecomposition> resolve_decomposition(
    const std::string& arg) {
  if (auto ref = fixture_ref(arg)) {
    Fixture f = build_fixture(ref->first);
    if (!f.state)
      fail(ErrorCode::InvalidArgument, ref->first + " has no state");
    return {f.state->layout, f.decomposition(ref->second)};
  }
  return read_decomposition_file(arg);
}

// "comp:2,3" computational shorthand or an observable file
HermitianObservable resolve_observable(const std::string& arg,
                                       const SystemLayout& layout) {
  if (arg.rfind("comp:", 0) == 0) {
    std::vector<int> systems;
    std::string rest = arg.substr(5);
    size_t pos = 0;
    while (pos < rest.size()) {
      size_t comma = rest.find(',', pos);
      std::string tok = rest.substr(pos, comma == std::string::npos
                                             ? std::string::npos
                                             : comma - pos);
      try {
        systems.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError, arg + ": bad system id '" + tok + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    std::sort(systems.begin(), systems.end());
    return HermitianObservable::computational(layout, systems);
  }
  auto [obs_layout, obs] = read_observable_file(arg);
  if (!(obs_layout == layout))
    fail(ErrorCode::LayoutMismatch, arg + ": dims do not match the state");
  return obs;
}

Complex parse_weight(const std::string& text) {
  std::string t = text;
  auto comma = t.find(',');
  try {
    if (comma == std::string::npos) return Complex(std::stod(t), 0.0);
    return Complex(std::stod(t.substr(0, comma)), std::stod(t.substr(comma + 1)));
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "bad complex value '" + text + "'");
  }
}

std::string join_ints(const std::vector<int>& v, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

std::string class_name(RelativeClass c) {
  switch (c) {
    case RelativeClass::Comparable: return "comparable";
    case RelativeClass::NonlocalOverlap: return "nonlocal-overlap";
    default: return "other";
  }
}

void print_decomposition_summary(const SemiGHZDecomposition& dec) {
  std::cout << "partition=" << format_partition(dec.partition) << "\n";
  std::cout << "branches=" << dec.branch_count() << "\n";
  std::cout << "orthonormal=" << (dec.orthonormal ? "true" : "false") << "\n";
  for (int i = 0; i < dec.branch_count(); ++i)
    std::cout << "alpha_" << i + 1 << "=" << format_complex(dec.coefficients[i])
              << "\n";
}

// ---------------------------------------------------------------------------

int run_comparable(const std::string& a_text, const std::string& b_text,
                   bool system_fixed, int n_systems) {
  Partition a = resolve_partition(a_text, n_systems);
  Partition b = resolve_partition(b_text, std::max(n_systems, a.n_systems));
  if (a.n_systems != b.n_systems)
    a = resolve_partition(a_text, b.n_systems);

  auto forward = comparability_witness(b, a);
  auto backward = comparability_witness(a, b);
  std::cout << "comparable=" << (forward ? "true" : "false") << "\n";
  if (forward)
    std::cout << "witness=(" << forward->first << "," << forward->second
              << ")\n";
  std::cout << "reverse=" << (backward ? "true" : "false") << "\n";
  if (backward)
    std::cout << "reverse_witness=(" << backward->first << ","
              << backward->second << ")\n";
  std::cout << "mutual=" << (forward && backward ? "true" : "false") << "\n";
  RelativeClassification rc = classify_relative(b, a, system_fixed);
  std::cout << "class=" << class_name(rc.cls) << "\n";
  return forward ? 0 : kExitNegative;
}

int run_comparable_set(const std::string& a_text, int n_systems, int cap,
                       bool allow_large, bool system_fixed) {
  Partition a = resolve_partition(a_text, n_systems);
  ComparableSetOptions opts;
  opts.cap = cap;
  opts.allow_large = allow_large;
  opts.require_fixed_system = system_fixed;
  std::vector<Partition> set = comparable_set(a, opts);
  std::cout << "count=" << set.size() << "\n";
  for (const Partition& p : set)
    std::cout << format_partition(p) << "\n";
  return set.empty() ? kExitNegative : 0;
}

int run_paircover(const std::string& a_text, const std::string& b_text,
                  int n_systems) {
  Partition a = resolve_partition(a_text, n_systems);
  Partition b = resolve_partition(b_text, std::max(n_systems, a.n_systems));
  if (a.n_systems != b.n_systems) a = resolve_partition(a_text, b.n_systems);
  auto forward = pair_cover_witness(a, b);
  auto backward = pair_cover_witness(b, a);
  std::cout << "paircover=" << (forward ? "true" : "false") << "\n";
  if (forward)
    std::cout << "witness=(" << forward->first << "," << forward->second
              << ")\n";
  std::cout << "reverse=" << (backward ? "true" : "false") << "\n";
  if (backward)
    std::cout << "reverse_witness=(" << backward->first << ","
              << backward->second << ")\n";
  return forward ? 0 : kExitNegative;
}

int run_detect(const std::string& state_arg, const std::string& part_arg,
               const DetectOptions& opts, const std::string& out_path) {
  PureState state = resolve_state(state_arg);
  Partition part = resolve_partition(part_arg, state.layout.size());
  auto dec = detect_ghz(state, part, opts);
  if (!dec) {
    std::cout << "result=none\n";
    return kExitNegative;
  }
  std::cout << "result=found\n";
  print_decomposition_summary(*dec);
  VerifyReport v = verify_semi_ghz(state, *dec, opts.tol);
  std::cout << "residual=" << fmt(v.reconstruction_error) << "\n";
  if (!out_path.empty())
    write_decomposition_file(out_path, state.layout, *dec);
  return 0;
}

int run_verify(const std::string& state_arg, const std::string& dec_arg,
               double tol) {
  PureState state = resolve_state(state_arg);
  auto [layout, dec] = resolve_decomposition(dec_arg);
  if (!(layout == state.layout))
    fail(ErrorCode::LayoutMismatch, "decomposition dims do not match the state");
  VerifyReport v = verify_semi_ghz(state, dec, tol);
  std::cout << "valid=" << (v.valid ? "true" : "false") << "\n";
  std::cout << "reconstruction_error=" << fmt(v.reconstruction_error) << "\n";
  std::cout << "orthonormal=" << (v.orthonormal ? "true" : "false") << "\n";
  std::cout << "coefficient_weight=" << fmt(v.coefficient_weight) << "\n";
  std::cout << "gram_ranks=" << join_ints(v.gram_ranks, ",") << "\n";
  if (!v.failure.empty()) std::cout << "failure=" << v.failure << "\n";
  return v.valid ? 0 : kExitNegative;
}

int run_match(const std::string& a_arg, const std::string& b_arg, double tol) {
  auto [la, a] = resolve_decomposition(a_arg);
  auto [lb, b] = resolve_decomposition(b_arg);
  if (!(la == lb))
    fail(ErrorCode::LayoutMismatch, "decomposition dims differ");
  auto m = match_decompositions(a, b, la, tol);
  std::cout << "match=" << (m ? "true" : "false") << "\n";
  if (!m) return kExitNegative;
  std::vector<int> perm;
  for (int p : m->permutation) perm.push_back(p + 1);
  std::cout << "permutation=" << join_ints(perm, ",") << "\n";
  std::cout << "max_residual=" << fmt(m->max_residual) << "\n";
  return 0;
}

int run_finegrain(const std::string& state_arg, const std::string& dec_arg,
                  const DetectOptions& opts, const std::string& out_path) {
  PureState state = resolve_state(state_arg);
  auto [layout, dec] = resolve_decomposition(dec_arg);
  if (!(layout == state.layout))
    fail(ErrorCode::LayoutMismatch, "decomposition dims do not match the state");
  SemiGHZDecomposition fine = fine_grain(state, dec, opts);
  std::cout << "result=found\n";
  print_decomposition_summary(fine);
  std::cout << "refined=" << (fine.partition == dec.partition ? "false" : "true")
            << "\n";
  if (!out_path.empty()) write_decomposition_file(out_path, layout, fine);
  return 0;
}

int run_mutualinfo(const std::string& state_arg, const std::string& pointer_arg,
                   const std::string& fragment_arg) {
  PureState state = resolve_state(state_arg);
  HermitianObservable pointer = resolve_observable(pointer_arg, state.layout);
  HermitianObservable fragment = resolve_observable(fragment_arg, state.layout);
  MeasurementDistribution d = joint_distribution(state, pointer, fragment);
  double info = mutual_information(state, pointer, fragment);
  std::cout << "I=" << fmt(info) << "\n";
  std::cout << "H_pointer_bits=" << fmt(shannon_entropy_bits(d.first_marginal))
            << "\n";
  std::cout << "H_fragment_bits="
            << fmt(shannon_entropy_bits(d.second_marginal)) << "\n";
  return 0;
}

int run_redundancy(const std::string& state_arg, const std::string& pointer_arg,
                   double delta, const RedundancyOptions& opts) {
  PureState state = resolve_state(state_arg);
  HermitianObservable pointer = resolve_observable(pointer_arg, state.layout);
  RedundancyReport r = redundancy(state, pointer, delta, opts);
  std::cout << "R_delta=" << r.r_delta << "\n";
  std::cout << "delta=" << fmt(r.delta) << "\n";
  std::cout << "n_fragments=" << r.fragments.size() << "\n";
  std::string frags;
  for (size_t i = 0; i < r.fragments.size(); ++i) {
    if (i) frags += "|";
    frags += join_ints(r.fragments[i], ",");
  }
  std::cout << "fragments=" << frags << "\n";
  std::cout << "H_pointer_bits=" << fmt(r.pointer_entropy_bits) << "\n";
  std::cout << "greedy=" << (r.greedy ? "true" : "false") << "\n";
  return r.r_delta > 0 ? 0 : kExitNegative;
}

int run_sbs(const std::string& state_arg, const std::string& part_arg,
            int traced, const std::string& pointer_arg, double tol) {
  PureState state = resolve_state(state_arg);
  Partition part = resolve_partition(part_arg, state.layout.size());
  if (!part.has_system())
    fail(ErrorCode::InvalidArgument, "partition needs a marked system fraction");
  HermitianObservable pointer =
      pointer_arg.empty()
          ? HermitianObservable::computational(state.layout,
                                               part.system_fraction())
          : resolve_observable(pointer_arg, state.layout);
  SbsReport r = sbs_check(state, part, pointer, traced, tol);
  std::cout << "sbs=" << (r.is_sbs ? "true" : "false") << "\n";
  std::cout << "branches=" << r.branch_count << "\n";
  std::cout << "max_cross_norm=" << fmt(r.max_cross_norm) << "\n";
  std::cout << "max_factor_error=" << fmt(r.max_factor_error) << "\n";
  std::cout << "violations=" << r.violations.size() << "\n";
  for (const auto& v : r.violations)
    std::cout << "violation: fragment " << v.fragment << " branches "
              << v.branch_a << "," << v.branch_b << " fidelity "
              << fmt(v.fidelity) << "\n";
  if (!r.failure.empty()) std::cout << "failure=" << r.failure << "\n";
  return r.is_sbs ? 0 : kExitNegative;
}

int run_fit(const std::string& state_arg, const std::string& part_arg,
            int branches, const FitOptions& opts,
            const std::string& reference_arg) {
  PureState state = resolve_state(state_arg);
  Partition part = resolve_partition(part_arg, state.layout.size());
  GhzFitResult fit = fit_ghz(state, part, branches, opts);
  std::cout << "delta2=" << fmt(fit.delta2) << "\n";
  std::cout << "converged=" << (fit.converged ? "true" : "false") << "\n";
  std::cout << "iterations=" << fit.iterations << "\n";
  std::cout << "restart_winner=" << fit.restart_winner << "\n";
  std::cout << "objective=" << fmt(fit.objective) << "\n";
  if (!reference_arg.empty()) {
    auto [layout, ref] = resolve_decomposition(reference_arg);
    if (!(layout == state.layout))
      fail(ErrorCode::LayoutMismatch, "reference dims do not match the state");
    EpsilonMatrices eps = epsilon_matrices(ref, state.layout, fit);
    std::cout << "max_abs_eps=" << fmt(eps.max_abs_eps) << "\n";
    std::cout << "max_abs_eps_s_diag=" << fmt(eps.max_abs_eps_s_diag) << "\n";
    std::cout << "consistency_residual=" << fmt(eps.consistency_residual)
              << "\n";
    std::vector<int> align;
    for (int a : eps.alignment) align.push_back(a + 1);
    std::cout << "alignment=" << join_ints(align, ",") << "\n";
  }
  return 0;
}

int run_etut_scan(const std::string& state_arg, const std::string& part_arg,
                  const EtutScanOptions& opts) {
  PureState state = resolve_state(state_arg);
  Partition part = resolve_partition(part_arg, state.layout.size());
  EtutScanResult r = etut_scan(state, part, opts);
  std::cout << "reference=" << (r.reference_found ? "found" : "none") << "\n";
  std::cout << "scanned=" << r.scanned << "\n";
  std::cout << "comparable=" << r.comparable_count << "\n";
  std::cout << "detections=" << r.detections << "\n";
  std::cout << "violations=" << r.violations << "\n";
  for (const Partition& p : r.violating)
    std::cout << "violation: " << format_partition(p) << "\n";
  if (!r.reference_found) return kExitNegative;
  return r.violations == 0 ? 0 : kExitNegative;
}

int run_fixture(const std::string& name, const FixtureParams& params,
                const std::string& out_dir) {
  Fixture f = build_fixture(name, params);
  std::cout << "name=" << f.name << "\n";
  for (const auto& [key, part] : f.partitions)
    std::cout << "partition " << key << ": " << format_partition(part) << "\n";
  for (const auto& [key, value] : f.manifest)
    std::cout << key << "=" << value << "\n";
  if (!out_dir.empty()) {
    if (f.state) {
      std::string path = out_dir + "/" + f.name + ".state";
      write_state_file(path, *f.state, f.name + " fixture state");
      std::cout << "wrote=" << path << "\n";
    }
    for (const auto& [key, dec] : f.decompositions) {
      std::string path = out_dir + "/" + f.name + "." + key + ".dec";
      write_decomposition_file(path, f.state->layout, dec,
                               f.name + " decomposition " + key);
      std::cout << "wrote=" << path << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"redundant-record structure analysis for pure states"};
  app.require_subcommand(1);

  std::string arg_a, arg_b, arg_state, arg_partition, arg_dec, arg_dec2;
  std::string arg_pointer, arg_fragment, arg_reference, arg_out;
  std::string arg_alpha = "0.5", arg_beta = "0.5";
  bool system_fixed = false, allow_large = false, greedy = false;
  int n_systems = 0, cap = 10, traced = 0, branches = 0, restarts = 16;
  int exact_cap = 8, max_restarts = 0;
  double tol = 1e-8, match_tol = 1e-6, delta = 0.0, record_tol = 1e-8;
  double angle3 = 0.0, angle4 = 0.0;
  std::uint64_t seed = env_seed();

  auto* comparable = app.add_subcommand(
      "comparable", "is partition B comparable to reference A");
  comparable->add_option("A", arg_a, "reference partition")->required();
  comparable->add_option("B", arg_b, "candidate partition")->required();
  comparable->add_flag("--system-fixed", system_fixed,
                       "require matching marked system fractions");
  comparable->add_option("-n,--n-systems", n_systems, "number of systems");

  auto* comparable_set_cmd = app.add_subcommand(
      "comparable-set", "all partitions mutually comparable with A");
  comparable_set_cmd->add_option("A", arg_a, "reference partition")->required();
  comparable_set_cmd->add_option("--cap", cap, "element cap for enumeration");
  comparable_set_cmd->add_flag("--allow-large", allow_large,
                               "enumerate past the cap");
  comparable_set_cmd->add_flag("--system-fixed", system_fixed,
                               "keep the marked fraction fixed");
  comparable_set_cmd->add_option("-n,--n-systems", n_systems,
                                 "number of systems");

  auto* paircover = app.add_subcommand(
      "paircover", "do two fractions of A cover all of B");
  paircover->add_option("A", arg_a, "first partition")->required();
  paircover->add_option("B", arg_b, "second partition")->required();
  paircover->add_option("-n,--n-systems", n_systems, "number of systems");

  auto* detect = app.add_subcommand(
      "detect", "search for an orthonormal branch decomposition");
  detect->add_option("STATE", arg_state, "state file or fixture.state")
      ->required();
  detect->add_option("PARTITION", arg_partition, "partition")->required();
  detect->add_option("--tol", tol, "reconstruction tolerance");
  detect->add_option("--seed", seed, "search seed");
  detect->add_option("--max-restarts", max_restarts,
                     "restart budget per deflation level");
  detect->add_option("--out", arg_out, "write the decomposition here");

  auto* verify = app.add_subcommand("verify", "check a branch decomposition");
  verify->add_option("STATE", arg_state, "state file")->required();
  verify->add_option("DEC", arg_dec, "decomposition file")->required();
  verify->add_option("--tol", tol, "reconstruction tolerance");

  auto* match = app.add_subcommand(
      "match", "align two decompositions branch by branch");
  match->add_option("DEC1", arg_dec, "first decomposition")->required();
  match->add_option("DEC2", arg_dec2, "second decomposition")->required();
  match->add_option("--tol", match_tol, "residual tolerance");

  auto* finegrain = app.add_subcommand(
      "finegrain", "split fractions while detection still succeeds");
  finegrain->add_option("STATE", arg_state, "state file")->required();
  finegrain->add_option("DEC", arg_dec, "starting decomposition")->required();
  finegrain->add_option("--tol", tol, "reconstruction tolerance");
  finegrain->add_option("--seed", seed, "search seed");
  finegrain->add_option("--out", arg_out, "write the refined decomposition");

  auto* mutualinfo = app.add_subcommand(
      "mutualinfo", "mutual information between two measurements");
  mutualinfo->add_option("STATE", arg_state, "state file")->required();
  mutualinfo->add_option("--pointer", arg_pointer, "observable or comp:ids")
      ->required();
  mutualinfo->add_option("--fragment", arg_fragment, "observable or comp:ids")
      ->required();

  auto* redundancy_cmd = app.add_subcommand(
      "redundancy", "count disjoint fragments recording the pointer");
  redundancy_cmd->add_option("STATE", arg_state, "state file")->required();
  redundancy_cmd->add_option("--pointer", arg_pointer, "pointer observable")
      ->required();
  redundancy_cmd->add_option("--delta", delta, "information deficit in [0,1)");
  redundancy_cmd->add_option("--record-tol", record_tol,
                             "fidelity threshold for a perfect record");
  redundancy_cmd->add_option("--exact-cap", exact_cap,
                             "exhaustive search up to this many systems");
  redundancy_cmd->add_flag("--greedy", greedy,
                           "allow the greedy strategy past the cap");

  auto* sbs = app.add_subcommand(
      "sbs", "spectrum broadcast structure after tracing a fraction");
  sbs->add_option("STATE", arg_state, "state file")->required();
  sbs->add_option("PARTITION", arg_partition, "partition with marked system")
      ->required();
  sbs->add_option("--trace", traced, "fraction id to trace out")->required();
  sbs->add_option("--pointer", arg_pointer,
                  "pointer observable (default computational)");
  sbs->add_option("--tol", tol, "structure tolerance");

  auto* fit = app.add_subcommand(
      "fit", "best product-basis approximation with k branches");
  fit->add_option("STATE", arg_state, "state file")->required();
  fit->add_option("PARTITION", arg_partition, "partition")->required();
  fit->add_option("--branches", branches, "branch count")->required();
  fit->add_option("--seed", seed, "restart seed");
  fit->add_option("--restarts", restarts, "number of restarts");
  fit->add_option("--reference", arg_reference,
                  "reference decomposition for overlap deviations");

  auto* etut = app.add_subcommand(
      "etut-scan", "scan comparable partitions for unmatched decompositions");
  etut->add_option("STATE", arg_state, "state file")->required();
  etut->add_option("PARTITION", arg_partition, "reference partition")
      ->required();
  etut->add_option("--cap", cap, "element cap for enumeration");
  etut->add_flag("--allow-large", allow_large, "enumerate past the cap");
  etut->add_option("--tol", tol, "detection tolerance");
  etut->add_option("--match-tol", match_tol, "match tolerance");
  etut->add_option("--seed", seed, "search seed");

  auto* fixture = app.add_subcommand(
      "fixture", "print a named reference construction");
  fixture->add_option("NAME", arg_a, "fixture name")->required();
  fixture->add_option("--out", arg_out, "directory for state files");
  fixture->add_option("--alpha", arg_alpha, "first branch weight (re or re,im)");
  fixture->add_option("--beta", arg_beta, "second branch weight");
  fixture->add_option("--angle3", angle3, "record rotation on fragment 3 (deg)");
  fixture->add_option("--angle4", angle4, "record rotation on fragment 4 (deg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (comparable->parsed())
      return run_comparable(arg_a, arg_b, system_fixed, n_systems);
    if (comparable_set_cmd->parsed())
      return run_comparable_set(arg_a, n_systems, cap, allow_large,
                                system_fixed);
    if (paircover->parsed()) return run_paircover(arg_a, arg_b, n_systems);
    if (detect->parsed()) {
      DetectOptions opts;
      opts.tol = tol;
      opts.seed = seed;
      opts.max_restarts = max_restarts;
      return run_detect(arg_state, arg_partition, opts, arg_out);
    }
    if (verify->parsed()) return run_verify(arg_state, arg_dec, tol);
    if (match->parsed()) return run_match(arg_dec, arg_dec2, match_tol);
    if (finegrain->parsed()) {
      DetectOptions opts;
      opts.tol = tol;
      opts.seed = seed;
      return run_finegrain(arg_state, arg_dec, opts, arg_out);
    }
    if (mutualinfo->parsed())
      return run_mutualinfo(arg_state, arg_pointer, arg_fragment);
    if (redundancy_cmd->parsed()) {
      RedundancyOptions opts;
      opts.record_tol = record_tol;
      opts.exact_cap = exact_cap;
      opts.allow_greedy = greedy;
      return run_redundancy(arg_state, arg_pointer, delta, opts);
    }
    if (sbs->parsed())
      return run_sbs(arg_state, arg_partition, traced, arg_pointer, tol);
    if (fit->parsed()) {
      FitOptions opts;
      opts.seed = seed;
      opts.restarts = restarts;
      return run_fit(arg_state, arg_partition, branches, opts, arg_reference);
    }
    if (etut->parsed()) {
      EtutScanOptions opts;
      opts.detect_tol = tol;
      opts.match_tol = match_tol;
      opts.seed = seed;
      opts.cap = cap;
      opts.allow_large = allow_large;
      return run_etut_scan(arg_state, arg_partition, opts);
    }
    if (fixture->parsed()) {
      FixtureParams params;
      params.alpha = parse_weight(arg_alpha);
      params.beta = parse_weight(arg_beta);
      params.angle3_deg = angle3;
      params.angle4_deg = angle4;
      return run_fixture(arg_a, params, arg_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
