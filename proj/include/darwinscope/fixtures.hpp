#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "darwinscope/common.hpp"
#include "darwinscope/ghz.hpp"
#include "darwinscope/hilbert.hpp"
#include "darwinscope/partitions.hpp"

namespace darwinscope {

// Parameters for the configurable fixtures. alpha/beta are the raw branch
// weights of the degenerate-record state (renormalized internally); the
// angles rotate the record basis pairs on the two single-qubit fragments.
struct FixtureParams {
  Complex alpha{0.5, 0.0};
  Complex beta{0.5, 0.0};
  double angle3_deg = 0.0;
  double angle4_deg = 0.0;
};

struct Fixture {
  std::string name;
  std::optional<PureState> state;
  std::vector<std::pair<std::string, Partition>> partitions;
  std::vector<std::pair<std::string, SemiGHZDecomposition>> decompositions;
  // expected-property manifest, key=value, checked by the test harness
  std::vector<std::pair<std::string, std::string>> manifest;

  const Partition& partition(const std::string& key) const;
  const SemiGHZDecomposition& decomposition(const std::string& key) const;
};

// Known names: ambiguity4, fig1a, footnote-overlap, comdec.
Fixture build_fixture(const std::string& name, const FixtureParams& params = {});
std::vector<std::string> fixture_names();

}  // namespace darwinscope
