#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "darwinscope/common.hpp"

namespace darwinscope {

// A disjoint, exhaustive grouping of the elementary systems 1..n_systems into
// fractions. Canonical form: indices ascending inside each fraction, fractions
// ordered by smallest member. One fraction may be marked as the system of
// interest; the rest form the environment.
struct Partition {
  int n_systems = 0;
  std::vector<std::vector<int>> fractions;
  int system_index = -1;  // index into fractions, -1 when unmarked

  int size() const { return static_cast<int>(fractions.size()); }
  bool has_system() const { return system_index >= 0; }
  const std::vector<int>& system_fraction() const;
  std::vector<int> environment_systems() const;
  int max_fraction_size() const;
  int min_fraction_size() const;

  bool operator==(const Partition& other) const {
    return n_systems == other.n_systems && fractions == other.fractions &&
           system_index == other.system_index;
  }
};

// Validates coverage and brings the fraction list into canonical form.
// system_index refers to a fraction of the raw list and is remapped.
Partition make_partition(int n_systems, std::vector<std::vector<int>> raw,
                         int system_index = -1);

// Text form "1|2,3,4|5,6", optionally "S:" prefixing the system fraction.
// With n_systems == 0 the count is inferred from the largest index.
Partition parse_partition(const std::string& text, int n_systems = 0);
std::string format_partition(const Partition& p);

// Overlap sets: result[i-1] lists the 1-based fraction ids of b intersected
// by fraction i of a.
std::vector<std::vector<int>> overlap_sets(const Partition& a,
                                           const Partition& b);

struct FractionPair {
  int first = 0;   // 1-based fraction ids
  int second = 0;
};

// "candidate is comparable to reference": some pair of candidate fractions has
// disjoint overlap sets in the reference whose union misses at least one
// reference fraction. Returns the lexicographically first such pair.
std::optional<FractionPair> comparability_witness(const Partition& candidate,
                                                  const Partition& reference);
bool is_comparable(const Partition& candidate, const Partition& reference);
bool mutually_comparable(const Partition& a, const Partition& b);

// Integer sufficient test: candidate (m fractions) is guaranteed comparable to
// reference (n fractions) when m > Lc_min*(Lr_max - 1) + 1 and
// n > Lc_min + Lc_max, with L* the extreme fraction sizes.
bool sufficient_condition(const Partition& reference,
                          const Partition& candidate);

// Some pair of fractions of a jointly intersects every fraction of b.
std::optional<FractionPair> pair_cover_witness(const Partition& a,
                                               const Partition& b);
bool pair_covers(const Partition& a, const Partition& b);

enum class RelativeClass { Comparable, NonlocalOverlap, OtherNonComparable };

struct RelativeClassification {
  RelativeClass cls = RelativeClass::OtherNonComparable;
  std::optional<FractionPair> witness;  // present iff Comparable
};

// Classifies candidate against reference. NonlocalOverlap means every
// (environment) fraction of the candidate intersects every (environment)
// fraction of the reference. With system_fixed the marked fractions must
// coincide and only environment fractions enter the overlap test.
RelativeClassification classify_relative(const Partition& candidate,
                                         const Partition& reference,
                                         bool system_fixed = false);

// Exact Bell number (number of set partitions of n elements); n <= 24.
unsigned long long bell_number(int n);

// Visits every set partition of the given elements in restricted-growth-string
// order. Blocks arrive with ascending members, ordered by first member.
// Return false from the visitor to stop early.
void enumerate_set_partitions(
    const std::vector<int>& elements,
    const std::function<bool(const std::vector<std::vector<int>>&)>& visit);

struct ComparableSetOptions {
  bool require_fixed_system = false;
  int cap = 10;             // max elements enumerated over
  bool allow_large = false; // override the cap
};

// All partitions mutually comparable with a (a itself included when eligible),
// in enumeration order. With require_fixed_system, candidates keep a's marked
// fraction and only the environment grouping varies.
std::vector<Partition> comparable_set(const Partition& a,
                                      const ComparableSetOptions& opts = {});

// Builds two partitions over one elementary system per incidence pair.
// a_to_b[i-1] lists the 1-based b-fraction ids met by a-fraction i. Systems
// are numbered by lexicographic (i, j) order of the pairs.
std::pair<Partition, Partition> realize_incidence(
    const std::vector<std::vector<int>>& a_to_b);

}  // namespace darwinscope
