#include "darwinscope/partitions.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace darwinscope {

const std::vector<int>& Partition::system_fraction() const {
  if (!has_system())
    fail(ErrorCode::InvalidArgument, "partition has no marked system fraction");
  return fractions[system_index];
}

std::vector<int> Partition::environment_systems() const {
  const auto& sys = system_fraction();
  std::vector<int> env;
  size_t pos = 0;
  for (int s = 1; s <= n_systems; ++s) {
    if (pos < sys.size() && sys[pos] == s) {
      ++pos;
    } else {
      env.push_back(s);
    }
  }
  return env;
}

int Partition::max_fraction_size() const {
  int best = 0;
  for (const auto& f : fractions) best = std::max<int>(best, f.size());
  return best;
}

int Partition::min_fraction_size() const {
  int best = n_systems + 1;
  for (const auto& f : fractions) best = std::min<int>(best, f.size());
  return best;
}

Partition make_partition(int n_systems, std::vector<std::vector<int>> raw,
                         int system_index) {
  if (n_systems < 1)
    fail(ErrorCode::InvalidArgument, "partition needs at least one system");
  if (raw.empty())
    fail(ErrorCode::MalformedPartition, "partition has no fractions");
  if (system_index < -1 || system_index >= static_cast<int>(raw.size()))
    fail(ErrorCode::InvalidArgument, "marked fraction index out of range");

  std::vector<char> seen(n_systems + 1, 0);
  for (auto& f : raw) {
    if (f.empty())
      fail(ErrorCode::MalformedPartition, "empty fraction");
    std::sort(f.begin(), f.end());
    for (int e : f) {
      if (e < 1 || e > n_systems)
        fail(ErrorCode::MalformedPartition,
             "system index " + std::to_string(e) + " out of range 1.." +
                 std::to_string(n_systems));
      if (seen[e]++)
        fail(ErrorCode::MalformedPartition,
             "system " + std::to_string(e) + " appears in two fractions");
    }
  }
  for (int s = 1; s <= n_systems; ++s)
    if (!seen[s])
      fail(ErrorCode::MalformedPartition,
           "system " + std::to_string(s) + " is not covered");

  std::vector<int> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return raw[a][0] < raw[b][0]; });

  Partition p;
  p.n_systems = n_systems;
  p.fractions.reserve(raw.size());
  for (size_t pos = 0; pos < order.size(); ++pos) {
    if (order[pos] == system_index) p.system_index = static_cast<int>(pos);
    p.fractions.push_back(std::move(raw[order[pos]]));
  }
  return p;
}

Partition parse_partition(const std::string& text, int n_systems) {
  std::vector<std::vector<int>> raw;
  int marked = -1;

  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, '|')) {
    auto strip = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    token = strip(token);
    if (token.rfind("S:", 0) == 0 || token.rfind("s:", 0) == 0) {
      if (marked >= 0)
        fail(ErrorCode::ParseError, "more than one fraction marked with S:");
      marked = static_cast<int>(raw.size());
      token = strip(token.substr(2));
    }
    if (token.empty())
      fail(ErrorCode::ParseError, "empty fraction in partition text");
    std::vector<int> fraction;
    std::stringstream fs(token);
    std::string num;
    while (std::getline(fs, num, ',')) {
      num = strip(num);
      if (num.empty() ||
          !std::all_of(num.begin(), num.end(),
                       [](unsigned char c) { return std::isdigit(c); }))
        fail(ErrorCode::ParseError,
             "bad system index '" + num + "' in partition text");
      fraction.push_back(std::stoi(num));
    }
    raw.push_back(std::move(fraction));
  }
  if (raw.empty())
    fail(ErrorCode::ParseError, "empty partition text");

  if (n_systems == 0)
    for (const auto& f : raw)
      for (int e : f) n_systems = std::max(n_systems, e);

  try {
    return make_partition(n_systems, std::move(raw), marked);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedPartition)
      fail(ErrorCode::ParseError, e.what());
    throw;
  }
}

std::string format_partition(const Partition& p) {
  std::string out;
  for (int i = 0; i < p.size(); ++i) {
    if (i) out += '|';
    if (i == p.system_index) out += "S:";
    for (size_t k = 0; k < p.fractions[i].size(); ++k) {
      if (k) out += ',';
      out += std::to_string(p.fractions[i][k]);
    }
  }
  return out;
}

namespace {

void check_same_layout(const Partition& a, const Partition& b) {
  if (a.n_systems != b.n_systems)
    fail(ErrorCode::LayoutMismatch, "partitions cover different system counts");
}

// location[e] = 1-based id of the fraction of p containing system e
std::vector<int> fraction_location(const Partition& p) {
  std::vector<int> loc(p.n_systems + 1, 0);
  for (int j = 0; j < p.size(); ++j)
    for (int e : p.fractions[j]) loc[e] = j + 1;
  return loc;
}

bool disjoint_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return false;
    (a[i] < b[j] ? i : j)++;
  }
  return true;
}

}  // namespace

std::vector<std::vector<int>> overlap_sets(const Partition& a,
                                           const Partition& b) {
  check_same_layout(a, b);
  std::vector<int> loc = fraction_location(b);
  std::vector<std::vector<int>> xi(a.size());
  for (int i = 0; i < a.size(); ++i) {
    std::vector<int>& set = xi[i];
    for (int e : a.fractions[i]) set.push_back(loc[e]);
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }
  return xi;
}

std::optional<FractionPair> comparability_witness(const Partition& candidate,
                                                  const Partition& reference) {
  auto xi = overlap_sets(candidate, reference);
  int n_ref = reference.size();
  int m = candidate.size();
  for (int j1 = 0; j1 < m; ++j1)
    for (int j2 = j1 + 1; j2 < m; ++j2)
      if (disjoint_sorted(xi[j1], xi[j2]) &&
          static_cast<int>(xi[j1].size() + xi[j2].size()) < n_ref)
        return FractionPair{j1 + 1, j2 + 1};
  return std::nullopt;
}

bool is_comparable(const Partition& candidate, const Partition& reference) {
  return comparability_witness(candidate, reference).has_value();
}

bool mutually_comparable(const Partition& a, const Partition& b) {
  return is_comparable(a, b) && is_comparable(b, a);
}

bool sufficient_condition(const Partition& reference,
                          const Partition& candidate) {
  check_same_layout(reference, candidate);
  int m = candidate.size();
  int n = reference.size();
  long lc_min = candidate.min_fraction_size();
  long lc_max = candidate.max_fraction_size();
  long lr_max = reference.max_fraction_size();
  return m > lc_min * (lr_max - 1) + 1 && n > lc_min + lc_max;
}

std::optional<FractionPair> pair_cover_witness(const Partition& a,
                                               const Partition& b) {
  auto xi = overlap_sets(a, b);
  int target = b.size();
  for (int j1 = 0; j1 < a.size(); ++j1)
    for (int j2 = j1 + 1; j2 < a.size(); ++j2) {
      std::vector<char> hit(target + 1, 0);
      int covered = 0;
      for (int f : xi[j1])
        if (!hit[f]++) ++covered;
      for (int f : xi[j2])
        if (!hit[f]++) ++covered;
      if (covered == target) return FractionPair{j1 + 1, j2 + 1};
    }
  return std::nullopt;
}

bool pair_covers(const Partition& a, const Partition& b) {
  return pair_cover_witness(a, b).has_value();
}

RelativeClassification classify_relative(const Partition& candidate,
                                         const Partition& reference,
                                         bool system_fixed) {
  check_same_layout(candidate, reference);
  if (system_fixed) {
    if (!candidate.has_system() || !reference.has_system())
      fail(ErrorCode::InvalidArgument,
           "system-fixed classification needs marked fractions on both sides");
    if (candidate.system_fraction() != reference.system_fraction())
      fail(ErrorCode::InvalidArgument, "marked system fractions differ");
  }

  RelativeClassification out;
  if (auto w = comparability_witness(candidate, reference)) {
    out.cls = RelativeClass::Comparable;
    out.witness = w;
    return out;
  }

  auto xi = overlap_sets(candidate, reference);
  int needed = 0;
  std::vector<char> is_env_ref(reference.size() + 1, 1);
  if (system_fixed) is_env_ref[reference.system_index + 1] = 0;
  for (int f = 1; f <= reference.size(); ++f) needed += is_env_ref[f];

  bool all_overlap = true;
  for (int j = 0; j < candidate.size() && all_overlap; ++j) {
    if (system_fixed && j == candidate.system_index) continue;
    int covered = 0;
    for (int f : xi[j]) covered += is_env_ref[f];
    if (covered < needed) all_overlap = false;
  }
  out.cls = all_overlap ? RelativeClass::NonlocalOverlap
                        : RelativeClass::OtherNonComparable;
  return out;
}

unsigned long long bell_number(int n) {
  if (n < 0 || n > 24)
    fail(ErrorCode::EnumerationTooLarge,
         "Bell number requested outside supported range 0..24");
  std::vector<unsigned long long> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<unsigned long long> next{row.back()};
    for (unsigned long long v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

namespace {

bool enumerate_rgs(const std::vector<int>& elements, std::vector<int>& code,
                   int pos, int max_used,
                   const std::function<bool(const std::vector<std::vector<int>>&)>&
                       visit) {
  int k = static_cast<int>(elements.size());
  if (pos == k) {
    std::vector<std::vector<int>> blocks(max_used + 1);
    for (int i = 0; i < k; ++i) blocks[code[i]].push_back(elements[i]);
    return visit(blocks);
  }
  for (int v = 0; v <= max_used + 1; ++v) {
    code[pos] = v;
    if (!enumerate_rgs(elements, code, pos + 1, std::max(max_used, v), visit))
      return false;
  }
  return true;
}

}  // namespace

void enumerate_set_partitions(
    const std::vector<int>& elements,
    const std::function<bool(const std::vector<std::vector<int>>&)>& visit) {
  if (elements.empty()) {
    visit({});
    return;
  }
  std::vector<int> code(elements.size(), 0);
  enumerate_rgs(elements, code, 1, 0, visit);
}

std::vector<Partition> comparable_set(const Partition& a,
                                      const ComparableSetOptions& opts) {
  std::vector<int> elements;
  if (opts.require_fixed_system) {
    elements = a.environment_systems();
  } else {
    elements.resize(a.n_systems);
    std::iota(elements.begin(), elements.end(), 1);
  }
  if (static_cast<int>(elements.size()) > opts.cap && !opts.allow_large)
    fail(ErrorCode::EnumerationTooLarge,
         std::to_string(elements.size()) + " elements to partition (about " +
             std::to_string(bell_number(
                 std::min<int>(24, static_cast<int>(elements.size())))) +
             " candidates); raise the cap to proceed");

  std::vector<Partition> out;
  enumerate_set_partitions(
      elements, [&](const std::vector<std::vector<int>>& blocks) {
        std::vector<std::vector<int>> fractions = blocks;
        int marked = -1;
        if (opts.require_fixed_system) {
          marked = static_cast<int>(fractions.size());
          fractions.push_back(a.system_fraction());
        }
        Partition candidate = make_partition(a.n_systems, std::move(fractions),
                                             marked);
        if (mutually_comparable(candidate, a)) out.push_back(std::move(candidate));
        return true;
      });
  return out;
}

std::pair<Partition, Partition> realize_incidence(
    const std::vector<std::vector<int>>& a_to_b) {
  std::vector<std::pair<int, int>> pairs;
  int b_count = 0;
  for (size_t i = 0; i < a_to_b.size(); ++i) {
    if (a_to_b[i].empty())
      fail(ErrorCode::InvalidArgument,
           "incidence row " + std::to_string(i + 1) + " is empty");
    for (int j : a_to_b[i]) {
      if (j < 1) fail(ErrorCode::InvalidArgument, "incidence ids are 1-based");
      pairs.emplace_back(static_cast<int>(i + 1), j);
      b_count = std::max(b_count, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
    fail(ErrorCode::InvalidArgument, "duplicate incidence pair");

  int n = static_cast<int>(pairs.size());
  std::vector<std::vector<int>> a_fr(a_to_b.size()), b_fr(b_count);
  for (int s = 1; s <= n; ++s) {
    a_fr[pairs[s - 1].first - 1].push_back(s);
    b_fr[pairs[s - 1].second - 1].push_back(s);
  }
  for (const auto& f : b_fr)
    if (f.empty())
      fail(ErrorCode::InvalidArgument, "a target fraction has no incidences");
  return {make_partition(n, std::move(a_fr)),
          make_partition(n, std::move(b_fr))};
}

}  // namespace darwinscope
