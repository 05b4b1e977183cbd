// Core domain types: allocation instances (agents, items, weak ordinal
// preferences, cardinal utilities, two-sided capacity intervals), allocations,
// rank vectors, and the scalar/vector welfare measures defined over them.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fairalloc/errors.hpp"

namespace fairalloc {

struct CapRange {
  int lo = 0;
  int hi = 0;

  friend bool operator==(const CapRange&, const CapRange&) = default;
};

// Per-agent preference profile: classes[c] is the c-th equivalence class in
// decreasing order of preference, each a sorted list of item indices. The
// classes of one agent partition the full item set.
using Profile = std::vector<std::vector<std::vector<int>>>;

struct Instance {
  int n = 0;  // agents, indexed 0..n-1
  int m = 0;  // items, indexed 0..m-1
  Profile profile;
  std::vector<std::vector<double>> utilities;  // [agent][item]
  std::vector<CapRange> agent_caps;
  std::vector<CapRange> item_caps;

  // Derived: item_rank[i][o] = index of the class of item o in agent i's
  // profile (0-based; 0 is the most preferred class).
  std::vector<std::vector<int>> item_rank;
  int max_classes = 0;

  int rank_of(int agent, int item) const {
    return item_rank[static_cast<size_t>(agent)][static_cast<size_t>(item)];
  }
  double utility(int agent, int item) const {
    return utilities[static_cast<size_t>(agent)][static_cast<size_t>(item)];
  }
  int num_classes(int agent) const {
    return static_cast<int>(profile[static_cast<size_t>(agent)].size());
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.n == b.n && a.m == b.m && a.profile == b.profile &&
           a.utilities == b.utilities && a.agent_caps == b.agent_caps &&
           a.item_caps == b.item_caps;
  }
};

// An (possibly partial) allocation: one sorted bundle of item indices per
// agent. Set semantics: an agent never holds two copies of an item.
struct Allocation {
  std::vector<std::vector<int>> bundles;

  Allocation() = default;
  explicit Allocation(int n) : bundles(static_cast<size_t>(n)) {}

  int agents() const { return static_cast<int>(bundles.size()); }
  const std::vector<int>& bundle(int agent) const {
    return bundles[static_cast<size_t>(agent)];
  }
  int bundle_size(int agent) const {
    return static_cast<int>(bundles[static_cast<size_t>(agent)].size());
  }
  bool holds(int agent, int item) const;
  void add(int agent, int item);     // keeps the bundle sorted; rejects duplicates
  void remove(int agent, int item);  // no-op if absent

  // Number of agents each item is assigned to.
  std::vector<int> item_counts(int m) const;
  long long total_assignments() const;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// Validation predicates against an instance's capacity system.
bool is_feasible_partial(const Instance& inst, const Allocation& alloc);
bool is_complete(const Instance& inst, const Allocation& alloc);
bool is_balanced(const Allocation& alloc);

// counts[j] = number of (agent, item) assignments where the item lies in the
// receiving agent's (j+1)-th equivalence class. Compared lexicographically:
// at the first differing index, the larger count wins.
struct RankVector {
  std::vector<long long> counts;

  long long total() const;
  friend bool operator==(const RankVector&, const RankVector&) = default;
};

// -1 if a is worse than b, 0 if equal, +1 if a is better. Shorter vectors are
// zero-padded on the right.
int lex_compare(const RankVector& a, const RankVector& b);
std::string to_string(const RankVector& rv);

// Constructs a validated instance. If utilities are absent they are
// synthesized from the profile with Borda scoring at equivalence-class level.
// Throws Error with code malformed_profile, inconsistent_utilities, or
// infeasible_capacities.
Instance build_instance(Profile profile,
                        std::optional<std::vector<std::vector<double>>> utilities,
                        std::vector<CapRange> agent_caps,
                        std::vector<CapRange> item_caps);

// Borda utilities at equivalence-class level: a class spanning 1-indexed
// positions a..b gives each member the mean of the positional scores
// m-a+1, ..., m-b+1. For strict preferences this is the classic m-i+1.
std::vector<std::vector<double>> borda_utilities(const Profile& profile, int m);

RankVector rank_vector(const Instance& inst, const Allocation& alloc);

enum class Objective { utilitarian, nash, egalitarian, lsowa, rank };

const char* objective_name(Objective objective);
std::optional<Objective> objective_from_name(const std::string& name);

double bundle_utility(const Instance& inst, int agent, const std::vector<int>& bundle);
double utilitarian_welfare(const Instance& inst, const Allocation& alloc);
double nash_welfare(const Instance& inst, const Allocation& alloc);  // plain product
double egalitarian_welfare(const Instance& inst, const Allocation& alloc);
// Linear-sum OWA: per agent, bundle utilities sorted descending and dotted
// with weights (K-k+1)/K for k = 1..K, K = max agent upper capacity.
double lsowa_welfare(const Instance& inst, const Allocation& alloc);

using WelfareValue = std::variant<double, RankVector>;

// Requires a complete allocation; throws Error(incomplete_allocation).
WelfareValue welfare(const Instance& inst, const Allocation& alloc, Objective objective);

}  // namespace fairalloc
