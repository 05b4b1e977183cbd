// Shared hand-built instances used across the test suites.
#pragma once

#include <algorithm>

#include "fairalloc/model.hpp"

namespace fixtures {

using fairalloc::Allocation;
using fairalloc::CapRange;
using fairalloc::Instance;
using fairalloc::Profile;

inline Profile strict_profile_from_utilities(
    const std::vector<std::vector<double>>& utilities) {
  Profile profile;
  for (const auto& u : utilities) {
    std::vector<int> order(u.size());
    for (size_t o = 0; o < u.size(); ++o) order[o] = static_cast<int>(o);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return u[static_cast<size_t>(a)] > u[static_cast<size_t>(b)]; });
    std::vector<std::vector<int>> classes;
    size_t at = 0;
    while (at < order.size()) {
      size_t end = at + 1;
      while (end < order.size() &&
             u[static_cast<size_t>(order[end])] == u[static_cast<size_t>(order[at])])
        ++end;
      classes.emplace_back(order.begin() + static_cast<long>(at),
                           order.begin() + static_cast<long>(end));
      at = end;
    }
    profile.push_back(std::move(classes));
  }
  return profile;
}

// 4 agents, 6 items, every item to exactly two agents, every agent exactly
// three items. Agents 0-2 value items 6,5,4,3,2,1; agent 3 values 2,6,5,4,3,1.
inline Instance worked_example() {
  std::vector<std::vector<double>> utilities = {
      {6, 5, 4, 3, 2, 1},
      {6, 5, 4, 3, 2, 1},
      {6, 5, 4, 3, 2, 1},
      {2, 6, 5, 4, 3, 1},
  };
  return fairalloc::build_instance(strict_profile_from_utilities(utilities), utilities,
                                   std::vector<CapRange>(4, CapRange{3, 3}),
                                   std::vector<CapRange>(6, CapRange{2, 2}));
}

// 3 agents, 9 single-copy items. Agents 0,1 value them 9..1; agent 2 values
// 6,9,8,7,5,4,3,2,1. No utilitarian- or rank-maximal allocation is EF1 here,
// with or without the balanced (3 items each) restriction.
inline Instance incompatibility_example(bool balanced) {
  std::vector<std::vector<double>> utilities = {
      {9, 8, 7, 6, 5, 4, 3, 2, 1},
      {9, 8, 7, 6, 5, 4, 3, 2, 1},
      {6, 9, 8, 7, 5, 4, 3, 2, 1},
  };
  return fairalloc::build_instance(
      strict_profile_from_utilities(utilities), utilities,
      std::vector<CapRange>(3, balanced ? CapRange{3, 3} : CapRange{0, 9}),
      std::vector<CapRange>(9, CapRange{1, 1}));
}

// 2 agents, 4 single-copy items; Alice values 5,5,2,2 and Bob 7,7,0,0.
// Balanced: each agent exactly two items.
inline Instance nash_counterexample(bool balanced) {
  std::vector<std::vector<double>> utilities = {
      {5, 5, 2, 2},
      {7, 7, 0, 0},
  };
  return fairalloc::build_instance(
      strict_profile_from_utilities(utilities), utilities,
      std::vector<CapRange>(2, balanced ? CapRange{2, 2} : CapRange{0, 4}),
      std::vector<CapRange>(4, CapRange{1, 1}));
}

// Partition-style instance with S=2 and numbers {2,2}: items 0,1 are the
// number-items, 2..7 the extras e1..e6. Any rank-maximal allocation hands
// e1..e4 to agent 0 and e5,e6 to agents 1 and 2.
inline Instance partition_reduction() {
  std::vector<std::vector<double>> utilities = {
      {0, 0, 10, 8, 6, 4, 2, 0},
      {2, 2, 8, 6, 4, 2, 10, 10},
      {2, 2, 8, 6, 4, 2, 10, 10},
  };
  return fairalloc::build_instance(strict_profile_from_utilities(utilities), utilities,
                                   std::vector<CapRange>(3, CapRange{0, 8}),
                                   std::vector<CapRange>(8, CapRange{1, 1}));
}

// PROP1 reduction with S=2: items 0,1 are number-items worth 2 to agents 1,2
// and nothing to agent 0; items 2..5 are extras worth 3 to agent 0 and 2 to
// the others.
inline Instance prop1_reduction() {
  std::vector<std::vector<double>> utilities = {
      {0, 0, 3, 3, 3, 3},
      {2, 2, 2, 2, 2, 2},
      {2, 2, 2, 2, 2, 2},
  };
  return fairalloc::build_instance(strict_profile_from_utilities(utilities), utilities,
                                   std::vector<CapRange>(3, CapRange{0, 6}),
                                   std::vector<CapRange>(6, CapRange{1, 1}));
}

inline Allocation allocation_of(int n, std::vector<std::vector<int>> bundles) {
  Allocation alloc(n);
  for (int i = 0; i < n; ++i)
    for (int item : bundles[static_cast<size_t>(i)]) alloc.add(i, item);
  return alloc;
}

}  // namespace fixtures
