// Constrained Round Robin: picking-sequence sequential allocation (RB/RR)
// and the welfare-constrained round-robin allocator built on the completion
// oracle, including the unequal-shares variant.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairalloc/model.hpp"
#include "fairalloc/welfare.hpp"

namespace fairalloc {

struct PickingSequence {
  std::vector<int> turns;

  // Every prefix keeps all agents within one turn of each other.
  bool is_recursively_balanced(int n) const;
  // Some permutation of the agents, repeated cyclically.
  bool is_round_robin(int n) const;
};

enum class SequenceKind { rb_random, rr };

// rr: a seeded random permutation repeated cyclically. rb_random: at each
// step a uniformly random agent among those with the fewest turns so far.
PickingSequence make_sequence(SequenceKind kind, int n, int length, std::uint64_t seed);
// Round-robin over an explicit permutation (e.g. identity for 1,2,...,n).
PickingSequence round_robin_sequence(std::vector<int> permutation, int length);

// Each turn the acting agent takes her best-ranked item that still has spare
// copies and that she does not hold, ties broken by lowest item index; a turn
// with nothing pickable is skipped. The result may be partial.
Allocation sequential_allocation(const Instance& inst, const PickingSequence& sequence);

struct TraceEvent {
  enum class Kind { pick, drop_class };
  Kind kind = Kind::pick;
  int agent = 0;
  int item = -1;        // pick events
  int round = 0;        // pick events: bundle size after the pick
  int class_rank = -1;  // drop events: 1-based rank in the original profile

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// Line-oriented export: "PICK agent item round" / "DROPCLASS agent class_rank".
std::string trace_to_text(const std::vector<TraceEvent>& trace);

struct CrrOptions {
  // Unequal entitlements: agents below their proportional share of the items
  // handed out so far are the ones eligible to pick.
  std::optional<std::vector<double>> share_weights;
  // Optional fairness-over-runs device: agents are relabeled by a seeded
  // permutation before the run and mapped back afterwards.
  std::optional<std::uint64_t> relabel_seed;
};

struct CrrResult {
  Allocation allocation;
  std::vector<TraceEvent> trace;
  long long completion_queries = 0;  // oracle consultations; at most m*n
};

// Algorithm: repeatedly let the lowest-indexed agent among those with the
// fewest items pick the best item from her remaining top class whose
// assignment keeps the goal completable; when no eligible agent can pick,
// every eligible agent drops her top class. Item copies that reach their
// upper capacity leave all lists. The returned allocation always satisfies
// the goal (if the loop ends below the lower capacity bounds, the witness of
// the last successful completion query is returned).
CrrResult w_crr(const Instance& inst, const WelfareGoal& goal,
                const CrrOptions& options = {});

}  // namespace fairalloc
