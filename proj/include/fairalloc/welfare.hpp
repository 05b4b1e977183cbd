// Welfare optimizers and the completion oracle family.
//
// Utilitarian- and rank-maximal allocations are computed as min-cost feasible
// circulations on the agent/item assignment network; completion queries for
// those goals reduce to one such computation (combined value compared against
// the cached instance optimum). Nash, egalitarian, and LSOWA goals are served
// by an exact branch-and-bound with an explicit node budget.
#pragma once

#include <optional>

#include "fairalloc/model.hpp"

namespace fairalloc {

// Utilities enter flow costs as exact scaled integers. The scale is the lcm
// of the utilities' denominators (found by continued fractions, denominators
// up to 10^6); utilities that are not recognizably rational fall back to a
// fixed 10^6 scale with rounding.
long long utility_scale(const Instance& inst);

struct UtilitarianResult {
  Allocation allocation;
  double welfare = 0.0;
  long long welfare_scaled = 0;  // exact, at utility_scale(inst)
};

// Completes `fixed` into a feasible allocation of maximum total utility.
// Throws Error(no_feasible_completion) when the capacity system admits no
// completion of `fixed`.
UtilitarianResult max_utilitarian(const Instance& inst, const Allocation& fixed);

struct RankMaximalResult {
  Allocation allocation;
  RankVector rank;
};

// Completes `fixed` into a feasible allocation whose rank vector is
// lexicographically maximal. Same flow as max_utilitarian with vector-valued
// costs; no big-integer positional weights are involved.
RankMaximalResult max_rank(const Instance& inst, const Allocation& fixed);

bool feasible_completion_exists(const Instance& inst, const Allocation& partial);
// As above but also produces a witness completion.
std::optional<Allocation> feasible_completion(const Instance& inst,
                                              const Allocation& partial);

// Nash objective value under the lexicographic convention: first the number
// of agents with strictly positive bundle utility, then the product of those
// positive utilities.
struct NashScore {
  int positives = 0;
  double product = 1.0;

  friend bool operator<(const NashScore& a, const NashScore& b) {
    if (a.positives != b.positives) return a.positives < b.positives;
    return a.product < b.product;
  }
};

NashScore nash_score(const Instance& inst, const Allocation& alloc);

struct BaselineResult {
  Allocation allocation;
  double value = 0.0;    // objective value (egal: min utility; lsowa: sum)
  NashScore nash;        // populated for the nash objective
  bool exact = false;    // search completed within budget
  long long nodes_expanded = 0;
};

inline constexpr long long kDefaultBnbBudget = 2'000'000;

// Exhaustive branch-and-bound over per-item agent subsets, restricted to
// extensions of `fixed`. Supports nash, egalitarian, and lsowa objectives.
// When the node budget runs out the incumbent is returned with exact=false.
BaselineResult exact_baseline(const Instance& inst, Objective objective,
                              long long budget = kDefaultBnbBudget,
                              const Allocation& fixed = Allocation());

enum class GoalKind {
  null,
  utilitarian_max,
  utilitarian_threshold,
  rank_max,
  nash_max,
  egal_max,
  lsowa_max,
};

const char* goal_kind_name(GoalKind kind);

// A welfare target with its completion oracle. The instance optimum (w*, the
// optimal rank vector, or the baseline optimum) is computed once here and
// never recomputed per query.
class WelfareGoal {
 public:
  static WelfareGoal make(const Instance& inst, GoalKind kind, double threshold = 0.0,
                          long long budget = kDefaultBnbBudget);

  GoalKind kind() const { return kind_; }
  double threshold() const { return threshold_; }
  long long budget() const { return budget_; }

  double optimum_welfare() const { return optimum_welfare_; }
  long long optimum_scaled() const { return optimum_scaled_; }
  const RankVector& optimum_rank() const { return optimum_rank_; }
  const NashScore& optimum_nash() const { return optimum_nash_; }
  double optimum_value() const { return optimum_value_; }

  // A complete goal-satisfying allocation, found at construction time.
  const Allocation& initial_witness() const { return witness_; }

 private:
  GoalKind kind_ = GoalKind::null;
  double threshold_ = 0.0;
  long long budget_ = kDefaultBnbBudget;
  double optimum_welfare_ = 0.0;
  long long optimum_scaled_ = 0;
  RankVector optimum_rank_;
  NashScore optimum_nash_;
  double optimum_value_ = 0.0;
  Allocation witness_;
};

struct CompletionAnswer {
  bool satisfiable = false;
  std::optional<Allocation> witness;  // present iff satisfiable
};

// Does a complete feasible allocation extending `partial` satisfy the goal?
// `partial` must respect upper capacities. Throws Error(budget_exceeded) when
// a branch-and-bound-backed goal cannot be decided within its budget.
CompletionAnswer completion(const WelfareGoal& goal, const Instance& inst,
                            const Allocation& partial);

}  // namespace fairalloc
