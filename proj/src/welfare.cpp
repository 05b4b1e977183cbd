#include "fairalloc/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairalloc/flow.hpp"

namespace fairalloc {

namespace {

constexpr long long kMaxDenominator = 1'000'000;
constexpr long long kMaxScaledMagnitude = 1'000'000'000'000'000LL;  // 1e15

// Smallest denominator q <= kMaxDenominator with |u - p/q| negligible,
// found by continued-fraction expansion. 0 when u is not recognizably
// rational at that denominator bound.
long long rational_denominator(double u) {
  double x = std::abs(u);
  long long p_prev = 1, p_cur = static_cast<long long>(std::floor(x));
  long long q_prev = 0, q_cur = 1;
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    double approx = static_cast<double>(p_cur) / static_cast<double>(q_cur);
    if (std::abs(approx - x) <= 1e-9 * std::max(1.0, x)) return q_cur;
    if (frac < 1e-12) break;
    double inv = 1.0 / frac;
    double whole = std::floor(inv);
    if (whole > static_cast<double>(kMaxDenominator)) break;
    long long a = static_cast<long long>(whole);
    long long p_next = a * p_cur + p_prev;
    long long q_next = a * q_cur + q_prev;
    if (q_next > kMaxDenominator) break;
    p_prev = p_cur;
    p_cur = p_next;
    q_prev = q_cur;
    q_cur = q_next;
    frac = inv - whole;
  }
  return 0;
}

}  // namespace

long long utility_scale(const Instance& inst) {
  long long scale = 1;
  double max_abs = 0.0;
  bool rational = true;
  for (const auto& row : inst.utilities) {
    for (double u : row) {
      max_abs = std::max(max_abs, std::abs(u));
      if (!rational) continue;
      long long q = rational_denominator(u);
      if (q == 0) {
        rational = false;
        continue;
      }
      long long g = std::gcd(scale, q);
      if (scale / g > kMaxDenominator / q) {
        rational = false;
        continue;
      }
      scale = scale / g * q;
    }
  }
  if (!rational) scale = kMaxDenominator;
  if (max_abs > 1.0) {
    long long cap = static_cast<long long>(
        static_cast<double>(kMaxScaledMagnitude) / max_abs);
    scale = std::max<long long>(1, std::min(scale, cap));
  }
  return scale;
}

namespace {

// Assignment network layout: node 0 = source, 1..n = agents, n+1..n+m = items,
// n+m+1 = sink, plus a sink->source closure arc. Agent-item arcs are added in
// (agent, item) order so optimal flows are reproducible.
struct NetworkIds {
  int source = 0;
  int sink = 0;
  int first_pair_arc = 0;  // arc id of (agent 0, item 0)
};

template <typename Cost, typename CostOfPair>
std::optional<std::pair<Allocation, Cost>> solve_assignment(
    const Instance& inst, const Allocation& fixed, Cost zero,
    CostOfPair&& cost_of_pair) {
  const int n = inst.n, m = inst.m;
  const int source = 0, sink = n + m + 1;
  MinCostCirculation<Cost> net(n + m + 2, zero);

  for (int i = 0; i < n; ++i) {
    const auto& cap = inst.agent_caps[static_cast<size_t>(i)];
    net.add_arc(source, 1 + i, cap.lo, cap.hi, zero);
  }
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < m; ++o) {
      long long lo = fixed.holds(i, o) ? 1 : 0;
      net.add_arc(1 + i, 1 + n + o, lo, 1, cost_of_pair(i, o));
    }
  }
  for (int o = 0; o < m; ++o) {
    const auto& cap = inst.item_caps[static_cast<size_t>(o)];
    net.add_arc(1 + n + o, sink, cap.lo, cap.hi, zero);
  }
  net.add_arc(sink, source, 0, static_cast<long long>(n) * m, zero);

  auto result = net.solve();
  if (!result) return std::nullopt;

  Allocation alloc(n);
  for (int i = 0; i < n; ++i)
    for (int o = 0; o < m; ++o)
      if (result->flow[static_cast<size_t>(n + i * m + o)] == 1) alloc.add(i, o);
  return std::make_pair(std::move(alloc), std::move(result->total_cost));
}

void require_valid_partial(const Instance& inst, const Allocation& partial) {
  if (!is_feasible_partial(inst, partial))
    throw Error(ErrorCode::invalid_argument,
                "partial allocation violates upper capacities");
}

}  // namespace

UtilitarianResult max_utilitarian(const Instance& inst, const Allocation& fixed) {
  require_valid_partial(inst, fixed);
  const long long scale = utility_scale(inst);
  auto solved = solve_assignment(
      inst, fixed, static_cast<long long>(0), [&](int i, int o) {
        return -static_cast<long long>(
            std::llround(inst.utility(i, o) * static_cast<double>(scale)));
      });
  if (!solved)
    throw Error(ErrorCode::no_feasible_completion,
                "capacity system admits no completion of the partial allocation");
  UtilitarianResult result;
  result.allocation = std::move(solved->first);
  result.welfare_scaled = -solved->second;
  result.welfare = static_cast<double>(result.welfare_scaled) /
                   static_cast<double>(scale);
  return result;
}

RankMaximalResult max_rank(const Instance& inst, const Allocation& fixed) {
  require_valid_partial(inst, fixed);
  const size_t dim = static_cast<size_t>(inst.max_classes);
  auto solved = solve_assignment(inst, fixed, LexCost(dim), [&](int i, int o) {
    LexCost cost(dim);
    cost.v[static_cast<size_t>(inst.rank_of(i, o))] = -1;
    return cost;
  });
  if (!solved)
    throw Error(ErrorCode::no_feasible_completion,
                "capacity system admits no completion of the partial allocation");
  RankMaximalResult result;
  result.allocation = std::move(solved->first);
  result.rank.counts.assign(dim, 0);
  for (size_t j = 0; j < dim; ++j) result.rank.counts[j] = -solved->second.v[j];
  return result;
}

std::optional<Allocation> feasible_completion(const Instance& inst,
                                              const Allocation& partial) {
  require_valid_partial(inst, partial);
  auto solved = solve_assignment(inst, partial, static_cast<long long>(0),
                                 [](int, int) { return 0LL; });
  if (!solved) return std::nullopt;
  return std::move(solved->first);
}

bool feasible_completion_exists(const Instance& inst, const Allocation& partial) {
  return feasible_completion(inst, partial).has_value();
}

NashScore nash_score(const Instance& inst, const Allocation& alloc) {
  NashScore score;
  for (int i = 0; i < inst.n; ++i) {
    double u = bundle_utility(inst, i, alloc.bundle(i));
    if (u > 0.0) {
      ++score.positives;
      score.product *= u;
    }
  }
  if (score.positives == 0) score.product = 0.0;
  return score;
}

namespace {

// Branch-and-bound over items: for each item, pick the set of receiving
// agents (a superset of what `fixed` already assigns), then recurse.
class BaselineSearch {
 public:
  BaselineSearch(const Instance& inst, Objective objective, long long budget,
                 const Allocation& fixed)
      : inst_(inst), objective_(objective), budget_(budget) {
    fixed_by_item_.assign(static_cast<size_t>(inst.m), {});
    for (int i = 0; i < inst_.n; ++i)
      for (int o : fixed.bundle(i))
        fixed_by_item_[static_cast<size_t>(o)].push_back(i);

    counts_.assign(static_cast<size_t>(inst_.n), 0);
    utils_.assign(static_cast<size_t>(inst_.n), 0.0);
    current_ = Allocation(inst_.n);

    // suffix_top_[i][o] = utilities of items o..m-1 for agent i, sorted
    // descending, as prefix sums; suffix_pos_[i][o] likewise but positive
    // utilities only. Used by the optimistic bounds.
    suffix_top_.assign(static_cast<size_t>(inst_.n), {});
    suffix_pos_.assign(static_cast<size_t>(inst_.n), {});
    for (int i = 0; i < inst_.n; ++i) {
      auto& tops = suffix_top_[static_cast<size_t>(i)];
      auto& poss = suffix_pos_[static_cast<size_t>(i)];
      tops.assign(static_cast<size_t>(inst_.m) + 1, {});
      poss.assign(static_cast<size_t>(inst_.m) + 1, {});
      for (int o = inst_.m; o >= 0; --o) {
        std::vector<double> values;
        for (int o2 = o; o2 < inst_.m; ++o2) values.push_back(inst_.utility(i, o2));
        std::sort(values.rbegin(), values.rend());
        auto& top = tops[static_cast<size_t>(o)];
        top.assign(values.size() + 1, 0.0);
        for (size_t k = 0; k < values.size(); ++k) top[k + 1] = top[k] + values[k];
        auto& pos = poss[static_cast<size_t>(o)];
        pos.assign(values.size() + 1, 0.0);
        for (size_t k = 0; k < values.size(); ++k)
          pos[k + 1] = pos[k] + std::max(0.0, values[k]);
      }
    }
  }

  BaselineResult run() {
    descend(0);
    BaselineResult result;
    result.exact = !out_of_budget_;
    result.nodes_expanded = nodes_;
    if (!has_best_) {
      if (result.exact)
        throw Error(ErrorCode::no_feasible_completion,
                    "no complete allocation extends the fixed assignments");
      throw Error(ErrorCode::budget_exceeded,
                  "search budget exhausted before any complete allocation was found");
    }
    result.allocation = std::move(best_alloc_);
    result.value = best_value_;
    result.nash = best_nash_;
    return result;
  }

 private:
  bool better_than_best(double value, const NashScore& nash) const {
    if (!has_best_) return true;
    if (objective_ == Objective::nash) return best_nash_ < nash;
    return best_value_ < value;
  }

  // Optimistic per-agent utility ceiling for completions from depth `o`.
  // Infinity-free: returns false when the agent cannot reach its lower bound.
  bool agent_bound(int i, int o, double* out) const {
    int remaining = inst_.m - o;
    int need = std::max(0, inst_.agent_caps[static_cast<size_t>(i)].lo -
                               counts_[static_cast<size_t>(i)]);
    int room = inst_.agent_caps[static_cast<size_t>(i)].hi -
               counts_[static_cast<size_t>(i)];
    if (need > remaining) return false;
    const auto& top = suffix_top_[static_cast<size_t>(i)][static_cast<size_t>(o)];
    int max_take = std::min(room, remaining);
    double best = top[static_cast<size_t>(need)];
    for (int s = need + 1; s <= max_take; ++s)
      best = std::max(best, top[static_cast<size_t>(s)]);
    *out = utils_[static_cast<size_t>(i)] + best;
    return true;
  }

  bool prune(int o) {
    // Remaining item lower bounds must fit in the agents' remaining room.
    long long room = 0;
    for (int i = 0; i < inst_.n; ++i)
      room += inst_.agent_caps[static_cast<size_t>(i)].hi -
              counts_[static_cast<size_t>(i)];
    long long demand = 0;
    for (int o2 = o; o2 < inst_.m; ++o2)
      demand += inst_.item_caps[static_cast<size_t>(o2)].lo;
    if (demand > room) return true;

    if (objective_ == Objective::nash) {
      NashScore bound;
      for (int i = 0; i < inst_.n; ++i) {
        double b;
        if (!agent_bound(i, o, &b)) return true;
        if (b > 0.0) {
          ++bound.positives;
          bound.product *= b;
        }
      }
      if (bound.positives == 0) bound.product = 0.0;
      return has_best_ && !(best_nash_ < bound);
    }
    if (objective_ == Objective::egalitarian) {
      double bound = 0.0;
      bool first = true;
      for (int i = 0; i < inst_.n; ++i) {
        double b;
        if (!agent_bound(i, o, &b)) return true;
        bound = first ? b : std::min(bound, b);
        first = false;
      }
      return has_best_ && !(best_value_ < bound);
    }
    // lsowa: positive utilities alone bound the OWA sum from above.
    double bound = 0.0;
    for (int i = 0; i < inst_.n; ++i) {
      int need = std::max(0, inst_.agent_caps[static_cast<size_t>(i)].lo -
                                 counts_[static_cast<size_t>(i)]);
      if (need > inst_.m - o) return true;
      int room = inst_.agent_caps[static_cast<size_t>(i)].hi -
                 counts_[static_cast<size_t>(i)];
      const auto& pos = suffix_pos_[static_cast<size_t>(i)][static_cast<size_t>(o)];
      int take = std::min(room, inst_.m - o);
      double pos_now = 0.0;
      for (int item : current_.bundle(i)) pos_now += std::max(0.0, inst_.utility(i, item));
      bound += pos_now + pos[static_cast<size_t>(take)];
    }
    return has_best_ && !(best_value_ < bound);
  }

  void evaluate_leaf() {
    for (int i = 0; i < inst_.n; ++i)
      if (counts_[static_cast<size_t>(i)] < inst_.agent_caps[static_cast<size_t>(i)].lo)
        return;
    double value = 0.0;
    NashScore nash;
    switch (objective_) {
      case Objective::nash:
        nash = nash_score(inst_, current_);
        break;
      case Objective::egalitarian:
        value = egalitarian_welfare(inst_, current_);
        break;
      default:
        value = lsowa_welfare(inst_, current_);
        break;
    }
    if (better_than_best(value, nash)) {
      has_best_ = true;
      best_value_ = value;
      best_nash_ = nash;
      best_alloc_ = current_;
    }
  }

  void descend(int o) {
    if (out_of_budget_) return;
    if (++nodes_ > budget_) {
      out_of_budget_ = true;
      return;
    }
    if (o == inst_.m) {
      evaluate_leaf();
      return;
    }
    if (prune(o)) return;

    const auto& fixed = fixed_by_item_[static_cast<size_t>(o)];
    const auto& cap = inst_.item_caps[static_cast<size_t>(o)];
    std::vector<int> pool;
    for (int i = 0; i < inst_.n; ++i) {
      if (std::find(fixed.begin(), fixed.end(), i) != fixed.end()) continue;
      if (counts_[static_cast<size_t>(i)] < inst_.agent_caps[static_cast<size_t>(i)].hi)
        pool.push_back(i);
    }

    int lo_extra = std::max(cap.lo, static_cast<int>(fixed.size())) -
                   static_cast<int>(fixed.size());
    int hi_extra = cap.hi - static_cast<int>(fixed.size());
    if (hi_extra < 0) return;  // fixed already overfills the item
    hi_extra = std::min(hi_extra, static_cast<int>(pool.size()));
    if (lo_extra > hi_extra) return;

    for (int i : fixed) give(i, o);
    std::vector<int> chosen;
    choose(o, pool, 0, lo_extra, hi_extra, chosen);
    for (int i : fixed) take_back(i, o);
  }

  // Enumerates subsets of `pool` (indices >= `from`) with size in
  // [lo_extra - |chosen| .. hi_extra - |chosen|], lexicographically.
  void choose(int o, const std::vector<int>& pool, size_t from, int lo_extra,
              int hi_extra, std::vector<int>& chosen) {
    if (out_of_budget_) return;
    int picked = static_cast<int>(chosen.size());
    if (picked >= lo_extra) descend(o + 1);
    if (picked == hi_extra) return;
    int still_needed = lo_extra - picked - 1;
    for (size_t idx = from; idx + static_cast<size_t>(std::max(0, still_needed)) <
                            pool.size();
         ++idx) {
      int agent = pool[idx];
      give(agent, o);
      chosen.push_back(agent);
      choose(o, pool, idx + 1, lo_extra, hi_extra, chosen);
      chosen.pop_back();
      take_back(agent, o);
      if (out_of_budget_) return;
    }
  }

  void give(int i, int o) {
    ++counts_[static_cast<size_t>(i)];
    utils_[static_cast<size_t>(i)] += inst_.utility(i, o);
    current_.add(i, o);
  }
  void take_back(int i, int o) {
    --counts_[static_cast<size_t>(i)];
    utils_[static_cast<size_t>(i)] -= inst_.utility(i, o);
    current_.remove(i, o);
  }

  const Instance& inst_;
  Objective objective_;
  long long budget_;
  std::vector<std::vector<int>> fixed_by_item_;
  std::vector<int> counts_;
  std::vector<double> utils_;
  Allocation current_;
  std::vector<std::vector<std::vector<double>>> suffix_top_;
  std::vector<std::vector<std::vector<double>>> suffix_pos_;

  long long nodes_ = 0;
  bool out_of_budget_ = false;
  bool has_best_ = false;
  double best_value_ = 0.0;
  NashScore best_nash_;
  Allocation best_alloc_;
};

}  // namespace

BaselineResult exact_baseline(const Instance& inst, Objective objective,
                              long long budget, const Allocation& fixed) {
  if (objective != Objective::nash && objective != Objective::egalitarian &&
      objective != Objective::lsowa)
    throw Error(ErrorCode::invalid_argument,
                "exact_baseline supports nash, egalitarian, and lsowa");
  Allocation fixed_copy = fixed.agents() == inst.n ? fixed : Allocation(inst.n);
  require_valid_partial(inst, fixed_copy);
  BaselineSearch search(inst, objective, budget, fixed_copy);
  return search.run();
}

const char* goal_kind_name(GoalKind kind) {
  switch (kind) {
    case GoalKind::null: return "null";
    case GoalKind::utilitarian_max: return "utilitarian_max";
    case GoalKind::utilitarian_threshold: return "utilitarian_threshold";
    case GoalKind::rank_max: return "rank_max";
    case GoalKind::nash_max: return "nash_max";
    case GoalKind::egal_max: return "egal_max";
    case GoalKind::lsowa_max: return "lsowa_max";
  }
  return "unknown";
}

WelfareGoal WelfareGoal::make(const Instance& inst, GoalKind kind, double threshold,
                              long long budget) {
  WelfareGoal goal;
  goal.kind_ = kind;
  goal.threshold_ = threshold;
  goal.budget_ = budget;
  switch (kind) {
    case GoalKind::null: {
      auto witness = feasible_completion(inst, Allocation(inst.n));
      if (!witness)
        throw Error(ErrorCode::unsatisfiable_goal,
                    "instance has no complete feasible allocation");
      goal.witness_ = std::move(*witness);
      break;
    }
    case GoalKind::utilitarian_max:
    case GoalKind::utilitarian_threshold: {
      auto result = max_utilitarian(inst, Allocation(inst.n));
      goal.optimum_welfare_ = result.welfare;
      goal.optimum_scaled_ = result.welfare_scaled;
      goal.witness_ = std::move(result.allocation);
      if (kind == GoalKind::utilitarian_threshold &&
          threshold > goal.optimum_welfare_ + 1e-9)
        throw Error(ErrorCode::unsatisfiable_goal,
                    "welfare threshold exceeds the utilitarian optimum");
      break;
    }
    case GoalKind::rank_max: {
      auto result = max_rank(inst, Allocation(inst.n));
      goal.optimum_rank_ = std::move(result.rank);
      goal.witness_ = std::move(result.allocation);
      break;
    }
    case GoalKind::nash_max:
    case GoalKind::egal_max:
    case GoalKind::lsowa_max: {
      Objective objective = kind == GoalKind::nash_max ? Objective::nash
                            : kind == GoalKind::egal_max ? Objective::egalitarian
                                                         : Objective::lsowa;
      auto result = exact_baseline(inst, objective, budget, Allocation(inst.n));
      if (!result.exact)
        throw Error(ErrorCode::budget_exceeded,
                    "baseline optimum not settled within the search budget");
      goal.optimum_nash_ = result.nash;
      goal.optimum_value_ = result.value;
      goal.witness_ = std::move(result.allocation);
      break;
    }
  }
  return goal;
}

namespace {

bool nash_matches(const NashScore& achieved, const NashScore& optimum) {
  return achieved.positives == optimum.positives &&
         std::abs(achieved.product - optimum.product) <=
             1e-9 * std::max(1.0, std::abs(optimum.product));
}

bool value_matches(double achieved, double optimum) {
  return achieved >= optimum - 1e-9 * std::max(1.0, std::abs(optimum));
}

}  // namespace

CompletionAnswer completion(const WelfareGoal& goal, const Instance& inst,
                            const Allocation& partial) {
  switch (goal.kind()) {
    case GoalKind::null: {
      auto witness = feasible_completion(inst, partial);
      if (!witness) return {};
      return {true, std::move(*witness)};
    }
    case GoalKind::utilitarian_max:
    case GoalKind::utilitarian_threshold: {
      UtilitarianResult result;
      try {
        result = max_utilitarian(inst, partial);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::no_feasible_completion) return {};
        throw;
      }
      bool ok = goal.kind() == GoalKind::utilitarian_max
                    ? result.welfare_scaled >= goal.optimum_scaled()
                    : result.welfare >= goal.threshold() - 1e-9;
      if (!ok) return {};
      return {true, std::move(result.allocation)};
    }
    case GoalKind::rank_max: {
      RankMaximalResult result;
      try {
        result = max_rank(inst, partial);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::no_feasible_completion) return {};
        throw;
      }
      if (lex_compare(result.rank, goal.optimum_rank()) < 0) return {};
      return {true, std::move(result.allocation)};
    }
    case GoalKind::nash_max:
    case GoalKind::egal_max:
    case GoalKind::lsowa_max: {
      Objective objective = goal.kind() == GoalKind::nash_max ? Objective::nash
                            : goal.kind() == GoalKind::egal_max
                                ? Objective::egalitarian
                                : Objective::lsowa;
      BaselineResult result;
      try {
        result = exact_baseline(inst, objective, goal.budget(), partial);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::no_feasible_completion) return {};
        throw;
      }
      bool ok = objective == Objective::nash
                    ? nash_matches(result.nash, goal.optimum_nash())
                    : value_matches(result.value, goal.optimum_value());
      if (ok) return {true, std::move(result.allocation)};
      if (!result.exact)
        throw Error(ErrorCode::budget_exceeded,
                    "completion undecided: search budget exhausted below the optimum");
      return {};
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown goal kind");
}

}  // namespace fairalloc
