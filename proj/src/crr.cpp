#include "fairalloc/crr.hpp"

#include <algorithm>
#include <sstream>

#include "fairalloc/rng.hpp"

namespace fairalloc {

bool PickingSequence::is_recursively_balanced(int n) const {
  std::vector<int> counts(static_cast<size_t>(n), 0);
  int lo = 0, hi = 0;
  for (int agent : turns) {
    if (agent < 0 || agent >= n) return false;
    ++counts[static_cast<size_t>(agent)];
    lo = *std::min_element(counts.begin(), counts.end());
    hi = *std::max_element(counts.begin(), counts.end());
    if (hi - lo > 1) return false;
  }
  return true;
}

bool PickingSequence::is_round_robin(int n) const {
  if (turns.empty()) return true;
  size_t period = std::min<size_t>(turns.size(), static_cast<size_t>(n));
  std::vector<bool> seen(static_cast<size_t>(n), false);
  for (size_t k = 0; k < period; ++k) {
    if (turns[k] < 0 || turns[k] >= n) return false;
    if (seen[static_cast<size_t>(turns[k])]) return false;
    seen[static_cast<size_t>(turns[k])] = true;
  }
  for (size_t k = period; k < turns.size(); ++k)
    if (turns[k] != turns[k - static_cast<size_t>(n)]) return false;
  return true;
}

PickingSequence round_robin_sequence(std::vector<int> permutation, int length) {
  PickingSequence sequence;
  sequence.turns.reserve(static_cast<size_t>(length));
  for (int t = 0; t < length; ++t)
    sequence.turns.push_back(permutation[static_cast<size_t>(t) % permutation.size()]);
  return sequence;
}

PickingSequence make_sequence(SequenceKind kind, int n, int length, std::uint64_t seed) {
  Rng rng(seed);
  if (kind == SequenceKind::rr) return round_robin_sequence(rng.permutation(n), length);

  PickingSequence sequence;
  std::vector<int> counts(static_cast<size_t>(n), 0);
  std::vector<int> eligible;
  for (int t = 0; t < length; ++t) {
    int fewest = *std::min_element(counts.begin(), counts.end());
    eligible.clear();
    for (int i = 0; i < n; ++i)
      if (counts[static_cast<size_t>(i)] == fewest) eligible.push_back(i);
    int pick = eligible[static_cast<size_t>(
        rng.uniform_int(0, static_cast<int>(eligible.size()) - 1))];
    ++counts[static_cast<size_t>(pick)];
    sequence.turns.push_back(pick);
  }
  return sequence;
}

Allocation sequential_allocation(const Instance& inst, const PickingSequence& sequence) {
  Allocation alloc(inst.n);
  std::vector<int> copies(static_cast<size_t>(inst.m));
  for (int o = 0; o < inst.m; ++o)
    copies[static_cast<size_t>(o)] = inst.item_caps[static_cast<size_t>(o)].hi;

  for (int agent : sequence.turns) {
    if (alloc.bundle_size(agent) >= inst.agent_caps[static_cast<size_t>(agent)].hi)
      continue;
    int picked = -1;
    for (const auto& cls : inst.profile[static_cast<size_t>(agent)]) {
      for (int item : cls) {
        if (copies[static_cast<size_t>(item)] <= 0) continue;
        if (alloc.holds(agent, item)) continue;
        picked = item;
        break;
      }
      if (picked >= 0) break;
    }
    if (picked < 0) continue;  // nothing pickable; skip the turn
    alloc.add(agent, picked);
    --copies[static_cast<size_t>(picked)];
  }
  return alloc;
}

std::string trace_to_text(const std::vector<TraceEvent>& trace) {
  std::ostringstream out;
  for (const auto& event : trace) {
    if (event.kind == TraceEvent::Kind::pick)
      out << "PICK " << event.agent << ' ' << event.item << ' ' << event.round << '\n';
    else
      out << "DROPCLASS " << event.agent << ' ' << event.class_rank << '\n';
  }
  return out.str();
}

namespace {

// Remaining preference lists of one agent: equivalence classes in preference
// order, with picked/exhausted items removed and emptied classes popped.
struct AgentLists {
  std::vector<std::vector<int>> classes;      // suffix of the profile, mutated
  std::vector<int> original_rank;             // 1-based rank of each class
  size_t head = 0;

  bool empty() const { return head >= classes.size(); }
  std::vector<int>& head_class() { return classes[head]; }
  int head_rank() const { return original_rank[head]; }
  void pop_head() { ++head; }
  void pop_empty_heads() {
    while (head < classes.size() && classes[head].empty()) ++head;
  }
  void remove_item(int item) {
    for (size_t c = head; c < classes.size(); ++c) {
      auto it = std::find(classes[c].begin(), classes[c].end(), item);
      if (it != classes[c].end()) {
        classes[c].erase(it);
        break;
      }
    }
    pop_empty_heads();
  }
};

// Completion oracle wrapper: caches the current goal-achieving witness (any
// query already answered by it is a yes without a solve), caches rejected
// pairs forever (justified by the antitone property of completion), and
// counts oracle consultations.
class CompletionOracle {
 public:
  CompletionOracle(const Instance& inst, const WelfareGoal& goal)
      : inst_(inst), goal_(goal), witness_(goal.initial_witness()),
        rejected_(static_cast<size_t>(inst.n) * static_cast<size_t>(inst.m), false) {}

  bool known_no(int agent, int item) const {
    return rejected_[static_cast<size_t>(agent) * static_cast<size_t>(inst_.m) +
                     static_cast<size_t>(item)];
  }

  // Asks whether partial + (agent, item) is still goal-completable.
  bool query(const Allocation& partial, int agent, int item) {
    ++queries_;
    if (witness_.holds(agent, item)) return true;
    Allocation extended = partial;
    extended.add(agent, item);
    CompletionAnswer answer = completion(goal_, inst_, extended);
    if (answer.satisfiable) {
      witness_ = std::move(*answer.witness);
      return true;
    }
    rejected_[static_cast<size_t>(agent) * static_cast<size_t>(inst_.m) +
              static_cast<size_t>(item)] = true;
    return false;
  }

  const Allocation& witness() const { return witness_; }
  long long queries() const { return queries_; }

 private:
  const Instance& inst_;
  const WelfareGoal& goal_;
  Allocation witness_;
  std::vector<char> rejected_;
  long long queries_ = 0;
};

CrrResult run_crr(const Instance& inst, const WelfareGoal& goal,
                  const CrrOptions& options) {
  const int n = inst.n, m = inst.m;
  CrrResult result;
  Allocation p(n);
  CompletionOracle oracle(inst, goal);

  std::vector<AgentLists> lists(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& li = lists[static_cast<size_t>(i)];
    li.classes = inst.profile[static_cast<size_t>(i)];
    li.original_rank.resize(li.classes.size());
    for (size_t c = 0; c < li.classes.size(); ++c)
      li.original_rank[c] = static_cast<int>(c) + 1;
  }

  std::vector<int> copies(static_cast<size_t>(m));
  for (int o = 0; o < m; ++o)
    copies[static_cast<size_t>(o)] = inst.item_caps[static_cast<size_t>(o)].hi;

  auto agent_full = [&](int i) {
    return p.bundle_size(i) >= inst.agent_caps[static_cast<size_t>(i)].hi;
  };
  auto any_feasible_extension = [&]() {
    for (int o = 0; o < m; ++o) {
      if (copies[static_cast<size_t>(o)] <= 0) continue;
      for (int i = 0; i < n; ++i)
        if (!agent_full(i) && !p.holds(i, o)) return true;
    }
    return false;
  };

  std::vector<int> eligible;
  while (any_feasible_extension()) {
    eligible.clear();
    if (options.share_weights) {
      const auto& weights = *options.share_weights;
      double total_weight = 0.0;
      for (int i = 0; i < n; ++i) total_weight += weights[static_cast<size_t>(i)];
      double handed_out = static_cast<double>(p.total_assignments());
      for (int i = 0; i < n; ++i) {
        if (lists[static_cast<size_t>(i)].empty()) continue;
        double share = weights[static_cast<size_t>(i)] / total_weight * handed_out;
        if (static_cast<double>(p.bundle_size(i)) < share) eligible.push_back(i);
      }
      if (eligible.empty()) {
        // All active agents meet their share; let them all compete.
        for (int i = 0; i < n; ++i)
          if (!lists[static_cast<size_t>(i)].empty()) eligible.push_back(i);
      }
    } else {
      int fewest = m + 1;
      for (int i = 0; i < n; ++i) {
        if (lists[static_cast<size_t>(i)].empty()) continue;
        fewest = std::min(fewest, p.bundle_size(i));
      }
      for (int i = 0; i < n; ++i)
        if (!lists[static_cast<size_t>(i)].empty() && p.bundle_size(i) == fewest)
          eligible.push_back(i);
    }
    if (eligible.empty()) break;  // no active agents left

    int picked_agent = -1, picked_item = -1;
    for (int i : eligible) {
      if (agent_full(i)) continue;
      for (int item : lists[static_cast<size_t>(i)].head_class()) {
        if (oracle.known_no(i, item)) continue;
        if (oracle.query(p, i, item)) {
          picked_agent = i;
          picked_item = item;
          break;
        }
      }
      if (picked_agent >= 0) break;
    }

    if (picked_agent >= 0) {
      p.add(picked_agent, picked_item);
      result.trace.push_back(TraceEvent{TraceEvent::Kind::pick, picked_agent,
                                        picked_item, p.bundle_size(picked_agent), -1});
      lists[static_cast<size_t>(picked_agent)].remove_item(picked_item);
      if (--copies[static_cast<size_t>(picked_item)] == 0)
        for (int i = 0; i < n; ++i)
          lists[static_cast<size_t>(i)].remove_item(picked_item);
    } else {
      for (int i : eligible) {
        auto& li = lists[static_cast<size_t>(i)];
        result.trace.push_back(
            TraceEvent{TraceEvent::Kind::drop_class, i, -1, 0, li.head_rank()});
        li.pop_head();
        li.pop_empty_heads();
      }
    }
  }

  result.completion_queries = oracle.queries();
  result.allocation = is_complete(inst, p) ? std::move(p) : oracle.witness();
  return result;
}

}  // namespace

CrrResult w_crr(const Instance& inst, const WelfareGoal& goal,
                const CrrOptions& options) {
  if (options.share_weights) {
    if (static_cast<int>(options.share_weights->size()) != inst.n)
      throw Error(ErrorCode::invalid_argument, "need one share weight per agent");
    for (double w : *options.share_weights)
      if (!(w > 0.0))
        throw Error(ErrorCode::invalid_argument, "share weights must be positive");
  }
  if (!options.relabel_seed) return run_crr(inst, goal, options);

  // Relabel agents, run, and map the result back to the original labels.
  Rng rng(*options.relabel_seed);
  std::vector<int> perm = rng.permutation(inst.n);  // perm[new] = old
  Instance relabeled = inst;
  for (int i = 0; i < inst.n; ++i) {
    int old = perm[static_cast<size_t>(i)];
    relabeled.profile[static_cast<size_t>(i)] = inst.profile[static_cast<size_t>(old)];
    relabeled.utilities[static_cast<size_t>(i)] =
        inst.utilities[static_cast<size_t>(old)];
    relabeled.agent_caps[static_cast<size_t>(i)] =
        inst.agent_caps[static_cast<size_t>(old)];
    relabeled.item_rank[static_cast<size_t>(i)] =
        inst.item_rank[static_cast<size_t>(old)];
  }
  CrrOptions relabeled_options = options;
  if (options.share_weights) {
    auto& weights = *relabeled_options.share_weights;
    for (int i = 0; i < inst.n; ++i)
      weights[static_cast<size_t>(i)] =
          (*options.share_weights)[static_cast<size_t>(perm[static_cast<size_t>(i)])];
  }
  WelfareGoal relabeled_goal =
      WelfareGoal::make(relabeled, goal.kind(), goal.threshold(), goal.budget());
  CrrResult result = run_crr(relabeled, relabeled_goal, relabeled_options);

  CrrResult mapped;
  mapped.completion_queries = result.completion_queries;
  mapped.allocation = Allocation(inst.n);
  for (int i = 0; i < inst.n; ++i)
    mapped.allocation.bundles[static_cast<size_t>(perm[static_cast<size_t>(i)])] =
        result.allocation.bundles[static_cast<size_t>(i)];
  mapped.trace = std::move(result.trace);
  for (auto& event : mapped.trace)
    event.agent = perm[static_cast<size_t>(event.agent)];
  return mapped;
}

}  // namespace fairalloc
