// Min-cost feasible circulation with per-arc [lo, hi] bounds and integral
// capacities. Costs are a template parameter: plain long long for scalar
// objectives, LexCost for lexicographically ordered vector objectives.
// Any totally ordered additive cost type works with successive shortest
// paths, so the same solver serves both.
//
// Negative-cost arcs and lower bounds are pre-saturated, which leaves every
// initial residual arc with non-negative cost; augmentation then runs
// Dijkstra with node potentials. All choices (start node, tie-breaks in the
// scan) are by lowest index, so the optimal flow returned is deterministic.
#pragma once

#include <optional>
#include <vector>

namespace fairalloc {

struct LexCost {
  std::vector<long long> v;

  LexCost() = default;
  explicit LexCost(size_t dim) : v(dim, 0) {}

  LexCost& operator+=(const LexCost& o) {
    for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
  }
  LexCost& operator-=(const LexCost& o) {
    for (size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    return *this;
  }
  bool operator<(const LexCost& o) const { return v < o.v; }
  bool operator==(const LexCost& o) const { return v == o.v; }
};

inline long long cost_scale(long long cost, long long flow) { return cost * flow; }
inline LexCost cost_scale(LexCost cost, long long flow) {
  for (auto& x : cost.v) x *= flow;
  return cost;
}

template <typename Cost>
class MinCostCirculation {
 public:
  MinCostCirculation(int nodes, Cost zero)
      : nodes_(nodes), zero_(std::move(zero)) {}

  int add_arc(int from, int to, long long lo, long long hi, Cost cost) {
    arcs_.push_back(Arc{from, to, lo, hi, std::move(cost)});
    return static_cast<int>(arcs_.size()) - 1;
  }

  struct Result {
    std::vector<long long> flow;  // per arc, within [lo, hi]
    Cost total_cost;
  };

  // Returns nullopt when no circulation satisfies all lower bounds.
  std::optional<Result> solve() {
    const size_t num_arcs = arcs_.size();
    std::vector<long long> residual(num_arcs * 2);
    std::vector<long long> excess(static_cast<size_t>(nodes_), 0);

    // Start from lo on each arc, hi when the cost is negative. Entry 2k is
    // the forward direction of arc k, entry 2k+1 the backward direction.
    for (size_t k = 0; k < num_arcs; ++k) {
      const Arc& arc = arcs_[k];
      long long f = arc.cost < zero_ ? arc.hi : arc.lo;
      residual[2 * k] = arc.hi - f;
      residual[2 * k + 1] = f - arc.lo;
      excess[static_cast<size_t>(arc.to)] += f;
      excess[static_cast<size_t>(arc.from)] -= f;
    }

    std::vector<std::vector<int>> out(static_cast<size_t>(nodes_));
    for (size_t k = 0; k < num_arcs; ++k) {
      out[static_cast<size_t>(arcs_[k].from)].push_back(static_cast<int>(2 * k));
      out[static_cast<size_t>(arcs_[k].to)].push_back(static_cast<int>(2 * k + 1));
    }

    std::vector<Cost> pot(static_cast<size_t>(nodes_), zero_);
    std::vector<Cost> dist(static_cast<size_t>(nodes_), zero_);
    std::vector<char> reached(static_cast<size_t>(nodes_));
    std::vector<char> settled(static_cast<size_t>(nodes_));
    std::vector<int> parent_entry(static_cast<size_t>(nodes_));
    Cost cand = zero_;

    while (true) {
      int source = -1;
      for (int v = 0; v < nodes_; ++v)
        if (excess[static_cast<size_t>(v)] > 0) {
          source = v;
          break;
        }
      if (source < 0) break;

      // Dijkstra over reduced costs from `source`, stopping at the nearest
      // node with a deficit.
      std::fill(reached.begin(), reached.end(), 0);
      std::fill(settled.begin(), settled.end(), 0);
      dist[static_cast<size_t>(source)] = zero_;
      reached[static_cast<size_t>(source)] = 1;
      parent_entry[static_cast<size_t>(source)] = -1;
      int target = -1;
      while (true) {
        int u = -1;
        for (int v = 0; v < nodes_; ++v) {
          if (!reached[static_cast<size_t>(v)] || settled[static_cast<size_t>(v)])
            continue;
          if (u < 0 || dist[static_cast<size_t>(v)] < dist[static_cast<size_t>(u)])
            u = v;
        }
        if (u < 0) break;
        settled[static_cast<size_t>(u)] = 1;
        if (excess[static_cast<size_t>(u)] < 0) {
          target = u;
          break;
        }
        for (int entry : out[static_cast<size_t>(u)]) {
          if (residual[static_cast<size_t>(entry)] <= 0) continue;
          const Arc& arc = arcs_[static_cast<size_t>(entry >> 1)];
          int v = (entry & 1) ? arc.from : arc.to;
          if (settled[static_cast<size_t>(v)]) continue;
          cand = dist[static_cast<size_t>(u)];
          if (entry & 1)
            cand -= arc.cost;
          else
            cand += arc.cost;
          cand += pot[static_cast<size_t>(u)];
          cand -= pot[static_cast<size_t>(v)];
          if (!reached[static_cast<size_t>(v)] || cand < dist[static_cast<size_t>(v)]) {
            reached[static_cast<size_t>(v)] = 1;
            std::swap(dist[static_cast<size_t>(v)], cand);
            parent_entry[static_cast<size_t>(v)] = entry;
          }
        }
      }
      if (target < 0) return std::nullopt;  // excess cannot reach any deficit

      long long delta =
          std::min(excess[static_cast<size_t>(source)], -excess[static_cast<size_t>(target)]);
      for (int v = target; v != source;) {
        int entry = parent_entry[static_cast<size_t>(v)];
        delta = std::min(delta, residual[static_cast<size_t>(entry)]);
        const Arc& arc = arcs_[static_cast<size_t>(entry >> 1)];
        v = (entry & 1) ? arc.to : arc.from;
      }
      for (int v = target; v != source;) {
        int entry = parent_entry[static_cast<size_t>(v)];
        residual[static_cast<size_t>(entry)] -= delta;
        residual[static_cast<size_t>(entry ^ 1)] += delta;
        const Arc& arc = arcs_[static_cast<size_t>(entry >> 1)];
        v = (entry & 1) ? arc.to : arc.from;
      }
      excess[static_cast<size_t>(source)] -= delta;
      excess[static_cast<size_t>(target)] += delta;

      const Cost dist_target = dist[static_cast<size_t>(target)];
      for (int v = 0; v < nodes_; ++v) {
        if (settled[static_cast<size_t>(v)])
          pot[static_cast<size_t>(v)] += dist[static_cast<size_t>(v)];
        else
          pot[static_cast<size_t>(v)] += dist_target;
      }
    }

    Result result;
    result.flow.resize(num_arcs);
    result.total_cost = zero_;
    for (size_t k = 0; k < num_arcs; ++k) {
      long long f = arcs_[k].hi - residual[2 * k];
      result.flow[k] = f;
      if (f != 0 && !(arcs_[k].cost == zero_))
        result.total_cost += cost_scale(arcs_[k].cost, f);
    }
    return result;
  }

 private:
  struct Arc {
    int from, to;
    long long lo, hi;
    Cost cost;
  };

  int nodes_;
  Cost zero_;
  std::vector<Arc> arcs_;
};

}  // namespace fairalloc
