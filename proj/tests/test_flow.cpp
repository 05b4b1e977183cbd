#include <doctest.h>

#include <functional>
#include <optional>

#include "fairalloc/flow.hpp"
#include "fairalloc/rng.hpp"

using namespace fairalloc;

TEST_CASE("empty flow is optimal when nothing is forced and costs are zero") {
  MinCostCirculation<long long> net(3, 0);
  net.add_arc(0, 1, 0, 5, 0);
  net.add_arc(1, 2, 0, 5, 0);
  net.add_arc(2, 0, 0, 5, 0);
  auto result = net.solve();
  REQUIRE(result.has_value());
  CHECK(result->total_cost == 0);
  for (long long f : result->flow) CHECK(f == 0);
}

TEST_CASE("negative-cost cycles are saturated") {
  MinCostCirculation<long long> net(2, 0);
  net.add_arc(0, 1, 0, 3, -2);
  net.add_arc(1, 0, 0, 5, 1);
  auto result = net.solve();
  REQUIRE(result.has_value());
  CHECK(result->flow[0] == 3);
  CHECK(result->flow[1] == 3);
  CHECK(result->total_cost == -3);
}

TEST_CASE("lower bounds force flow along costly arcs") {
  MinCostCirculation<long long> net(3, 0);
  net.add_arc(0, 1, 2, 4, 7);
  net.add_arc(1, 2, 0, 4, 1);
  net.add_arc(2, 0, 0, 4, 0);
  auto result = net.solve();
  REQUIRE(result.has_value());
  CHECK(result->flow[0] == 2);
  CHECK(result->total_cost == 2 * 8);
}

TEST_CASE("infeasible lower bounds are reported") {
  MinCostCirculation<long long> net(2, 0);
  net.add_arc(0, 1, 3, 3, 0);
  net.add_arc(1, 0, 0, 1, 0);  // return capacity too small
  CHECK_FALSE(net.solve().has_value());
}

namespace {

// Brute force over integral flows on a small arc set: every arc enumerated
// within its bounds, conservation checked at every node.
struct BruteArc {
  int from, to;
  long long lo, hi, cost;
};

std::optional<long long> brute_min_cost(int nodes, const std::vector<BruteArc>& arcs) {
  std::optional<long long> best;
  std::vector<long long> flow(arcs.size(), 0);
  std::vector<long long> balance(static_cast<size_t>(nodes), 0);
  std::function<void(size_t)> walk = [&](size_t k) {
    if (k == arcs.size()) {
      for (long long b : balance)
        if (b != 0) return;
      long long cost = 0;
      for (size_t a = 0; a < arcs.size(); ++a) cost += arcs[a].cost * flow[a];
      if (!best || cost < *best) best = cost;
      return;
    }
    for (long long f = arcs[k].lo; f <= arcs[k].hi; ++f) {
      balance[static_cast<size_t>(arcs[k].from)] -= f;
      balance[static_cast<size_t>(arcs[k].to)] += f;
      flow[k] = f;
      walk(k + 1);
      balance[static_cast<size_t>(arcs[k].from)] += f;
      balance[static_cast<size_t>(arcs[k].to)] -= f;
    }
    flow[k] = 0;
  };
  walk(0);
  return best;
}

}  // namespace

TEST_CASE("solver matches brute force on random small circulations") {
  Rng rng(4242);
  int agreements = 0;
  for (int round = 0; round < 200; ++round) {
    int nodes = rng.uniform_int(2, 4);
    int num_arcs = rng.uniform_int(2, 6);
    std::vector<BruteArc> arcs;
    MinCostCirculation<long long> net(nodes, 0);
    for (int k = 0; k < num_arcs; ++k) {
      int from = rng.uniform_int(0, nodes - 1);
      int to = rng.uniform_int(0, nodes - 1);
      if (to == from) to = (to + 1) % nodes;
      long long hi = rng.uniform_int(0, 3);
      long long lo = rng.uniform_int(0, static_cast<int>(hi));
      long long cost = rng.uniform_int(-4, 4);
      arcs.push_back({from, to, lo, hi, cost});
      net.add_arc(from, to, lo, hi, cost);
    }
    auto expect = brute_min_cost(nodes, arcs);
    auto actual = net.solve();
    CHECK(expect.has_value() == actual.has_value());
    if (expect && actual) {
      CHECK(*expect == actual->total_cost);
      ++agreements;
    }
  }
  CHECK(agreements > 50);
}

TEST_CASE("lexicographic vector costs drive assignments to the best ranks") {
  // Hand-built two-agent, two-item assignment network. Agent 0 ranks item 0
  // first, agent 1 ranks item 1 first; each agent takes exactly one item and
  // each item goes out once. Costs are negated rank-unit vectors, so the
  // lexicographically optimal circulation must give both agents their top
  // item: rank counts (2, 0), never the swapped (0, 2).
  // Nodes: 0 source, 1-2 agents, 3-4 items, 5 sink.
  MinCostCirculation<LexCost> net(6, LexCost(2));
  net.add_arc(0, 1, 1, 1, LexCost(2));
  net.add_arc(0, 2, 1, 1, LexCost(2));
  auto rank_cost = [](int rank) {
    LexCost cost(2);
    cost.v[static_cast<size_t>(rank)] = -1;
    return cost;
  };
  int a0_i0 = net.add_arc(1, 3, 0, 1, rank_cost(0));
  int a0_i1 = net.add_arc(1, 4, 0, 1, rank_cost(1));
  int a1_i0 = net.add_arc(2, 3, 0, 1, rank_cost(1));
  int a1_i1 = net.add_arc(2, 4, 0, 1, rank_cost(0));
  net.add_arc(3, 5, 1, 1, LexCost(2));
  net.add_arc(4, 5, 1, 1, LexCost(2));
  net.add_arc(5, 0, 0, 4, LexCost(2));

  auto result = net.solve();
  REQUIRE(result.has_value());
  CHECK(result->flow[static_cast<size_t>(a0_i0)] == 1);
  CHECK(result->flow[static_cast<size_t>(a1_i1)] == 1);
  CHECK(result->flow[static_cast<size_t>(a0_i1)] == 0);
  CHECK(result->flow[static_cast<size_t>(a1_i0)] == 0);
  CHECK(result->total_cost.v == std::vector<long long>{-2, 0});
}

TEST_CASE("LexCost comparison and arithmetic") {
  LexCost a(3), b(3);
  a.v = {0, 2, 5};
  b.v = {0, 3, -5};
  CHECK(a < b);
  LexCost c = a;
  c += b;
  CHECK(c.v == std::vector<long long>{0, 5, 0});
  c -= b;
  CHECK(c == a);
  CHECK(cost_scale(a, 2).v == std::vector<long long>{0, 4, 10});
}
