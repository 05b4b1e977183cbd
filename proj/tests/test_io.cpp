#include <doctest.h>

#include <map>

#include "fairalloc/io.hpp"
#include "fairalloc/rng.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace fairalloc;

TEST_CASE("instance serialization round-trips") {
  Instance worked = fixtures::worked_example();
  Instance parsed = parse_instance(serialize_instance(worked));
  CHECK(parsed == worked);

  Rng rng(31);
  for (int round = 0; round < 25; ++round) {
    oracles::RandomInstanceOptions options;
    options.sign = oracles::UtilitySign::mixed;
    Instance inst = oracles::random_instance(rng, options);
    CHECK(parse_instance(serialize_instance(inst)) == inst);
  }
}

TEST_CASE("instance parsing: borda synthesis and validation errors") {
  std::string base = "agents 1\nitems 3\n";
  std::string with_borda = base + "scoring borda\npref 0: 0,{1,2}\n";
  Instance inst = parse_instance(with_borda);
  CHECK(inst.utility(0, 0) == 3.0);
  CHECK(inst.utility(0, 1) == 1.5);
  CHECK(inst.utility(0, 2) == 1.5);
  // Identical to the model op.
  auto direct = borda_utilities(inst.profile, 3);
  CHECK(inst.utilities == direct);

  // Utility contradicting the class order.
  std::string contradiction = base + "pref 0: 0,{1,2}\nutil 0: 1,2,2\n";
  CHECK_THROWS_WITH_AS(parse_instance(contradiction),
                       doctest::Contains("inconsistent_utilities"), Error);

  // Malformed braces.
  CHECK_THROWS_WITH_AS(parse_instance(base + "pref 0: 0,{1,2\n"),
                       doctest::Contains("parse_error"), Error);

  // Unknown directive.
  CHECK_THROWS_AS(parse_instance("agents 1\nitems 1\nbogus 3\npref 0: 0\n"), Error);

  // scoring + util conflict.
  CHECK_THROWS_AS(parse_instance(base + "scoring borda\npref 0: 0,1,2\nutil 0: 3,2,1\n"),
                  Error);
}

TEST_CASE("allocation files round-trip") {
  Allocation alloc = fixtures::allocation_of(3, {{0, 2}, {}, {1}});
  Allocation parsed = parse_allocation(serialize_allocation(alloc), 3);
  CHECK(parsed == alloc);
  CHECK_THROWS_AS(parse_allocation("5: 0\n", 3), Error);
  CHECK_THROWS_AS(parse_allocation("0: 1 1\n", 3), Error);
}

TEST_CASE("preflib lines expand multiplicities and complete unranked items") {
  PreflibProfile parsed = parse_preflib("3: 1,{2,3},4\n");
  CHECK(parsed.m == 4);
  REQUIRE(parsed.profile.size() == 3);
  std::vector<std::vector<int>> expect = {{0}, {1, 2}, {3}};
  for (const auto& agent : parsed.profile) CHECK(agent == expect);

  PreflibProfile partial = parse_preflib("1: 1\n", 3);
  REQUIRE(partial.profile.size() == 1);
  CHECK(partial.profile[0] == std::vector<std::vector<int>>{{0}, {1, 2}});

  CHECK_THROWS_WITH_AS(parse_preflib("1: 1,{2,3\n"), doctest::Contains("parse_error"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_preflib("1: 5\n", 3),
                       doctest::Contains("unknown_alternative"), Error);
  CHECK_THROWS_AS(parse_preflib("1: 1,1\n"), Error);
}

TEST_CASE("preflib profile converts to a valid instance") {
  PreflibProfile parsed = parse_preflib("2: 1,{2,3}\n1: 3,2,1\n");
  Instance inst = instance_from_profile(parsed.profile, CapRange{0, 3}, CapRange{1, 1});
  CHECK(inst.n == 3);
  CHECK(inst.m == 3);
  CHECK(inst.utility(0, 0) == 3.0);
}

TEST_CASE("mallows: phi = 0 reproduces the reference ranking") {
  std::vector<int> reference = {3, 1, 4, 0, 2};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    CHECK(mallows_sample(0.0, reference, rng) == reference);
  }
}

TEST_CASE("mallows: phi = 1 is uniform over permutations") {
  Rng rng(777);
  std::vector<int> reference = {0, 1, 2};
  std::map<std::vector<int>, int> counts;
  const int samples = 60000;
  for (int s = 0; s < samples; ++s) ++counts[mallows_sample(1.0, reference, rng)];
  CHECK(counts.size() == 6);
  for (const auto& [perm, count] : counts) {
    double freq = static_cast<double>(count) / samples;
    CHECK(freq == doctest::Approx(1.0 / 6).epsilon(0.06));
  }
}

TEST_CASE("mallows: phi = 0.5 on two items follows the closed form") {
  Rng rng(778);
  std::vector<int> reference = {0, 1};
  int in_order = 0;
  const int samples = 50000;
  for (int s = 0; s < samples; ++s)
    if (mallows_sample(0.5, reference, rng) == reference) ++in_order;
  CHECK(static_cast<double>(in_order) / samples ==
        doctest::Approx(1.0 / 1.5).epsilon(0.015));
}

TEST_CASE("mallows samples are always permutations") {
  Rng rng(779);
  std::vector<int> reference(8);
  for (int o = 0; o < 8; ++o) reference[static_cast<size_t>(o)] = o;
  for (int s = 0; s < 200; ++s) {
    double phi = rng.uniform01();
    auto ranking = mallows_sample(phi, reference, rng);
    auto sorted = ranking;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == reference);
  }
}

TEST_CASE("experiment: row count, determinism, and aggregates") {
  ExperimentConfig config;
  config.n = 4;
  config.m = 6;
  config.agent_cap = CapRange{0, 3};
  config.item_cap = CapRange{1, 2};
  config.phis = {0.0, 1.0};
  config.trials = 3;
  config.objectives = {"um", "um-crr"};
  config.notions = {"nef1", "ef1"};
  config.seed = 5;

  ExperimentResult first = run_experiment(config);
  CHECK(first.rows.size() == 2 * 3 * 2 * 2);  // phis * trials * objectives * notions
  for (const auto& row : first.rows) {
    CHECK(row.status == "ok");
    REQUIRE(row.fraction.has_value());
    CHECK(*row.fraction >= 0.0);
    CHECK(*row.fraction <= 1.0);
  }
  CHECK(first.aggregates.size() == 2 * 2 * 2);

  ExperimentResult again = run_experiment(config);
  CHECK(first.to_csv() == again.to_csv());

  ExperimentResult parallel = run_experiment(config, 3);
  CHECK(first.to_csv() == parallel.to_csv());

  config.trials = 1;
  config.objectives = {"um"};
  config.notions = {"nef1"};
  config.phis = {0.5};
  ExperimentResult single = run_experiment(config);
  CHECK(single.rows.size() == 1);
}

TEST_CASE("experiment row count is stable under per-run failures") {
  ExperimentConfig config;
  config.n = 6;
  config.m = 10;
  config.agent_cap = CapRange{1, 4};
  config.item_cap = CapRange{1, 2};
  config.phis = {0.5};
  config.trials = 2;
  config.objectives = {"um", "um-crr", "rm", "rm-crr", "nash", "lsowa", "egal"};
  config.notions = {"nef1"};
  config.seed = 3;
  config.bnb_budget = 50;  // guarantees budget-exhausted baseline rows

  ExperimentResult result = run_experiment(config);
  CHECK(result.rows.size() == 7 * 1 * 2);  // objectives x phis x trials
  bool saw_budget = false;
  for (const auto& row : result.rows) {
    if (row.status == "budget") saw_budget = true;
    CHECK((row.status == "ok" || row.status == "budget"));
  }
  CHECK(saw_budget);
}

TEST_CASE("experiment config JSON parsing") {
  ExperimentConfig config = parse_experiment_config(R"({
    "n": 6, "m": 8, "agent_cap": [1, 3], "item_cap": [1, 2],
    "phis": [0.0, 0.5], "trials": 2, "objectives": ["um", "rm-crr"],
    "notions": ["ef1"], "seed": 9, "budget": 1000
  })");
  CHECK(config.n == 6);
  CHECK(config.agent_cap.hi == 3);
  CHECK(config.objectives == std::vector<std::string>{"um", "rm-crr"});
  CHECK(config.bnb_budget == 1000);

  CHECK_THROWS_WITH_AS(parse_experiment_config("{"), doctest::Contains("parse_error"),
                       Error);
  CHECK_THROWS_AS(parse_experiment_config(R"({"objectives": ["bogus"]})"), Error);
  CHECK_THROWS_AS(parse_experiment_config(R"({"trials": 0})"), Error);
}

TEST_CASE("experiment CSV shape") {
  ExperimentConfig config;
  config.n = 3;
  config.m = 4;
  config.agent_cap = CapRange{0, 3};
  config.item_cap = CapRange{1, 1};
  config.phis = {0.25};
  config.trials = 2;
  config.objectives = {"rm"};
  config.notions = {"nef1"};
  ExperimentResult result = run_experiment(config);
  std::string csv = result.to_csv();
  CHECK(csv.rfind("phi,trial,objective,notion,fraction,welfare,runtime_ms,status\n",
                  0) == 0);
  CHECK(csv.find("0.25,0,rm,nef1,") != std::string::npos);
  CHECK(csv.find("0.25,mean,rm,nef1,") != std::string::npos);
  CHECK(csv.find("0.25,std,rm,nef1,") != std::string::npos);
}
