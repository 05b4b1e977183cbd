// Instance and allocation text formats, PrefLib-style profile ingestion,
// Mallows preference generation, and the experiment driver with CSV output.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairalloc/model.hpp"

namespace fairalloc {

// Instance file: UTF-8 text, `#` comments, one directive per line:
//   agents N / items M / scoring borda / agentcap i lo hi / itemcap o lo hi
//   pref i: c1,{c2,c3},...        (0-based item indices, best class first)
//   util i: v1,...,vM             (all agents or none; excludes `scoring`)
// Omitted caps default to [0, M] for agents and [1, 1] for items.
Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& inst);

// Allocation file: one line per agent, `i: o_a o_b ...`; agents with empty
// bundles may be omitted.
Allocation parse_allocation(const std::string& text, int n);
std::string serialize_allocation(const Allocation& alloc);

// PrefLib-style weak orders with ties: `count: alt[,alt|,{alt,...}]...`,
// alternatives 1-based. A count of k expands to k identical agents.
// Alternatives an agent leaves unranked form a trailing least-preferred
// class. `num_items` pins m; otherwise the largest mentioned alternative
// defines it.
struct PreflibProfile {
  int m = 0;
  Profile profile;
};
PreflibProfile parse_preflib(const std::string& text,
                             std::optional<int> num_items = std::nullopt);

// Uniform-capacity instance from a parsed profile with Borda utilities.
Instance instance_from_profile(Profile profile, CapRange agent_cap, CapRange item_cap);

struct MallowsConfig {
  double phi = 0.0;
  std::vector<int> reference;  // permutation of 0..m-1
  std::uint64_t seed = 0;
};

class Rng;

// Repeated-insertion sampling: the item at reference position i (1-based)
// inserts at position j in {1..i} with probability phi^(i-j) / sum. phi = 0
// reproduces the reference; phi = 1 is uniform over permutations.
std::vector<int> mallows_sample(double phi, const std::vector<int>& reference, Rng& rng);

// n agents, each an independent Mallows draw around the identity reference,
// as a strict profile (singleton classes).
Profile mallows_profile(int n, int m, double phi, std::uint64_t seed);

struct ExperimentConfig {
  int n = 10;
  int m = 20;
  CapRange agent_cap{3, 6};
  CapRange item_cap{3, 4};
  std::vector<double> phis{0.0, 0.25, 0.5, 0.75, 0.95};
  int trials = 25;
  std::vector<std::string> objectives{"um", "um-crr", "rm", "rm-crr",
                                      "nash", "lsowa", "egal"};
  std::vector<std::string> notions{"nef1"};
  std::uint64_t seed = 42;
  long long bnb_budget = 200'000;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);

struct ResultRow {
  double phi = 0.0;
  int trial = 0;
  std::string objective;
  std::string notion;
  std::optional<double> fraction;
  std::optional<double> welfare;
  double runtime_ms = 0.0;
  std::string status = "ok";
};

struct AggregateRow {
  double phi = 0.0;
  std::string objective;
  std::string notion;
  double mean = 0.0;
  double stddev = 0.0;
  int samples = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;  // per (phi, objective, notion)

  // Columns: phi,trial,objective,notion,fraction,welfare,runtime_ms,status.
  // Aggregate rows carry "mean"/"std" in the trial column. Byte-identical
  // across reruns and job counts for a fixed seed (runtimes are written as 0
  // unless timing was requested).
  std::string to_csv() const;
};

// One run per (phi, trial): sample a Mallows instance, solve every configured
// objective, evaluate the pairwise report, emit one row per notion. Per-run
// failures become rows with status != ok and the run continues.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1,
                                bool timing = false);

}  // namespace fairalloc
