// fairalloc: solve, audit, and experiment with welfare-constrained fair
// allocation under two-sided capacity constraints.
//
// Exit codes: 0 success, 2 parse/validation/config errors, 3 search budget
// exhausted. Errors go to stderr as "error: <category>: <message>".
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fairalloc/crr.hpp"
#include "fairalloc/fairness.hpp"
#include "fairalloc/io.hpp"
#include "fairalloc/model.hpp"
#include "fairalloc/welfare.hpp"

namespace {

using namespace fairalloc;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::parse_error, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::parse_error, "cannot write '" + path + "'");
  out << content;
}

std::optional<SignMode> sign_mode_from_flag(const std::string& flag) {
  if (flag == "positive") return SignMode::positive;
  if (flag == "negative") return SignMode::negative;
  if (flag == "off" || flag == "auto") return std::nullopt;
  throw Error(ErrorCode::invalid_argument,
              "--nef-sign must be positive, negative, off, or auto");
}

struct GoalSpec {
  bool crr = false;          // run W-CRR rather than the bare optimizer
  GoalKind kind = GoalKind::null;
  double threshold = 0.0;
};

GoalSpec parse_goal(const std::string& name) {
  GoalSpec spec;
  if (name == "null") {
    spec.crr = true;
    spec.kind = GoalKind::null;
  } else if (name == "um") {
    spec.kind = GoalKind::utilitarian_max;
  } else if (name == "um-crr") {
    spec.crr = true;
    spec.kind = GoalKind::utilitarian_max;
  } else if (name == "rm") {
    spec.kind = GoalKind::rank_max;
  } else if (name == "rm-crr") {
    spec.crr = true;
    spec.kind = GoalKind::rank_max;
  } else if (name.rfind("um-threshold:", 0) == 0) {
    spec.crr = true;
    spec.kind = GoalKind::utilitarian_threshold;
    try {
      spec.threshold = std::stod(name.substr(13));
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument,
                  "um-threshold needs a numeric value, e.g. um-threshold:40");
    }
  } else if (name == "nash" || name == "nash-crr") {
    spec.crr = name == "nash-crr";
    spec.kind = GoalKind::nash_max;
  } else if (name == "egal" || name == "egal-crr") {
    spec.crr = name == "egal-crr";
    spec.kind = GoalKind::egal_max;
  } else if (name == "lsowa" || name == "lsowa-crr") {
    spec.crr = name == "lsowa-crr";
    spec.kind = GoalKind::lsowa_max;
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown goal '" + name + "'");
  }
  return spec;
}

void print_summary(std::ostream& out, const Instance& inst, const Allocation& alloc,
                   std::optional<SignMode> mode) {
  auto report = pairwise_report(inst, alloc, mode);  // validates completeness
  out << "welfare utilitarian " << utilitarian_welfare(inst, alloc) << "\n";
  out << "welfare nash " << nash_welfare(inst, alloc) << "\n";
  out << "welfare egalitarian " << egalitarian_welfare(inst, alloc) << "\n";
  out << "welfare lsowa " << lsowa_welfare(inst, alloc) << "\n";
  out << "welfare rank " << to_string(rank_vector(inst, alloc)) << "\n";
  for (const char* notion : {"ef", "ef1", "nef", "nef1", "prop1"}) {
    auto fraction = report.fraction(notion);
    out << "fairness " << notion << ' ';
    if (fraction)
      out << *fraction;
    else
      out << "na";
    out << "\n";
  }
}

int cmd_solve(const std::string& instance_path, const std::string& goal_name,
              const std::string& out_path, const std::string& trace_path,
              const std::string& nef_sign, long long budget) {
  Instance inst = parse_instance(read_file(instance_path));
  GoalSpec spec = parse_goal(goal_name);
  Allocation alloc;
  if (spec.crr) {
    WelfareGoal goal = WelfareGoal::make(inst, spec.kind, spec.threshold, budget);
    CrrResult result = w_crr(inst, goal);
    alloc = std::move(result.allocation);
    if (!trace_path.empty()) write_file(trace_path, trace_to_text(result.trace));
  } else {
    switch (spec.kind) {
      case GoalKind::utilitarian_max:
        alloc = max_utilitarian(inst, Allocation(inst.n)).allocation;
        break;
      case GoalKind::rank_max:
        alloc = max_rank(inst, Allocation(inst.n)).allocation;
        break;
      default: {
        Objective objective = spec.kind == GoalKind::nash_max ? Objective::nash
                              : spec.kind == GoalKind::egal_max
                                  ? Objective::egalitarian
                                  : Objective::lsowa;
        auto result = exact_baseline(inst, objective, budget);
        if (!result.exact)
          throw Error(ErrorCode::budget_exceeded,
                      "baseline search budget exhausted; raise --bnb-budget");
        alloc = std::move(result.allocation);
        break;
      }
    }
  }

  std::string serialized = serialize_allocation(alloc);
  if (out_path.empty())
    std::cout << serialized;
  else
    write_file(out_path, serialized);
  print_summary(std::cout, inst, alloc, sign_mode_from_flag(nef_sign));
  return 0;
}

int cmd_evaluate(const std::string& instance_path, const std::string& allocation_path,
                 const std::string& out_path, const std::string& nef_sign) {
  Instance inst = parse_instance(read_file(instance_path));
  Allocation alloc = parse_allocation(read_file(allocation_path), inst.n);
  if (!is_feasible_partial(inst, alloc))
    throw Error(ErrorCode::invalid_argument,
                "allocation violates the instance's upper capacities");
  auto mode = sign_mode_from_flag(nef_sign);
  print_summary(std::cout, inst, alloc, mode);
  if (!out_path.empty()) {
    auto report = pairwise_report(inst, alloc, mode);
    write_file(out_path, report.to_csv(instance_path, "evaluate"));
  }
  return 0;
}

int cmd_generate(int n, int m, double phi, std::uint64_t seed,
                 std::pair<int, int> agent_cap, std::pair<int, int> item_cap,
                 const std::string& preflib_path, int preflib_items,
                 const std::string& out_path) {
  Instance inst;
  if (!preflib_path.empty()) {
    auto parsed = parse_preflib(read_file(preflib_path),
                                preflib_items > 0 ? std::optional<int>(preflib_items)
                                                  : std::nullopt);
    inst = instance_from_profile(std::move(parsed.profile),
                                 CapRange{agent_cap.first, agent_cap.second},
                                 CapRange{item_cap.first, item_cap.second});
  } else {
    inst = instance_from_profile(mallows_profile(n, m, phi, seed),
                                 CapRange{agent_cap.first, agent_cap.second},
                                 CapRange{item_cap.first, item_cap.second});
  }
  std::string serialized = serialize_instance(inst);
  if (out_path.empty())
    std::cout << serialized;
  else
    write_file(out_path, serialized);
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path,
                   int jobs, bool timing) {
  ExperimentConfig config = parse_experiment_config(read_file(config_path));
  ExperimentResult result = run_experiment(config, jobs, timing);
  std::string csv = result.to_csv();
  if (out_path.empty())
    std::cout << csv;
  else
    write_file(out_path, csv);
  return 0;
}

int cmd_trace(const std::string& instance_path, const std::string& goal_name,
              long long budget) {
  Instance inst = parse_instance(read_file(instance_path));
  GoalSpec spec = parse_goal(goal_name);
  WelfareGoal goal = WelfareGoal::make(inst, spec.kind, spec.threshold, budget);
  CrrResult result = w_crr(inst, goal);
  std::cout << trace_to_text(result.trace);
  std::cout << "# completion queries: " << result.completion_queries << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fair allocation engine: constrained round robin with welfare goals"};
  app.require_subcommand(1);

  std::string instance_path, allocation_path, out_path, trace_path, config_path;
  std::string goal_name = "um-crr";
  std::string nef_sign = "auto";
  long long budget = fairalloc::kDefaultBnbBudget;
  int jobs = 1;
  bool timing = false;
  int gen_n = 2, gen_m = 3, preflib_items = 0;
  double gen_phi = 0.0;
  std::uint64_t gen_seed = 0;
  std::pair<int, int> agent_cap{0, 1 << 20}, item_cap{1, 1};
  std::string preflib_path;

  auto* solve = app.add_subcommand("solve", "compute an allocation for a welfare goal");
  solve->add_option("--instance", instance_path, "instance file")->required();
  solve->add_option("--goal", goal_name,
                    "null|um|um-crr|rm|rm-crr|um-threshold:T|nash|egal|lsowa"
                    " (plus nash-crr|egal-crr|lsowa-crr)");
  solve->add_option("--out", out_path, "allocation output file (default stdout)");
  solve->add_option("--trace", trace_path, "write the CRR trace log here");
  solve->add_option("--nef-sign", nef_sign, "positive|negative|off|auto");
  solve->add_option("--bnb-budget", budget, "branch-and-bound node budget");

  auto* evaluate = app.add_subcommand("evaluate", "audit an allocation file");
  evaluate->add_option("--instance", instance_path, "instance file")->required();
  evaluate->add_option("--allocation", allocation_path, "allocation file")->required();
  evaluate->add_option("--out", out_path, "fairness report CSV output");
  evaluate->add_option("--nef-sign", nef_sign, "positive|negative|off|auto");

  auto* generate = app.add_subcommand("generate", "write a synthetic or converted instance");
  generate->add_option("--n", gen_n, "agents");
  generate->add_option("--m", gen_m, "items");
  generate->add_option("--phi", gen_phi, "Mallows dispersion in [0,1]");
  generate->add_option("--seed", gen_seed, "RNG seed");
  generate->add_option("--agent-cap", agent_cap, "agent capacity interval lo hi");
  generate->add_option("--item-cap", item_cap, "item capacity interval lo hi");
  generate->add_option("--from-preflib", preflib_path, "convert a PrefLib-style file");
  generate->add_option("--items", preflib_items, "item count for PrefLib conversion");
  generate->add_option("--out", out_path, "instance output file (default stdout)");

  auto* experiment = app.add_subcommand("experiment", "run a phi-sweep experiment");
  experiment->add_option("--config", config_path, "JSON config file")->required();
  experiment->add_option("--out", out_path, "results CSV output (default stdout)");
  experiment->add_option("--jobs", jobs, "parallel workers");
  experiment->add_flag("--timing", timing, "record wall-clock runtimes (breaks byte determinism)");

  auto* trace = app.add_subcommand("trace", "print the CRR pick/drop trace");
  trace->add_option("--instance", instance_path, "instance file")->required();
  trace->add_option("--goal", goal_name, "welfare goal (as in solve)");
  trace->add_option("--bnb-budget", budget, "branch-and-bound node budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve)
      return cmd_solve(instance_path, goal_name, out_path, trace_path, nef_sign, budget);
    if (*evaluate)
      return cmd_evaluate(instance_path, allocation_path, out_path, nef_sign);
    if (*generate)
      return cmd_generate(gen_n, gen_m, gen_phi, gen_seed, agent_cap, item_cap,
                          preflib_path, preflib_items, out_path);
    if (*experiment) return cmd_experiment(config_path, out_path, jobs, timing);
    if (*trace) return cmd_trace(instance_path, goal_name, budget);
  } catch (const fairalloc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == fairalloc::ErrorCode::budget_exceeded ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
