#include "fairalloc/io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fairalloc/crr.hpp"
#include "fairalloc/fairness.hpp"
#include "fairalloc/rng.hpp"
#include "fairalloc/welfare.hpp"

namespace fairalloc {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& message) {
  throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

int parse_int(const std::string& token, int line) {
  int value = 0;
  auto t = trim(token);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    parse_fail(line, "expected an integer, got '" + t + "'");
  return value;
}

double parse_double(const std::string& token, int line) {
  auto t = trim(token);
  try {
    size_t used = 0;
    double value = std::stod(t, &used);
    if (used != t.size()) parse_fail(line, "expected a number, got '" + t + "'");
    return value;
  } catch (const std::exception&) {
    parse_fail(line, "expected a number, got '" + t + "'");
  }
}

// Parses `c1,{c2,c3},...` into equivalence classes of integer ids.
std::vector<std::vector<int>> parse_class_list(const std::string& spec, int line) {
  std::vector<std::vector<int>> classes;
  size_t pos = 0;
  auto skip_spaces = [&] {
    while (pos < spec.size() && (spec[pos] == ' ' || spec[pos] == '\t')) ++pos;
  };
  auto read_int = [&]() {
    skip_spaces();
    size_t start = pos;
    if (pos < spec.size() && (spec[pos] == '-' || spec[pos] == '+')) ++pos;
    while (pos < spec.size() && std::isdigit(static_cast<unsigned char>(spec[pos])))
      ++pos;
    if (pos == start) parse_fail(line, "expected an item id in preference list");
    return parse_int(spec.substr(start, pos - start), line);
  };
  while (true) {
    skip_spaces();
    if (pos >= spec.size()) parse_fail(line, "trailing comma or empty class");
    if (spec[pos] == '{') {
      ++pos;
      std::vector<int> cls;
      while (true) {
        cls.push_back(read_int());
        skip_spaces();
        if (pos < spec.size() && spec[pos] == ',') {
          ++pos;
          continue;
        }
        break;
      }
      skip_spaces();
      if (pos >= spec.size() || spec[pos] != '}') parse_fail(line, "missing '}'");
      ++pos;
      classes.push_back(std::move(cls));
    } else {
      classes.push_back({read_int()});
    }
    skip_spaces();
    if (pos >= spec.size()) break;
    if (spec[pos] != ',') parse_fail(line, "expected ',' between classes");
    ++pos;
  }
  return classes;
}

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

}  // namespace

Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;

  int n = -1, m = -1;
  bool borda = false;
  std::vector<std::pair<int, CapRange>> agent_caps, item_caps;
  std::vector<std::pair<int, std::vector<std::vector<int>>>> prefs;
  std::vector<std::pair<int, std::vector<double>>> utils;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string stripped = raw;
    if (auto hash = stripped.find('#'); hash != std::string::npos)
      stripped = stripped.substr(0, hash);
    stripped = trim(stripped);
    if (stripped.empty()) continue;

    std::istringstream tokens(stripped);
    std::string keyword;
    tokens >> keyword;
    if (keyword == "agents") {
      tokens >> n;
    } else if (keyword == "items") {
      tokens >> m;
    } else if (keyword == "scoring") {
      std::string rule;
      tokens >> rule;
      if (rule != "borda") parse_fail(line_no, "unknown scoring rule '" + rule + "'");
      borda = true;
    } else if (keyword == "agentcap" || keyword == "itemcap") {
      int id, lo, hi;
      if (!(tokens >> id >> lo >> hi))
        parse_fail(line_no, keyword + " needs: index lo hi");
      (keyword == "agentcap" ? agent_caps : item_caps)
          .push_back({id, CapRange{lo, hi}});
    } else if (keyword == "pref" || keyword == "util") {
      auto colon = stripped.find(':');
      if (colon == std::string::npos) parse_fail(line_no, keyword + " needs ':'");
      int id = parse_int(stripped.substr(keyword.size(), colon - keyword.size()),
                         line_no);
      std::string body = stripped.substr(colon + 1);
      if (keyword == "pref") {
        prefs.push_back({id, parse_class_list(body, line_no)});
      } else {
        std::vector<double> values;
        for (const auto& token : split(body, ','))
          values.push_back(parse_double(token, line_no));
        utils.push_back({id, std::move(values)});
      }
    } else {
      parse_fail(line_no, "unknown directive '" + keyword + "'");
    }
  }

  if (n <= 0 || m <= 0)
    throw Error(ErrorCode::parse_error, "instance needs positive 'agents' and 'items'");
  if (borda && !utils.empty())
    throw Error(ErrorCode::parse_error,
                "'scoring borda' conflicts with explicit util lines");
  if (!utils.empty() && static_cast<int>(utils.size()) != n)
    throw Error(ErrorCode::parse_error, "util lines must cover all agents or none");
  if (static_cast<int>(prefs.size()) != n)
    throw Error(ErrorCode::parse_error,
                "expected " + std::to_string(n) + " pref lines, got " +
                    std::to_string(prefs.size()));

  Profile profile(static_cast<size_t>(n));
  std::vector<bool> have_pref(static_cast<size_t>(n), false);
  for (auto& [id, classes] : prefs) {
    if (id < 0 || id >= n)
      throw Error(ErrorCode::parse_error, "pref for unknown agent " + std::to_string(id));
    if (have_pref[static_cast<size_t>(id)])
      throw Error(ErrorCode::parse_error, "duplicate pref for agent " + std::to_string(id));
    have_pref[static_cast<size_t>(id)] = true;
    profile[static_cast<size_t>(id)] = std::move(classes);
  }

  std::optional<std::vector<std::vector<double>>> utilities;
  if (!utils.empty()) {
    utilities.emplace(static_cast<size_t>(n));
    std::vector<bool> have_util(static_cast<size_t>(n), false);
    for (auto& [id, values] : utils) {
      if (id < 0 || id >= n)
        throw Error(ErrorCode::parse_error, "util for unknown agent " + std::to_string(id));
      if (have_util[static_cast<size_t>(id)])
        throw Error(ErrorCode::parse_error, "duplicate util for agent " + std::to_string(id));
      have_util[static_cast<size_t>(id)] = true;
      (*utilities)[static_cast<size_t>(id)] = std::move(values);
    }
  }

  std::vector<CapRange> acaps(static_cast<size_t>(n), CapRange{0, m});
  for (auto& [id, cap] : agent_caps) {
    if (id < 0 || id >= n)
      throw Error(ErrorCode::parse_error, "agentcap for unknown agent " + std::to_string(id));
    acaps[static_cast<size_t>(id)] = cap;
  }
  std::vector<CapRange> icaps(static_cast<size_t>(m), CapRange{1, 1});
  for (auto& [id, cap] : item_caps) {
    if (id < 0 || id >= m)
      throw Error(ErrorCode::parse_error, "itemcap for unknown item " + std::to_string(id));
    icaps[static_cast<size_t>(id)] = cap;
  }

  return build_instance(std::move(profile), std::move(utilities), std::move(acaps),
                        std::move(icaps));
}

std::string serialize_instance(const Instance& inst) {
  std::ostringstream out;
  out << "agents " << inst.n << "\n";
  out << "items " << inst.m << "\n";
  for (int i = 0; i < inst.n; ++i)
    out << "agentcap " << i << ' ' << inst.agent_caps[static_cast<size_t>(i)].lo << ' '
        << inst.agent_caps[static_cast<size_t>(i)].hi << "\n";
  for (int o = 0; o < inst.m; ++o)
    out << "itemcap " << o << ' ' << inst.item_caps[static_cast<size_t>(o)].lo << ' '
        << inst.item_caps[static_cast<size_t>(o)].hi << "\n";
  for (int i = 0; i < inst.n; ++i) {
    out << "pref " << i << ": ";
    const auto& classes = inst.profile[static_cast<size_t>(i)];
    for (size_t c = 0; c < classes.size(); ++c) {
      if (c > 0) out << ',';
      if (classes[c].size() == 1) {
        out << classes[c].front();
      } else {
        out << '{';
        for (size_t k = 0; k < classes[c].size(); ++k) {
          if (k > 0) out << ',';
          out << classes[c][k];
        }
        out << '}';
      }
    }
    out << "\n";
  }
  for (int i = 0; i < inst.n; ++i) {
    out << "util " << i << ": ";
    const auto& u = inst.utilities[static_cast<size_t>(i)];
    for (int o = 0; o < inst.m; ++o) {
      if (o > 0) out << ',';
      out << format_double(u[static_cast<size_t>(o)]);
    }
    out << "\n";
  }
  return out.str();
}

Allocation parse_allocation(const std::string& text, int n) {
  Allocation alloc(n);
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string stripped = raw;
    if (auto hash = stripped.find('#'); hash != std::string::npos)
      stripped = stripped.substr(0, hash);
    stripped = trim(stripped);
    if (stripped.empty()) continue;
    auto colon = stripped.find(':');
    if (colon == std::string::npos) parse_fail(line_no, "expected 'agent: items...'");
    int agent = parse_int(stripped.substr(0, colon), line_no);
    if (agent < 0 || agent >= n)
      parse_fail(line_no, "unknown agent " + std::to_string(agent));
    std::istringstream items(stripped.substr(colon + 1));
    int item;
    while (items >> item) {
      if (alloc.holds(agent, item))
        parse_fail(line_no, "agent " + std::to_string(agent) + " listed item " +
                                std::to_string(item) + " twice");
      alloc.add(agent, item);
    }
  }
  return alloc;
}

std::string serialize_allocation(const Allocation& alloc) {
  std::ostringstream out;
  for (int i = 0; i < alloc.agents(); ++i) {
    out << i << ':';
    for (int item : alloc.bundle(i)) out << ' ' << item;
    out << "\n";
  }
  return out.str();
}

PreflibProfile parse_preflib(const std::string& text, std::optional<int> num_items) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::vector<std::pair<int, std::vector<std::vector<int>>>> entries;  // count, classes
  int max_alt = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string stripped = raw;
    if (auto hash = stripped.find('#'); hash != std::string::npos)
      stripped = stripped.substr(0, hash);
    stripped = trim(stripped);
    if (stripped.empty()) continue;
    auto colon = stripped.find(':');
    if (colon == std::string::npos) parse_fail(line_no, "expected 'count: prefs'");
    int count = parse_int(stripped.substr(0, colon), line_no);
    if (count <= 0) parse_fail(line_no, "multiplicity must be positive");
    auto classes = parse_class_list(stripped.substr(colon + 1), line_no);
    for (const auto& cls : classes)
      for (int alt : cls) {
        if (alt <= 0)
          parse_fail(line_no, "alternatives are 1-based positive ids");
        max_alt = std::max(max_alt, alt);
      }
    entries.push_back({count, std::move(classes)});
  }
  if (entries.empty())
    throw Error(ErrorCode::parse_error, "no preference lines found");

  int m = num_items.value_or(max_alt);
  if (max_alt > m)
    throw Error(ErrorCode::unknown_alternative,
                "alternative " + std::to_string(max_alt) + " exceeds item count " +
                    std::to_string(m));

  PreflibProfile result;
  result.m = m;
  for (auto& [count, classes] : entries) {
    std::vector<std::vector<int>> converted;
    std::vector<bool> mentioned(static_cast<size_t>(m), false);
    for (auto& cls : classes) {
      std::vector<int> zero_based;
      for (int alt : cls) {
        if (mentioned[static_cast<size_t>(alt - 1)])
          throw Error(ErrorCode::parse_error,
                      "alternative " + std::to_string(alt) + " ranked twice");
        mentioned[static_cast<size_t>(alt - 1)] = true;
        zero_based.push_back(alt - 1);
      }
      converted.push_back(std::move(zero_based));
    }
    std::vector<int> unranked;
    for (int o = 0; o < m; ++o)
      if (!mentioned[static_cast<size_t>(o)]) unranked.push_back(o);
    if (!unranked.empty()) converted.push_back(std::move(unranked));
    for (int k = 0; k < count; ++k) result.profile.push_back(converted);
  }
  return result;
}

Instance instance_from_profile(Profile profile, CapRange agent_cap, CapRange item_cap) {
  int n = static_cast<int>(profile.size());
  int m = 0;
  if (n > 0)
    for (const auto& cls : profile.front()) m += static_cast<int>(cls.size());
  return build_instance(std::move(profile), std::nullopt,
                        std::vector<CapRange>(static_cast<size_t>(n), agent_cap),
                        std::vector<CapRange>(static_cast<size_t>(m), item_cap));
}

std::vector<int> mallows_sample(double phi, const std::vector<int>& reference, Rng& rng) {
  if (phi < 0.0 || phi > 1.0)
    throw Error(ErrorCode::invalid_argument, "phi must lie in [0, 1]");
  const int m = static_cast<int>(reference.size());
  std::vector<int> ranking;
  ranking.reserve(static_cast<size_t>(m));
  std::vector<double> weights;
  for (int i = 1; i <= m; ++i) {
    // weights[j-1] = phi^(i-j), j = 1..i; with 0^0 = 1 so phi = 0 appends.
    weights.assign(static_cast<size_t>(i), 0.0);
    double w = 1.0, total = 0.0;
    for (int j = i; j >= 1; --j) {
      weights[static_cast<size_t>(j - 1)] = w;
      total += w;
      w *= phi;
    }
    double draw = rng.uniform01() * total;
    int position = i;
    double cumulative = 0.0;
    for (int j = 1; j <= i; ++j) {
      cumulative += weights[static_cast<size_t>(j - 1)];
      if (draw < cumulative) {
        position = j;
        break;
      }
    }
    ranking.insert(ranking.begin() + (position - 1),
                   reference[static_cast<size_t>(i - 1)]);
  }
  return ranking;
}

Profile mallows_profile(int n, int m, double phi, std::uint64_t seed) {
  std::vector<int> reference(static_cast<size_t>(m));
  for (int o = 0; o < m; ++o) reference[static_cast<size_t>(o)] = o;
  Rng rng(seed);
  Profile profile;
  profile.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto ranking = mallows_sample(phi, reference, rng);
    std::vector<std::vector<int>> classes;
    classes.reserve(ranking.size());
    for (int item : ranking) classes.push_back({item});
    profile.push_back(std::move(classes));
  }
  return profile;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("config: ") + e.what());
  }
  ExperimentConfig config;
  try {
    if (doc.contains("n")) config.n = doc["n"].get<int>();
    if (doc.contains("m")) config.m = doc["m"].get<int>();
    if (doc.contains("agent_cap")) {
      config.agent_cap.lo = doc["agent_cap"][0].get<int>();
      config.agent_cap.hi = doc["agent_cap"][1].get<int>();
    }
    if (doc.contains("item_cap")) {
      config.item_cap.lo = doc["item_cap"][0].get<int>();
      config.item_cap.hi = doc["item_cap"][1].get<int>();
    }
    if (doc.contains("phis")) config.phis = doc["phis"].get<std::vector<double>>();
    if (doc.contains("trials")) config.trials = doc["trials"].get<int>();
    if (doc.contains("objectives"))
      config.objectives = doc["objectives"].get<std::vector<std::string>>();
    if (doc.contains("notions"))
      config.notions = doc["notions"].get<std::vector<std::string>>();
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("budget")) config.bnb_budget = doc["budget"].get<long long>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("config: ") + e.what());
  }
  if (config.trials < 1)
    throw Error(ErrorCode::invalid_argument, "config: trials must be >= 1");
  const std::vector<std::string> known = {"um",   "um-crr", "rm",  "rm-crr",
                                          "nash", "lsowa",  "egal"};
  for (const auto& objective : config.objectives)
    if (std::find(known.begin(), known.end(), objective) == known.end())
      throw Error(ErrorCode::invalid_argument,
                  "config: unknown objective '" + objective + "'");
  for (const auto& notion : config.notions)
    if (notion != "ef" && notion != "ef1" && notion != "nef" && notion != "nef1" &&
        notion != "prop1")
      throw Error(ErrorCode::invalid_argument, "config: unknown notion '" + notion + "'");
  return config;
}

namespace {

struct SolveOutcome {
  std::optional<Allocation> allocation;
  double runtime_ms = 0.0;
  std::string status = "ok";
};

SolveOutcome solve_objective(const Instance& inst, const std::string& objective,
                             long long budget, bool timing) {
  SolveOutcome outcome;
  auto start = std::chrono::steady_clock::now();
  try {
    if (objective == "um") {
      outcome.allocation = max_utilitarian(inst, Allocation(inst.n)).allocation;
    } else if (objective == "rm") {
      outcome.allocation = max_rank(inst, Allocation(inst.n)).allocation;
    } else if (objective == "um-crr") {
      auto goal = WelfareGoal::make(inst, GoalKind::utilitarian_max);
      outcome.allocation = w_crr(inst, goal).allocation;
    } else if (objective == "rm-crr") {
      auto goal = WelfareGoal::make(inst, GoalKind::rank_max);
      outcome.allocation = w_crr(inst, goal).allocation;
    } else {
      Objective kind = objective == "nash"   ? Objective::nash
                       : objective == "egal" ? Objective::egalitarian
                                             : Objective::lsowa;
      auto result = exact_baseline(inst, kind, budget);
      outcome.allocation = std::move(result.allocation);
      if (!result.exact) outcome.status = "budget";
    }
  } catch (const Error& e) {
    outcome.status = e.code() == ErrorCode::budget_exceeded ? "budget" : "error";
  }
  if (timing) {
    auto end = std::chrono::steady_clock::now();
    outcome.runtime_ms =
        std::chrono::duration<double, std::milli>(end - start).count();
  }
  return outcome;
}

std::string csv_number(double value, const char* format) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, value);
  return buffer;
}

}  // namespace

std::string ExperimentResult::to_csv() const {
  std::ostringstream out;
  out << "phi,trial,objective,notion,fraction,welfare,runtime_ms,status\n";
  for (const auto& row : rows) {
    out << csv_number(row.phi, "%.2f") << ',' << row.trial << ',' << row.objective
        << ',' << row.notion << ',';
    if (row.fraction) out << csv_number(*row.fraction, "%.6f");
    out << ',';
    if (row.welfare) out << csv_number(*row.welfare, "%.6f");
    out << ',' << csv_number(row.runtime_ms, "%.3f") << ',' << row.status << '\n';
  }
  for (const auto& agg : aggregates) {
    out << csv_number(agg.phi, "%.2f") << ",mean," << agg.objective << ','
        << agg.notion << ',' << csv_number(agg.mean, "%.6f") << ",,," << "ok\n";
    out << csv_number(agg.phi, "%.2f") << ",std," << agg.objective << ','
        << agg.notion << ',' << csv_number(agg.stddev, "%.6f") << ",,," << "ok\n";
  }
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs, bool timing) {
  const size_t num_phis = config.phis.size();
  const size_t per_run = config.objectives.size() * config.notions.size();
  const size_t num_runs = num_phis * static_cast<size_t>(config.trials);

  ExperimentResult result;
  result.rows.assign(num_runs * per_run, ResultRow{});

  auto run_one = [&](size_t phi_idx, int trial) {
    const double phi = config.phis[phi_idx];
    std::uint64_t seed = mix_seed(mix_seed(config.seed, phi_idx),
                                  static_cast<std::uint64_t>(trial));
    size_t base = (phi_idx * static_cast<size_t>(config.trials) +
                   static_cast<size_t>(trial)) *
                  per_run;

    std::optional<Instance> inst;
    std::string build_status = "ok";
    try {
      inst = instance_from_profile(mallows_profile(config.n, config.m, phi, seed),
                                   config.agent_cap, config.item_cap);
    } catch (const Error&) {
      build_status = "infeasible";
    }

    for (size_t obj_idx = 0; obj_idx < config.objectives.size(); ++obj_idx) {
      const auto& objective = config.objectives[obj_idx];
      SolveOutcome outcome;
      std::optional<FairnessReport> report;
      std::optional<double> welfare_value;
      if (!inst) {
        outcome.status = build_status;
      } else {
        outcome = solve_objective(*inst, objective, config.bnb_budget, timing);
        if (outcome.allocation && is_complete(*inst, *outcome.allocation)) {
          report = pairwise_report(*inst, *outcome.allocation);
          welfare_value = utilitarian_welfare(*inst, *outcome.allocation);
        } else if (outcome.status == "ok") {
          outcome.status = "error";
        }
      }
      for (size_t notion_idx = 0; notion_idx < config.notions.size(); ++notion_idx) {
        ResultRow& row =
            result.rows[base + obj_idx * config.notions.size() + notion_idx];
        row.phi = phi;
        row.trial = trial;
        row.objective = objective;
        row.notion = config.notions[notion_idx];
        row.runtime_ms = outcome.runtime_ms;
        row.status = outcome.status;
        row.welfare = welfare_value;
        if (report) row.fraction = report->fraction(row.notion);
      }
    }
  };

  if (jobs <= 1) {
    for (size_t phi_idx = 0; phi_idx < num_phis; ++phi_idx)
      for (int trial = 0; trial < config.trials; ++trial) run_one(phi_idx, trial);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      while (true) {
        size_t task = next.fetch_add(1);
        if (task >= num_runs) break;
        run_one(task / static_cast<size_t>(config.trials),
                static_cast<int>(task % static_cast<size_t>(config.trials)));
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Per-(phi, objective, notion) mean and population standard deviation over
  // the trials that produced a fraction.
  for (size_t phi_idx = 0; phi_idx < num_phis; ++phi_idx) {
    for (const auto& objective : config.objectives) {
      for (const auto& notion : config.notions) {
        double sum = 0.0, sum_sq = 0.0;
        int samples = 0;
        for (const auto& row : result.rows) {
          if (row.phi != config.phis[phi_idx] || row.objective != objective ||
              row.notion != notion || !row.fraction)
            continue;
          sum += *row.fraction;
          sum_sq += *row.fraction * *row.fraction;
          ++samples;
        }
        if (samples == 0) continue;
        AggregateRow agg;
        agg.phi = config.phis[phi_idx];
        agg.objective = objective;
        agg.notion = notion;
        agg.samples = samples;
        agg.mean = sum / samples;
        double variance = std::max(0.0, sum_sq / samples - agg.mean * agg.mean);
        agg.stddev = std::sqrt(variance);
        result.aggregates.push_back(agg);
      }
    }
  }
  return result;
}

}  // namespace fairalloc
