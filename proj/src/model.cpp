#include "fairalloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairalloc/welfare.hpp"

namespace fairalloc {

bool Allocation::holds(int agent, int item) const {
  const auto& b = bundles[static_cast<size_t>(agent)];
  return std::binary_search(b.begin(), b.end(), item);
}

void Allocation::add(int agent, int item) {
  auto& b = bundles[static_cast<size_t>(agent)];
  auto it = std::lower_bound(b.begin(), b.end(), item);
  if (it != b.end() && *it == item)
    throw Error(ErrorCode::invalid_argument,
                "agent " + std::to_string(agent) + " already holds item " +
                    std::to_string(item));
  b.insert(it, item);
}

void Allocation::remove(int agent, int item) {
  auto& b = bundles[static_cast<size_t>(agent)];
  auto it = std::lower_bound(b.begin(), b.end(), item);
  if (it != b.end() && *it == item) b.erase(it);
}

std::vector<int> Allocation::item_counts(int m) const {
  std::vector<int> counts(static_cast<size_t>(m), 0);
  for (const auto& b : bundles)
    for (int o : b) ++counts[static_cast<size_t>(o)];
  return counts;
}

long long Allocation::total_assignments() const {
  long long total = 0;
  for (const auto& b : bundles) total += static_cast<long long>(b.size());
  return total;
}

bool is_feasible_partial(const Instance& inst, const Allocation& alloc) {
  if (alloc.agents() != inst.n) return false;
  for (int i = 0; i < inst.n; ++i) {
    const auto& b = alloc.bundle(i);
    if (static_cast<int>(b.size()) > inst.agent_caps[static_cast<size_t>(i)].hi)
      return false;
    for (size_t k = 0; k < b.size(); ++k) {
      if (b[k] < 0 || b[k] >= inst.m) return false;
      if (k > 0 && b[k] <= b[k - 1]) return false;  // sorted, no duplicates
    }
  }
  auto counts = alloc.item_counts(inst.m);
  for (int o = 0; o < inst.m; ++o)
    if (counts[static_cast<size_t>(o)] > inst.item_caps[static_cast<size_t>(o)].hi)
      return false;
  return true;
}

bool is_complete(const Instance& inst, const Allocation& alloc) {
  if (!is_feasible_partial(inst, alloc)) return false;
  for (int i = 0; i < inst.n; ++i)
    if (alloc.bundle_size(i) < inst.agent_caps[static_cast<size_t>(i)].lo)
      return false;
  auto counts = alloc.item_counts(inst.m);
  for (int o = 0; o < inst.m; ++o)
    if (counts[static_cast<size_t>(o)] < inst.item_caps[static_cast<size_t>(o)].lo)
      return false;
  return true;
}

bool is_balanced(const Allocation& alloc) {
  if (alloc.agents() == 0) return true;
  int lo = alloc.bundle_size(0), hi = lo;
  for (int i = 1; i < alloc.agents(); ++i) {
    lo = std::min(lo, alloc.bundle_size(i));
    hi = std::max(hi, alloc.bundle_size(i));
  }
  return hi - lo <= 1;
}

long long RankVector::total() const {
  long long sum = 0;
  for (long long c : counts) sum += c;
  return sum;
}

int lex_compare(const RankVector& a, const RankVector& b) {
  size_t len = std::max(a.counts.size(), b.counts.size());
  for (size_t j = 0; j < len; ++j) {
    long long va = j < a.counts.size() ? a.counts[j] : 0;
    long long vb = j < b.counts.size() ? b.counts[j] : 0;
    if (va != vb) return va > vb ? 1 : -1;
  }
  return 0;
}

std::string to_string(const RankVector& rv) {
  std::ostringstream out;
  out << '(';
  for (size_t j = 0; j < rv.counts.size(); ++j) {
    if (j > 0) out << ',';
    out << rv.counts[j];
  }
  out << ')';
  return out.str();
}

std::vector<std::vector<double>> borda_utilities(const Profile& profile, int m) {
  std::vector<std::vector<double>> utilities;
  utilities.reserve(profile.size());
  for (const auto& classes : profile) {
    std::vector<double> u(static_cast<size_t>(m), 0.0);
    int position = 0;  // items ranked strictly above the current class
    for (const auto& cls : classes) {
      int a = position + 1;
      int b = position + static_cast<int>(cls.size());
      // mean of m-a+1 .. m-b+1
      double score = m + 1.0 - (a + b) / 2.0;
      for (int item : cls) u[static_cast<size_t>(item)] = score;
      position = b;
    }
    utilities.push_back(std::move(u));
  }
  return utilities;
}

namespace {

void validate_profile(const Profile& profile, int n, int m) {
  if (static_cast<int>(profile.size()) != n)
    throw Error(ErrorCode::malformed_profile,
                "expected " + std::to_string(n) + " agent profiles, got " +
                    std::to_string(profile.size()));
  for (int i = 0; i < n; ++i) {
    std::vector<bool> seen(static_cast<size_t>(m), false);
    int covered = 0;
    for (const auto& cls : profile[static_cast<size_t>(i)]) {
      if (cls.empty())
        throw Error(ErrorCode::malformed_profile,
                    "agent " + std::to_string(i) + " has an empty equivalence class");
      for (int item : cls) {
        if (item < 0 || item >= m)
          throw Error(ErrorCode::malformed_profile,
                      "agent " + std::to_string(i) + " ranks unknown item " +
                          std::to_string(item));
        if (seen[static_cast<size_t>(item)])
          throw Error(ErrorCode::malformed_profile,
                      "agent " + std::to_string(i) + " ranks item " +
                          std::to_string(item) + " twice");
        seen[static_cast<size_t>(item)] = true;
        ++covered;
      }
    }
    if (covered != m)
      throw Error(ErrorCode::malformed_profile,
                  "agent " + std::to_string(i) + " ranks " + std::to_string(covered) +
                      " of " + std::to_string(m) + " items");
  }
}

}  // namespace

Instance build_instance(Profile profile,
                        std::optional<std::vector<std::vector<double>>> utilities,
                        std::vector<CapRange> agent_caps,
                        std::vector<CapRange> item_caps) {
  Instance inst;
  inst.n = static_cast<int>(profile.size());
  if (inst.n <= 0)
    throw Error(ErrorCode::malformed_profile, "instance needs at least one agent");
  inst.m = 0;
  for (const auto& cls : profile.front()) inst.m += static_cast<int>(cls.size());
  if (inst.m <= 0)
    throw Error(ErrorCode::malformed_profile, "instance needs at least one item");
  validate_profile(profile, inst.n, inst.m);

  inst.profile = std::move(profile);
  for (auto& classes : inst.profile)
    for (auto& cls : classes) std::sort(cls.begin(), cls.end());

  inst.utilities = utilities ? std::move(*utilities)
                             : borda_utilities(inst.profile, inst.m);
  if (static_cast<int>(inst.utilities.size()) != inst.n)
    throw Error(ErrorCode::inconsistent_utilities,
                "utilities given for " + std::to_string(inst.utilities.size()) +
                    " agents, expected " + std::to_string(inst.n));

  // Rank table + utility/profile consistency: equal within a class, strictly
  // decreasing across classes.
  inst.item_rank.assign(static_cast<size_t>(inst.n),
                        std::vector<int>(static_cast<size_t>(inst.m), -1));
  inst.max_classes = 0;
  for (int i = 0; i < inst.n; ++i) {
    const auto& u = inst.utilities[static_cast<size_t>(i)];
    if (static_cast<int>(u.size()) != inst.m)
      throw Error(ErrorCode::inconsistent_utilities,
                  "agent " + std::to_string(i) + " has " + std::to_string(u.size()) +
                      " utilities, expected " + std::to_string(inst.m));
    const auto& classes = inst.profile[static_cast<size_t>(i)];
    inst.max_classes = std::max(inst.max_classes, static_cast<int>(classes.size()));
    double prev = 0.0;
    for (size_t c = 0; c < classes.size(); ++c) {
      double value = u[static_cast<size_t>(classes[c].front())];
      for (int item : classes[c]) {
        if (u[static_cast<size_t>(item)] != value)
          throw Error(ErrorCode::inconsistent_utilities,
                      "agent " + std::to_string(i) +
                          ": items in one equivalence class have different utilities");
        inst.item_rank[static_cast<size_t>(i)][static_cast<size_t>(item)] =
            static_cast<int>(c);
      }
      if (c > 0 && !(value < prev))
        throw Error(ErrorCode::inconsistent_utilities,
                    "agent " + std::to_string(i) +
                        ": utilities do not strictly decrease across classes");
      prev = value;
    }
  }

  if (static_cast<int>(agent_caps.size()) != inst.n)
    throw Error(ErrorCode::infeasible_capacities,
                "expected " + std::to_string(inst.n) + " agent capacity intervals");
  if (static_cast<int>(item_caps.size()) != inst.m)
    throw Error(ErrorCode::infeasible_capacities,
                "expected " + std::to_string(inst.m) + " item capacity intervals");
  // One copy per agent caps the effective upper bounds.
  for (auto& cap : agent_caps) cap.hi = std::min(cap.hi, inst.m);
  for (auto& cap : item_caps) cap.hi = std::min(cap.hi, inst.n);
  for (int i = 0; i < inst.n; ++i) {
    const auto& cap = agent_caps[static_cast<size_t>(i)];
    if (cap.lo < 0 || cap.lo > cap.hi)
      throw Error(ErrorCode::infeasible_capacities,
                  "agent " + std::to_string(i) + " capacity interval [" +
                      std::to_string(cap.lo) + "," + std::to_string(cap.hi) +
                      "] is empty");
  }
  for (int o = 0; o < inst.m; ++o) {
    const auto& cap = item_caps[static_cast<size_t>(o)];
    if (cap.lo < 0 || cap.lo > cap.hi)
      throw Error(ErrorCode::infeasible_capacities,
                  "item " + std::to_string(o) + " capacity interval [" +
                      std::to_string(cap.lo) + "," + std::to_string(cap.hi) +
                      "] is empty");
  }
  inst.agent_caps = std::move(agent_caps);
  inst.item_caps = std::move(item_caps);

  if (!feasible_completion_exists(inst, Allocation(inst.n)))
    throw Error(ErrorCode::infeasible_capacities,
                "no complete feasible allocation exists");
  return inst;
}

double bundle_utility(const Instance& inst, int agent, const std::vector<int>& bundle) {
  double sum = 0.0;
  for (int item : bundle) sum += inst.utility(agent, item);
  return sum;
}

double utilitarian_welfare(const Instance& inst, const Allocation& alloc) {
  double sum = 0.0;
  for (int i = 0; i < inst.n; ++i) sum += bundle_utility(inst, i, alloc.bundle(i));
  return sum;
}

double nash_welfare(const Instance& inst, const Allocation& alloc) {
  double product = 1.0;
  for (int i = 0; i < inst.n; ++i) product *= bundle_utility(inst, i, alloc.bundle(i));
  return product;
}

double egalitarian_welfare(const Instance& inst, const Allocation& alloc) {
  double lowest = bundle_utility(inst, 0, alloc.bundle(0));
  for (int i = 1; i < inst.n; ++i)
    lowest = std::min(lowest, bundle_utility(inst, i, alloc.bundle(i)));
  return lowest;
}

double lsowa_welfare(const Instance& inst, const Allocation& alloc) {
  int owa_k = 1;
  for (const auto& cap : inst.agent_caps) owa_k = std::max(owa_k, cap.hi);
  double total = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    std::vector<double> values;
    values.reserve(alloc.bundle(i).size());
    for (int item : alloc.bundle(i)) values.push_back(inst.utility(i, item));
    std::sort(values.rbegin(), values.rend());
    for (size_t k = 0; k < values.size(); ++k) {
      double weight = static_cast<double>(owa_k - static_cast<int>(k)) / owa_k;
      total += weight * values[k];
    }
  }
  return total;
}

RankVector rank_vector(const Instance& inst, const Allocation& alloc) {
  RankVector rv;
  rv.counts.assign(static_cast<size_t>(inst.max_classes), 0);
  for (int i = 0; i < inst.n; ++i)
    for (int item : alloc.bundle(i))
      ++rv.counts[static_cast<size_t>(inst.rank_of(i, item))];
  return rv;
}

const char* objective_name(Objective objective) {
  switch (objective) {
    case Objective::utilitarian: return "utilitarian";
    case Objective::nash: return "nash";
    case Objective::egalitarian: return "egalitarian";
    case Objective::lsowa: return "lsowa";
    case Objective::rank: return "rank";
  }
  return "unknown";
}

std::optional<Objective> objective_from_name(const std::string& name) {
  if (name == "utilitarian") return Objective::utilitarian;
  if (name == "nash") return Objective::nash;
  if (name == "egalitarian" || name == "egal") return Objective::egalitarian;
  if (name == "lsowa") return Objective::lsowa;
  if (name == "rank") return Objective::rank;
  return std::nullopt;
}

WelfareValue welfare(const Instance& inst, const Allocation& alloc, Objective objective) {
  if (!is_complete(inst, alloc))
    throw Error(ErrorCode::incomplete_allocation,
                "welfare requires a complete allocation");
  switch (objective) {
    case Objective::utilitarian: return utilitarian_welfare(inst, alloc);
    case Objective::nash: return nash_welfare(inst, alloc);
    case Objective::egalitarian: return egalitarian_welfare(inst, alloc);
    case Objective::lsowa: return lsowa_welfare(inst, alloc);
    case Objective::rank: return rank_vector(inst, alloc);
  }
  throw Error(ErrorCode::invalid_argument, "unknown objective");
}

}  // namespace fairalloc
