#include "fairalloc/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fairalloc {

std::optional<SignMode> detect_sign(const Instance& inst) {
  bool any_pos = false, any_neg = false;
  for (const auto& row : inst.utilities)
    for (double u : row) {
      if (u > 0.0) any_pos = true;
      if (u < 0.0) any_neg = true;
    }
  if (any_pos && any_neg) return std::nullopt;
  return any_neg ? SignMode::negative : SignMode::positive;
}

namespace {

std::vector<int> sorted_ranks(const Instance& inst, int agent,
                              const std::vector<int>& bundle) {
  std::vector<int> ranks;
  ranks.reserve(bundle.size());
  for (int item : bundle) ranks.push_back(inst.rank_of(agent, item));
  std::sort(ranks.begin(), ranks.end());
  return ranks;
}

SignMode require_sign(const Instance& inst) {
  auto mode = detect_sign(inst);
  if (!mode)
    throw Error(ErrorCode::unsupported_sign_mode,
                "necessary checks need all-positive or all-negative utilities");
  return *mode;
}

}  // namespace

bool rs_dominates(const Instance& inst, int agent, const std::vector<int>& a,
                  const std::vector<int>& b) {
  if (a.size() < b.size()) return false;
  auto ra = sorted_ranks(inst, agent, a);
  auto rb = sorted_ranks(inst, agent, b);
  // Matching the k best of a against the k best of b is the best possible
  // injection; rank indices grow as preference falls.
  for (size_t k = 0; k < rb.size(); ++k)
    if (ra[k] > rb[k]) return false;
  return true;
}

bool rs_dominates_negative(const Instance& inst, int agent, const std::vector<int>& a,
                           const std::vector<int>& b) {
  if (a.size() > b.size()) return false;
  auto ra = sorted_ranks(inst, agent, a);
  auto rb = sorted_ranks(inst, agent, b);
  // Tail-aligned: a's worst item must find a weakly worse partner in b, and
  // so on down; b's unmatched (best) items only add negative utility.
  size_t offset = rb.size() - ra.size();
  for (size_t k = 0; k < ra.size(); ++k)
    if (ra[k] > rb[k + offset]) return false;
  return true;
}

bool check_ef(const Instance& inst, const Allocation& alloc, int i, int j) {
  return bundle_utility(inst, i, alloc.bundle(i)) >=
         bundle_utility(inst, i, alloc.bundle(j));
}

bool check_ef1(const Instance& inst, const Allocation& alloc, int i, int j) {
  double own = bundle_utility(inst, i, alloc.bundle(i));
  double theirs = bundle_utility(inst, i, alloc.bundle(j));
  if (own >= theirs) return true;
  for (int item : alloc.bundle(j))
    if (own >= theirs - inst.utility(i, item)) return true;
  for (int item : alloc.bundle(i))
    if (own - inst.utility(i, item) >= theirs) return true;
  return false;
}

bool check_nef(const Instance& inst, const Allocation& alloc, int i, int j,
               SignMode mode) {
  if (mode == SignMode::positive)
    return rs_dominates(inst, i, alloc.bundle(i), alloc.bundle(j));
  return rs_dominates_negative(inst, i, alloc.bundle(i), alloc.bundle(j));
}

bool check_nef1(const Instance& inst, const Allocation& alloc, int i, int j,
                SignMode mode) {
  if (check_nef(inst, alloc, i, j, mode)) return true;
  const auto& own = alloc.bundle(i);
  const auto& theirs = alloc.bundle(j);
  std::vector<int> reduced;
  for (int removed : theirs) {
    reduced.clear();
    for (int item : theirs)
      if (item != removed) reduced.push_back(item);
    bool ok = mode == SignMode::positive
                  ? rs_dominates(inst, i, own, reduced)
                  : rs_dominates_negative(inst, i, own, reduced);
    if (ok) return true;
  }
  for (int removed : own) {
    reduced.clear();
    for (int item : own)
      if (item != removed) reduced.push_back(item);
    bool ok = mode == SignMode::positive
                  ? rs_dominates(inst, i, reduced, theirs)
                  : rs_dominates_negative(inst, i, reduced, theirs);
    if (ok) return true;
  }
  return false;
}

bool check_nef(const Instance& inst, const Allocation& alloc, int i, int j) {
  return check_nef(inst, alloc, i, j, require_sign(inst));
}

bool check_nef1(const Instance& inst, const Allocation& alloc, int i, int j) {
  return check_nef1(inst, alloc, i, j, require_sign(inst));
}

bool check_prop1(const Instance& inst, const Allocation& alloc, int i) {
  double total = 0.0;
  for (int o = 0; o < inst.m; ++o) total += inst.utility(i, o);
  double share = total / inst.n;
  double own = bundle_utility(inst, i, alloc.bundle(i));
  if (own >= share) return true;
  for (int o = 0; o < inst.m; ++o)
    if (!alloc.holds(i, o) && own + inst.utility(i, o) >= share) return true;
  for (int item : alloc.bundle(i))
    if (own - inst.utility(i, item) >= share) return true;
  return false;
}

std::optional<double> FairnessReport::fraction(const std::string& notion) const {
  if (notion == "ef") return ef_fraction;
  if (notion == "ef1") return ef1_fraction;
  if (notion == "nef") return nef_fraction;
  if (notion == "nef1") return nef1_fraction;
  if (notion == "prop1") return prop1_fraction;
  return std::nullopt;
}

std::string FairnessReport::to_csv(const std::string& instance_id,
                                   const std::string& objective, bool header) const {
  std::ostringstream out;
  if (header) out << "instance,objective,notion,fraction\n";
  const char* notions[] = {"ef", "ef1", "nef", "nef1", "prop1"};
  for (const char* notion : notions) {
    out << instance_id << ',' << objective << ',' << notion << ',';
    auto f = fraction(notion);
    if (f) {
      char buffer[32];
      std::snprintf(buffer, sizeof(buffer), "%.6f", *f);
      out << buffer;
    } else {
      out << "na";
    }
    out << '\n';
  }
  return out.str();
}

FairnessReport pairwise_report(const Instance& inst, const Allocation& alloc,
                               std::optional<SignMode> mode) {
  if (!is_complete(inst, alloc))
    throw Error(ErrorCode::incomplete_allocation,
                "pairwise report requires a complete allocation");
  if (!mode) mode = detect_sign(inst);

  FairnessReport report;
  report.n = inst.n;
  long long ef_count = 0, ef1_count = 0, nef_count = 0, nef1_count = 0;
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      PairFlags flags;
      flags.i = i;
      flags.j = j;
      flags.ef = check_ef(inst, alloc, i, j);
      flags.ef1 = check_ef1(inst, alloc, i, j);
      if (mode) {
        flags.nef = check_nef(inst, alloc, i, j, *mode);
        flags.nef1 = check_nef1(inst, alloc, i, j, *mode);
      }
      ef_count += flags.ef;
      ef1_count += flags.ef1;
      nef_count += flags.nef.value_or(false);
      nef1_count += flags.nef1.value_or(false);
      report.pairs.push_back(flags);
    }
  }
  long long prop1_count = 0;
  report.prop1.resize(static_cast<size_t>(inst.n));
  for (int i = 0; i < inst.n; ++i) {
    bool ok = check_prop1(inst, alloc, i);
    report.prop1[static_cast<size_t>(i)] = ok;
    prop1_count += ok;
  }

  const long long num_pairs = static_cast<long long>(inst.n) * (inst.n - 1);
  auto as_fraction = [&](long long count) {
    return num_pairs == 0 ? 1.0
                          : static_cast<double>(count) / static_cast<double>(num_pairs);
  };
  report.ef_fraction = as_fraction(ef_count);
  report.ef1_fraction = as_fraction(ef1_count);
  if (mode) {
    report.nef_fraction = as_fraction(nef_count);
    report.nef1_fraction = as_fraction(nef1_count);
  }
  report.prop1_fraction = static_cast<double>(prop1_count) / inst.n;
  return report;
}

}  // namespace fairalloc
