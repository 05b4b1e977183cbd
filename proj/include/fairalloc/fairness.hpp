// Envy-based fairness predicates over complete allocations: EF, EF1, the
// necessary (all-consistent-utilities) variants NEF and NEF1 via the
// responsive set extension, PROP1, and the pairwise-relation fraction report.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairalloc/model.hpp"

namespace fairalloc {

// Sign restriction for the family of consistent utility functions that the
// necessary checks quantify over. Mixed-sign families are refused.
enum class SignMode { positive, negative };

// positive if every utility is >= 0, negative if every utility is <= 0
// (all-zero counts as positive), nullopt when genuinely mixed.
std::optional<SignMode> detect_sign(const Instance& inst);

// Responsive-set dominance of bundle `a` over `b` for `agent`, positive-sign
// semantics: an injection from b into a mapping every item of b to a weakly
// better item of a. Equivalent to u(a) >= u(b) for every consistent positive
// utility function.
bool rs_dominates(const Instance& inst, int agent, const std::vector<int>& a,
                  const std::vector<int>& b);

// Negative-sign counterpart: an injection from a into b mapping every item of
// a to a weakly worse item of b, so u(a) >= u(b) for every consistent
// negative utility function.
bool rs_dominates_negative(const Instance& inst, int agent, const std::vector<int>& a,
                           const std::vector<int>& b);

bool check_ef(const Instance& inst, const Allocation& alloc, int i, int j);
bool check_ef1(const Instance& inst, const Allocation& alloc, int i, int j);
bool check_nef(const Instance& inst, const Allocation& alloc, int i, int j,
               SignMode mode);
bool check_nef1(const Instance& inst, const Allocation& alloc, int i, int j,
                SignMode mode);
// Auto-detected sign; throws Error(unsupported_sign_mode) on mixed utilities.
bool check_nef(const Instance& inst, const Allocation& alloc, int i, int j);
bool check_nef1(const Instance& inst, const Allocation& alloc, int i, int j);
bool check_prop1(const Instance& inst, const Allocation& alloc, int i);

struct PairFlags {
  int i = 0, j = 0;
  bool ef = false, ef1 = false;
  std::optional<bool> nef, nef1;  // nullopt when the sign mode is unsupported
};

struct FairnessReport {
  int n = 0;
  std::vector<PairFlags> pairs;  // all ordered pairs (i, j), i != j
  std::vector<bool> prop1;       // per agent

  // Satisfied fraction over the n(n-1) ordered pairs (prop1: over n agents).
  // nef/nef1 fractions are absent when not evaluated. n = 1 gives 1.0 all
  // around (empty relation set).
  std::optional<double> ef_fraction, ef1_fraction, nef_fraction, nef1_fraction;
  double prop1_fraction = 1.0;

  std::optional<double> fraction(const std::string& notion) const;

  // One row per notion: instance_id,objective,notion,fraction ("na" when a
  // notion was not evaluated).
  std::string to_csv(const std::string& instance_id, const std::string& objective,
                     bool header = true) const;
};

// Runs every pairwise check. `mode` overrides sign auto-detection; when the
// instance is mixed-sign and no override is given, nef/nef1 come back
// unevaluated rather than approximated.
FairnessReport pairwise_report(const Instance& inst, const Allocation& alloc,
                               std::optional<SignMode> mode = std::nullopt);

}  // namespace fairalloc
