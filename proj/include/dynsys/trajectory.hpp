#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynsys/sysdef.hpp"

namespace dynsys {

struct Limits {
  std::uint64_t max_steps = 1'000'000;
  Nat max_value = Nat{static_cast<u128>(1) << 127};
  // Exact recurrence detection keeps a value set up to this many entries,
  // then switches to Brent's algorithm (still exact, constant memory).
  std::uint64_t recurrence_cap = std::uint64_t{1} << 22;
};

enum class RootKind : std::uint8_t {
  FixedPoint,
  Cycle,
  ExceededStepBound,
  ExceededValueBound,
  LeftDomain,
  // The system is partial at this value: no rule applied. Reported as its
  // own class so guarded sub-maps stay honest.
  NoApplicableRule,
};

const char* root_kind_name(RootKind k);

struct RootClass {
  RootKind kind = RootKind::FixedPoint;
  // FixedPoint: the fixed value. LeftDomain: the value outside the domain.
  // NoApplicableRule: the stuck value. ExceededValueBound: the first value
  // over the bound when representable.
  Nat value;
  // Cycle only: members in trajectory order starting at the minimal member;
  // length >= 2 (a length-1 repeat is a FixedPoint).
  std::vector<Nat> cycle;

  bool converged() const { return kind == RootKind::FixedPoint || kind == RootKind::Cycle; }
  bool operator==(const RootClass& o) const {
    return kind == o.kind && value == o.value && cycle == o.cycle;
  }
  std::string str() const;
};

struct TrajectoryRecord {
  Nat seed;
  // values[0] = seed, values[i+1] = f(values[i]); recording may stop early
  // under the recurrence cap, iteration continues exactly.
  std::vector<Nat> values;
  RootClass root;
  std::uint64_t steps_to_root = 0;            // first cycle entry / fixed point / event
  std::optional<std::uint64_t> total_stop;    // steps to first reach ~n (or 1 if none declared)
  Nat max_excursion;
};

/// Iterates from an admitted seed until a fixed point, an exactly detected
/// cycle, a limit, a domain exit, or a stuck value.
TrajectoryRecord trace(const SystemDef& sys, Nat seed, const Limits& limits = {});

/// Classifies an observed value sequence whose last element closes a repeat:
/// (..., x, ..., x) is a cycle (canonicalized to start at the minimal
/// member), (..., x, x) a fixed point. Returns nullopt when the observation
/// is not yet closed.
std::optional<RootClass> classify_root(std::span<const Nat> observed);

struct DescentReport {
  bool applicable = true;        // false when no fixed point is declared
  std::string reason;
  bool pass = false;
  std::optional<std::pair<Nat, Nat>> witness;  // first (n, f(n) >= n) ascending
  std::vector<Nat> no_rule;       // admitted values where no rule applied
  std::vector<Nat> left_domain;   // admitted values whose successor leaves the domain
  std::vector<Nat> limit_hit;     // admitted values whose step hit an evaluation limit
};

/// Checks n' < n for every admitted n in [lo, hi] with n above the declared
/// fixed point. Values where the (partial) map is undefined are listed
/// separately and do not count as witnesses.
DescentReport descent_check(const SystemDef& sys, Nat lo, Nat hi);

struct SweepRootTally {
  RootClass root;
  std::uint64_t count = 0;
};

struct SweepRecordEntry {
  Nat seed;
  std::optional<std::uint64_t> total_stop;
  Nat max_excursion;
};

struct SeedOutcome {
  RootClass root;
  std::uint64_t steps_to_root = 0;
  std::optional<std::uint64_t> total_stop;
  Nat max_excursion;
};

struct SweepOptions {
  Limits limits;
  int jobs = 1;
  bool collect_records = true;
  // Invoked once per admitted seed in ascending order during reporting;
  // lets exporters stream large ranges without buffering per-seed state.
  std::function<void(Nat seed, const SeedOutcome&)> on_seed;
};

struct SweepReport {
  Nat lo, hi;
  std::uint64_t admitted_count = 0;
  std::vector<SweepRootTally> tallies;        // sorted canonically
  std::vector<Nat> non_converged;             // seeds not reaching a fixed point or cycle
  std::vector<SweepRecordEntry> records;      // running record-breakers, ascending seeds
  std::chrono::duration<double> elapsed{0};
  // Per-seed outcomes in seed order for admitted seeds; populated only when
  // the caller asks (per_seed flag below), used by exporters and tests.
  std::vector<std::pair<Nat, SeedOutcome>> per_seed;
};

/// Classifies every admitted seed in [lo, hi]. Memoization never changes
/// results: each seed's outcome equals an independent trace at the same
/// limits. Workers share the memo table; scheduling cannot affect results.
SweepReport sweep(const SystemDef& sys, Nat lo, Nat hi, const SweepOptions& opts = {},
                  bool per_seed = false);

}  // namespace dynsys
