#include "dynsys/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace dynsys {

const char* root_kind_name(RootKind k) {
  switch (k) {
    case RootKind::FixedPoint: return "fixed_point";
    case RootKind::Cycle: return "cycle";
    case RootKind::ExceededStepBound: return "exceeded_step_bound";
    case RootKind::ExceededValueBound: return "exceeded_value_bound";
    case RootKind::LeftDomain: return "left_domain";
    case RootKind::NoApplicableRule: return "no_applicable_rule";
  }
  return "?";
}

std::string RootClass::str() const {
  switch (kind) {
    case RootKind::FixedPoint: return "fixed(" + value.str() + ")";
    case RootKind::Cycle: {
      std::string s = "cycle(";
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        if (i) s += ",";
        s += cycle[i].str();
      }
      return s + ")";
    }
    case RootKind::ExceededStepBound: return "step-bound";
    case RootKind::ExceededValueBound: return "value-bound(" + value.str() + ")";
    case RootKind::LeftDomain: return "left-domain(" + value.str() + ")";
    case RootKind::NoApplicableRule: return "no-rule(" + value.str() + ")";
  }
  return "?";
}

namespace {

std::vector<Nat> canonical_cycle(std::vector<Nat> members) {
  std::size_t min_at = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i] < members[min_at]) min_at = i;
  }
  std::rotate(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(min_at),
              members.end());
  return members;
}

// Skips the input admission check; callers guarantee it (trace verifies the
// seed, then every kept successor).
StepResult step_unchecked(const SystemDef& sys, Nat n) {
  for (const ForwardRule& rule : sys.forward) {
    EvalResult g = rule.guard_prog.eval(n.v);
    if (g.status == EvalStatus::Limit) return {StepResult::Kind::Limit, n, false};
    if (g.status != EvalStatus::Ok || g.value == 0) continue;
    EvalResult r = rule.expr_prog.eval(n.v);
    if (r.status == EvalStatus::Limit) return {StepResult::Kind::Limit, n, false};
    if (r.status != EvalStatus::Ok) continue;
    Nat out{r.value};
    if (out == n) return {StepResult::Kind::SelfFixed, n, false};
    return {StepResult::Kind::Next, out, !admits(sys, out)};
  }
  return {StepResult::Kind::NoRule, n, false};
}

struct U128Hash {
  std::size_t operator()(u128 v) const { return NatHash{}(Nat{v}); }
};

}  // namespace

std::optional<RootClass> classify_root(std::span<const Nat> observed) {
  if (observed.size() < 2) return std::nullopt;
  Nat last = observed.back();
  std::size_t idx = observed.size();
  for (std::size_t i = 0; i + 1 < observed.size(); ++i) {
    if (observed[i] == last) {
      idx = i;
      break;
    }
  }
  if (idx == observed.size()) return std::nullopt;
  if (idx == observed.size() - 2) {
    return RootClass{RootKind::FixedPoint, last, {}};
  }
  std::vector<Nat> members(observed.begin() + static_cast<std::ptrdiff_t>(idx),
                           observed.end() - 1);
  return RootClass{RootKind::Cycle, Nat{}, canonical_cycle(std::move(members))};
}

TrajectoryRecord trace(const SystemDef& sys, Nat seed, const Limits& limits) {
  if (!admits(sys, seed)) {
    throw std::domain_error("trace: seed " + seed.str() + " is not admitted by " + sys.name);
  }
  Nat target = sys.fixed_point.value_or(Nat::of(1));

  TrajectoryRecord rec;
  rec.seed = seed;
  rec.values.push_back(seed);
  rec.max_excursion = seed;
  if (seed == target) rec.total_stop = 0;

  std::unordered_map<u128, std::uint64_t, U128Hash> seen;
  seen.emplace(seed.v, 0);

  Nat cur = seed;
  std::uint64_t steps = 0;
  bool brent_mode = false;

  // Brent state: anchor against which the hare is compared.
  Nat anchor;
  std::uint64_t brent_power = 1, brent_lam = 0;

  auto note_value = [&](Nat v) {
    if (v > rec.max_excursion) rec.max_excursion = v;
    if (!rec.total_stop && v == target) rec.total_stop = steps;
  };

  while (true) {
    if (steps == limits.max_steps) {
      rec.root = {RootKind::ExceededStepBound, Nat{}, {}};
      rec.steps_to_root = steps;
      return rec;
    }
    StepResult step = step_unchecked(sys, cur);
    switch (step.kind) {
      case StepResult::Kind::SelfFixed:
        rec.root = {RootKind::FixedPoint, cur, {}};
        rec.steps_to_root = steps;
        return rec;
      case StepResult::Kind::NoRule:
        rec.root = {RootKind::NoApplicableRule, cur, {}};
        rec.steps_to_root = steps;
        return rec;
      case StepResult::Kind::Limit:
        // Arithmetic or intrinsic work budget exceeded: the successor is not
        // representable, which certainly exceeds any configured value bound.
        rec.root = {RootKind::ExceededValueBound, cur, {}};
        rec.steps_to_root = steps;
        return rec;
      case StepResult::Kind::Next:
        break;
    }
    Nat v = step.value;
    ++steps;
    note_value(v);
    if (rec.values.size() <= limits.recurrence_cap) rec.values.push_back(v);
    if (step.leaves_domain) {
      rec.root = {RootKind::LeftDomain, v, {}};
      rec.steps_to_root = steps;
      return rec;
    }
    if (v > limits.max_value) {
      rec.root = {RootKind::ExceededValueBound, v, {}};
      rec.steps_to_root = steps;
      return rec;
    }

    if (!brent_mode) {
      auto [it, inserted] = seen.emplace(v.v, steps);
      if (!inserted) {
        // Exact repeat: cycle entered at the first occurrence.
        std::uint64_t entry = it->second;
        std::vector<Nat> members(rec.values.begin() + static_cast<std::ptrdiff_t>(entry),
                                 rec.values.end() - 1);
        rec.values.pop_back();  // drop the closing duplicate
        rec.root = {RootKind::Cycle, Nat{}, canonical_cycle(std::move(members))};
        rec.steps_to_root = entry;
        return rec;
      }
      if (seen.size() > limits.recurrence_cap) {
        brent_mode = true;
        anchor = v;
        brent_power = 1;
        brent_lam = 0;
        seen.clear();
      }
      cur = v;
      continue;
    }

    // Brent phase: constant memory, still exact.
    ++brent_lam;
    if (v == anchor) {
      std::uint64_t lambda = brent_lam;
      // Locate the cycle entry by replaying from the seed.
      Nat a = seed, b = seed;
      for (std::uint64_t i = 0; i < lambda; ++i) b = step_unchecked(sys, b).value;
      std::uint64_t entry = 0;
      while (a != b) {
        a = step_unchecked(sys, a).value;
        b = step_unchecked(sys, b).value;
        ++entry;
      }
      std::vector<Nat> members;
      members.reserve(lambda);
      Nat c = a;
      for (std::uint64_t i = 0; i < lambda; ++i) {
        members.push_back(c);
        c = step_unchecked(sys, c).value;
      }
      rec.root = {RootKind::Cycle, Nat{}, canonical_cycle(std::move(members))};
      rec.steps_to_root = entry;
      return rec;
    }
    if (brent_lam == brent_power) {
      anchor = v;
      brent_power <<= 1;
      brent_lam = 0;
    }
    cur = v;
  }
}

DescentReport descent_check(const SystemDef& sys, Nat lo, Nat hi) {
  DescentReport rep;
  if (!sys.fixed_point) {
    rep.applicable = false;
    rep.reason = "system declares no fixed point";
    return rep;
  }
  Nat fp = *sys.fixed_point;
  for (u128 n = lo.v; n <= hi.v; ++n) {
    Nat nn{n};
    if (!admits(sys, nn) || nn <= fp) continue;
    StepResult step = step_unchecked(sys, nn);
    switch (step.kind) {
      case StepResult::Kind::NoRule:
        rep.no_rule.push_back(nn);
        continue;
      case StepResult::Kind::Limit:
        rep.limit_hit.push_back(nn);
        continue;
      case StepResult::Kind::SelfFixed:
        // A second fixed point above ~n never descends.
        rep.pass = false;
        rep.witness = {nn, nn};
        return rep;
      case StepResult::Kind::Next:
        if (step.leaves_domain) {
          rep.left_domain.push_back(nn);
          continue;
        }
        if (step.value >= nn) {
          rep.pass = false;
          rep.witness = {nn, step.value};
          return rep;
        }
        continue;
    }
  }
  rep.pass = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Memoized sweep.
//
// The memo stores trajectory-intrinsic facts about a value v:
//   root_id  — interned root the orbit of v reaches
//   dist     — steps from v to its root (cycle entry / fixed point / event)
//   resolve  — steps a fresh trace from v needs to *detect* the root; the
//              outcome for a seed is the memoized root only if resolve fits
//              the step budget, otherwise the seed exceeded the step bound
//   total    — steps from v to the first occurrence of the target value
//   maxexc   — maximum value on the orbit of v (saturating at 2^64-1)
// All fields are independent of the remaining step budget, so workers may
// race to fill an entry: they always write identical data.
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kNoTotal = UINT32_MAX;
constexpr std::uint64_t kMaxExcSaturated = UINT64_MAX;
constexpr std::size_t kMaxMemoEntries = std::size_t{1} << 27;

struct RootRegistry {
  std::mutex mu;
  std::vector<RootClass> roots;
  std::map<std::string, std::uint32_t> index;

  std::uint32_t intern(const RootClass& rc) {
    std::string key = rc.str();
    std::lock_guard<std::mutex> lock(mu);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(roots.size());
    roots.push_back(rc);
    index.emplace(std::move(key), id);
    return id;
  }
  RootClass get(std::uint32_t id) {
    std::lock_guard<std::mutex> lock(mu);
    return roots[id];
  }
  // Once the workers have joined, the registry is read-only.
  std::vector<RootClass> snapshot() {
    std::lock_guard<std::mutex> lock(mu);
    return roots;
  }
};

struct MemoTable {
  std::size_t size = 0;
  std::vector<std::atomic<std::uint8_t>> state;  // 0 empty, 2 ready
  std::vector<std::atomic<std::uint32_t>> root_id;
  std::vector<std::atomic<std::uint32_t>> dist;
  std::vector<std::atomic<std::uint32_t>> resolve;
  std::vector<std::atomic<std::uint32_t>> total;
  std::vector<std::atomic<std::uint64_t>> maxexc;

  explicit MemoTable(std::size_t n)
      : size(n), state(n), root_id(n), dist(n), resolve(n), total(n), maxexc(n) {}

  bool ready(u128 v) const {
    return v < size && state[static_cast<std::size_t>(v)].load(std::memory_order_acquire) == 2;
  }
  void store(u128 v, std::uint32_t rid, std::uint64_t d, std::uint64_t res, std::uint64_t tot,
             u128 mx) {
    if (v >= size) return;
    auto i = static_cast<std::size_t>(v);
    if (state[i].load(std::memory_order_relaxed) == 2) return;
    auto clamp32 = [](std::uint64_t x) {
      return static_cast<std::uint32_t>(std::min<std::uint64_t>(x, UINT32_MAX));
    };
    root_id[i].store(rid, std::memory_order_relaxed);
    dist[i].store(clamp32(d), std::memory_order_relaxed);
    resolve[i].store(clamp32(res), std::memory_order_relaxed);
    total[i].store(clamp32(tot), std::memory_order_relaxed);
    maxexc[i].store(mx > static_cast<u128>(UINT64_MAX) ? kMaxExcSaturated
                                                       : static_cast<std::uint64_t>(mx),
                    std::memory_order_relaxed);
    state[i].store(2, std::memory_order_release);
  }
};

struct MemoEntry {
  std::uint32_t root_id, dist, resolve, total;
  std::uint64_t maxexc;
};

MemoEntry load_entry(const MemoTable& t, u128 v) {
  auto i = static_cast<std::size_t>(v);
  return {t.root_id[i].load(std::memory_order_relaxed),
          t.dist[i].load(std::memory_order_relaxed),
          t.resolve[i].load(std::memory_order_relaxed),
          t.total[i].load(std::memory_order_relaxed),
          t.maxexc[i].load(std::memory_order_relaxed)};
}

struct SweepCtx {
  const SystemDef& sys;
  const Limits& limits;
  Nat target;
  MemoTable memo;
  RootRegistry registry;
  // Pre-interned id for "trace exceeds the step budget from this value even
  // with the full budget"; composable, unlike a partially spent budget.
  std::uint32_t step_bound_full_id;

  SweepCtx(const SystemDef& s, const Limits& lim, std::size_t table)
      : sys(s), limits(lim), target(s.fixed_point.value_or(Nat::of(1))), memo(table) {
    step_bound_full_id = registry.intern({RootKind::ExceededStepBound, Nat{}, {}});
  }
};

// Walks one seed, resolving and memoizing its whole path. The seed's
// reported outcome may still need a budget adjustment (see report_seed).
void classify_seed(SweepCtx& ctx, u128 seed, std::vector<u128>& path,
                   std::unordered_map<u128, std::uint64_t, U128Hash>& path_index) {
  if (ctx.memo.ready(seed)) return;
  path.clear();
  path_index.clear();
  path.push_back(seed);

  const std::uint64_t max_steps = ctx.limits.max_steps;
  const u128 max_value = ctx.limits.max_value.v;

  enum class End { MemoHit, Cycle, Fixed, NoRule, Overflow, LeftDomain, ValueBound, Budget };
  End end = End::Budget;
  std::uint64_t cycle_entry = 0;
  u128 event_value = 0;  // LeftDomain / ValueBound payload
  MemoEntry hit{};

  // Linear scan suffices for short paths; switch to a map when they grow.
  constexpr std::size_t kLinearLimit = 48;
  auto find_on_path = [&](u128 v) -> std::optional<std::uint64_t> {
    if (path.size() <= kLinearLimit) {
      for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i] == v) return i;
      }
      return std::nullopt;
    }
    if (path_index.empty()) {
      for (std::size_t i = 0; i < path.size(); ++i) path_index.emplace(path[i], i);
    }
    auto it = path_index.find(v);
    if (it == path_index.end()) return std::nullopt;
    return it->second;
  };

  while (true) {
    u128 cur = path.back();
    std::uint64_t k = path.size() - 1;
    if (k > 0 && ctx.memo.ready(cur)) {
      hit = load_entry(ctx.memo, cur);
      end = End::MemoHit;
      break;
    }
    if (k >= max_steps) {
      end = End::Budget;
      break;
    }
    StepResult step = step_unchecked(ctx.sys, Nat{cur});
    if (step.kind == StepResult::Kind::SelfFixed) {
      end = End::Fixed;
      break;
    }
    if (step.kind == StepResult::Kind::NoRule) {
      end = End::NoRule;
      break;
    }
    if (step.kind == StepResult::Kind::Limit) {
      end = End::Overflow;
      break;
    }
    u128 v = step.value.v;
    if (step.leaves_domain) {
      event_value = v;
      end = End::LeftDomain;
      break;
    }
    if (v > max_value) {
      event_value = v;
      end = End::ValueBound;
      break;
    }
    if (auto at = find_on_path(v)) {
      cycle_entry = *at;
      end = End::Cycle;
      break;
    }
    if (path.size() > kLinearLimit && !path_index.empty()) {
      path_index.emplace(v, path.size());
    }
    path.push_back(v);
  }

  const std::uint64_t L = path.size() - 1;

  if (end == End::Budget) {
    // Unresolved with the full budget from path[0] only; suffix positions
    // were walked with less budget and stay unknown.
    ctx.memo.store(path[0], ctx.step_bound_full_id, 0, UINT32_MAX, kNoTotal, 0);
    return;
  }

  // Root + per-position arithmetic anchored at the last position.
  std::uint32_t rid = 0;
  std::uint64_t dist_L = 0, resolve_L = 0;
  std::uint64_t total_L = kNoTotal;  // from position L, not counting the prefix
  u128 max_L = 0;

  bool on_cycle = end == End::Cycle;
  std::vector<Nat> members;  // canonical order, minimal member first

  switch (end) {
    case End::MemoHit: {
      rid = hit.root_id;
      dist_L = hit.dist;
      resolve_L = hit.resolve;
      total_L = hit.total;
      max_L = hit.maxexc == kMaxExcSaturated ? static_cast<u128>(-1)
                                             : static_cast<u128>(hit.maxexc);
      // Racing workers can publish a cycle member-by-member, so our own path
      // may already sit on the hit entry's cycle; the entry's distances
      // would then overcount. Detect membership and fall back to exact
      // cycle arithmetic.
      RootClass hit_root = ctx.registry.get(hit.root_id);
      if (hit_root.kind == RootKind::Cycle) {
        std::unordered_set<u128, U128Hash> member_set;
        for (Nat m : hit_root.cycle) member_set.insert(m.v);
        for (std::uint64_t i = 0; i <= L; ++i) {
          if (member_set.count(path[i])) {
            on_cycle = true;
            cycle_entry = i;
            members = hit_root.cycle;
            break;
          }
        }
      }
      break;
    }
    case End::Fixed:
      rid = ctx.registry.intern({RootKind::FixedPoint, Nat{path[L]}, {}});
      dist_L = 0;
      resolve_L = 1;  // the detecting application must run
      break;
    case End::NoRule:
      rid = ctx.registry.intern({RootKind::NoApplicableRule, Nat{path[L]}, {}});
      dist_L = 0;
      resolve_L = 1;
      break;
    case End::Overflow:
      rid = ctx.registry.intern({RootKind::ExceededValueBound, Nat{path[L]}, {}});
      dist_L = 0;
      resolve_L = 1;
      break;
    case End::LeftDomain:
      rid = ctx.registry.intern({RootKind::LeftDomain, Nat{event_value}, {}});
      dist_L = 1;
      resolve_L = 1;
      max_L = event_value;
      break;
    case End::ValueBound:
      rid = ctx.registry.intern({RootKind::ExceededValueBound, Nat{event_value}, {}});
      dist_L = 1;
      resolve_L = 1;
      max_L = event_value;
      break;
    case End::Cycle: {
      members.reserve(L - cycle_entry + 1);
      for (std::uint64_t i = cycle_entry; i <= L; ++i) members.push_back(Nat{path[i]});
      members = canonical_cycle(std::move(members));
      rid = ctx.registry.intern({RootKind::Cycle, Nat{}, members});
      break;
    }
    case End::Budget:
      break;
  }
  // A recorded event value can itself be the target (mirrors trace, which
  // notes the value before classifying the exit).
  if ((end == End::LeftDomain || end == End::ValueBound) && event_value == ctx.target.v) {
    total_L = 1;
  }

  // Cycle geometry: everything follows from the member list, which may
  // extend beyond the walked arc for a mid-cycle memo hit.
  std::uint64_t lambda = members.size();
  std::uint64_t target_idx = kNoTotal;  // index of the target within the cycle
  std::uint64_t entry_idx = 0;
  u128 cycle_max = 0;
  if (on_cycle) {
    for (std::uint64_t i = 0; i < lambda; ++i) {
      if (members[i].v > cycle_max) cycle_max = members[i].v;
      if (members[i].v == ctx.target.v) target_idx = i;
      if (members[i].v == path[cycle_entry]) entry_idx = i;
    }
  }

  // Backward pass: store every path position.
  u128 running_max = on_cycle ? cycle_max : max_L;
  std::uint64_t next_target = kNoTotal;  // path position of the next target occurrence
  for (std::uint64_t ii = L + 1; ii-- > 0;) {
    u128 v = path[ii];
    if (v > running_max) running_max = v;
    if (v == ctx.target.v) next_target = ii;

    std::uint64_t d, res, tot;
    if (on_cycle) {
      std::uint64_t entry_dist = ii >= cycle_entry ? 0 : cycle_entry - ii;
      d = entry_dist;
      res = entry_dist + lambda;
      if (next_target != kNoTotal) {
        tot = next_target - ii;
      } else if (target_idx != kNoTotal) {
        if (ii >= cycle_entry) {
          std::uint64_t my_idx = (entry_idx + (ii - cycle_entry)) % lambda;
          tot = (target_idx + lambda - my_idx) % lambda;
        } else {
          tot = (cycle_entry - ii) + (target_idx + lambda - entry_idx) % lambda;
        }
      } else {
        tot = kNoTotal;
      }
    } else {
      d = dist_L + (L - ii);
      res = resolve_L + (L - ii);
      if (next_target != kNoTotal) {
        tot = next_target - ii;
      } else if (total_L != kNoTotal) {
        tot = (L - ii) + total_L;
      } else {
        tot = kNoTotal;
      }
    }
    ctx.memo.store(v, rid, d, res, tot, running_max);
  }
}

}  // namespace

SweepReport sweep(const SystemDef& sys, Nat lo, Nat hi, const SweepOptions& opts, bool per_seed) {
  if (lo > hi) throw std::invalid_argument("sweep: lo > hi");
  auto t0 = std::chrono::steady_clock::now();

  SweepReport rep;
  rep.lo = lo;
  rep.hi = hi;

  // The memo covers [0, hi]; every admitted seed gets an entry.
  u128 table_hi = hi.v;
  if (table_hi + 1 > static_cast<u128>(kMaxMemoEntries)) {
    throw std::invalid_argument("sweep: range too large for the memo table");
  }
  bool memo_usable = opts.limits.max_steps < UINT32_MAX;

  SweepCtx ctx(sys, opts.limits, memo_usable ? static_cast<std::size_t>(table_hi + 1) : 1);

  if (memo_usable) {
    int jobs = std::max(1, opts.jobs);
    auto worker = [&](int w) {
      std::vector<u128> path;
      std::unordered_map<u128, std::uint64_t, U128Hash> path_index;
      path.reserve(256);
      constexpr u128 kBlock = 4096;
      u128 nblocks = (hi.v - lo.v) / kBlock + 1;
      for (u128 blk = static_cast<u128>(w); blk < nblocks; blk += static_cast<u128>(jobs)) {
        u128 s0 = lo.v + blk * kBlock;
        u128 s1 = std::min(hi.v, s0 + kBlock - 1);
        for (u128 s = s0; s <= s1; ++s) {
          if (!admits(sys, Nat{s})) continue;
          classify_seed(ctx, s, path, path_index);
        }
      }
    };
    if (jobs == 1) {
      worker(0);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(static_cast<std::size_t>(jobs));
      for (int w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
      for (auto& t : threads) t.join();
    }
  }

  // Reporting pass, ascending seeds. Outcomes needing the step budget or an
  // exact saturated maximum are re-derived with an independent trace.
  std::vector<RootClass> roots_snapshot = ctx.registry.snapshot();
  std::vector<std::uint64_t> tally_by_id(roots_snapshot.size(), 0);
  std::map<std::string, std::pair<RootClass, std::uint64_t>> tally_traced;
  std::optional<std::uint64_t> best_total;
  Nat best_max;
  bool have_best_max = false;

  for (u128 s = lo.v; s <= hi.v; ++s) {
    Nat seed{s};
    if (!admits(sys, seed)) continue;
    ++rep.admitted_count;

    const RootClass* root = nullptr;
    std::uint64_t steps = 0;
    std::optional<std::uint64_t> total_stop;
    Nat max_excursion;
    TrajectoryRecord traced;
    bool need_trace = true;
    if (memo_usable && ctx.memo.ready(s)) {
      MemoEntry e = load_entry(ctx.memo, s);
      bool unresolved_full = e.root_id == ctx.step_bound_full_id;
      if (!unresolved_full && e.resolve <= opts.limits.max_steps &&
          e.maxexc != kMaxExcSaturated) {
        root = &roots_snapshot[e.root_id];
        steps = e.dist;
        if (e.total != kNoTotal) total_stop = e.total;
        max_excursion = Nat{static_cast<u128>(e.maxexc)};
        ++tally_by_id[e.root_id];
        need_trace = false;
      }
    }
    if (need_trace) {
      traced = trace(sys, seed, opts.limits);
      root = &traced.root;
      steps = traced.steps_to_root;
      total_stop = traced.total_stop;
      max_excursion = traced.max_excursion;
      auto [it, inserted] = tally_traced.try_emplace(traced.root.str(), traced.root, 0);
      ++it->second.second;
    }

    if (!root->converged()) rep.non_converged.push_back(seed);
    if (opts.collect_records) {
      bool broke = false;
      if (total_stop && (!best_total || *total_stop > *best_total)) {
        best_total = total_stop;
        broke = true;
      }
      if (!have_best_max || max_excursion > best_max) {
        best_max = max_excursion;
        have_best_max = true;
        broke = true;
      }
      if (broke) rep.records.push_back({seed, total_stop, max_excursion});
    }
    if (per_seed || opts.on_seed) {
      SeedOutcome out{*root, steps, total_stop, max_excursion};
      if (opts.on_seed) opts.on_seed(seed, out);
      if (per_seed) rep.per_seed.emplace_back(seed, std::move(out));
    }
  }

  // Merge the id-keyed counts with the traced stragglers, canonically keyed.
  std::map<std::string, std::pair<RootClass, std::uint64_t>> tally_map = std::move(tally_traced);
  for (std::size_t id = 0; id < roots_snapshot.size(); ++id) {
    if (tally_by_id[id] == 0) continue;
    auto [it, inserted] = tally_map.try_emplace(roots_snapshot[id].str(), roots_snapshot[id], 0);
    it->second.second += tally_by_id[id];
  }
  rep.tallies.reserve(tally_map.size());
  for (auto& [key, entry] : tally_map) {
    rep.tallies.push_back({std::move(entry.first), entry.second});
  }
  rep.elapsed = std::chrono::steady_clock::now() - t0;
  return rep;
}

}  // namespace dynsys
