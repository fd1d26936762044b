#include "dynsys/nat.hpp"

#include <algorithm>

namespace dynsys {

std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  char buf[40];
  int pos = 40;
  while (v != 0) {
    buf[--pos] = static_cast<char>('0' + static_cast<unsigned>(v % 10));
    v /= 10;
  }
  return std::string(buf + pos, buf + 40);
}

std::optional<u128> u128_from_string(std::string_view text) {
  if (text.empty()) return std::nullopt;
  u128 acc = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    u128 next;
    if (!checked_mul(acc, 10, next)) return std::nullopt;
    if (!checked_add(next, static_cast<u128>(c - '0'), next)) return std::nullopt;
    acc = next;
  }
  return acc;
}

std::string Nat::str() const { return u128_to_string(v); }

std::optional<Nat> Nat::parse(std::string_view text) {
  auto raw = u128_from_string(text);
  if (!raw) return std::nullopt;
  return Nat{*raw};
}

bool checked_pow(u128 base, u128 exp, u128& out) {
  u128 result = 1;
  u128 b = base;
  u128 e = exp;
  while (e != 0) {
    if (e & 1) {
      if (!checked_mul(result, b, result)) return false;
    }
    e >>= 1;
    if (e != 0 && !checked_mul(b, b, b)) return false;
  }
  out = result;
  return true;
}

int trailing_zeros(u128 v) {
  std::uint64_t lo = static_cast<std::uint64_t>(v);
  if (lo != 0) return __builtin_ctzll(lo);
  return 64 + __builtin_ctzll(static_cast<std::uint64_t>(v >> 64));
}

int highest_bit(u128 v) {
  std::uint64_t hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 127 - __builtin_clzll(hi);
  return 63 - __builtin_clzll(static_cast<std::uint64_t>(v));
}

namespace {

// Trial divisors 2, 3, 5, 7, 9, ... Bound chosen so a single intrinsic call
// stays well under a second even in the worst case.
constexpr u128 kTrialBudget = static_cast<u128>(1) << 26;

}  // namespace

FactorStatus smallest_prime_factor_gt(u128 x, u128 k, u128& out) {
  if (x <= 1) return FactorStatus::None;
  u128 rest = x;
  auto strip = [&rest](u128 d) {
    bool hit = false;
    while (rest % d == 0) {
      rest /= d;
      hit = true;
    }
    return hit;
  };
  if (strip(2) && 2 > k) {
    out = 2;
    return FactorStatus::Found;
  }
  for (u128 d = 3; d * d <= rest; d += 2) {
    if (d > kTrialBudget) return FactorStatus::BudgetExceeded;
    if (strip(d)) {
      if (d > k) {
        out = d;
        return FactorStatus::Found;
      }
    }
  }
  if (rest > 1 && rest > k) {
    out = rest;
    return FactorStatus::Found;
  }
  return FactorStatus::None;
}

FactorStatus largest_prime_factor_gt(u128 x, u128 k, u128& out) {
  if (x <= 1) return FactorStatus::None;
  u128 rest = x;
  u128 largest = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    largest = 2;
  }
  for (u128 d = 3; d * d <= rest; d += 2) {
    if (d > kTrialBudget) return FactorStatus::BudgetExceeded;
    while (rest % d == 0) {
      rest /= d;
      largest = d;
    }
  }
  if (rest > 1) largest = rest;
  if (largest > k) {
    out = largest;
    return FactorStatus::Found;
  }
  return FactorStatus::None;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

}  // namespace dynsys
