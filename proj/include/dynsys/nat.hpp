#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dynsys {

using u128 = unsigned __int128;

/// Natural number on a fixed 128-bit representation.
///
/// Interfaces treat values as unbounded naturals; the representation is an
/// implementation detail. Arithmetic that would wrap must go through the
/// checked_* helpers below, which report overflow so callers can surface a
/// limit event instead of producing a wrong value.
struct Nat {
  u128 v = 0;

  constexpr Nat() = default;
  constexpr explicit Nat(u128 value) : v(value) {}

  static constexpr Nat of(std::uint64_t value) { return Nat{static_cast<u128>(value)}; }

  friend constexpr bool operator==(Nat a, Nat b) { return a.v == b.v; }
  friend constexpr bool operator!=(Nat a, Nat b) { return a.v != b.v; }
  friend constexpr bool operator<(Nat a, Nat b) { return a.v < b.v; }
  friend constexpr bool operator<=(Nat a, Nat b) { return a.v <= b.v; }
  friend constexpr bool operator>(Nat a, Nat b) { return a.v > b.v; }
  friend constexpr bool operator>=(Nat a, Nat b) { return a.v >= b.v; }

  constexpr bool is_zero() const { return v == 0; }
  constexpr bool fits_u64() const { return v <= static_cast<u128>(UINT64_MAX); }
  constexpr std::uint64_t low_u64() const { return static_cast<std::uint64_t>(v); }

  std::string str() const;
  static std::optional<Nat> parse(std::string_view text);
};

std::string u128_to_string(u128 v);
std::optional<u128> u128_from_string(std::string_view text);

// Checked arithmetic. Returns false and leaves `out` unspecified on overflow.
inline bool checked_add(u128 a, u128 b, u128& out) { return !__builtin_add_overflow(a, b, &out); }
inline bool checked_mul(u128 a, u128 b, u128& out) { return !__builtin_mul_overflow(a, b, &out); }

// Natural subtraction: fails (returns false) if the result would be negative.
inline bool checked_sub(u128 a, u128 b, u128& out) {
  if (a < b) return false;
  out = a - b;
  return true;
}

// base^exp with overflow detection. 0^0 = 1.
bool checked_pow(u128 base, u128 exp, u128& out);

// Number of trailing zero bits; undefined for 0 (callers must check).
int trailing_zeros(u128 v);
// Index of the highest set bit (0-based); undefined for 0.
int highest_bit(u128 v);

// odd_part(x): x with all factors of two removed. Undefined for 0.
inline u128 odd_part_u128(u128 x) { return x >> trailing_zeros(x); }
// v2(x): exponent of 2 in x. Undefined for 0.
inline u128 v2_u128(u128 x) { return static_cast<u128>(trailing_zeros(x)); }
// msb2(x): largest power of two <= x. Undefined for 0.
inline u128 msb2_u128(u128 x) { return static_cast<u128>(1) << highest_bit(x); }

enum class FactorStatus { Found, None, BudgetExceeded };

// Smallest prime factor of x strictly greater than k, by trial division.
// FactorStatus::None when every prime factor of x is <= k (including x = 1).
// Division work is bounded; enormous semiprimes hit BudgetExceeded, which
// callers surface as an evaluation limit, never as a wrong answer.
FactorStatus smallest_prime_factor_gt(u128 x, u128 k, u128& out);
// Largest prime factor of x if it exceeds k, same budget rules.
FactorStatus largest_prime_factor_gt(u128 x, u128 k, u128& out);

// Deterministic trial-division primality for enumeration of small primes.
bool is_prime_u64(std::uint64_t n);

struct NatHash {
  std::size_t operator()(const Nat& n) const {
    std::uint64_t lo = static_cast<std::uint64_t>(n.v);
    std::uint64_t hi = static_cast<std::uint64_t>(n.v >> 64);
    std::uint64_t h = lo * 0x9e3779b97f4a7c15ULL;
    h ^= (hi + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    return static_cast<std::size_t>(h);
  }
};

struct NatHashRaw {
  std::size_t operator()(u128 v) const { return NatHash{}(Nat{v}); }
};

}  // namespace dynsys
