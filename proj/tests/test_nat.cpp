#include "doctest.h"
#include "dynsys/nat.hpp"

using namespace dynsys;

TEST_CASE("nat parse/print round trip") {
  CHECK(Nat::parse("0")->str() == "0");
  CHECK(Nat::parse("18446744073709551616")->str() == "18446744073709551616");  // 2^64
  CHECK(Nat::parse("340282366920938463463374607431768211455")->str() ==
        "340282366920938463463374607431768211455");  // 2^128 - 1
  CHECK(!Nat::parse("340282366920938463463374607431768211456"));  // 2^128
  CHECK(!Nat::parse(""));
  CHECK(!Nat::parse("12a"));
}

TEST_CASE("checked arithmetic detects overflow instead of wrapping") {
  u128 max = ~static_cast<u128>(0);
  u128 out;
  CHECK(!checked_add(max, 1, out));
  CHECK(checked_add(max - 1, 1, out));
  CHECK(out == max);
  CHECK(!checked_mul(max / 2 + 1, 2, out));
  CHECK(checked_pow(2, 127, out));
  CHECK(out == static_cast<u128>(1) << 127);
  CHECK(!checked_pow(2, 128, out));
  CHECK(checked_pow(1, 100000, out));
  CHECK(out == 1);
  CHECK(checked_pow(0, 0, out));
  CHECK(out == 1);
  CHECK(!checked_sub(3, 5, out));
  CHECK(checked_sub(5, 3, out));
  CHECK(out == 2);
}

TEST_CASE("two-adic intrinsics") {
  CHECK(odd_part_u128(96) == 3);
  CHECK(odd_part_u128(7) == 7);
  CHECK(v2_u128(96) == 5);
  CHECK(v2_u128(7) == 0);
  CHECK(msb2_u128(1) == 1);
  CHECK(msb2_u128(96) == 64);
  CHECK(msb2_u128(64) == 64);
  u128 big = static_cast<u128>(1) << 100;
  CHECK(v2_u128(big) == 100);
  CHECK(msb2_u128(big + 12345) == big);
}

TEST_CASE("prime factor intrinsics") {
  u128 p;
  CHECK(smallest_prime_factor_gt(35, 3, p) == FactorStatus::Found);
  CHECK(p == 5);
  CHECK(smallest_prime_factor_gt(35, 5, p) == FactorStatus::Found);
  CHECK(p == 7);
  CHECK(smallest_prime_factor_gt(8, 3, p) == FactorStatus::None);
  CHECK(smallest_prime_factor_gt(1, 0, p) == FactorStatus::None);
  CHECK(smallest_prime_factor_gt(97, 3, p) == FactorStatus::Found);  // prime itself
  CHECK(p == 97);
  CHECK(largest_prime_factor_gt(35, 3, p) == FactorStatus::Found);
  CHECK(p == 7);
  CHECK(largest_prime_factor_gt(64, 3, p) == FactorStatus::None);

  CHECK(is_prime_u64(2));
  CHECK(is_prime_u64(23));
  CHECK(!is_prime_u64(1));
  CHECK(!is_prime_u64(25));
}
