#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace ope {

using BigInt = mpz_class;
using Rational = mpq_class;

// Number of significant bits; 0 for zero. Sign is ignored.
std::size_t bit_length(const BigInt& x);

// floor(x^(1/n)) for x >= 0.
BigInt floor_root(const BigInt& x, unsigned long n);

// floor(x^(3/4)), the GACD attack threshold for a divisor x.
BigInt floor_three_quarter_power(const BigInt& x);

BigInt pow2(std::size_t exponent);

// ceil(lg x) for x >= 1.
std::size_t ceil_log2(const BigInt& x);

bool is_power_of_two(const BigInt& x);

// Big-endian magnitude bytes, empty for zero.
std::vector<std::uint8_t> to_bytes(const BigInt& x);
BigInt from_bytes(std::span<const std::uint8_t> bytes);

// Strict decimal parse: optional leading '-', digits only, no whitespace.
BigInt parse_decimal(std::string_view text);
std::string to_decimal(const BigInt& x);

// Fixed-point decimal rendering of a rational, truncated toward zero.
std::string to_decimal(const Rational& q, unsigned places);

}  // namespace ope
