#include "ope/bigint.hpp"

#include <algorithm>

#include "ope/error.hpp"

namespace ope {

std::size_t bit_length(const BigInt& x) {
  if (sgn(x) == 0) return 0;
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

BigInt floor_root(const BigInt& x, unsigned long n) {
  if (sgn(x) < 0) fail(ErrorKind::kDomainError, "root of a negative integer");
  BigInt r;
  mpz_root(r.get_mpz_t(), x.get_mpz_t(), n);
  return r;
}

BigInt floor_three_quarter_power(const BigInt& x) {
  BigInt cube = x * x * x;
  return floor_root(cube, 4);
}

BigInt pow2(std::size_t exponent) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, exponent);
  return r;
}

std::size_t ceil_log2(const BigInt& x) {
  if (x < 1) fail(ErrorKind::kDomainError, "ceil_log2 of a value below 1");
  BigInt y = x - 1;
  return bit_length(y);
}

bool is_power_of_two(const BigInt& x) {
  return sgn(x) > 0 && mpz_popcount(x.get_mpz_t()) == 1;
}

std::vector<std::uint8_t> to_bytes(const BigInt& x) {
  std::size_t count = (bit_length(x) + 7) / 8;
  std::vector<std::uint8_t> out(count);
  if (count == 0) return out;
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, x.get_mpz_t());
  out.resize(written);
  return out;
}

BigInt from_bytes(std::span<const std::uint8_t> bytes) {
  BigInt r;
  if (!bytes.empty()) {
    mpz_import(r.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  return r;
}

BigInt parse_decimal(std::string_view text) {
  std::string_view digits = text;
  if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
  if (digits.empty() ||
      !std::all_of(digits.begin(), digits.end(),
                   [](char ch) { return ch >= '0' && ch <= '9'; })) {
    fail(ErrorKind::kFormatError,
         "not a decimal integer: '" + std::string(text) + "'");
  }
  return BigInt(std::string(text), 10);
}

std::string to_decimal(const BigInt& x) { return x.get_str(10); }

std::string to_decimal(const Rational& q, unsigned places) {
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
  BigInt scaled = q.get_num() * scale;
  BigInt whole;
  mpz_tdiv_q(whole.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
  bool negative = sgn(whole) < 0 || (sgn(q) < 0);
  BigInt mag = abs(whole);
  std::string digits = mag.get_str(10);
  if (digits.size() <= places) {
    digits.insert(0, places + 1 - digits.size(), '0');
  }
  std::string out;
  if (negative && sgn(mag) != 0) out.push_back('-');
  out += digits.substr(0, digits.size() - places);
  if (places > 0) {
    out.push_back('.');
    out += digits.substr(digits.size() - places);
  }
  return out;
}

}  // namespace ope
