#pragma once

// Deterministic, seedable randomness for both encryption schemes.
//
// Stream format version 1: a generator is the original ChaCha20 keystream
// (20 rounds, 64-bit nonce fixed to zero, 64-bit block counter starting at
// zero) keyed by the 32 seed bytes. Child seeds are keyed BLAKE2b-256 digests.
// Recursive OPF decryption replays these streams bit-for-bit, so neither
// construction may change without bumping the key-file format.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "ope/bigint.hpp"

namespace ope::rand {

inline constexpr int kStreamFormatVersion = 1;
inline constexpr std::size_t kSeedBytes = 32;

struct Seed {
  std::array<std::uint8_t, kSeedBytes> bytes{};

  friend bool operator==(const Seed&, const Seed&) = default;
};

// Accepts exactly 64 hex digits, or any other non-empty even-length hex string,
// which is hashed down to 32 bytes.
Seed seed_from_hex(std::string_view hex);
std::string to_hex(const Seed& seed);

// Fresh seed from system entropy (keygen only).
Seed fresh_seed();

// Keyed hash of an arbitrary message under `key`; used for child seeds.
Seed derive_seed(const Seed& key, std::span<const std::uint8_t> message);
Seed derive_seed(const Seed& key, std::string_view label);

// Single-owner stream. Not safe to share between threads; derive child seeds
// instead.
class DeterministicGenerator {
 public:
  explicit DeterministicGenerator(const Seed& seed);

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double next_unit_double();
  // Uniform integer with exactly `bits` random bits, i.e. on [0, 2^bits).
  BigInt next_bits(std::size_t bits);

 private:
  void refill();

  std::array<std::uint8_t, kSeedBytes> key_;
  std::uint64_t block_counter_ = 0;
  std::array<std::uint8_t, 64> block_{};
  std::size_t pos_ = 64;
};

DeterministicGenerator from_seed(const Seed& seed);

// Exactly uniform on [lo, hi] via rejection past the largest multiple of the
// range size. Throws kInvalidRange when lo > hi.
BigInt uniform_int(DeterministicGenerator& gen, const BigInt& lo,
                   const BigInt& hi);

// numerator / 2^precision_bits.
struct Dyadic {
  BigInt numerator;
  std::size_t precision_bits = 1;

  Rational to_rational() const;
  double to_double() const;
};

// j / 2^precision_bits for j uniform on [0, 2^precision_bits).
Dyadic uniform_fraction(DeterministicGenerator& gen, long precision_bits);

}  // namespace ope::rand
