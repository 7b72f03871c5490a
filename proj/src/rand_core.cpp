#include "ope/rand_core.hpp"

#include <mutex>
#include <vector>

#include <sodium.h>

#include "ope/error.hpp"

namespace ope::rand {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
  });
}

constexpr std::array<std::uint8_t, 64> kZeroBlock{};
constexpr std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> kNonce{};

int hex_value(char ch) {
  if (ch >= '0' && ch <= '9') return ch - '0';
  if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
  if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
  return -1;
}

}  // namespace

Seed seed_from_hex(std::string_view hex) {
  if (hex.empty() || hex.size() % 2 != 0) {
    fail(ErrorKind::kFormatError, "seed hex must be a non-empty even-length string");
  }
  std::vector<std::uint8_t> raw(hex.size() / 2);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(ErrorKind::kFormatError, "seed is not hex");
    raw[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  Seed seed;
  if (raw.size() == kSeedBytes) {
    std::copy(raw.begin(), raw.end(), seed.bytes.begin());
    return seed;
  }
  ensure_sodium();
  crypto_generichash(seed.bytes.data(), seed.bytes.size(), raw.data(),
                     raw.size(), nullptr, 0);
  return seed;
}

std::string to_hex(const Seed& seed) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * kSeedBytes);
  for (std::uint8_t b : seed.bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Seed fresh_seed() {
  ensure_sodium();
  Seed seed;
  randombytes_buf(seed.bytes.data(), seed.bytes.size());
  return seed;
}

Seed derive_seed(const Seed& key, std::span<const std::uint8_t> message) {
  ensure_sodium();
  Seed out;
  crypto_generichash(out.bytes.data(), out.bytes.size(), message.data(),
                     message.size(), key.bytes.data(), key.bytes.size());
  return out;
}

Seed derive_seed(const Seed& key, std::string_view label) {
  return derive_seed(
      key, std::span(reinterpret_cast<const std::uint8_t*>(label.data()),
                     label.size()));
}

DeterministicGenerator::DeterministicGenerator(const Seed& seed)
    : key_(seed.bytes) {
  ensure_sodium();
}

void DeterministicGenerator::refill() {
  crypto_stream_chacha20_xor_ic(block_.data(), kZeroBlock.data(), block_.size(),
                                kNonce.data(), block_counter_, key_.data());
  ++block_counter_;
  pos_ = 0;
}

void DeterministicGenerator::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ == block_.size()) refill();
    std::size_t take = std::min(out.size() - done, block_.size() - pos_);
    std::copy_n(block_.begin() + static_cast<std::ptrdiff_t>(pos_), take,
                out.begin() + static_cast<std::ptrdiff_t>(done));
    pos_ += take;
    done += take;
  }
}

std::uint64_t DeterministicGenerator::next_u64() {
  std::array<std::uint8_t, 8> raw;
  fill(raw);
  std::uint64_t v = 0;
  for (std::uint8_t b : raw) v = (v << 8) | b;
  return v;
}

double DeterministicGenerator::next_unit_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

BigInt DeterministicGenerator::next_bits(std::size_t bits) {
  if (bits == 0) return 0;
  std::vector<std::uint8_t> raw((bits + 7) / 8);
  fill(raw);
  std::size_t excess = raw.size() * 8 - bits;
  raw[0] &= static_cast<std::uint8_t>(0xffu >> excess);
  return from_bytes(raw);
}

DeterministicGenerator from_seed(const Seed& seed) {
  return DeterministicGenerator(seed);
}

BigInt uniform_int(DeterministicGenerator& gen, const BigInt& lo,
                   const BigInt& hi) {
  if (lo > hi) fail(ErrorKind::kInvalidRange, "uniform_int with lo > hi");
  BigInt range = hi - lo + 1;
  if (range == 1) return lo;
  // 32 spare bits keep the rejection probability below 2^-32 per draw.
  std::size_t bits = bit_length(range) + 32;
  BigInt span = pow2(bits);
  BigInt limit = span - span % range;
  for (;;) {
    BigInt v = gen.next_bits(bits);
    if (v < limit) {
      BigInt r = v % range;
      return lo + r;
    }
  }
}

Rational Dyadic::to_rational() const {
  Rational q(numerator, pow2(precision_bits));
  q.canonicalize();
  return q;
}

double Dyadic::to_double() const { return to_rational().get_d(); }

Dyadic uniform_fraction(DeterministicGenerator& gen, long precision_bits) {
  if (precision_bits < 1) {
    fail(ErrorKind::kInvalidPrecision, "precision_bits must be at least 1");
  }
  auto bits = static_cast<std::size_t>(precision_bits);
  return Dyadic{gen.next_bits(bits), bits};
}

}  // namespace ope::rand
