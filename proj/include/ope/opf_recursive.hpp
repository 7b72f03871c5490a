#pragma once

// Deterministic order-preserving function f: [0, M] -> [1, N], M = 2^r,
// built by recursive bisection of the domain. Every frame (a, b, f(a), f(b))
// reseeds its own generator, so decryption replays exactly the choices that
// encryption made and can binary-search the ciphertext back to its plaintext.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "ope/bigint.hpp"
#include "ope/rand_core.hpp"

namespace ope::opf {

enum class Sampler { kUniform, kBeta };

std::string_view to_string(Sampler sampler);
Sampler sampler_from_string(std::string_view name);

// Beta shapes are fixed-width 64-bit integers; the largest span 2^r must
// leave room for the shape 2^(r-1) + 1.
inline constexpr unsigned kMaxBetaRBits = 63;

class OpfKey {
 public:
  // N defaults to M^2; anything smaller than M^2 (or not above 4, where no
  // endpoint pair can span more than 3N/4) is rejected.
  static OpfKey create(const rand::Seed& master_seed, unsigned r_bits,
                       Sampler sampler, std::optional<BigInt> N = std::nullopt);

  const rand::Seed& master_seed() const { return master_seed_; }
  unsigned r_bits() const { return r_bits_; }
  const BigInt& M() const { return M_; }
  const BigInt& N() const { return N_; }
  Sampler sampler() const { return sampler_; }
  // max(ceil(lg N), 64) fractional bits for Beta draws.
  std::size_t precision_bits() const { return precision_bits_; }

 private:
  OpfKey() = default;

  rand::Seed master_seed_;
  unsigned r_bits_ = 0;
  BigInt M_;
  BigInt N_;
  Sampler sampler_ = Sampler::kUniform;
  std::size_t precision_bits_ = 64;
};

struct RangeFrame {
  BigInt a;
  BigInt b;
  BigInt fa;
  BigInt fb;
};

// Canonical injective encoding: a tag byte, then each of a, b, fa, fb as a
// 4-byte big-endian length followed by its big-endian magnitude.
std::vector<std::uint8_t> encode_frame(const RangeFrame& frame);

rand::Seed seed_fn(const rand::Seed& master, const RangeFrame& frame);

// (f(0), f(M)) with 1 <= f0 < fM <= N and fM - f0 > 3N/4.
std::pair<BigInt, BigInt> init_endpoints(const OpfKey& key);

// z in [0, y] for the midpoint x of a frame holding `a` unknown points.
// Beta mode returns floor(y * w) with w ~ Beta(x, a - x + 1) at
// `precision_bits` fractional bits.
BigInt sample_mid(rand::DeterministicGenerator& gen, const BigInt& y,
                  const BigInt& x, const BigInt& a, Sampler sampler,
                  std::size_t precision_bits = 64);

struct FrameRecord {
  RangeFrame frame;
  BigInt x;
  BigInt fx;
  bool clamped = false;
};

// Frames visited by one encryption or decryption, root first.
struct OpfTrace {
  BigInt f0;
  BigInt fM;
  std::vector<FrameRecord> frames;
  std::size_t clamp_count = 0;
};

BigInt opf_encrypt(const BigInt& m, const OpfKey& key, OpfTrace* trace = nullptr);

// Throws kNotACiphertext when c is not in the image of f.
BigInt opf_decrypt(const BigInt& c, const OpfKey& key, OpfTrace* trace = nullptr);

// Order-statistic pmf for the x-th smallest of a uniform draws from [0, b]:
//   a!/((x-1)!(a-x)!) (y/b)^(x-1) (1/b) ((b-y)/b)^(a-x)
// Exact reference value only; sampling uses the Beta limit.
Rational order_statistic_pmf(const BigInt& x, const BigInt& a, const BigInt& y,
                 const BigInt& b);

// Key file: scheme=opf/1, sampler=, r_bits=, N=, seed_hex=.
void write_key(std::ostream& out, const OpfKey& key);
OpfKey read_key(std::istream& in);

}  // namespace ope::opf
