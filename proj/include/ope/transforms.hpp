#pragma once

// Plaintext-distribution flattening and composition of monotone maps with the
// GACD scheme.

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ope/bigint.hpp"
#include "ope/gacd_ope.hpp"
#include "ope/opf_recursive.hpp"
#include "ope/rand_core.hpp"

namespace ope::transforms {

// Distribution function of plaintexts in [0, M) tabulated as exact rationals
// F(0..M), stretched onto [0, N).
class CdfModel {
 public:
  // Requires F(0) = 0, F(M) = 1 and F(m+1) - F(m) >= 1/N for every m.
  static CdfModel create(BigInt M, BigInt N, std::vector<Rational> F);

  // Builds F from per-value counts with 1/N smoothing:
  //   p_m = (count_m / total)(1 - M/N) + 1/N.
  static CdfModel from_counts(BigInt N, const std::vector<BigInt>& counts);

  const BigInt& M() const { return M_; }
  const BigInt& N() const { return N_; }
  std::size_t size() const { return F_.size() - 1; }
  const Rational& F(std::size_t m) const { return F_.at(m); }
  Rational p(std::size_t m) const { return F_.at(m + 1) - F_.at(m); }
  // ceil(N F(m)): the smallest flattened value that inverts to m.
  const BigInt& lower_edge(std::size_t m) const { return edges_.at(m); }
  // Bits of the random interpolation weight: ceil(lg N) + 16.
  std::size_t u_bits() const { return u_bits_; }

 private:
  CdfModel() = default;

  BigInt M_;
  BigInt N_;
  std::vector<Rational> F_;
  std::vector<BigInt> edges_;
  std::size_t u_bits_ = 0;
};

// cdf/1 header plus M+1 lines of <num>/<den>.
void write_cdf(std::ostream& out, const CdfModel& model);
CdfModel read_cdf(std::istream& in);

// Newline-separated "<value> <count>" pairs; values must lie in [0, M).
CdfModel ingest_frequencies(std::istream& in, const BigInt& M, const BigInt& N);

// floor(N((1-u)F(m) + uF(m+1))) for a given interpolation weight u in [0, 1).
BigInt flatten_at(const BigInt& m, const CdfModel& model, const Rational& u);

// Randomised flattening. Draws whose floor lands below N F(m) would invert to
// m - 1 and are re-drawn.
BigInt flatten(const BigInt& m, const CdfModel& model,
               rand::DeterministicGenerator& gen);

// The unique m with F(m) <= mbar/N < F(m+1).
BigInt unflatten(const BigInt& mbar, const CdfModel& model);

// Strictly increasing integer map with its left inverse. The inverse returns
// nullopt for values outside the image.
struct MonotoneMap {
  std::function<BigInt(const BigInt&)> forward;
  std::function<std::optional<BigInt>(const BigInt&)> inverse;

  static MonotoneMap identity();
  // m -> m + a0.
  static MonotoneMap shift(BigInt a0);
  // m -> opf_encrypt(m). The key is copied into the map.
  static MonotoneMap opf(opf::OpfKey key);
};

gacd::Ciphertext hybrid_encrypt(const BigInt& m, const MonotoneMap& map,
                                const gacd::SecretKey& key,
                                rand::DeterministicGenerator& gen);
gacd::Ciphertext hybrid_encrypt_with_noise(const BigInt& m, const MonotoneMap& map,
                                           const gacd::SecretKey& key,
                                           const BigInt& r);
BigInt hybrid_decrypt(const gacd::Ciphertext& c, const MonotoneMap& map,
                      const gacd::SecretKey& key);

// Flatten, then encrypt the flattened value; the GACD key must cover [0, N).
gacd::Ciphertext flatten_encrypt(const BigInt& m, const CdfModel& model,
                                 const gacd::SecretKey& key,
                                 rand::DeterministicGenerator& gen);
BigInt flatten_decrypt(const gacd::Ciphertext& c, const CdfModel& model,
                       const gacd::SecretKey& key);

}  // namespace ope::transforms
