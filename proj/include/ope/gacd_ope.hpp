#pragma once

// Randomised order-preserving encryption c = m*k + r, decrypted by floor(c/k).
// The divisor k is a (lambda+1)-bit secret and r is drawn uniformly from the
// band (k^(3/4), k - k^(3/4)), which is out of reach of the Howgrave-Graham
// GACD_L lattice attack when lambda > (8/3) lg M.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ope/bigint.hpp"
#include "ope/rand_core.hpp"

namespace ope::gacd {

// Below this the noise band (k^(3/4), k - k^(3/4)) can be empty.
inline constexpr unsigned kMinNoiseLambda = 5;

struct SchemeParams {
  BigInt M;  // plaintexts live in [0, M]
  unsigned lambda = 0;
  std::optional<BigInt> n_hint;
};

// Smallest integer lambda with lambda > (8/3) lg M, i.e. 2^(3 lambda) > M^8.
unsigned min_lambda(const BigInt& M);

struct Beta0 {
  Rational value;
  bool exact = false;  // false: value is a lower approximation within 2^-128
};

// beta0 = 1 - alpha0/2 - sqrt(1 - alpha0 - alpha0^2/2) with epsilon = 0.
Beta0 beta0_bound(const Rational& alpha0);

struct ValidationReport {
  bool ok = false;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  unsigned required_lambda = 0;
  std::size_t predicted_ciphertext_bits = 0;  // ceil(lg M) + lambda + 1
  double predicted_expansion = 0.0;           // bits / ceil(lg M)

  std::string to_string() const;
};

ValidationReport validate_params(const SchemeParams& params);

class SecretKey {
 public:
  // Validates params and derives the noise band; throws kParameterError.
  static SecretKey from_divisor(const SchemeParams& params, BigInt k);

  const SchemeParams& params() const { return params_; }
  const BigInt& k() const { return k_; }
  const BigInt& noise_lo() const { return noise_lo_; }
  const BigInt& noise_hi() const { return noise_hi_; }

  // lg of the number of admissible noise values.
  double noise_entropy_bits() const;

 private:
  SecretKey() = default;

  SchemeParams params_;
  BigInt k_;
  BigInt noise_lo_;
  BigInt noise_hi_;
};

struct NoiseBand {
  BigInt lo;  // floor(k^(3/4)) + 1
  BigInt hi;  // ceil(k - k^(3/4)) - 1
};

NoiseBand noise_band(const BigInt& k);

struct Ciphertext {
  BigInt value;

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.value == b.value;
  }
  friend bool operator<(const Ciphertext& a, const Ciphertext& b) {
    return a.value < b.value;
  }
};

SecretKey keygen(const SchemeParams& params, rand::DeterministicGenerator& gen);

Ciphertext encrypt(const BigInt& m, const SecretKey& key,
                   rand::DeterministicGenerator& gen);

// Encryption with caller-supplied noise; r must lie in the key's band.
Ciphertext encrypt_with_noise(const BigInt& m, const SecretKey& key,
                              const BigInt& r);

// floor(c/k); throws kForeignCiphertext when the quotient falls outside [0, M].
BigInt decrypt(const Ciphertext& c, const SecretKey& key);

// Key file: scheme=gacd-ope/1, lambda=, M=, k= (one per line, in that order).
void write_key(std::ostream& out, const SecretKey& key);
SecretKey read_key(std::istream& in);

}  // namespace ope::gacd
