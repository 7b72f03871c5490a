#pragma once

// Estimators an adversary can run against sorted GACD ciphertexts, the
// leakage bookkeeping that goes with them, and a brute-force divisor search
// that serves as a ground-truth oracle on deliberately weak parameters.

#include <cstddef>
#include <string>
#include <vector>

#include "ope/bigint.hpp"
#include "ope/rand_core.hpp"
#include "ope/transforms.hpp"

namespace ope::analysis {

class SortedSample {
 public:
  // Sorts a copy; throws kEmptyInput for an empty list.
  static SortedSample from_unsorted(std::vector<BigInt> ciphertexts, BigInt M);

  const std::vector<BigInt>& ciphertexts() const { return ciphertexts_; }
  const BigInt& M() const { return M_; }
  std::size_t n() const { return ciphertexts_.size(); }
  const BigInt& max() const { return ciphertexts_.back(); }

 private:
  SortedSample() = default;

  std::vector<BigInt> ciphertexts_;
  BigInt M_;
};

// Maximum-likelihood estimate c_n / M.
Rational estimate_k(const SortedSample& sample);

struct WindowEstimate {
  Rational m_hat;
  Rational k_hat;

  // m in the open window (m_hat - radius, m_hat + radius).
  bool contains(const BigInt& m, const Rational& radius) const;
};

WindowEstimate window_attack(const BigInt& c, const SortedSample& sample);

// 1 - (1 - epsilon)^n, exact.
Rational success_probability(const Rational& epsilon, unsigned long n);

// Point value lg n with the unknown O(1) reported as a band of +-band bits.
struct BandedValue {
  double value = 0.0;
  double band = 0.0;
};

BandedValue leakage_bits(unsigned long n);

// Leakage of the deterministic recursive OPF for comparison: (1/2) lg m.
BandedValue bclo_leakage_bits(const BigInt& m);

struct BcloEstimate {
  Rational m_hat;
  double sigma = 0.0;
};

// m_hat = M c / N, sigma = sqrt(2 m_hat (1 - m_hat / M)).
BcloEstimate bclo_invert_estimate(const BigInt& c, const BigInt& M,
                                  const BigInt& N);

inline constexpr unsigned kBruteforceBudgetBits = 24;

// Every k' in [k_min, k_max] for which each c mod k' lies strictly inside
// (k'^(3/4), k' - k'^(3/4)). Throws kBudgetExceeded above 2^24 + 1 candidates.
std::vector<BigInt> bruteforce_gacd(const std::vector<BigInt>& ciphertexts,
                                    const BigInt& k_min, const BigInt& k_max);

// Scheme-faithful noise check for a single candidate divisor.
bool residues_in_band(const std::vector<BigInt>& ciphertexts, const BigInt& k);

struct LeakageTable {
  // per_m[m] = lg(m p_m / F(m)) for m in [1, M); entry 0 is unused (0).
  std::vector<double> per_m;
  double max = 0.0;
  std::size_t argmax = 0;
};

LeakageTable flatten_leakage_report(const transforms::CdfModel& model);

// Monte-Carlo of the window one-wayness game against fresh GACD keys: each
// trial encrypts n uniform plaintexts from [0, M) plus one uniform challenge
// and checks whether the challenge lies within the given radius of m_hat.
struct WindowExperiment {
  unsigned long n = 1000;
  BigInt M;
  unsigned lambda = 0;
  std::size_t trials = 200;
  rand::Seed seed;
};

struct WindowRates {
  double at_ln2_over_n = 0.0;   // radius m ln2 / n
  double at_half_over_n = 0.0;  // radius m / (2n)
  double median_relative_k_error = 0.0;
};

WindowRates run_window_experiment(const WindowExperiment& experiment);

// metric=<name> value=<decimal> band=<decimal>
std::string metric_line(const std::string& name, const std::string& value,
                        const std::string& band);
std::string format_double(double v, int places);

}  // namespace ope::analysis
