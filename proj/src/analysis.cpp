#include "ope/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ope/error.hpp"

namespace ope::analysis {
namespace {

double log2_rational(const Rational& q) {
  long num_exp = 0;
  long den_exp = 0;
  double num = mpz_get_d_2exp(&num_exp, q.get_num_mpz_t());
  double den = mpz_get_d_2exp(&den_exp, q.get_den_mpz_t());
  return std::log2(num / den) + static_cast<double>(num_exp - den_exp);
}

using u128 = unsigned __int128;

// floor(k^(3/4)) for k < 2^32 using 128-bit integers.
std::uint64_t three_quarter_u64(std::uint64_t k) {
  u128 cube = static_cast<u128>(k) * k * k;
  auto t = static_cast<std::uint64_t>(std::pow(static_cast<double>(k), 0.75));
  auto fourth = [](std::uint64_t v) {
    u128 sq = static_cast<u128>(v) * v;
    return sq * sq;
  };
  while (t > 0 && fourth(t) > cube) --t;
  while (fourth(t + 1) <= cube) ++t;
  return t;
}

std::vector<BigInt> bruteforce_small(const std::vector<std::uint64_t>& cts,
                                     std::uint64_t k_min, std::uint64_t k_max) {
  std::vector<BigInt> out;
  for (std::uint64_t k = std::max<std::uint64_t>(k_min, 1); k <= k_max; ++k) {
    std::uint64_t t = three_quarter_u64(k);
    if (k < 2 * t + 2) continue;  // empty band
    std::uint64_t lo = t + 1;
    std::uint64_t hi = k - t - 1;
    bool ok = true;
    for (std::uint64_t c : cts) {
      std::uint64_t r = c % k;
      if (r < lo || r > hi) {
        ok = false;
        break;
      }
    }
    if (ok) out.emplace_back(static_cast<unsigned long>(k));
  }
  return out;
}

}  // namespace

SortedSample SortedSample::from_unsorted(std::vector<BigInt> ciphertexts,
                                         BigInt M) {
  if (ciphertexts.empty()) fail(ErrorKind::kEmptyInput, "empty ciphertext sample");
  if (M < 1) fail(ErrorKind::kParameterError, "M must be positive");
  std::sort(ciphertexts.begin(), ciphertexts.end());
  SortedSample s;
  s.ciphertexts_ = std::move(ciphertexts);
  s.M_ = std::move(M);
  return s;
}

Rational estimate_k(const SortedSample& sample) {
  Rational k(sample.max(), sample.M());
  k.canonicalize();
  return k;
}

bool WindowEstimate::contains(const BigInt& m, const Rational& radius) const {
  Rational diff = Rational(m) - m_hat;
  return abs(diff) < radius;
}

WindowEstimate window_attack(const BigInt& c, const SortedSample& sample) {
  Rational k_hat = estimate_k(sample);
  if (k_hat <= 0) fail(ErrorKind::kDomainError, "sample maximum is zero");
  Rational m_hat = Rational(c) / k_hat;
  m_hat.canonicalize();
  return {m_hat, k_hat};
}

Rational success_probability(const Rational& epsilon, unsigned long n) {
  if (epsilon < 0 || epsilon > 1) {
    fail(ErrorKind::kParameterError, "epsilon must lie in [0, 1]");
  }
  if (n < 1) fail(ErrorKind::kParameterError, "n must be at least 1");
  Rational base = Rational(1) - epsilon;
  base.canonicalize();
  BigInt num;
  BigInt den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), n);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), n);
  Rational out = Rational(1) - Rational(num, den);
  out.canonicalize();
  return out;
}

BandedValue leakage_bits(unsigned long n) {
  if (n < 1) fail(ErrorKind::kParameterError, "n must be at least 1");
  return {std::log2(static_cast<double>(n)), 2.0};
}

BandedValue bclo_leakage_bits(const BigInt& m) {
  if (m < 1) fail(ErrorKind::kParameterError, "m must be at least 1");
  return {0.5 * log2_rational(Rational(m)), 2.0};
}

BcloEstimate bclo_invert_estimate(const BigInt& c, const BigInt& M,
                                  const BigInt& N) {
  if (N < 1 || M < 1) fail(ErrorKind::kDomainError, "M and N must be positive");
  if (c < 0 || c > N) fail(ErrorKind::kDomainError, "c outside [0, N]");
  Rational m_hat(M * c, N);
  m_hat.canonicalize();
  Rational var = 2 * m_hat * (Rational(1) - m_hat / M);
  double v = var.get_d();
  return {m_hat, v > 0.0 ? std::sqrt(v) : 0.0};
}

bool residues_in_band(const std::vector<BigInt>& ciphertexts, const BigInt& k) {
  if (k < 1) return false;
  BigInt t = floor_three_quarter_power(k);
  BigInt lo = t + 1;
  BigInt hi = k - t - 1;
  if (lo > hi) return false;
  BigInt r;
  for (const auto& c : ciphertexts) {
    mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), k.get_mpz_t());
    if (r < lo || r > hi) return false;
  }
  return true;
}

std::vector<BigInt> bruteforce_gacd(const std::vector<BigInt>& ciphertexts,
                                    const BigInt& k_min, const BigInt& k_max) {
  if (ciphertexts.empty()) fail(ErrorKind::kEmptyInput, "no ciphertexts");
  if (k_min > k_max) return {};
  if (k_max - k_min > pow2(kBruteforceBudgetBits)) {
    fail(ErrorKind::kBudgetExceeded, "search range wider than 2^24");
  }
  bool small = k_max < pow2(32) && k_min >= 0;
  std::vector<std::uint64_t> small_cts;
  for (const auto& c : ciphertexts) {
    if (c < 0 || !c.fits_ulong_p()) {
      small = false;
      break;
    }
    small_cts.push_back(c.get_ui());
  }
  if (small) return bruteforce_small(small_cts, k_min.get_ui(), k_max.get_ui());

  std::vector<BigInt> out;
  for (BigInt k = std::max(k_min, BigInt(1)); k <= k_max; ++k) {
    if (residues_in_band(ciphertexts, k)) out.push_back(k);
  }
  return out;
}

LeakageTable flatten_leakage_report(const transforms::CdfModel& model) {
  LeakageTable table;
  table.per_m.assign(model.size(), 0.0);
  table.max = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m < model.size(); ++m) {
    Rational ratio = Rational(static_cast<unsigned long>(m)) * model.p(m) / model.F(m);
    ratio.canonicalize();
    double bits = ratio == 1 ? 0.0 : log2_rational(ratio);
    table.per_m[m] = bits;
    if (bits > table.max) {
      table.max = bits;
      table.argmax = m;
    }
  }
  if (model.size() < 2) table.max = 0.0;
  return table;
}

WindowRates run_window_experiment(const WindowExperiment& ex) {
  if (ex.trials < 1 || ex.n < 1) {
    fail(ErrorKind::kParameterError, "need at least one trial and one sample");
  }
  gacd::SchemeParams params;
  params.M = ex.M;
  params.lambda = ex.lambda;
  const Rational n_q(ex.n);
  const Rational ln2(std::log(2.0));
  const BigInt top = ex.M - 1;
  std::size_t hits_wide = 0;
  std::size_t hits_narrow = 0;
  std::vector<double> k_errors;
  k_errors.reserve(ex.trials);
  for (std::size_t t = 0; t < ex.trials; ++t) {
    auto gen = rand::from_seed(
        rand::derive_seed(ex.seed, "window/trial/" + std::to_string(t)));
    gacd::SecretKey key = gacd::keygen(params, gen);
    std::vector<BigInt> cts;
    cts.reserve(ex.n);
    for (unsigned long i = 0; i < ex.n; ++i) {
      cts.push_back(gacd::encrypt(rand::uniform_int(gen, 0, top), key, gen).value);
    }
    auto sample = SortedSample::from_unsorted(std::move(cts), ex.M);
    BigInt m = rand::uniform_int(gen, 0, top);
    auto est = window_attack(gacd::encrypt(m, key, gen).value, sample);
    Rational m_q(m);
    if (est.contains(m, m_q * ln2 / n_q)) ++hits_wide;
    if (est.contains(m, m_q / (2 * n_q))) ++hits_narrow;
    Rational rel = abs(est.k_hat - Rational(key.k())) / Rational(key.k());
    k_errors.push_back(rel.get_d());
  }
  std::sort(k_errors.begin(), k_errors.end());
  WindowRates rates;
  rates.at_ln2_over_n = static_cast<double>(hits_wide) / static_cast<double>(ex.trials);
  rates.at_half_over_n = static_cast<double>(hits_narrow) / static_cast<double>(ex.trials);
  rates.median_relative_k_error = k_errors[k_errors.size() / 2];
  return rates;
}

std::string metric_line(const std::string& name, const std::string& value,
                        const std::string& band) {
  return "metric=" + name + " value=" + value + " band=" + band;
}

std::string format_double(double v, int places) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(places) << v;
  return os.str();
}

}  // namespace ope::analysis
