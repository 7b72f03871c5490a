#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>
#include <string>

#include "ope/error.hpp"
#include "ope/gacd_ope.hpp"
#include "ope/opf_recursive.hpp"
#include "ope/pipeline.hpp"

namespace ope::pipeline {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

constexpr std::size_t kWarmupOps = 256;

// Uniform encrypt/decrypt interface over both scheme families.
class Harness {
 public:
  virtual ~Harness() = default;
  virtual BigInt encrypt(const BigInt& m) = 0;
  virtual BigInt decrypt(const BigInt& c) = 0;
};

class GacdHarness : public Harness {
 public:
  GacdHarness(gacd::SecretKey key, const rand::Seed& seed)
      : key_(std::move(key)), gen_(rand::derive_seed(seed, "bench/noise")) {}
  BigInt encrypt(const BigInt& m) override {
    return gacd::encrypt(m, key_, gen_).value;
  }
  BigInt decrypt(const BigInt& c) override {
    return gacd::decrypt(gacd::Ciphertext{c}, key_);
  }

 private:
  gacd::SecretKey key_;
  rand::DeterministicGenerator gen_;
};

class OpfHarness : public Harness {
 public:
  explicit OpfHarness(opf::OpfKey key) : key_(std::move(key)) {}
  BigInt encrypt(const BigInt& m) override { return opf::opf_encrypt(m, key_); }
  BigInt decrypt(const BigInt& c) override { return opf::opf_decrypt(c, key_); }

 private:
  opf::OpfKey key_;
};

std::unique_ptr<Harness> make_harness(Scheme scheme, unsigned rho,
                                      const rand::Seed& seed) {
  if (scheme == Scheme::kGacd) {
    gacd::SchemeParams params;
    params.M = pow2(rho);
    params.lambda = std::max(gacd::min_lambda(params.M), gacd::kMinNoiseLambda);
    auto gen = rand::from_seed(rand::derive_seed(seed, "bench/keygen"));
    return std::make_unique<GacdHarness>(gacd::keygen(params, gen), seed);
  }
  auto sampler =
      scheme == Scheme::kOpfBeta ? opf::Sampler::kBeta : opf::Sampler::kUniform;
  auto key = opf::OpfKey::create(rand::derive_seed(seed, "bench/opf"), rho, sampler);
  // Endpoint derivation is the only per-key setup the OPF has.
  (void)opf::init_endpoints(key);
  return std::make_unique<OpfHarness>(std::move(key));
}

bool supported(Scheme scheme, unsigned rho, std::string& why) {
  if (rho < 1) {
    why = "rho must be at least 1";
    return false;
  }
  if (scheme == Scheme::kGacd && rho < 2) {
    why = "gacd needs rho >= 2";
    return false;
  }
  if (scheme == Scheme::kOpfBeta && rho > opf::kMaxBetaRBits) {
    why = "beta distribution parameters exceed 64-bit precision";
    return false;
  }
  return true;
}

}  // namespace

std::vector<BenchResult> run_bench(const BenchConfig& config, std::ostream& log) {
  if (config.count < 1) fail(ErrorKind::kParameterError, "count must be at least 1");
  if (config.repeat < 1) fail(ErrorKind::kParameterError, "repeat must be at least 1");
  std::vector<BenchResult> results;
  for (Scheme scheme : config.schemes) {
    for (unsigned rho : config.rhos) {
      std::string why;
      if (!supported(scheme, rho, why)) {
        log << "warning: skipping " << to_string(scheme) << " at rho=" << rho
            << ": " << why << "\n";
        continue;
      }
      std::string label = std::string(to_string(scheme)) + "/" + std::to_string(rho);
      rand::Seed seed = rand::derive_seed(config.seed, label);

      BenchResult res;
      res.scheme = scheme;
      res.rho = rho;
      res.count = config.count;

      auto start = Clock::now();
      auto harness = make_harness(scheme, rho, seed);
      res.init_ms = elapsed_us(start) / 1000.0;

      auto pgen = rand::from_seed(rand::derive_seed(seed, "bench/plaintexts"));
      std::vector<BigInt> plain(config.count);
      BigInt top = pow2(rho) - 1;
      for (auto& m : plain) m = rand::uniform_int(pgen, 0, top);

      for (std::size_t i = 0; i < std::min(kWarmupOps, plain.size()); ++i) {
        (void)harness->decrypt(harness->encrypt(plain[i]));
      }

      std::vector<BigInt> cipher(config.count);
      double enc_total = 0.0;
      double dec_total = 0.0;
      double sort_total = 0.0;
      std::size_t mismatches = 0;
      for (std::size_t batch = 0; batch < config.repeat; ++batch) {
        start = Clock::now();
        for (std::size_t i = 0; i < plain.size(); ++i) {
          cipher[i] = harness->encrypt(plain[i]);
        }
        double enc_us = elapsed_us(start);

        start = Clock::now();
        for (std::size_t i = 0; i < cipher.size(); ++i) {
          if (harness->decrypt(cipher[i]) != plain[i]) ++mismatches;
        }
        double dec_us = elapsed_us(start);

        std::vector<BigInt> sorted = cipher;
        start = Clock::now();
        std::sort(sorted.begin(), sorted.end());
        sort_total += elapsed_us(start);

        double per_op = enc_us / static_cast<double>(config.count);
        res.enc_batch_us.push_back(per_op);
        enc_total += enc_us;
        dec_total += dec_us;
      }
      if (mismatches != 0) {
        log << "warning: " << mismatches << " round-trip mismatches over "
            << config.repeat << " batches for " << label
            << " (OPF range collisions)\n";
      }
      double ops = static_cast<double>(config.count * config.repeat);
      res.enc_us_mean = enc_total / ops;
      res.dec_us_mean = dec_total / ops;
      res.sort_ms = sort_total / static_cast<double>(config.repeat) / 1000.0;

      double mean = 0.0;
      for (double v : res.enc_batch_us) mean += v;
      mean /= static_cast<double>(res.enc_batch_us.size());
      double var = 0.0;
      for (double v : res.enc_batch_us) var += (v - mean) * (v - mean);
      var /= static_cast<double>(res.enc_batch_us.size());
      res.enc_cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
      results.push_back(std::move(res));
    }
  }
  return results;
}

}  // namespace ope::pipeline
