// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ope/analysis.hpp"
#include "ope/beta_sampler.hpp"
#include "ope/error.hpp"
#include "ope/gacd_ope.hpp"
#include "ope/opf_recursive.hpp"
#include "ope/pipeline.hpp"
#include "ope/transforms.hpp"
#include "oracles.hpp"

namespace {

using namespace ope;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int places = 4) { return analysis::format_double(v, places); }

rand::DeterministicGenerator gen_for(const std::string& label) {
  return rand::from_seed(rand::derive_seed(rand::Seed{}, "acceptance/" + label));
}

gacd::SecretKey gacd_key(unsigned rho, rand::DeterministicGenerator& gen) {
  gacd::SchemeParams p;
  p.M = pow2(rho);
  p.lambda = gacd::min_lambda(p.M);
  return gacd::keygen(p, gen);
}

Outcome ac1_round_trip_order() {
  auto t0 = Clock::now();
  auto gen = gen_for("1");
  gacd::SecretKey key = gacd_key(15, gen);
  std::vector<std::pair<BigInt, BigInt>> mc;
  std::size_t bad_round_trip = 0;
  for (int i = 0; i < 10000; ++i) {
    BigInt m = rand::uniform_int(gen, 0, key.params().M - 1);
    BigInt c = gacd::encrypt(m, key, gen).value;
    if (gacd::decrypt(gacd::Ciphertext{c}, key) != m) ++bad_round_trip;
    mc.emplace_back(m, c);
  }
  // Group by plaintext; every ciphertext of a larger plaintext must exceed
  // every ciphertext of a smaller one.
  std::map<BigInt, std::pair<BigInt, BigInt>> range;
  for (auto& [m, c] : mc) {
    auto it = range.find(m);
    if (it == range.end()) {
      range.emplace(m, std::make_pair(c, c));
    } else {
      it->second.first = std::min(it->second.first, c);
      it->second.second = std::max(it->second.second, c);
    }
  }
  std::size_t order_violations = 0;
  const BigInt* prev_max = nullptr;
  for (auto& [m, lohi] : range) {
    if (prev_max != nullptr && !(*prev_max < lohi.first)) ++order_violations;
    prev_max = &lohi.second;
  }
  double secs = seconds_since(t0);
  Outcome o;
  o.pass = bad_round_trip == 0 && order_violations == 0 && secs < 10.0;
  o.detail = "lambda=" + std::to_string(key.params().lambda) +
             " round_trip_failures=" + std::to_string(bad_round_trip) +
             " order_violations=" + std::to_string(order_violations) + " seconds=" + fmt(secs, 2);
  return o;
}

Outcome ac2_randomisation() {
  auto gen = gen_for("2");
  gacd::SecretKey key = gacd_key(15, gen);
  int greater = 0;
  for (int i = 0; i < 10000; ++i) {
    BigInt m = rand::uniform_int(gen, 0, key.params().M);
    BigInt c1 = gacd::encrypt(m, key, gen).value;
    BigInt c2 = gacd::encrypt(m, key, gen).value;
    greater += c2 > c1;
  }
  double f = greater / 10000.0;
  return {f >= 0.48 && f <= 0.52, "fraction=" + fmt(f)};
}

Outcome ac3_beta0() {
  gacd::Beta0 b = gacd::beta0_bound(Rational(8, 11));
  return {b.exact && b.value == Rational(6, 11),
          "beta0=" + b.value.get_str() + (b.exact ? " exact" : " approximate")};
}

Outcome ac4_expansion() {
  bool ok = true;
  std::string detail;
  for (unsigned rho : {15u, 31u, 63u}) {
    auto gen = gen_for("4/" + std::to_string(rho));
    gacd::SecretKey key = gacd_key(rho, gen);
    std::size_t max_bits = 0;
    for (int i = 0; i < 10000; ++i) {
      BigInt m = rand::uniform_int(gen, 0, key.params().M);
      max_bits = std::max(max_bits, bit_length(gacd::encrypt(m, key, gen).value));
    }
    max_bits = std::max(max_bits,
                        bit_length(gacd::encrypt(key.params().M - 1, key, gen).value));
    double ratio = static_cast<double>(max_bits) / rho;
    ok = ok && ratio >= 3.4 && ratio <= 4.0;
    detail += "rho" + std::to_string(rho) + "=" + fmt(ratio, 3) + "(" +
              std::to_string(max_bits) + "b) ";
  }
  detail.pop_back();
  return {ok, detail};
}

Outcome ac5_window() {
  auto t0 = Clock::now();
  analysis::WindowExperiment ex;
  ex.n = 1000;
  ex.M = pow2(20);
  ex.lambda = 60;
  ex.trials = 200;
  ex.seed = rand::derive_seed(rand::Seed{}, "acceptance/5");
  analysis::WindowRates r = analysis::run_window_experiment(ex);
  double secs = seconds_since(t0);
  return {r.at_ln2_over_n >= 0.43 && r.at_half_over_n <= 0.57 && secs < 300.0,
          "rate_ln2_over_n=" + fmt(r.at_ln2_over_n, 3) +
              " rate_half_over_n=" + fmt(r.at_half_over_n, 3) + " seconds=" + fmt(secs, 2)};
}

// Reference ciphertexts of m = 0, 1, 64, 127, 128 under the all-zero seed,
// recorded from a prior run; guards bit-stability across builds.
const std::map<opf::Sampler, std::vector<std::string>> kOpfGolden = {
    {opf::Sampler::kUniform, {"856", "4875", "522159", "1039618", "1048555"}},
    {opf::Sampler::kBeta, {"856", "1597", "466057", "1009885", "1048555"}},
};

Outcome ac6_opf_replay() {
  constexpr int kKeys = 20;
  bool ok = true;
  std::string detail;
  for (opf::Sampler s : {opf::Sampler::kUniform, opf::Sampler::kBeta}) {
    int failing_keys = 0;
    long failures = 0;
    int unchanged_rekeys = 0;
    for (int i = 0; i < kKeys; ++i) {
      auto seed = rand::derive_seed(rand::Seed{}, "acceptance/6/" + std::to_string(i));
      auto key = opf::OpfKey::create(seed, 7, s, pow2(20));
      auto other = opf::OpfKey::create(rand::derive_seed(seed, "rekey"), 7, s, pow2(20));
      int key_fail = 0;
      bool differs = false;
      for (int m = 0; m <= 128; ++m) {
        BigInt c = opf::opf_encrypt(m, key);
        BigInt back = -1;
        try {
          back = opf::opf_decrypt(c, key);
        } catch (const Error&) {
        }
        key_fail += back != m;
        differs = differs || opf::opf_encrypt(m, other) != c;
      }
      failures += key_fail;
      failing_keys += key_fail != 0;
      unchanged_rekeys += !differs;
    }
    auto zero = opf::OpfKey::create(rand::Seed{}, 7, s, pow2(20));
    std::vector<std::string> got;
    for (int m : {0, 1, 64, 127, 128}) got.push_back(opf::opf_encrypt(m, zero).get_str());
    bool stable = got == kOpfGolden.at(s);
    bool part = failing_keys == 0 && unchanged_rekeys == 0 && stable;
    ok = ok && part;
    detail += std::string(opf::to_string(s)) + ":keys_with_round_trip_failures=" +
              std::to_string(failing_keys) + "/" + std::to_string(kKeys) +
              ",failed_plaintexts=" + std::to_string(failures) +
              ",rekey_unchanged=" + std::to_string(unchanged_rekeys) +
              ",golden=" + (stable ? "match" : "MISMATCH[" + got[0] + "," + got[1] + "," +
                                                   got[2] + "," + got[3] + "," + got[4] + "]") +
              " ";
  }
  detail.pop_back();
  return {ok, detail};
}

Outcome ac7_beta_fidelity() {
  auto gen = gen_for("7");
  std::vector<double> draws;
  draws.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    draws.push_back(std::ldexp(opf::beta_dyadic(gen, 8, 9, 64).get_d(), -64));
  }
  double ks = testing::ks_distance(
      draws, [](double x) { return testing::beta_cdf_integer(x, 8, 9); });
  const BigInt y = pow2(40);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    sum += Rational(opf::sample_mid(gen, y, 1, 1, opf::Sampler::kBeta), y).get_d();
  }
  double mean = sum / 100000;
  return {ks <= 0.01 && std::abs(mean - 0.5) <= 0.01,
          "ks_beta_8_9=" + fmt(ks, 5) + " mean_beta_1_1=" + fmt(mean, 4)};
}

Outcome ac8_flatten() {
  const unsigned long M = 1024;
  const unsigned long total = 3 * (M / 2) + (M / 2);
  std::vector<Rational> F{0};
  unsigned long acc = 0;
  for (unsigned long m = 0; m < M; ++m) {
    acc += m < M / 2 ? 3 : 1;
    F.emplace_back(BigInt(acc), BigInt(total));
    F.back().canonicalize();
  }
  auto model = transforms::CdfModel::create(M, pow2(20), F);
  auto gen = gen_for("8");
  std::size_t failures = 0;
  for (unsigned long m = 0; m < M; ++m) {
    for (int i = 0; i < 10; ++i) {
      failures += transforms::unflatten(transforms::flatten(m, model, gen), model) != m;
    }
  }
  return {failures == 0, "failures=" + std::to_string(failures) + "/10240"};
}

Outcome ac9_distinctness() {
  auto gen = gen_for("9");
  gacd::SecretKey gkey = gacd_key(7, gen);
  auto okey = opf::OpfKey::create(rand::derive_seed(rand::Seed{}, "acceptance/9/opf"), 7,
                                  opf::Sampler::kBeta);
  auto ukey = opf::OpfKey::create(rand::derive_seed(rand::Seed{}, "acceptance/9/opf"), 7,
                                  opf::Sampler::kUniform);
  std::set<BigInt> g, o, u;
  for (int i = 0; i < 10000; ++i) {
    BigInt m = rand::uniform_int(gen, 0, 127);
    g.insert(gacd::encrypt(m, gkey, gen).value);
    o.insert(opf::opf_encrypt(m, okey));
    u.insert(opf::opf_encrypt(m, ukey));
  }
  return {o.size() <= 128 && u.size() <= 128 && g.size() >= 9900,
          "opf_beta_distinct=" + std::to_string(o.size()) +
              " opf_uniform_distinct=" + std::to_string(u.size()) +
              " gacd_distinct=" + std::to_string(g.size())};
}

Outcome ac10_timing() {
  pipeline::BenchConfig cfg;
  cfg.schemes = {pipeline::Scheme::kGacd, pipeline::Scheme::kOpfUniform};
  cfg.rhos = {127};
  cfg.count = 10000;
  cfg.repeat = 1;
  cfg.seed = rand::derive_seed(rand::Seed{}, "acceptance/10");
  std::ostringstream log;
  auto results = pipeline::run_bench(cfg, log);
  if (results.size() != 2) return {false, "bench returned " + std::to_string(results.size())};
  double g = results[0].enc_us_mean;
  double u = results[1].enc_us_mean;
  double ratio = g > 0 ? u / g : 0.0;
  return {ratio >= 10.0, "gacd_enc_us=" + fmt(g, 3) + " opf_uniform_enc_us=" + fmt(u, 2) +
                             " ratio=" + fmt(ratio, 1)};
}

Outcome ac11_bruteforce() {
  auto t0 = Clock::now();
  auto gen = gen_for("11");
  gacd::SchemeParams p;
  p.M = 64;
  p.lambda = 17;
  gacd::SecretKey key = gacd::keygen(p, gen);
  std::vector<BigInt> cts;
  for (int i = 0; i < 50; ++i) {
    cts.push_back(gacd::encrypt(rand::uniform_int(gen, 0, p.M), key, gen).value);
  }
  auto cands = analysis::bruteforce_gacd(cts, pow2(17), pow2(18) - 1);
  bool found = std::find(cands.begin(), cands.end(), key.k()) != cands.end();
  bool sound = std::all_of(cands.begin(), cands.end(), [&](const BigInt& k) {
    gacd::NoiseBand band = gacd::noise_band(k);
    return std::all_of(cts.begin(), cts.end(), [&](const BigInt& c) {
      BigInt r = c % k;
      return r >= band.lo && r <= band.hi;
    });
  });
  double secs = seconds_since(t0);
  return {found && sound && secs < 60.0,
          "k=" + key.k().get_str() + " candidates=" + std::to_string(cands.size()) +
              " true_k_found=" + (found ? "yes" : "no") + " all_in_band=" +
              (sound ? "yes" : "no") + " seconds=" + fmt(secs, 2)};
}

Outcome ac12_pipeline() {
  namespace fs = std::filesystem;
  auto t0 = Clock::now();
  fs::path dir = fs::temp_directory_path() / "ope_acceptance_12";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto p = [&](const char* name) { return (dir / name).string(); };
  std::ostringstream out, err;
  int code = pipeline::run_cli({"keygen", "--scheme", "gacd", "--rho", "31", "--out",
                                p("k.key"), "--seed", "0c0ffee0"},
                               out, err);
  if (code == 0) {
    code = pipeline::run_cli({"encrypt", "--key", p("k.key"), "--random", "10000", "--out",
                              p("c.txt"), "--seed", "0c0ffee1"},
                             out, err);
  }
  if (code == 0) {
    code = pipeline::run_cli({"sort-verify", "--key", p("k.key"), "--in", p("c.txt"),
                              "--plain", p("c.txt.plain")},
                             out, err);
  }
  double secs = seconds_since(t0);
  fs::remove_all(dir);
  std::string msg = err.str();
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return {code == 0 && secs < 30.0,
          "exit=" + std::to_string(code) + " seconds=" + fmt(secs, 2) +
              (msg.empty() ? "" : " stderr=" + msg)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gacd round trip and order", ac1_round_trip_order},
      {"equal-plaintext randomisation", ac2_randomisation},
      {"beta0 arithmetic", ac3_beta0},
      {"ciphertext expansion", ac4_expansion},
      {"window one-wayness bracketing", ac5_window},
      {"opf determinism and replay", ac6_opf_replay},
      {"beta sampler fidelity", ac7_beta_fidelity},
      {"flattening exactness", ac8_flatten},
      {"low-entropy distinctness", ac9_distinctness},
      {"timing ratio at rho 127", ac10_timing},
      {"brute-force oracle", ac11_bruteforce},
      {"end-to-end pipeline", ac12_pipeline},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s | %s\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
