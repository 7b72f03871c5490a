#pragma once

// File formats, bulk operations, benchmarks and the command-line driver.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ope/bigint.hpp"
#include "ope/gacd_ope.hpp"
#include "ope/opf_recursive.hpp"
#include "ope/rand_core.hpp"

namespace ope::pipeline {

enum ExitCode : int {
  kExitOk = 0,
  kExitParams = 2,
  kExitData = 3,
  kExitOrder = 4,
};

inline constexpr const char* kSeedEnv = "OPE_SEED_HEX";

enum class Scheme { kGacd, kOpfUniform, kOpfBeta };

std::string_view to_string(Scheme scheme);
std::optional<Scheme> scheme_from_string(std::string_view name);

using AnyKey = std::variant<gacd::SecretKey, opf::OpfKey>;

AnyKey read_any_key(std::istream& in);
void write_any_key(std::ostream& out, const AnyKey& key);

// Largest plaintext accepted by the key.
BigInt plaintext_bound(const AnyKey& key);

// Uses `explicit_hex` if set, then OPE_SEED_HEX, then system entropy.
rand::Seed resolve_seed(const std::optional<std::string>& explicit_hex);

struct NumberLine {
  std::size_t line_no = 0;
  BigInt value;
};

// Newline-separated decimal integers; throws kFormatError naming the line.
std::vector<NumberLine> read_numbers(std::istream& in);
void write_numbers(std::ostream& out, const std::vector<BigInt>& values);

struct BenchConfig {
  std::vector<Scheme> schemes;
  std::vector<unsigned> rhos;
  std::size_t count = 10000;
  std::size_t repeat = 5;
  rand::Seed seed;
};

struct BenchResult {
  Scheme scheme = Scheme::kGacd;
  unsigned rho = 0;
  double init_ms = 0.0;
  double enc_us_mean = 0.0;
  double dec_us_mean = 0.0;
  double sort_ms = 0.0;
  std::size_t count = 0;
  std::vector<double> enc_batch_us;  // per-batch means
  double enc_cv = 0.0;               // coefficient of variation of batch means
};

// Single-threaded timing harness. Unsupported (scheme, rho) pairs are skipped
// with a warning on `log`.
std::vector<BenchResult> run_bench(const BenchConfig& config, std::ostream& log);

// Entry point for the `ope` tool; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ope::pipeline
