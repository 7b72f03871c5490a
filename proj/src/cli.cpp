#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ope/analysis.hpp"
#include "ope/error.hpp"
#include "ope/pipeline.hpp"
#include "ope/transforms.hpp"

namespace ope::pipeline {
namespace {

// Carries an exit code out of a subcommand.
struct CommandFailure {
  int code;
  std::string message;
};

[[noreturn]] void exit_with(int code, const std::string& message) {
  throw CommandFailure{code, message};
}

AnyKey load_key(const std::string& path) {
  std::ifstream in(path);
  if (!in) exit_with(kExitParams, "cannot open key file '" + path + "'");
  try {
    return read_any_key(in);
  } catch (const Error& e) {
    exit_with(kExitParams, "bad key file '" + path + "': " + e.what());
  }
}

std::vector<NumberLine> load_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) exit_with(kExitData, "cannot open '" + path + "'");
  try {
    return read_numbers(in);
  } catch (const Error& e) {
    exit_with(kExitData, path + ": " + e.what());
  }
}

void save_numbers(const std::string& path, const std::vector<BigInt>& values) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) exit_with(kExitData, "cannot write '" + path + "'");
  write_numbers(out, values);
  if (!out) exit_with(kExitData, "write failed for '" + path + "'");
}

std::string line_ref(const std::string& path, std::size_t line_no) {
  return path + " line " + std::to_string(line_no);
}

// Encrypts or decrypts one value, mapping library errors onto the data exit code.
BigInt encrypt_one(const AnyKey& key, const BigInt& m,
                   rand::DeterministicGenerator& gen) {
  if (const auto* g = std::get_if<gacd::SecretKey>(&key)) {
    return gacd::encrypt(m, *g, gen).value;
  }
  return opf::opf_encrypt(m, std::get<opf::OpfKey>(key));
}

BigInt decrypt_one(const AnyKey& key, const BigInt& c) {
  if (const auto* g = std::get_if<gacd::SecretKey>(&key)) {
    return gacd::decrypt(gacd::Ciphertext{c}, *g);
  }
  return opf::opf_decrypt(c, std::get<opf::OpfKey>(key));
}

// ---------------------------------------------------------------------------

struct KeygenArgs {
  std::string scheme = "gacd";
  std::optional<std::string> M;
  std::optional<unsigned> rho;
  std::optional<unsigned> lambda;
  std::optional<std::string> N;
  std::string out;
  std::optional<std::string> seed;
};

int cmd_keygen(const KeygenArgs& a, std::ostream& out, std::ostream& err) {
  auto scheme = scheme_from_string(a.scheme);
  if (!scheme) exit_with(kExitParams, "unknown scheme '" + a.scheme + "'");
  if (a.M.has_value() == a.rho.has_value()) {
    exit_with(kExitParams, "give exactly one of --M or --rho");
  }
  BigInt M;
  try {
    M = a.M ? parse_decimal(*a.M) : pow2(*a.rho);
  } catch (const Error& e) {
    exit_with(kExitParams, e.what());
  }
  rand::Seed seed = resolve_seed(a.seed);

  AnyKey key = [&]() -> AnyKey {
    try {
      if (*scheme == Scheme::kGacd) {
        gacd::SchemeParams params;
        params.M = M;
        if (M < 2) exit_with(kExitParams, "M must be at least 2");
        params.lambda = a.lambda.value_or(
            std::max(gacd::min_lambda(M), gacd::kMinNoiseLambda));
        gacd::ValidationReport report = gacd::validate_params(params);
        if (!report.ok) exit_with(kExitParams, report.to_string());
        for (const auto& w : report.warnings) err << "warning: " << w << "\n";
        auto gen = rand::from_seed(rand::derive_seed(seed, "keygen/gacd"));
        return gacd::keygen(params, gen);
      }
      if (!is_power_of_two(M)) {
        exit_with(kExitParams, "OPF domains must be a power of two");
      }
      std::optional<BigInt> N;
      if (a.N) N = parse_decimal(*a.N);
      auto sampler = *scheme == Scheme::kOpfBeta ? opf::Sampler::kBeta
                                                 : opf::Sampler::kUniform;
      return opf::OpfKey::create(rand::derive_seed(seed, "keygen/opf"),
                                 static_cast<unsigned>(bit_length(M) - 1),
                                 sampler, N);
    } catch (const Error& e) {
      exit_with(kExitParams, e.what());
    }
  }();

  std::ofstream file(a.out, std::ios::trunc);
  if (!file) exit_with(kExitParams, "cannot write '" + a.out + "'");
  write_any_key(file, key);
  out << "wrote " << to_string(*scheme) << " key to " << a.out << "\n";
  return kExitOk;
}

struct EncryptArgs {
  std::string key;
  std::optional<std::string> in;
  std::optional<std::size_t> random;
  std::string out;
  std::optional<std::string> seed;
};

int cmd_encrypt(const EncryptArgs& a, std::ostream& out, std::ostream&) {
  if (a.in.has_value() == a.random.has_value()) {
    exit_with(kExitParams, "give exactly one of --in or --random");
  }
  AnyKey key = load_key(a.key);
  rand::Seed seed = resolve_seed(a.seed);
  BigInt bound = plaintext_bound(key);

  std::vector<NumberLine> plain;
  if (a.in) {
    plain = load_numbers(*a.in);
  } else {
    // rho-bit plaintexts: [0, 2^rho) for the OPF, [0, M) for GACD keys.
    auto pgen = rand::from_seed(rand::derive_seed(seed, "encrypt/plaintexts"));
    BigInt top = bound - 1;
    plain.resize(*a.random);
    for (std::size_t i = 0; i < plain.size(); ++i) {
      plain[i] = {i + 1, rand::uniform_int(pgen, 0, top)};
    }
  }

  auto gen = rand::from_seed(rand::derive_seed(seed, "encrypt/noise"));
  std::vector<BigInt> cipher;
  cipher.reserve(plain.size());
  const std::string src = a.in.value_or("<random>");
  for (const auto& p : plain) {
    if (p.value < 0 || p.value > bound) {
      exit_with(kExitData, line_ref(src, p.line_no) + ": plaintext " +
                               to_decimal(p.value) + " outside [0, " +
                               to_decimal(bound) + "]");
    }
    cipher.push_back(encrypt_one(key, p.value, gen));
  }
  save_numbers(a.out, cipher);
  if (a.random) {
    std::vector<BigInt> values;
    values.reserve(plain.size());
    for (const auto& p : plain) values.push_back(p.value);
    save_numbers(a.out + ".plain", values);
  }
  out << "encrypted " << cipher.size() << " values to " << a.out << "\n";
  return kExitOk;
}

struct DecryptArgs {
  std::string key;
  std::string in;
  std::string out;
};

int cmd_decrypt(const DecryptArgs& a, std::ostream& out, std::ostream&) {
  AnyKey key = load_key(a.key);
  std::vector<NumberLine> cipher = load_numbers(a.in);
  std::vector<BigInt> plain;
  plain.reserve(cipher.size());
  for (const auto& c : cipher) {
    try {
      plain.push_back(decrypt_one(key, c.value));
    } catch (const Error& e) {
      exit_with(kExitData, line_ref(a.in, c.line_no) + ": " + e.what());
    }
  }
  save_numbers(a.out, plain);
  out << "decrypted " << plain.size() << " values to " << a.out << "\n";
  return kExitOk;
}

struct SortVerifyArgs {
  std::string key;
  std::string in;
  std::optional<std::string> plain;
};

int cmd_sort_verify(const SortVerifyArgs& a, std::ostream& out, std::ostream&) {
  AnyKey key = load_key(a.key);
  std::vector<NumberLine> cipher = load_numbers(a.in);

  auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> order(cipher.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return cipher[x].value < cipher[y].value;
  });
  double sort_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();

  std::vector<BigInt> decrypted(cipher.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const NumberLine& c = cipher[order[i]];
    try {
      decrypted[i] = decrypt_one(key, c.value);
    } catch (const Error& e) {
      exit_with(kExitData, line_ref(a.in, c.line_no) + ": " + e.what());
    }
    if (i > 0 && decrypted[i] < decrypted[i - 1]) {
      exit_with(kExitOrder, "order violation at sorted index " + std::to_string(i) +
                                " (" + line_ref(a.in, c.line_no) + ")");
    }
  }

  if (a.plain) {
    std::vector<NumberLine> side = load_numbers(*a.plain);
    if (side.size() != cipher.size()) {
      exit_with(kExitData, "plaintext sidecar has " + std::to_string(side.size()) +
                               " lines, expected " + std::to_string(cipher.size()));
    }
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (side[order[i]].value < side[order[i - 1]].value) {
        exit_with(kExitOrder, "sidecar order violation at sorted index " +
                                  std::to_string(i) + " (" +
                                  line_ref(*a.plain, side[order[i]].line_no) + ")");
      }
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (side[order[i]].value != decrypted[i]) {
        exit_with(kExitData, line_ref(*a.plain, side[order[i]].line_no) +
                                 ": decrypts to " + to_decimal(decrypted[i]));
      }
    }
  }

  out << "verified count=" << cipher.size() << " sort_ms="
      << analysis::format_double(sort_ms, 3) << "\n";
  out << analysis::metric_line("sort_verify.count", std::to_string(cipher.size()), "0")
      << "\n";
  out << analysis::metric_line("sort_verify.sort_ms", analysis::format_double(sort_ms, 3),
                               "0")
      << "\n";
  return kExitOk;
}

struct BenchArgs {
  std::vector<std::string> schemes{"gacd", "opf-uniform", "opf-beta"};
  std::vector<unsigned> rhos{7, 15, 31, 63, 127};
  std::size_t count = 10000;
  std::size_t repeat = 5;
  std::optional<std::string> seed;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchConfig config;
  for (const auto& name : a.schemes) {
    auto s = scheme_from_string(name);
    if (!s) {
      err << "warning: skipping unknown scheme '" << name << "'\n";
      continue;
    }
    config.schemes.push_back(*s);
  }
  config.rhos = a.rhos;
  config.count = a.count;
  config.repeat = a.repeat;
  config.seed = resolve_seed(a.seed);
  std::vector<BenchResult> results;
  try {
    results = run_bench(config, err);
  } catch (const Error& e) {
    exit_with(kExitParams, e.what());
  }

  out << std::left << std::setw(12) << "scheme" << std::right << std::setw(5)
      << "rho" << std::setw(12) << "init(ms)" << std::setw(12) << "enc(us)"
      << std::setw(12) << "dec(us)" << std::setw(12) << "sort(ms)"
      << std::setw(8) << "cv" << "\n";
  for (const auto& r : results) {
    out << std::left << std::setw(12) << to_string(r.scheme) << std::right
        << std::setw(5) << r.rho << std::setw(12)
        << analysis::format_double(r.init_ms, 2) << std::setw(12)
        << analysis::format_double(r.enc_us_mean, 2) << std::setw(12)
        << analysis::format_double(r.dec_us_mean, 2) << std::setw(12)
        << analysis::format_double(r.sort_ms, 2) << std::setw(8)
        << analysis::format_double(r.enc_cv, 3) << "\n";
  }
  for (const auto& r : results) {
    std::string prefix =
        "bench." + std::string(to_string(r.scheme)) + ".rho" + std::to_string(r.rho);
    double sd = r.enc_cv * r.enc_us_mean;
    out << analysis::metric_line(prefix + ".init_ms",
                                 analysis::format_double(r.init_ms, 2), "0")
        << "\n"
        << analysis::metric_line(prefix + ".enc_us",
                                 analysis::format_double(r.enc_us_mean, 2),
                                 analysis::format_double(sd, 2))
        << "\n"
        << analysis::metric_line(prefix + ".dec_us",
                                 analysis::format_double(r.dec_us_mean, 2), "0")
        << "\n"
        << analysis::metric_line(prefix + ".sort_ms",
                                 analysis::format_double(r.sort_ms, 2), "0")
        << "\n"
        << analysis::metric_line(prefix + ".count", std::to_string(r.count), "0")
        << "\n";
  }
  return kExitOk;
}

struct AnalyzeArgs {
  std::string in;
  std::string M;
  std::vector<std::string> challenges;
  std::optional<std::string> bruteforce;
  std::optional<std::string> cdf;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream&) {
  BigInt M;
  try {
    M = parse_decimal(a.M);
  } catch (const Error& e) {
    exit_with(kExitParams, e.what());
  }
  if (M < 1) exit_with(kExitParams, "M must be positive");
  std::vector<NumberLine> lines = load_numbers(a.in);
  std::vector<BigInt> values;
  values.reserve(lines.size());
  for (auto& l : lines) values.push_back(l.value);
  if (values.empty()) exit_with(kExitData, "no ciphertexts in '" + a.in + "'");

  const std::vector<BigInt> raw = values;
  auto sample = analysis::SortedSample::from_unsorted(std::move(values), M);
  Rational k_hat = analysis::estimate_k(sample);
  auto leak = analysis::leakage_bits(sample.n());

  out << "n      " << sample.n() << "\n";
  out << "k_hat  " << to_decimal(k_hat, 6) << "\n";
  out << "leak   " << analysis::format_double(leak.value, 3) << " +- "
      << analysis::format_double(leak.band, 1) << " bits\n";
  out << analysis::metric_line("n", std::to_string(sample.n()), "0") << "\n";
  out << analysis::metric_line("k_hat", to_decimal(k_hat, 6), "0") << "\n";
  out << analysis::metric_line("leakage_bits", analysis::format_double(leak.value, 6),
                               analysis::format_double(leak.band, 1))
      << "\n";

  const Rational n_q(static_cast<unsigned long>(sample.n()));
  // ln 2 to double precision is ample for reporting a radius.
  const Rational ln2(std::log(2.0));
  for (const auto& text : a.challenges) {
    BigInt c;
    try {
      c = parse_decimal(text);
    } catch (const Error& e) {
      exit_with(kExitParams, e.what());
    }
    auto est = analysis::window_attack(c, sample);
    Rational r_lo = est.m_hat / (2 * n_q);
    Rational r_hi = est.m_hat * ln2 / n_q;
    out << "challenge " << to_decimal(c) << ": m_hat " << to_decimal(est.m_hat, 3)
        << ", radius m/(2n) " << to_decimal(r_lo, 3) << ", radius m ln2/n "
        << to_decimal(r_hi, 3) << "\n";
    out << analysis::metric_line("challenge.m_hat", to_decimal(est.m_hat, 6), "0")
        << "\n";
    out << analysis::metric_line("challenge.radius_half_over_n", to_decimal(r_lo, 6),
                                 "0")
        << "\n";
    out << analysis::metric_line("challenge.radius_ln2_over_n", to_decimal(r_hi, 6),
                                 "0")
        << "\n";
  }

  if (a.bruteforce) {
    auto dots = a.bruteforce->find("..");
    if (dots == std::string::npos) {
      exit_with(kExitParams, "--bruteforce expects k_min..k_max");
    }
    std::vector<BigInt> candidates;
    try {
      BigInt lo = parse_decimal(a.bruteforce->substr(0, dots));
      BigInt hi = parse_decimal(a.bruteforce->substr(dots + 2));
      candidates = analysis::bruteforce_gacd(raw, lo, hi);
    } catch (const Error& e) {
      exit_with(kExitParams, e.what());
    }
    out << "bruteforce candidates " << candidates.size() << "\n";
    out << analysis::metric_line("bruteforce.candidates",
                                 std::to_string(candidates.size()), "0")
        << "\n";
    for (const auto& k : candidates) out << "candidate=" << to_decimal(k) << "\n";
  }

  if (a.cdf) {
    std::ifstream in(*a.cdf);
    if (!in) exit_with(kExitParams, "cannot open '" + *a.cdf + "'");
    try {
      auto model = transforms::read_cdf(in);
      auto table = analysis::flatten_leakage_report(model);
      out << "flatten leakage max " << analysis::format_double(table.max, 4)
          << " bits at m=" << table.argmax << "\n";
      out << analysis::metric_line("flatten_leakage_max",
                                   analysis::format_double(table.max, 6), "0")
          << "\n";
    } catch (const Error& e) {
      exit_with(kExitParams, e.what());
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Order-preserving encryption toolkit"};
  app.require_subcommand(1);

  KeygenArgs keygen;
  auto* kg = app.add_subcommand("keygen", "Generate a key file");
  kg->add_option("--scheme", keygen.scheme, "gacd | opf-uniform | opf-beta");
  kg->add_option("--M", keygen.M, "Plaintext bound M");
  kg->add_option("--rho", keygen.rho, "Plaintext bits; M = 2^rho");
  kg->add_option("--lambda", keygen.lambda, "Security parameter (gacd)");
  kg->add_option("--N", keygen.N, "Range bound (opf), default M^2");
  kg->add_option("--out", keygen.out, "Key file")->required();
  kg->add_option("--seed", keygen.seed, "Seed as hex");

  EncryptArgs enc;
  auto* en = app.add_subcommand("encrypt", "Encrypt a plaintext file");
  en->add_option("--key", enc.key)->required();
  en->add_option("--in", enc.in, "Newline-separated decimal plaintexts");
  en->add_option("--random", enc.random, "Generate this many random plaintexts");
  en->add_option("--out", enc.out)->required();
  en->add_option("--seed", enc.seed, "Seed as hex");

  DecryptArgs dec;
  auto* de = app.add_subcommand("decrypt", "Decrypt a ciphertext file");
  de->add_option("--key", dec.key)->required();
  de->add_option("--in", dec.in)->required();
  de->add_option("--out", dec.out)->required();

  SortVerifyArgs sv;
  auto* so = app.add_subcommand("sort-verify",
                                "Sort ciphertexts, decrypt, check plaintext order");
  so->add_option("--key", sv.key)->required();
  so->add_option("--in", sv.in)->required();
  so->add_option("--plain", sv.plain, "Plaintext sidecar aligned with --in");

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "Time encryption and decryption");
  be->add_option("--schemes", bench.schemes)->delimiter(',');
  be->add_option("--rho", bench.rhos)->delimiter(',');
  be->add_option("--count", bench.count);
  be->add_option("--repeat", bench.repeat);
  be->add_option("--seed", bench.seed, "Seed as hex");

  AnalyzeArgs an;
  auto* az = app.add_subcommand("analyze", "Window one-wayness estimators");
  az->add_option("--in", an.in)->required();
  az->add_option("--M", an.M)->required();
  az->add_option("--challenge", an.challenges);
  az->add_option("--bruteforce", an.bruteforce, "k_min..k_max");
  az->add_option("--cdf", an.cdf, "CDF model for the flattening leakage table");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitParams;
  }

  try {
    if (kg->parsed()) return cmd_keygen(keygen, out, err);
    if (en->parsed()) return cmd_encrypt(enc, out, err);
    if (de->parsed()) return cmd_decrypt(dec, out, err);
    if (so->parsed()) return cmd_sort_verify(sv, out, err);
    if (be->parsed()) return cmd_bench(bench, out, err);
    if (az->parsed()) return cmd_analyze(an, out, err);
  } catch (const CommandFailure& f) {
    err << "error: " << f.message << "\n";
    return f.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitParams;
}

}  // namespace ope::pipeline
