#include "ope/gacd_ope.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ope/error.hpp"

namespace ope::gacd {
namespace {

bool is_perfect_square(const BigInt& x, BigInt& root) {
  if (sgn(x) < 0) return false;
  if (mpz_perfect_square_p(x.get_mpz_t()) == 0) return false;
  mpz_sqrt(root.get_mpz_t(), x.get_mpz_t());
  return true;
}

std::string expect_line(std::istream& in, const std::string& field) {
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorKind::kFormatError, "key file truncated before '" + field + "'");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string prefix = field + "=";
  if (line.rfind(prefix, 0) != 0) {
    fail(ErrorKind::kFormatError,
         "expected '" + prefix + "...' in key file, got '" + line + "'");
  }
  return line.substr(prefix.size());
}

}  // namespace

unsigned min_lambda(const BigInt& M) {
  if (M < 2) fail(ErrorKind::kInvalidDomain, "M must be at least 2");
  BigInt m8;
  mpz_pow_ui(m8.get_mpz_t(), M.get_mpz_t(), 8);
  // Start from a bit-length lower bound and step up to the exact answer.
  std::size_t lg_floor = bit_length(M) - 1;
  auto lambda = static_cast<unsigned>((8 * lg_floor) / 3);
  while (pow2(3 * static_cast<std::size_t>(lambda)) <= m8) ++lambda;
  return lambda;
}

Beta0 beta0_bound(const Rational& alpha0) {
  if (alpha0 < 0 || alpha0 > 1) {
    fail(ErrorKind::kOutOfDomain, "alpha0 must lie in [0, 1]");
  }
  Rational radicand = Rational(1) - alpha0 - alpha0 * alpha0 / 2;
  radicand.canonicalize();
  if (radicand < 0) {
    fail(ErrorKind::kOutOfDomain, "1 - alpha0 - alpha0^2/2 is negative");
  }
  Rational base = Rational(1) - alpha0 / 2;
  BigInt num_root;
  BigInt den_root;
  if (is_perfect_square(radicand.get_num(), num_root) &&
      is_perfect_square(radicand.get_den(), den_root)) {
    Rational v = base - Rational(num_root, den_root);
    v.canonicalize();
    return {v, true};
  }
  constexpr std::size_t kBits = 128;
  BigInt scaled = radicand.get_num() * pow2(2 * kBits);
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), radicand.get_den_mpz_t());
  BigInt s;
  mpz_sqrt(s.get_mpz_t(), q.get_mpz_t());
  // s/2^kBits <= sqrt(radicand), so beta0 is over-estimated by < 2^-127;
  // round the root up instead to report a lower approximation.
  Rational v = base - Rational(s + 1, pow2(kBits));
  v.canonicalize();
  return {v, false};
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os << (ok ? "valid" : "invalid") << " parameters; required lambda >= "
     << required_lambda << "; predicted ciphertext bits "
     << predicted_ciphertext_bits << "; predicted expansion "
     << predicted_expansion << "\n";
  for (const auto& e : errors) os << "error: " << e << "\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

ValidationReport validate_params(const SchemeParams& params) {
  ValidationReport report;
  if (params.M < 2) {
    report.errors.push_back("M must be at least 2");
    return report;
  }
  report.required_lambda = std::max(min_lambda(params.M), kMinNoiseLambda);
  std::size_t rho = ceil_log2(params.M);
  report.predicted_ciphertext_bits = rho + params.lambda + 1;
  report.predicted_expansion =
      static_cast<double>(report.predicted_ciphertext_bits) /
      static_cast<double>(rho);

  unsigned bound = min_lambda(params.M);
  if (params.lambda < bound) {
    report.errors.push_back("lambda " + std::to_string(params.lambda) +
                            " does not exceed (8/3) lg M; need at least " +
                            std::to_string(bound));
  } else if (params.lambda < kMinNoiseLambda) {
    report.errors.push_back("lambda below " + std::to_string(kMinNoiseLambda) +
                            " leaves the noise band empty");
  }
  if (params.n_hint) {
    const BigInt& n = *params.n_hint;
    if (n < 1) {
      report.errors.push_back("n_hint must be positive");
    } else if (n * 10 > params.M) {
      report.errors.push_back("n_hint " + to_decimal(n) +
                              " exceeds M/10; sorting attack applies");
    } else if (n * 100 > params.M) {
      report.warnings.push_back("n_hint " + to_decimal(n) +
                                " exceeds M/100; n should be much smaller than M");
    }
  }
  report.ok = report.errors.empty();
  return report;
}

NoiseBand noise_band(const BigInt& k) {
  BigInt t = floor_three_quarter_power(k);
  // ceil(k - k^(3/4)) - 1 == k - floor(k^(3/4)) - 1 whether or not the root
  // is an integer.
  return {t + 1, k - t - 1};
}

SecretKey SecretKey::from_divisor(const SchemeParams& params, BigInt k) {
  ValidationReport report = validate_params(params);
  if (!report.ok) fail(ErrorKind::kParameterError, report.to_string());
  if (k < pow2(params.lambda) || k >= pow2(params.lambda + 1)) {
    fail(ErrorKind::kParameterError, "k must lie in [2^lambda, 2^(lambda+1))");
  }
  NoiseBand band = noise_band(k);
  if (band.lo >= band.hi) {
    fail(ErrorKind::kParameterError, "noise band is empty for this k");
  }
  SecretKey key;
  key.params_ = params;
  key.k_ = std::move(k);
  key.noise_lo_ = std::move(band.lo);
  key.noise_hi_ = std::move(band.hi);
  return key;
}

double SecretKey::noise_entropy_bits() const {
  BigInt size = noise_hi_ - noise_lo_ + 1;
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, size.get_mpz_t());
  return std::log2(mant) + static_cast<double>(exp);
}

SecretKey keygen(const SchemeParams& params, rand::DeterministicGenerator& gen) {
  ValidationReport report = validate_params(params);
  if (!report.ok) fail(ErrorKind::kParameterError, report.to_string());
  BigInt lo = pow2(params.lambda);
  BigInt hi = pow2(params.lambda + 1) - 1;
  return SecretKey::from_divisor(params, rand::uniform_int(gen, lo, hi));
}

namespace {

void check_plaintext(const BigInt& m, const SecretKey& key) {
  if (m < 0 || m > key.params().M) {
    fail(ErrorKind::kDomainError,
         "plaintext " + to_decimal(m) + " outside [0, " +
             to_decimal(key.params().M) + "]");
  }
}

}  // namespace

Ciphertext encrypt(const BigInt& m, const SecretKey& key,
                   rand::DeterministicGenerator& gen) {
  check_plaintext(m, key);
  BigInt r = rand::uniform_int(gen, key.noise_lo(), key.noise_hi());
  Ciphertext c;
  mpz_mul(c.value.get_mpz_t(), m.get_mpz_t(), key.k().get_mpz_t());
  c.value += r;
  return c;
}

Ciphertext encrypt_with_noise(const BigInt& m, const SecretKey& key,
                              const BigInt& r) {
  check_plaintext(m, key);
  if (r < key.noise_lo() || r > key.noise_hi()) {
    fail(ErrorKind::kDomainError, "noise " + to_decimal(r) + " outside band");
  }
  return Ciphertext{m * key.k() + r};
}

BigInt decrypt(const Ciphertext& c, const SecretKey& key) {
  if (sgn(c.value) < 0) {
    fail(ErrorKind::kForeignCiphertext, "negative ciphertext");
  }
  BigInt m;
  mpz_fdiv_q(m.get_mpz_t(), c.value.get_mpz_t(), key.k().get_mpz_t());
  if (m > key.params().M) {
    fail(ErrorKind::kForeignCiphertext,
         "quotient " + to_decimal(m) + " exceeds M");
  }
  return m;
}

void write_key(std::ostream& out, const SecretKey& key) {
  out << "scheme=gacd-ope/1\n"
      << "lambda=" << key.params().lambda << "\n"
      << "M=" << to_decimal(key.params().M) << "\n"
      << "k=" << to_decimal(key.k()) << "\n";
}

SecretKey read_key(std::istream& in) {
  std::string scheme = expect_line(in, "scheme");
  if (scheme != "gacd-ope/1") {
    fail(ErrorKind::kFormatError, "unsupported scheme '" + scheme + "'");
  }
  BigInt lambda = parse_decimal(expect_line(in, "lambda"));
  if (lambda < 0 || lambda > 1'000'000) {
    fail(ErrorKind::kFormatError, "lambda out of range");
  }
  SchemeParams params;
  params.lambda = static_cast<unsigned>(lambda.get_ui());
  params.M = parse_decimal(expect_line(in, "M"));
  BigInt k = parse_decimal(expect_line(in, "k"));
  return SecretKey::from_divisor(params, std::move(k));
}

}  // namespace ope::gacd
