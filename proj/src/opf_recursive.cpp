#include "ope/opf_recursive.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "ope/beta_sampler.hpp"
#include "ope/error.hpp"

namespace ope::opf {
namespace {

constexpr std::string_view kEndpointLabel = "opf/1 endpoints";

void append_integer(std::vector<std::uint8_t>& out, const BigInt& v) {
  std::vector<std::uint8_t> mag = to_bytes(v);
  auto len = static_cast<std::uint32_t>(mag.size());
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(len >> shift));
  }
  out.insert(out.end(), mag.begin(), mag.end());
}

BigInt ceil_div4(const BigInt& y) {
  BigInt q;
  mpz_cdiv_q_2exp(q.get_mpz_t(), y.get_mpz_t(), 2);
  return q;
}

BigInt floor_three_quarters(const BigInt& y) {
  BigInt q = 3 * y;
  mpz_fdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), 2);
  return q;
}

// Assigns f(x) for the midpoint of `frame`. Shared by both directions so the
// replay in decryption cannot drift from encryption.
FrameRecord evaluate_frame(const OpfKey& key, const RangeFrame& frame) {
  FrameRecord rec;
  rec.frame = frame;
  BigInt span = frame.b - frame.a;
  rec.x = frame.a + span / 2;
  BigInt y = frame.fb - frame.fa;
  BigInt z = 0;
  if (sgn(y) > 0) {
    auto gen = rand::from_seed(seed_fn(key.master_seed(), frame));
    z = sample_mid(gen, y, span / 2, span, key.sampler(), key.precision_bits());
    if (key.sampler() == Sampler::kBeta && y >= 2) {
      BigInt lo = ceil_div4(y);
      BigInt hi = floor_three_quarters(y);
      if (z < lo) {
        z = lo;
        rec.clamped = true;
      } else if (z > hi) {
        z = hi;
        rec.clamped = true;
      }
    }
  }
  rec.fx = frame.fa + z;
  return rec;
}

void record(OpfTrace* trace, FrameRecord rec) {
  if (trace == nullptr) return;
  if (rec.clamped) ++trace->clamp_count;
  trace->frames.push_back(std::move(rec));
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

std::string_view to_string(Sampler sampler) {
  return sampler == Sampler::kBeta ? "beta" : "uniform";
}

Sampler sampler_from_string(std::string_view name) {
  if (name == "uniform") return Sampler::kUniform;
  if (name == "beta") return Sampler::kBeta;
  fail(ErrorKind::kFormatError, "unknown sampler '" + std::string(name) + "'");
}

OpfKey OpfKey::create(const rand::Seed& master_seed, unsigned r_bits,
                      Sampler sampler, std::optional<BigInt> N) {
  if (r_bits < 1) fail(ErrorKind::kParameterError, "r_bits must be at least 1");
  if (sampler == Sampler::kBeta && r_bits > kMaxBetaRBits) {
    fail(ErrorKind::kPrecisionLimit,
         "beta sampler supports r_bits <= " + std::to_string(kMaxBetaRBits));
  }
  OpfKey key;
  key.master_seed_ = master_seed;
  key.r_bits_ = r_bits;
  key.M_ = pow2(r_bits);
  BigInt min_n = key.M_ * key.M_;
  key.N_ = N.value_or(min_n);
  if (key.N_ < min_n) fail(ErrorKind::kParameterError, "N must be at least M^2");
  if (key.N_ <= 4) {
    fail(ErrorKind::kParameterError, "N must exceed 4 to fit the endpoints");
  }
  key.sampler_ = sampler;
  key.precision_bits_ = std::max<std::size_t>(ceil_log2(key.N_), 64);
  return key;
}

std::vector<std::uint8_t> encode_frame(const RangeFrame& frame) {
  std::vector<std::uint8_t> out{'F'};
  append_integer(out, frame.a);
  append_integer(out, frame.b);
  append_integer(out, frame.fa);
  append_integer(out, frame.fb);
  return out;
}

rand::Seed seed_fn(const rand::Seed& master, const RangeFrame& frame) {
  return rand::derive_seed(master, encode_frame(frame));
}

std::pair<BigInt, BigInt> init_endpoints(const OpfKey& key) {
  auto gen = rand::from_seed(rand::derive_seed(key.master_seed(), kEndpointLabel));
  // Endpoints stay within N/(8M) of the range ends, so f(M) - f(0) > 3N/4
  // and the overall scale M/N is known to within a fraction of one plaintext.
  BigInt slack = key.N() / (8 * key.M());
  BigInt f0 = 1 + rand::uniform_int(gen, 0, slack);
  BigInt fM = key.N() - rand::uniform_int(gen, 0, slack);
  return {f0, fM};
}

BigInt sample_mid(rand::DeterministicGenerator& gen, const BigInt& y,
                  const BigInt& x, const BigInt& a, Sampler sampler,
                  std::size_t precision_bits) {
  if (y < 1) fail(ErrorKind::kDegenerateRange, "range width below 1");
  if (x < 1 || x > a) fail(ErrorKind::kDomainError, "need 1 <= x <= a");
  if (sampler == Sampler::kUniform) return rand::uniform_int(gen, 0, y);

  BigInt beta_shape = a - x + 1;
  if (!beta_shape.fits_ulong_p() ||
      std::numeric_limits<unsigned long>::digits < 64) {
    fail(ErrorKind::kPrecisionLimit, "beta shape exceeds 64 bits");
  }
  std::size_t bits = std::max<std::size_t>(precision_bits, 64);
  BigInt w = beta_dyadic(gen, x.get_ui(), beta_shape.get_ui(), bits);
  BigInt z = y * w;
  mpz_fdiv_q_2exp(z.get_mpz_t(), z.get_mpz_t(), bits);
  return z;
}

BigInt opf_encrypt(const BigInt& m, const OpfKey& key, OpfTrace* trace) {
  if (m < 0 || m > key.M()) {
    fail(ErrorKind::kDomainError,
         "plaintext " + to_decimal(m) + " outside [0, " + to_decimal(key.M()) + "]");
  }
  auto [f0, fM] = init_endpoints(key);
  if (trace != nullptr) {
    trace->f0 = f0;
    trace->fM = fM;
  }
  if (m == 0) return f0;
  if (m == key.M()) return fM;
  RangeFrame frame{0, key.M(), f0, fM};
  for (;;) {
    FrameRecord rec = evaluate_frame(key, frame);
    BigInt x = rec.x;
    BigInt fx = rec.fx;
    record(trace, std::move(rec));
    if (x == m) return fx;
    if (x > m) {
      frame.b = x;
      frame.fb = fx;
    } else {
      frame.a = x;
      frame.fa = fx;
    }
  }
}

BigInt opf_decrypt(const BigInt& c, const OpfKey& key, OpfTrace* trace) {
  if (c < 1 || c > key.N()) {
    fail(ErrorKind::kNotACiphertext, "value " + to_decimal(c) + " outside [1, N]");
  }
  auto [f0, fM] = init_endpoints(key);
  if (trace != nullptr) {
    trace->f0 = f0;
    trace->fM = fM;
  }
  if (c == f0) return 0;
  if (c == fM) return key.M();
  if (c < f0 || c > fM) {
    fail(ErrorKind::kNotACiphertext, "value " + to_decimal(c) + " outside [f(0), f(M)]");
  }
  RangeFrame frame{0, key.M(), f0, fM};
  while (frame.b - frame.a > 1) {
    FrameRecord rec = evaluate_frame(key, frame);
    BigInt x = rec.x;
    BigInt fx = rec.fx;
    record(trace, std::move(rec));
    if (fx == c) return x;
    if (fx > c) {
      frame.b = x;
      frame.fb = fx;
    } else {
      frame.a = x;
      frame.fa = fx;
    }
  }
  fail(ErrorKind::kNotACiphertext,
       "value " + to_decimal(c) + " falls between f(" + to_decimal(frame.a) +
           ") and f(" + to_decimal(frame.b) + ")");
}

Rational order_statistic_pmf(const BigInt& x, const BigInt& a, const BigInt& y,
                 const BigInt& b) {
  if (x < 1 || x > a) fail(ErrorKind::kDomainError, "need 1 <= x <= a");
  if (b < 1) fail(ErrorKind::kDomainError, "need b >= 1");
  if (y < 0 || y > b) fail(ErrorKind::kDomainError, "need 0 <= y <= b");
  if (!a.fits_ulong_p()) fail(ErrorKind::kDomainError, "a too large");
  unsigned long au = a.get_ui();
  unsigned long xu = x.get_ui();
  BigInt coeff;
  mpz_bin_uiui(coeff.get_mpz_t(), au - 1, xu - 1);
  coeff *= a;
  BigInt below;
  mpz_pow_ui(below.get_mpz_t(), y.get_mpz_t(), xu - 1);
  BigInt above_base = b - y;
  BigInt above;
  mpz_pow_ui(above.get_mpz_t(), above_base.get_mpz_t(), au - xu);
  BigInt den;
  mpz_pow_ui(den.get_mpz_t(), b.get_mpz_t(), au);
  Rational q(coeff * below * above, den);
  q.canonicalize();
  return q;
}

void write_key(std::ostream& out, const OpfKey& key) {
  out << "scheme=opf/1\n"
      << "sampler=" << to_string(key.sampler()) << "\n"
      << "r_bits=" << key.r_bits() << "\n"
      << "N=" << to_decimal(key.N()) << "\n"
      << "seed_hex=" << rand::to_hex(key.master_seed()) << "\n";
}

OpfKey read_key(std::istream& in) {
  std::string scheme = expect_line(in, "scheme");
  if (scheme != "opf/1") {
    fail(ErrorKind::kFormatError, "unsupported scheme '" + scheme + "'");
  }
  Sampler sampler = sampler_from_string(expect_line(in, "sampler"));
  BigInt r_bits = parse_decimal(expect_line(in, "r_bits"));
  if (r_bits < 1 || r_bits > 4096) {
    fail(ErrorKind::kFormatError, "r_bits out of range");
  }
  BigInt N = parse_decimal(expect_line(in, "N"));
  std::string seed_hex = expect_line(in, "seed_hex");
  if (seed_hex.size() != 2 * rand::kSeedBytes) {
    fail(ErrorKind::kFormatError, "seed_hex must hold 32 bytes");
  }
  return OpfKey::create(rand::seed_from_hex(seed_hex),
                        static_cast<unsigned>(r_bits.get_ui()), sampler, N);
}

}  // namespace ope::opf
