#include "ope/transforms.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "ope/error.hpp"

namespace ope::transforms {
namespace {

std::size_t checked_index(const BigInt& m, const BigInt& limit,
                          const char* what) {
  if (m < 0 || m >= limit) {
    fail(ErrorKind::kDomainError, std::string(what) + " " + to_decimal(m) +
                                      " outside [0, " + to_decimal(limit) + ")");
  }
  return m.get_ui();
}

BigInt ceil_product(const BigInt& n, const Rational& q) {
  BigInt num = n * q.get_num();
  BigInt out;
  mpz_cdiv_q(out.get_mpz_t(), num.get_mpz_t(), q.get_den_mpz_t());
  return out;
}

BigInt floor_rational(const Rational& q) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

std::string trimmed(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                           line.back() == '\t')) {
    line.pop_back();
  }
  return line;
}

}  // namespace

CdfModel CdfModel::create(BigInt M, BigInt N, std::vector<Rational> F) {
  if (M < 1) fail(ErrorKind::kParameterError, "M must be positive");
  if (!M.fits_ulong_p() || M > (BigInt(1) << 32)) {
    fail(ErrorKind::kParameterError, "M too large for a tabulated model");
  }
  if (N < M) fail(ErrorKind::kParameterError, "N must be at least M");
  std::size_t size = M.get_ui();
  if (F.size() != size + 1) {
    fail(ErrorKind::kParameterError, "F must hold M + 1 values");
  }
  for (auto& v : F) v.canonicalize();
  if (F.front() != 0 || F.back() != 1) {
    fail(ErrorKind::kParameterError, "F(0) must be 0 and F(M) must be 1");
  }
  Rational floor_step(1, N);
  floor_step.canonicalize();
  for (std::size_t m = 0; m < size; ++m) {
    if (F[m + 1] - F[m] < floor_step) {
      fail(ErrorKind::kParameterError,
           "F(" + std::to_string(m + 1) + ") - F(" + std::to_string(m) +
               ") is below 1/N");
    }
  }
  CdfModel model;
  model.edges_.reserve(size + 1);
  for (const auto& v : F) model.edges_.push_back(ceil_product(N, v));
  model.u_bits_ = ceil_log2(N) + 16;
  model.M_ = std::move(M);
  model.N_ = std::move(N);
  model.F_ = std::move(F);
  return model;
}

CdfModel CdfModel::from_counts(BigInt N, const std::vector<BigInt>& counts) {
  if (counts.empty()) fail(ErrorKind::kEmptyInput, "no frequency buckets");
  BigInt total = 0;
  for (const auto& c : counts) {
    if (c < 0) fail(ErrorKind::kFormatError, "negative count");
    total += c;
  }
  if (total == 0) fail(ErrorKind::kEmptyInput, "all counts are zero");
  BigInt M(static_cast<unsigned long>(counts.size()));
  if (N < M) fail(ErrorKind::kParameterError, "N must be at least M");
  Rational mass = Rational(1) - Rational(M, N);
  Rational floor_step(1, N);
  std::vector<Rational> F;
  F.reserve(counts.size() + 1);
  Rational acc = 0;
  F.push_back(acc);
  for (const auto& c : counts) {
    acc += Rational(c, total) * mass + floor_step;
    acc.canonicalize();
    F.push_back(acc);
  }
  return create(std::move(M), std::move(N), std::move(F));
}

void write_cdf(std::ostream& out, const CdfModel& model) {
  out << "cdf/1 M=" << to_decimal(model.M()) << " N=" << to_decimal(model.N())
      << "\n";
  for (std::size_t m = 0; m <= model.size(); ++m) {
    const Rational& v = model.F(m);
    out << to_decimal(v.get_num()) << "/" << to_decimal(v.get_den()) << "\n";
  }
}

CdfModel read_cdf(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) fail(ErrorKind::kFormatError, "empty cdf file");
  header = trimmed(header);
  std::istringstream hs(header);
  std::string tag;
  std::string m_field;
  std::string n_field;
  hs >> tag >> m_field >> n_field;
  if (tag != "cdf/1" || m_field.rfind("M=", 0) != 0 ||
      n_field.rfind("N=", 0) != 0) {
    fail(ErrorKind::kFormatError, "bad cdf header '" + header + "'");
  }
  BigInt M = parse_decimal(m_field.substr(2));
  BigInt N = parse_decimal(n_field.substr(2));
  if (M < 1 || M > (BigInt(1) << 32)) fail(ErrorKind::kFormatError, "bad M");
  std::vector<Rational> F;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trimmed(line);
    if (line.empty()) continue;
    auto slash = line.find('/');
    if (slash == std::string::npos) {
      fail(ErrorKind::kFormatError,
           "line " + std::to_string(line_no) + ": expected <num>/<den>");
    }
    BigInt num = parse_decimal(line.substr(0, slash));
    BigInt den = parse_decimal(line.substr(slash + 1));
    if (den <= 0) {
      fail(ErrorKind::kFormatError,
           "line " + std::to_string(line_no) + ": non-positive denominator");
    }
    F.emplace_back(num, den);
  }
  return CdfModel::create(std::move(M), std::move(N), std::move(F));
}

CdfModel ingest_frequencies(std::istream& in, const BigInt& M, const BigInt& N) {
  if (M < 1 || M > (BigInt(1) << 32)) fail(ErrorKind::kParameterError, "bad M");
  std::vector<BigInt> counts(M.get_ui(), BigInt(0));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trimmed(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string value_text;
    std::string count_text;
    std::string extra;
    if (!(ls >> value_text >> count_text) || (ls >> extra)) {
      fail(ErrorKind::kFormatError,
           "line " + std::to_string(line_no) + ": expected '<value> <count>'");
    }
    BigInt value = parse_decimal(value_text);
    std::size_t idx = checked_index(value, M, "value");
    counts[idx] += parse_decimal(count_text);
  }
  return CdfModel::from_counts(N, counts);
}

BigInt flatten_at(const BigInt& m, const CdfModel& model, const Rational& u) {
  std::size_t idx = checked_index(m, model.M(), "plaintext");
  if (u < 0 || u >= 1) fail(ErrorKind::kDomainError, "u must lie in [0, 1)");
  Rational point = (Rational(1) - u) * model.F(idx) + u * model.F(idx + 1);
  return floor_rational(Rational(model.N()) * point);
}

BigInt flatten(const BigInt& m, const CdfModel& model,
               rand::DeterministicGenerator& gen) {
  std::size_t idx = checked_index(m, model.M(), "plaintext");
  const BigInt& edge = model.lower_edge(idx);
  for (;;) {
    rand::Dyadic u = rand::uniform_fraction(gen, static_cast<long>(model.u_bits()));
    BigInt mbar = flatten_at(m, model, u.to_rational());
    if (mbar >= edge) return mbar;
  }
}

BigInt unflatten(const BigInt& mbar, const CdfModel& model) {
  if (mbar < 0 || mbar >= model.N()) {
    fail(ErrorKind::kDomainError, "flattened value " + to_decimal(mbar) +
                                      " outside [0, N)");
  }
  // Largest m in [0, M) with ceil(N F(m)) <= mbar, i.e. F(m) <= mbar/N.
  std::size_t lo = 0;
  std::size_t hi = model.size() - 1;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (model.lower_edge(mid) <= mbar) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return BigInt(static_cast<unsigned long>(lo));
}

MonotoneMap MonotoneMap::identity() {
  return {[](const BigInt& m) { return m; },
          [](const BigInt& v) -> std::optional<BigInt> { return v; }};
}

MonotoneMap MonotoneMap::shift(BigInt a0) {
  return {[a0](const BigInt& m) -> BigInt { return m + a0; },
          [a0](const BigInt& v) -> std::optional<BigInt> {
            if (v < a0) return std::nullopt;
            return BigInt(v - a0);
          }};
}

MonotoneMap MonotoneMap::opf(opf::OpfKey key) {
  return {[key](const BigInt& m) { return opf::opf_encrypt(m, key); },
          [key](const BigInt& v) -> std::optional<BigInt> {
            try {
              return opf::opf_decrypt(v, key);
            } catch (const Error& e) {
              if (e.kind() == ErrorKind::kNotACiphertext) return std::nullopt;
              throw;
            }
          }};
}

gacd::Ciphertext hybrid_encrypt(const BigInt& m, const MonotoneMap& map,
                                const gacd::SecretKey& key,
                                rand::DeterministicGenerator& gen) {
  return gacd::encrypt(map.forward(m), key, gen);
}

gacd::Ciphertext hybrid_encrypt_with_noise(const BigInt& m, const MonotoneMap& map,
                                           const gacd::SecretKey& key,
                                           const BigInt& r) {
  return gacd::encrypt_with_noise(map.forward(m), key, r);
}

BigInt hybrid_decrypt(const gacd::Ciphertext& c, const MonotoneMap& map,
                      const gacd::SecretKey& key) {
  BigInt mapped = gacd::decrypt(c, key);
  std::optional<BigInt> m = map.inverse(mapped);
  if (!m) {
    fail(ErrorKind::kForeignCiphertext,
         "quotient " + to_decimal(mapped) + " is outside the map's image");
  }
  return *m;
}

gacd::Ciphertext flatten_encrypt(const BigInt& m, const CdfModel& model,
                                 const gacd::SecretKey& key,
                                 rand::DeterministicGenerator& gen) {
  return gacd::encrypt(flatten(m, model, gen), key, gen);
}

BigInt flatten_decrypt(const gacd::Ciphertext& c, const CdfModel& model,
                       const gacd::SecretKey& key) {
  BigInt mbar = gacd::decrypt(c, key);
  if (mbar >= model.N()) {
    fail(ErrorKind::kForeignCiphertext, "flattened value outside [0, N)");
  }
  return unflatten(mbar, model);
}

}  // namespace ope::transforms
