#include "ope/beta_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "ope/error.hpp"

namespace ope::opf {

double standard_normal(rand::DeterministicGenerator& gen) {
  for (;;) {
    double u = 2.0 * gen.next_unit_double() - 1.0;
    double v = 2.0 * gen.next_unit_double() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double standard_gamma(rand::DeterministicGenerator& gen, double shape) {
  if (!(shape >= 1.0)) fail(ErrorKind::kDomainError, "gamma shape below 1");
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = standard_normal(gen);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = gen.next_unit_double();
    if (u == 0.0) continue;
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double beta_double(rand::DeterministicGenerator& gen, std::uint64_t alpha,
                   std::uint64_t beta) {
  if (alpha < 1 || beta < 1) fail(ErrorKind::kDomainError, "beta shape below 1");
  if (alpha == 1 && beta == 1) return gen.next_unit_double();
  double x = standard_gamma(gen, static_cast<double>(alpha));
  double y = standard_gamma(gen, static_cast<double>(beta));
  return x / (x + y);
}

namespace {

// Adds a uniform integer on [0, 2^bits).
void add_dither(rand::DeterministicGenerator& gen, BigInt& w, long bits) {
  if (bits > 0) w += gen.next_bits(static_cast<std::size_t>(bits));
}

}  // namespace

BigInt beta_dyadic(rand::DeterministicGenerator& gen, std::uint64_t alpha,
                   std::uint64_t beta, std::size_t precision_bits) {
  if (alpha < 1 || beta < 1) fail(ErrorKind::kDomainError, "beta shape below 1");
  if (precision_bits < 64) {
    fail(ErrorKind::kInvalidPrecision, "beta draws need at least 64 bits");
  }
  const auto p = static_cast<long>(precision_bits);
  BigInt w;
  if (std::min(alpha, beta) < kNormalApproxShape) {
    double x = beta_double(gen, alpha, beta);
    BigInt top(std::floor(std::ldexp(x, 53)));
    mpz_mul_2exp(w.get_mpz_t(), top.get_mpz_t(), precision_bits - 53);
    add_dither(gen, w, p - 53);
  } else {
    // Exact centre floor(alpha 2^p / (alpha + beta)) plus a scaled deviate.
    BigInt a(static_cast<unsigned long>(alpha));
    BigInt total = a + BigInt(static_cast<unsigned long>(beta));
    BigInt centre = a * pow2(precision_bits);
    mpz_fdiv_q(centre.get_mpz_t(), centre.get_mpz_t(), total.get_mpz_t());
    double s = static_cast<double>(alpha) + static_cast<double>(beta);
    double sd = std::sqrt((static_cast<double>(alpha) / s) *
                          (static_cast<double>(beta) / s) / (s + 1.0));
    double deviation = std::ldexp(sd * standard_normal(gen), static_cast<int>(p));
    BigInt offset(std::trunc(deviation));
    w = centre + offset;
    if (deviation != 0.0) {
      add_dither(gen, w, std::ilogb(deviation) - 52);
    }
  }
  BigInt top = pow2(precision_bits) - 1;
  if (w < 0) w = 0;
  if (w > top) w = top;
  return w;
}

}  // namespace ope::opf
