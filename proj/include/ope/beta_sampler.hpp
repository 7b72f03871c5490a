#pragma once

#include <cstddef>
#include <cstdint>

#include "ope/bigint.hpp"
#include "ope/rand_core.hpp"

namespace ope::opf {

// Shapes at or above this use a normal approximation; skewness there is
// below 2^-29 for the near-symmetric shapes the OPF requests.
inline constexpr std::uint64_t kNormalApproxShape = std::uint64_t{1} << 20;

// Marsaglia polar method; consumes pairs of 53-bit uniforms.
double standard_normal(rand::DeterministicGenerator& gen);

// Marsaglia-Tsang squeeze; requires shape >= 1.
double standard_gamma(rand::DeterministicGenerator& gen, double shape);

// Beta(alpha, beta) as a double via the ratio of two gamma variates.
double beta_double(rand::DeterministicGenerator& gen, std::uint64_t alpha,
                   std::uint64_t beta);

// Beta(alpha, beta) draw as W with w = W / 2^precision_bits. The leading bits
// come from a double-precision deviate; the bits below its resolution are
// filled uniformly so that W is spread over the full dyadic grid.
BigInt beta_dyadic(rand::DeterministicGenerator& gen, std::uint64_t alpha,
                   std::uint64_t beta, std::size_t precision_bits);

}  // namespace ope::opf
