#include "ope/transforms.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "ope/error.hpp"
#include "oracles.hpp"

namespace ope::transforms {
namespace {

rand::DeterministicGenerator gen_for(const std::string& label) {
  return rand::from_seed(rand::derive_seed(rand::Seed{}, label));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kFormatError;
}

CdfModel uniform_four() {
  return CdfModel::create(4, 16,
                          {0, Rational(1, 4), Rational(1, 2), Rational(3, 4), 1});
}

// Values below M/2 are three times as likely as those above.
CdfModel skewed_model(unsigned long M, const BigInt& N) {
  const unsigned long total = 3 * (M / 2) + (M - M / 2);
  std::vector<Rational> F{0};
  unsigned long acc = 0;
  for (unsigned long m = 0; m < M; ++m) {
    acc += m < M / 2 ? 3 : 1;
    F.emplace_back(BigInt(acc), BigInt(total));
  }
  for (auto& f : F) f.canonicalize();
  return CdfModel::create(M, N, std::move(F));
}

TEST(CdfModel, Validation) {
  EXPECT_EQ(kind_of([] { CdfModel::create(2, 16, {0, Rational(1, 2), Rational(1, 2)}); }),
            ErrorKind::kParameterError);
  EXPECT_EQ(kind_of([] { CdfModel::create(2, 16, {0, Rational(1, 2), Rational(3, 4)}); }),
            ErrorKind::kParameterError);
  EXPECT_EQ(kind_of([] { CdfModel::create(2, 16, {Rational(1, 8), Rational(1, 2), 1}); }),
            ErrorKind::kParameterError);
  EXPECT_EQ(kind_of([] { CdfModel::create(2, 16, {0, Rational(1, 32), 1}); }),
            ErrorKind::kParameterError);
  CdfModel m = uniform_four();
  EXPECT_EQ(m.size(), 4u);
  EXPECT_EQ(m.p(1), Rational(1, 4));
  EXPECT_EQ(m.lower_edge(3), 12);
  EXPECT_EQ(m.u_bits(), 20u);
}

TEST(Flatten, Examples) {
  CdfModel m = uniform_four();
  EXPECT_EQ(flatten_at(2, m, Rational(1, 2)), 10);
  EXPECT_EQ(flatten_at(0, m, 0), 0);
  EXPECT_EQ(unflatten(10, m), 2);
  EXPECT_EQ(unflatten(0, m), 0);
  EXPECT_EQ(unflatten(15, m), 3);
  EXPECT_EQ(kind_of([&] { unflatten(16, m); }), ErrorKind::kDomainError);
  EXPECT_EQ(kind_of([&] { unflatten(-1, m); }), ErrorKind::kDomainError);
  auto gen = gen_for("dom");
  EXPECT_EQ(kind_of([&] { flatten(4, m, gen); }), ErrorKind::kDomainError);
}

TEST(Flatten, OutputBelowUpperEdge) {
  CdfModel model = skewed_model(1024, pow2(20));
  auto gen = gen_for("upper");
  for (unsigned long m = 0; m < 1024; ++m) {
    for (int i = 0; i < 3; ++i) {
      BigInt v = flatten(m, model, gen);
      ASSERT_LT(Rational(v), model.N() * model.F(m + 1));
      ASSERT_GE(v, model.lower_edge(m));
    }
  }
}

TEST(Flatten, ExhaustiveExactInversion) {
  CdfModel model = skewed_model(1024, pow2(20));
  auto gen = gen_for("exact");
  for (unsigned long m = 0; m < 1024; ++m) {
    for (int i = 0; i < 10; ++i) ASSERT_EQ(unflatten(flatten(m, model, gen), model), m);
  }
}

TEST(Flatten, InversionWithCoarseRange) {
  // Small N makes floor(N F(x)) fall below N F(m) often; re-drawing fixes it.
  std::vector<Rational> F{0, Rational(1, 3), Rational(2, 3), 1};
  CdfModel model = CdfModel::create(3, 7, F);
  auto gen = gen_for("coarse");
  for (int i = 0; i < 3000; ++i) {
    unsigned long m = i % 3;
    ASSERT_EQ(unflatten(flatten(m, model, gen), model), m);
  }
}

TEST(Flatten, MonotoneInPlaintext) {
  CdfModel model = skewed_model(1024, pow2(20));
  auto gen = gen_for("mono");
  for (int i = 0; i < 200; ++i) {
    Rational u(rand::uniform_int(gen, 0, pow2(30) - 1), pow2(30));
    u.canonicalize();
    BigInt prev = -1;
    for (unsigned long m = 0; m < 1024; ++m) {
      BigInt v = flatten_at(m, model, u);
      ASSERT_GE(v, prev);
      prev = v;
    }
  }
  BigInt prev = -1;
  for (unsigned long m = 0; m < 1024; ++m) {
    Rational exact = model.N() * model.F(m);
    ASSERT_GT(exact, prev);
    prev = flatten_at(m, model, 0);
  }
}

TEST(Flatten, OutputIsNearUniform) {
  CdfModel model = skewed_model(1024, pow2(20));
  std::vector<double> cdf;
  for (std::size_t m = 0; m <= 1024; ++m) cdf.push_back(model.F(m).get_d());
  auto gen = gen_for("chisq");
  std::vector<std::uint64_t> bins(64, 0);
  for (int i = 0; i < 1000000; ++i) {
    double u = gen.next_unit_double();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    unsigned long m = static_cast<unsigned long>(it - cdf.begin()) - 1;
    BigInt v = flatten(m, model, gen);
    ++bins[BigInt(v >> 14).get_ui()];
  }
  EXPECT_GT(testing::chi_square_uniform_pvalue(bins), 0.001);
}

TEST(CdfFile, RoundTrip) {
  CdfModel model = skewed_model(16, pow2(12));
  std::stringstream ss;
  write_cdf(ss, model);
  EXPECT_EQ(ss.str().rfind("cdf/1 M=16 N=4096\n0/1\n", 0), 0u);
  CdfModel back = read_cdf(ss);
  for (std::size_t m = 0; m <= 16; ++m) EXPECT_EQ(back.F(m), model.F(m));
  std::istringstream bad("cdf/1 M=2 N=16\n0/1\n1/2\n");
  EXPECT_THROW(read_cdf(bad), Error);
}

TEST(Ingest, SmoothedFrequencies) {
  std::istringstream in("0 3\n2 1\n");
  CdfModel model = ingest_frequencies(in, 4, 64);
  // p_m = (count/4)(1 - 4/64) + 1/64
  EXPECT_EQ(model.p(0), Rational(3, 4) * Rational(15, 16) + Rational(1, 64));
  EXPECT_EQ(model.p(1), Rational(1, 64));
  EXPECT_EQ(model.p(2), Rational(1, 4) * Rational(15, 16) + Rational(1, 64));
  EXPECT_EQ(model.F(4), 1);
  std::istringstream out_of_range("4 1\n");
  EXPECT_THROW(ingest_frequencies(out_of_range, 4, 64), Error);
  std::istringstream empty("");
  EXPECT_THROW(ingest_frequencies(empty, 4, 64), Error);
}

gacd::SecretKey key_with(unsigned rho, const BigInt& k) {
  gacd::SchemeParams p;
  p.M = pow2(rho);
  p.lambda = gacd::min_lambda(p.M);
  return gacd::SecretKey::from_divisor(p, k);
}

TEST(Hybrid, ShiftExample) {
  gacd::SecretKey key = key_with(7, 524309);
  MonotoneMap shift = MonotoneMap::shift(5);
  gacd::Ciphertext c = hybrid_encrypt_with_noise(3, shift, key, 100000);
  EXPECT_EQ(c.value, 4294472);
  EXPECT_EQ(hybrid_decrypt(c, shift, key), 3);
  EXPECT_EQ(kind_of([&] { hybrid_decrypt(gacd::Ciphertext{2 * 524309 + 9}, shift, key); }),
            ErrorKind::kForeignCiphertext);
  EXPECT_EQ(kind_of([&] { hybrid_encrypt_with_noise(124, shift, key, 100000); }),
            ErrorKind::kDomainError);
}

TEST(Hybrid, ShiftRoundTrip) {
  auto gen = gen_for("shift");
  gacd::SchemeParams p;
  p.M = pow2(31);
  p.lambda = gacd::min_lambda(p.M);
  gacd::SecretKey key = gacd::keygen(p, gen);
  MonotoneMap shift = MonotoneMap::shift(1000);
  for (int i = 0; i < 10000; ++i) {
    BigInt m = rand::uniform_int(gen, 0, p.M - 1000);
    ASSERT_EQ(hybrid_decrypt(hybrid_encrypt(m, shift, key, gen), shift, key), m);
  }
}

TEST(Hybrid, IdentityMatchesPlainEncryption) {
  auto g1 = gen_for("ident");
  auto g2 = gen_for("ident");
  gacd::SchemeParams p;
  p.M = pow2(15);
  p.lambda = gacd::min_lambda(p.M);
  gacd::SecretKey key = gacd::keygen(p, g1);
  gacd::keygen(p, g2);
  MonotoneMap id = MonotoneMap::identity();
  for (int m = 0; m < 1000; ++m) {
    ASSERT_EQ(hybrid_encrypt(m, id, key, g1).value, gacd::encrypt(m, key, g2).value);
  }
}

TEST(Hybrid, OpfCompositionPreservesOrder) {
  auto gen = gen_for("opfmap");
  opf::OpfKey okey = opf::OpfKey::create(rand::derive_seed(rand::Seed{}, "okey"), 31,
                                         opf::Sampler::kBeta);
  gacd::SchemeParams p;
  p.M = okey.N();
  p.lambda = gacd::min_lambda(p.M);
  gacd::SecretKey key = gacd::keygen(p, gen);
  MonotoneMap map = MonotoneMap::opf(okey);
  for (int i = 0; i < 10000; ++i) {
    BigInt a = rand::uniform_int(gen, 0, okey.M());
    BigInt b = rand::uniform_int(gen, 0, okey.M());
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    gacd::Ciphertext ca = hybrid_encrypt(a, map, key, gen);
    gacd::Ciphertext cb = hybrid_encrypt(b, map, key, gen);
    ASSERT_LT(ca, cb);
    if (i % 50 == 0) {
      ASSERT_EQ(hybrid_decrypt(ca, map, key), a);
    }
  }
}

TEST(Hybrid, FlattenComposition) {
  CdfModel model = skewed_model(1024, pow2(20));
  auto gen = gen_for("flat-enc");
  gacd::SchemeParams p;
  p.M = model.N();
  p.lambda = gacd::min_lambda(p.M);
  gacd::SecretKey key = gacd::keygen(p, gen);
  BigInt prev_c = -1;
  for (unsigned long m = 0; m < 1024; ++m) {
    gacd::Ciphertext c = flatten_encrypt(m, model, key, gen);
    ASSERT_GT(c.value, prev_c);
    prev_c = c.value;
    ASSERT_EQ(flatten_decrypt(c, model, key), m);
  }
}

}  // namespace
}  // namespace ope::transforms
