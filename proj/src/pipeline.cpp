#include "ope/pipeline.hpp"

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "ope/error.hpp"

namespace ope::pipeline {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kGacd: return "gacd";
    case Scheme::kOpfUniform: return "opf-uniform";
    case Scheme::kOpfBeta: return "opf-beta";
  }
  return "unknown";
}

std::optional<Scheme> scheme_from_string(std::string_view name) {
  if (name == "gacd") return Scheme::kGacd;
  if (name == "opf-uniform") return Scheme::kOpfUniform;
  if (name == "opf-beta") return Scheme::kOpfBeta;
  return std::nullopt;
}

AnyKey read_any_key(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  std::istringstream body(text);
  if (text.rfind("scheme=gacd-ope/", 0) == 0) return gacd::read_key(body);
  if (text.rfind("scheme=opf/", 0) == 0) return opf::read_key(body);
  fail(ErrorKind::kFormatError, "unrecognised key file");
}

void write_any_key(std::ostream& out, const AnyKey& key) {
  std::visit([&out](const auto& k) {
    using K = std::decay_t<decltype(k)>;
    if constexpr (std::is_same_v<K, gacd::SecretKey>) {
      gacd::write_key(out, k);
    } else {
      opf::write_key(out, k);
    }
  }, key);
}

BigInt plaintext_bound(const AnyKey& key) {
  if (const auto* g = std::get_if<gacd::SecretKey>(&key)) return g->params().M;
  return std::get<opf::OpfKey>(key).M();
}

rand::Seed resolve_seed(const std::optional<std::string>& explicit_hex) {
  if (explicit_hex) return rand::seed_from_hex(*explicit_hex);
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    return rand::seed_from_hex(env);
  }
  return rand::fresh_seed();
}

std::vector<NumberLine> read_numbers(std::istream& in) {
  std::vector<NumberLine> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      out.push_back({line_no, parse_decimal(line)});
    } catch (const Error&) {
      fail(ErrorKind::kFormatError,
           "line " + std::to_string(line_no) + ": not a decimal integer");
    }
  }
  return out;
}

void write_numbers(std::ostream& out, const std::vector<BigInt>& values) {
  for (const auto& v : values) out << to_decimal(v) << '\n';
}

}  // namespace ope::pipeline
