#include <openssl/evp.h>

#include <array>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "momentmap/cpd.hpp"

namespace momentmap {

namespace {

using nlohmann::json;

std::string exact_decimal(double x) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

double parse_decimal(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw MalformedFile("factor file: " + field + " is not a decimal string");
  const std::string s = j.get<std::string>();
  if (s.empty()) throw MalformedFile("factor file: " + field + " is empty");
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw MalformedFile("factor file: cannot parse " + field + " = '" + s + "'");
  }
  return x;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw MalformedFile(std::string("factor file: missing field '") + key + "'");
  return *it;
}

}  // namespace

std::string factors_to_json(const CpdFactors& f) {
  json j;
  j["dim"] = f.dim;
  j["rank"] = f.rank;
  json betas = json::array();
  for (double b : f.betas) betas.push_back(exact_decimal(b));
  j["betas"] = std::move(betas);
  json vectors = json::array();
  for (Index r = 0; r < f.vectors.cols(); ++r) {
    json v = json::array();
    for (Index i = 0; i < f.vectors.rows(); ++i) v.push_back(exact_decimal(f.vectors(i, r)));
    vectors.push_back(std::move(v));
  }
  j["vectors"] = std::move(vectors);
  j["residual"] = exact_decimal(f.residual);
  j["generator"] = f.generator;
  j["seed"] = f.seed;
  return j.dump(2) + "\n";
}

CpdFactors factors_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedFile(std::string("factor file: ") + e.what());
  }
  if (!j.is_object()) throw MalformedFile("factor file: top level is not an object");

  CpdFactors f;
  try {
    f.dim = require(j, "dim").get<Index>();
    f.rank = require(j, "rank").get<Index>();
    const json& betas = require(j, "betas");
    const json& vectors = require(j, "vectors");
    if (!betas.is_array() || !vectors.is_array()) {
      throw MalformedFile("factor file: betas/vectors must be arrays");
    }
    if (f.dim < 1 || f.rank < 1 || static_cast<Index>(betas.size()) != f.rank ||
        static_cast<Index>(vectors.size()) != f.rank) {
      throw MalformedFile("factor file: array lengths disagree with dim/rank");
    }
    for (std::size_t r = 0; r < betas.size(); ++r) {
      f.betas.push_back(parse_decimal(betas[r], "betas[" + std::to_string(r) + "]"));
    }
    f.vectors.resize(f.dim, f.rank);
    for (Index r = 0; r < f.rank; ++r) {
      const json& v = vectors[static_cast<std::size_t>(r)];
      if (!v.is_array() || static_cast<Index>(v.size()) != f.dim) {
        throw MalformedFile("factor file: vectors[" + std::to_string(r) + "] has wrong length");
      }
      for (Index i = 0; i < f.dim; ++i) {
        f.vectors(i, r) = parse_decimal(v[static_cast<std::size_t>(i)], "vectors");
      }
    }
    if (auto it = j.find("residual"); it != j.end()) f.residual = parse_decimal(*it, "residual");
    if (auto it = j.find("generator"); it != j.end()) f.generator = it->get<std::string>();
    if (auto it = j.find("seed"); it != j.end()) f.seed = it->get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw MalformedFile(std::string("factor file: ") + e.what());
  }

  f.validate();
  return f;
}

void save_factors(const CpdFactors& f, const std::filesystem::path& path) {
  f.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("save_factors: cannot open " + path.string());
  out << factors_to_json(f);
  if (!out) throw Error("save_factors: write failed for " + path.string());
}

CpdFactors load_factors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedFile("load_factors: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return factors_from_json(ss.str());
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256_hex: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace momentmap
