#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repgrowth/system.hpp"

namespace repgrowth {

// System file format (UTF-8 JSON):
//   { "generators": ["a","b"],
//     "dims": {"a":1,"A":1,"b":1,"B":1},
//     "H": { "t|s": [[[re,im],...],...], ... } }
// Key "t|s" is the block V_s -> V_t; every ordered pair with ts != e must be
// present and the pair with ts = e must be absent.

namespace detail {

inline std::string render_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::pair<int, int> parse_block_key(const GeneratorAlphabet& alphabet,
                                           const std::string& key) {
  auto bar = key.find('|');
  if (bar == std::string::npos || key.find('|', bar + 1) != std::string::npos)
    throw ValidationError("malformed block key \"" + key + "\" (expected \"t|s\")");
  auto to = alphabet.find(key.substr(0, bar));
  auto from = alphabet.find(key.substr(bar + 1));
  if (!to || !from) throw ValidationError("unknown letter in block key \"" + key + "\"");
  return {*to, *from};
}

}  // namespace detail

inline MatrixSystem parse_system(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed syntax: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("generators") || !doc.contains("dims") ||
      !doc.contains("H"))
    throw ValidationError("document must carry \"generators\", \"dims\" and \"H\"");

  if (!doc["generators"].is_array()) throw ValidationError("\"generators\" must be an array");
  std::vector<std::string> gens;
  for (const auto& g : doc["generators"]) {
    if (!g.is_string()) throw ValidationError("generator names must be strings");
    gens.push_back(g.get<std::string>());
  }
  GeneratorAlphabet alphabet = GeneratorAlphabet::from_generators(gens);
  const int n = alphabet.size();

  if (!doc["dims"].is_object()) throw ValidationError("\"dims\" must be an object");
  std::vector<int> dims(static_cast<std::size_t>(n), 0);
  for (int a = 0; a < n; ++a) {
    const std::string& name = alphabet.name(a);
    if (!doc["dims"].contains(name))
      throw ValidationError("missing dim for letter \"" + name + "\"");
    const auto& v = doc["dims"][name];
    if (!v.is_number_integer() || v.get<long long>() <= 0)
      throw ValidationError("dim for letter \"" + name + "\" must be a positive integer");
    dims[static_cast<std::size_t>(a)] = v.get<int>();
  }
  for (const auto& [key, value] : doc["dims"].items())
    if (!alphabet.find(key)) throw ValidationError("unknown letter in dims: \"" + key + "\"");

  if (!doc["H"].is_object()) throw ValidationError("\"H\" must be an object");
  const int nn = n;
  std::vector<Matrix> blocks(static_cast<std::size_t>(nn) * nn);
  std::vector<bool> seen(static_cast<std::size_t>(nn) * nn, false);
  for (int b = 0; b < nn; ++b)
    for (int a = 0; a < nn; ++a)
      blocks[static_cast<std::size_t>(b) * nn + a] = Matrix::Zero(dims[b], dims[a]);

  for (const auto& [key, value] : doc["H"].items()) {
    auto [to, from] = detail::parse_block_key(alphabet, key);
    if (to == alphabet.inverse(from))
      throw ValidationError("block forbidden: ba = e (key \"" + key + "\")");
    if (!value.is_array() || static_cast<int>(value.size()) != dims[static_cast<std::size_t>(to)])
      throw ValidationError("shape mismatch for block \"" + key + "\"");
    Matrix m(dims[static_cast<std::size_t>(to)], dims[static_cast<std::size_t>(from)]);
    for (int i = 0; i < m.rows(); ++i) {
      const auto& row = value[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != m.cols())
        throw ValidationError("shape mismatch for block \"" + key + "\"");
      for (int j = 0; j < m.cols(); ++j) {
        const auto& entry = row[static_cast<std::size_t>(j)];
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
            !entry[1].is_number())
          throw ValidationError("entries must be [re, im] pairs in block \"" + key + "\"");
        double re = entry[0].get<double>();
        double im = entry[1].get<double>();
        if (!std::isfinite(re) || !std::isfinite(im))
          throw ValidationError("non-finite entry in block \"" + key + "\"");
        m(i, j) = Complex(re, im);
      }
    }
    blocks[static_cast<std::size_t>(to) * nn + from] = std::move(m);
    seen[static_cast<std::size_t>(to) * nn + from] = true;
  }

  for (int b = 0; b < nn; ++b)
    for (int a = 0; a < nn; ++a) {
      if (b == alphabet.inverse(a)) continue;
      if (!seen[static_cast<std::size_t>(b) * nn + a])
        throw ValidationError("missing block \"" + block_key(alphabet, b, a) + "\"");
    }

  return MatrixSystem(std::move(alphabet), std::move(dims), std::move(blocks));
}

// Canonical rendering: object keys in lexicographic order, 17-significant-digit
// decimals, so that parse(serialize(s)) reproduces s bit for bit.
inline std::string serialize_system(const MatrixSystem& sys) {
  const GeneratorAlphabet& alphabet = sys.alphabet();
  const int n = alphabet.size();
  std::ostringstream out;
  out << "{\n  \"generators\": [";
  auto gens = alphabet.generators();
  for (std::size_t i = 0; i < gens.size(); ++i)
    out << (i ? ", " : "") << '"' << gens[i] << '"';
  out << "],\n  \"dims\": {";
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return alphabet.name(x) < alphabet.name(y); });
  for (std::size_t i = 0; i < order.size(); ++i)
    out << (i ? ", " : "") << '"' << alphabet.name(order[i]) << "\": " << sys.dim(order[i]);
  out << "},\n  \"H\": {\n";
  std::map<std::string, std::pair<int, int>> keys;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      if (sys.allowed(b, a)) keys[block_key(alphabet, b, a)] = {b, a};
  std::size_t emitted = 0;
  for (const auto& [key, pair] : keys) {
    const Matrix& m = sys.block(pair.first, pair.second);
    out << "    \"" << key << "\": [";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out << (i ? ", [" : "[");
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out << (j ? ", [" : "[") << detail::render_double(m(i, j).real()) << ", "
            << detail::render_double(m(i, j).imag()) << "]";
      }
      out << "]";
    }
    out << "]" << (++emitted < keys.size() ? "," : "") << "\n";
  }
  out << "  }\n}\n";
  return out.str();
}

inline MatrixSystem load_system(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on \"" + path + "\"");
  return parse_system(ss.str());
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write \"" + path + "\"");
  out << text;
  if (!out) throw IoError("write failure on \"" + path + "\"");
}

}  // namespace repgrowth
