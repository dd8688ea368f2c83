#pragma once

#include <cctype>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "repgrowth/types.hpp"

namespace repgrowth {

// Symmetric generator set of a free group. Declared generators are lowercase
// ASCII words; the inverse of "a" is spelled "A". Letters are stored in the
// order g0, g0^-1, g1, g1^-1, ... and addressed by index.
class GeneratorAlphabet {
 public:
  static GeneratorAlphabet from_generators(const std::vector<std::string>& generators) {
    if (generators.empty()) throw ValidationError("alphabet needs at least one generator");
    GeneratorAlphabet out;
    for (const auto& g : generators) {
      if (g.empty()) throw ValidationError("empty generator name");
      for (char ch : g)
        if (ch < 'a' || ch > 'z')
          throw ValidationError("generator name must be lowercase ASCII letters: \"" + g + "\"");
      std::string up = g;
      for (char& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      out.names_.push_back(g);
      out.names_.push_back(up);
      out.inverse_.push_back(static_cast<int>(out.inverse_.size()) + 1);
      out.inverse_.push_back(static_cast<int>(out.inverse_.size()) - 1);
    }
    for (std::size_t i = 0; i < out.names_.size(); ++i)
      for (std::size_t j = i + 1; j < out.names_.size(); ++j)
        if (out.names_[i] == out.names_[j])
          throw ValidationError("duplicate letter name: \"" + out.names_[i] + "\"");
    return out;
  }

  int size() const { return static_cast<int>(names_.size()); }
  int inverse(int letter) const { return inverse_[static_cast<std::size_t>(letter)]; }
  const std::string& name(int letter) const { return names_[static_cast<std::size_t>(letter)]; }

  std::optional<int> find(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (names_[static_cast<std::size_t>(i)] == name) return i;
    return std::nullopt;
  }

  std::vector<std::string> generators() const {
    std::vector<std::string> out;
    for (int i = 0; i < size(); i += 2) out.push_back(names_[static_cast<std::size_t>(i)]);
    return out;
  }

  bool operator==(const GeneratorAlphabet& other) const {
    return names_ == other.names_;
  }
  bool operator!=(const GeneratorAlphabet& other) const { return !(*this == other); }

 private:
  std::vector<std::string> names_;
  std::vector<int> inverse_;
};

// Word over the alphabet with no adjacent inverse pairs. The empty word is the
// group identity.
struct ReducedWord {
  std::vector<int> letters;

  int length() const { return static_cast<int>(letters.size()); }
  bool empty() const { return letters.empty(); }
  int first() const { return letters.front(); }
  int last() const { return letters.back(); }

  static ReducedWord identity() { return {}; }

  static std::optional<ReducedWord> make(const GeneratorAlphabet& alphabet,
                                         std::vector<int> letters) {
    for (std::size_t i = 0; i + 1 < letters.size(); ++i)
      if (letters[i + 1] == alphabet.inverse(letters[i])) return std::nullopt;
    return ReducedWord{std::move(letters)};
  }

  ReducedWord inverted(const GeneratorAlphabet& alphabet) const {
    ReducedWord out;
    out.letters.reserve(letters.size());
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
      out.letters.push_back(alphabet.inverse(*it));
    return out;
  }

  std::string str(const GeneratorAlphabet& alphabet) const {
    if (letters.empty()) return "e";
    std::string out;
    for (int l : letters) out += alphabet.name(l);
    return out;
  }

  bool operator==(const ReducedWord& other) const { return letters == other.letters; }
};

// Free reduction of the concatenation x . y.
inline ReducedWord reduced_concat(const GeneratorAlphabet& alphabet, const ReducedWord& x,
                                  const ReducedWord& y) {
  ReducedWord out = x;
  for (int l : y.letters) {
    if (!out.letters.empty() && out.letters.back() == alphabet.inverse(l))
      out.letters.pop_back();
    else
      out.letters.push_back(l);
  }
  return out;
}

inline std::int64_t sphere_count(int alphabet_size, int length) {
  if (length == 0) return 1;
  std::int64_t count = alphabet_size;
  for (int j = 1; j < length; ++j) count *= alphabet_size - 1;
  return count;
}

// Depth-first enumeration of the sphere of radius `length`, optionally pinned
// to a first and/or last letter. Enumeration order is lexicographic in letter
// indices. Guarded against desk-scale overflow.
inline void for_each_sphere_word(const GeneratorAlphabet& alphabet, int length,
                                 std::optional<int> first, std::optional<int> last,
                                 const std::function<void(const ReducedWord&)>& fn) {
  if (length < 0) throw std::invalid_argument("negative word length");
  if (sphere_count(alphabet.size(), length) > 10'000'000)
    throw ValidationError("sphere enumeration over 1e7 words refused");
  if (length == 0) {
    if (!first && !last) fn(ReducedWord::identity());
    return;
  }
  ReducedWord w;
  w.letters.reserve(static_cast<std::size_t>(length));
  const int n = alphabet.size();
  std::function<void()> rec = [&]() {
    if (w.length() == length) {
      if (!last || w.last() == *last) fn(w);
      return;
    }
    for (int l = 0; l < n; ++l) {
      if (!w.empty() && l == alphabet.inverse(w.last())) continue;
      if (w.empty() && first && l != *first) continue;
      w.letters.push_back(l);
      rec();
      w.letters.pop_back();
    }
  };
  rec();
}

inline std::vector<ReducedWord> sphere_words(const GeneratorAlphabet& alphabet, int length,
                                             std::optional<int> first = std::nullopt,
                                             std::optional<int> last = std::nullopt) {
  std::vector<ReducedWord> out;
  for_each_sphere_word(alphabet, length, first, last,
                       [&](const ReducedWord& w) { out.push_back(w); });
  return out;
}

}  // namespace repgrowth
