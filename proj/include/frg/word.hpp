#pragma once

// Words over a finite alphabet of matrix letters, their cyclic classes and
// the two noncommutative derivatives.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "frg/rational.hpp"

namespace frg {

// Index of a matrix in the alphabet, in declaration order.
using Letter = std::uint8_t;

inline constexpr std::size_t kMaxLetters = 64;

class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters) {
    for (int l : letters) push_back(static_cast<Letter>(l));
  }
  static Word from_raw(std::string raw) {
    Word w;
    w.data_ = std::move(raw);
    return w;
  }

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  Letter operator[](std::size_t i) const { return static_cast<Letter>(data_[i]); }
  void push_back(Letter l) {
    if (l >= kMaxLetters) throw std::out_of_range("letter index out of range");
    data_.push_back(static_cast<char>(l));
  }

  Word substr(std::size_t pos, std::size_t len = std::string::npos) const {
    return from_raw(data_.substr(pos, len));
  }
  // Rotation starting at position k: w[k..] w[..k).
  Word rotated(std::size_t k) const {
    if (data_.empty()) return *this;
    k %= data_.size();
    return from_raw(data_.substr(k) + data_.substr(0, k));
  }
  Word reversed() const { return from_raw(std::string(data_.rbegin(), data_.rend())); }

  std::size_t count(Letter l) const {
    std::size_t c = 0;
    for (char ch : data_) c += static_cast<Letter>(ch) == l;
    return c;
  }

  const std::string& raw() const { return data_; }

  Word& operator+=(const Word& o) {
    data_ += o.data_;
    return *this;
  }
  friend Word operator+(Word a, const Word& b) { return a += b; }

  auto operator<=>(const Word&) const = default;
  bool operator==(const Word&) const = default;

 private:
  std::string data_;
};

// Start index of the lexicographically least rotation (Booth).
inline std::size_t least_rotation(const std::string& s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  auto at = [&](std::size_t i) { return static_cast<unsigned char>(s[i % n]); };
  std::vector<long> f(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    const unsigned char sj = at(j);
    long i = f[j - k - 1];
    while (i != -1 && sj != at(k + static_cast<std::size_t>(i) + 1)) {
      if (sj < at(k + static_cast<std::size_t>(i) + 1)) k = j - static_cast<std::size_t>(i) - 1;
      i = f[static_cast<std::size_t>(i)];
    }
    if (sj != at(k + static_cast<std::size_t>(i + 1))) {
      if (sj < at(k)) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k % n;
}

// A word up to cyclic rotation, stored as its least rotation.
class CyclicWord {
 public:
  CyclicWord() = default;
  explicit CyclicWord(const Word& w) : word_(w.rotated(least_rotation(w.raw()))) {}

  const Word& word() const { return word_; }
  std::size_t size() const { return word_.size(); }
  bool empty() const { return word_.empty(); }

  // Number of rotations mapping the word to itself.
  std::size_t automorphism_order() const {
    const std::size_t n = word_.size();
    if (n == 0) return 1;
    std::size_t c = 0;
    for (std::size_t k = 0; k < n; ++k) c += word_.rotated(k) == word_;
    return c;
  }

  auto operator<=>(const CyclicWord&) const = default;
  bool operator==(const CyclicWord&) const = default;

 private:
  Word word_;
};

// Matrix names in declaration order.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() > kMaxLetters) throw std::invalid_argument("alphabet too large");
  }
  // A, B, C, ... of the given size.
  static Alphabet standard(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.emplace_back(1, static_cast<char>('A' + i));
    return Alphabet(std::move(names));
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(Letter l) const { return names_.at(l); }
  const std::vector<std::string>& names() const { return names_; }

  int find(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }

  bool single_char() const {
    for (const auto& n : names_)
      if (n.size() != 1) return false;
    return true;
  }

  // Letters run together for single-character names, space separated otherwise.
  std::string format(const Word& w) const {
    std::string out;
    const bool compact = single_char();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!compact && i > 0) out += ' ';
      out += w[i] < names_.size() ? names_[w[i]] : "?" + std::to_string(w[i]);
    }
    return out;
  }

  Word parse(const std::string& text) const {
    Word w;
    if (single_char()) {
      for (char c : text) {
        if (c == ' ') continue;
        int idx = find(std::string(1, c));
        if (idx < 0) throw std::invalid_argument("unknown letter '" + std::string(1, c) + "'");
        w.push_back(static_cast<Letter>(idx));
      }
      return w;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
      while (pos < text.size() && text[pos] == ' ') ++pos;
      std::size_t end = text.find(' ', pos);
      if (end == std::string::npos) end = text.size();
      if (end > pos) {
        std::string tok = text.substr(pos, end - pos);
        int idx = find(tok);
        if (idx < 0) throw std::invalid_argument("unknown letter '" + tok + "'");
        w.push_back(static_cast<Letter>(idx));
      }
      pos = end;
    }
    return w;
  }

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> names_;
};

using TensorPairSum = std::map<std::pair<Word, Word>, Rational>;

// Noncommutative derivative: one term (prefix, suffix) per occurrence of a.
inline TensorPairSum nc_derive(Letter a, const Word& w) {
  TensorPairSum out;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] == a) out[{w.substr(0, i), w.substr(i + 1)}] += 1;
  return out;
}

// Cyclic derivative of Tr(w): for each occurrence of a, the rest of the word
// read cyclically starting just after that occurrence. One entry per
// occurrence, sorted by word.
inline std::vector<std::pair<Rational, Word>> cyclic_derive(Letter a, const Word& w) {
  std::vector<std::pair<Rational, Word>> out;
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i)
    if (w[i] == a) out.emplace_back(Rational(1), w.rotated(i + 1).substr(0, n - 1));
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
  return out;
}

inline std::vector<std::pair<Rational, Word>> cyclic_derive(Letter a, const CyclicWord& w) {
  return cyclic_derive(a, w.word());
}

}  // namespace frg

template <>
struct std::hash<frg::Word> {
  std::size_t operator()(const frg::Word& w) const noexcept { return std::hash<std::string>{}(w.raw()); }
};
