// Copyright 2026 The quenchlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Letters, words and sentences, and the elementary maps between them:
// concatenation, word-length truncation, cutting a letter string at given
// points, and k-word pattern frequencies of a periodically extended sentence.

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quenchlab/common.hpp"

namespace quenchlab {

/// Ordered finite set of letters, each a single visible character.
class Alphabet {
 public:
  explicit Alphabet(std::string symbols) : symbols_(std::move(symbols)) {
    require(!symbols_.empty(), "Alphabet: must contain at least one letter");
    index_.fill(-1);
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      const auto c = static_cast<unsigned char>(symbols_[i]);
      require(c > 32 && c < 127 && c != ',',
              "Alphabet: letters must be visible ASCII characters other than ','");
      require(index_[c] < 0, std::string("Alphabet: duplicate letter '") + symbols_[i] + "'");
      index_[c] = static_cast<int>(i);
    }
  }

  std::size_t size() const { return symbols_.size(); }
  const std::string& symbols() const { return symbols_; }
  char letter(std::size_t i) const { return symbols_.at(i); }
  bool contains(char c) const { return index_[static_cast<unsigned char>(c)] >= 0; }
  bool contains_all(std::string_view s) const {
    for (char c : s) {
      if (!contains(c)) return false;
    }
    return true;
  }
  /// Position of c in the declared order.
  std::size_t index_of(char c) const {
    const int i = index_[static_cast<unsigned char>(c)];
    require(i >= 0, std::string("Alphabet: letter '") + c + "' not in \"" + symbols_ + "\"");
    return static_cast<std::size_t>(i);
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

 private:
  std::string symbols_;
  std::array<int, 256> index_{};
};

/// Non-empty finite letter string.
class Word {
 public:
  Word(std::string letters) : letters_(std::move(letters)) {  // NOLINT(google-explicit-constructor)
    require(!letters_.empty(), "Word: empty word");
  }
  Word(const char* letters) : Word(std::string(letters)) {}  // NOLINT(google-explicit-constructor)

  std::size_t length() const { return letters_.size(); }
  const std::string& str() const { return letters_; }
  char operator[](std::size_t i) const { return letters_[i]; }

  friend auto operator<=>(const Word&, const Word&) = default;
  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::string letters_;
};

using Sentence = std::vector<Word>;

/// Strictly increasing positive cut positions j_1 < ... < j_N.
class CutPoints {
 public:
  explicit CutPoints(std::vector<std::size_t> points) : points_(std::move(points)) {
    require(!points_.empty(), "CutPoints: need at least one cut");
    require(points_.front() >= 1, "CutPoints: first cut must be >= 1");
    for (std::size_t i = 1; i < points_.size(); ++i) {
      require(points_[i] > points_[i - 1], "CutPoints: cuts must be strictly increasing");
    }
  }
  std::size_t size() const { return points_.size(); }
  std::size_t back() const { return points_.back(); }
  std::size_t operator[](std::size_t i) const { return points_[i]; }
  const std::vector<std::size_t>& points() const { return points_; }

 private:
  std::vector<std::size_t> points_;
};

inline std::string concat(std::span<const Word> s) {
  std::string out;
  std::size_t n = 0;
  for (const auto& w : s) n += w.length();
  out.reserve(n);
  for (const auto& w : s) out += w.str();
  return out;
}

inline Word truncate(const Word& w, std::size_t tr) {
  require(tr >= 1, "truncate: tr must be >= 1");
  if (w.length() <= tr) return w;
  return Word(w.str().substr(0, tr));
}

inline Sentence truncate(std::span<const Word> s, std::size_t tr) {
  Sentence out;
  out.reserve(s.size());
  for (const auto& w : s) out.push_back(truncate(w, tr));
  return out;
}

/// Word i is x restricted to (j_{i-1}, j_i], with j_0 = 0.
inline Sentence cut(std::string_view x, const CutPoints& j) {
  if (j.back() > x.size()) {
    throw InputError("cut: cut point " + std::to_string(j.back()) +
                     " beyond sequence end " + std::to_string(x.size()));
  }
  Sentence out;
  out.reserve(j.size());
  std::size_t prev = 0;
  for (std::size_t p : j.points()) {
    out.emplace_back(std::string(x.substr(prev, p - prev)));
    prev = p;
  }
  return out;
}

/// Canonical serialization: comma-joined words.
inline std::string pattern_key(std::span<const Word> words) {
  std::string key;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) key += ',';
    key += words[i].str();
  }
  return key;
}

/// Finite distribution over k-word patterns keyed by canonical serialization.
struct PatternTable {
  std::size_t depth = 0;
  std::map<std::string, double> probs;

  double at(const std::string& key) const {
    auto it = probs.find(key);
    return it == probs.end() ? 0.0 : it->second;
  }
  double total() const {
    CompensatedSum s;
    for (const auto& [k, p] : probs) s.add(p);
    return s.value();
  }
};

/// k-word pattern counts over the N cyclic shifts of the periodic extension.
inline std::map<std::string, std::size_t> pattern_counts(std::span<const Word> s, std::size_t k) {
  const std::size_t n = s.size();
  require(k >= 1, "empirical_patterns: k must be >= 1");
  if (k > n) {
    throw InputError("empirical_patterns: k=" + std::to_string(k) +
                     " exceeds sentence length N=" + std::to_string(n));
  }
  std::map<std::string, std::size_t> counts;
  std::string key;
  for (std::size_t i = 0; i < n; ++i) {
    key.clear();
    for (std::size_t r = 0; r < k; ++r) {
      if (r) key += ',';
      key += s[(i + r) % n].str();
    }
    ++counts[key];
  }
  return counts;
}

/// k-word marginal of the empirical process of the periodic extension of s.
inline PatternTable empirical_patterns(std::span<const Word> s, std::size_t k) {
  PatternTable t;
  t.depth = k;
  const auto n = static_cast<double>(s.size());
  for (const auto& [key, c] : pattern_counts(s, k)) t.probs.emplace(key, static_cast<double>(c) / n);
  return t;
}

/// Drops the last word of every pattern and merges.
inline PatternTable drop_last_word(const PatternTable& t) {
  require(t.depth >= 2, "drop_last_word: depth must be >= 2");
  PatternTable out;
  out.depth = t.depth - 1;
  std::map<std::string, CompensatedSum> acc;
  for (const auto& [key, p] : t.probs) acc[key.substr(0, key.rfind(','))].add(p);
  for (const auto& [key, s] : acc) out.probs.emplace(key, s.value());
  return out;
}

}  // namespace quenchlab
