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

#include "quenchlab/words.hpp"

#include <gtest/gtest.h>

#include <random>

namespace quenchlab {
namespace {

TEST(Alphabet, RejectsEmptyAndDuplicates) {
  EXPECT_THROW(Alphabet(""), InputError);
  EXPECT_THROW(Alphabet("aba"), InputError);
  EXPECT_THROW(Alphabet("a,"), InputError);
  const Alphabet e("ab");
  EXPECT_EQ(e.index_of('b'), 1u);
  EXPECT_FALSE(e.contains('c'));
}

TEST(Word, MustBeNonEmpty) { EXPECT_THROW(Word(""), InputError); }

TEST(Concat, Examples) {
  EXPECT_EQ(concat(Sentence{"ab", "c"}), "abc");
  EXPECT_EQ(concat(Sentence{"a"}), "a");
  EXPECT_EQ(concat(Sentence{"ab", "ab"}), "abab");
}

TEST(Truncate, Examples) {
  EXPECT_EQ(truncate(Word("abc"), 2).str(), "ab");
  EXPECT_EQ(truncate(Word("a"), 5).str(), "a");
  const auto s = truncate(Sentence{"abc", "d"}, 1);
  EXPECT_EQ(s, (Sentence{"a", "d"}));
}

TEST(Truncate, Idempotent) {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 200; ++t) {
    std::string w(1 + gen() % 9, 'a');
    for (char& c : w) c = static_cast<char>('a' + gen() % 3);
    const std::size_t tr = 1 + gen() % 10;
    const Word once = truncate(Word(w), tr);
    EXPECT_EQ(truncate(once, tr), once);
    EXPECT_EQ(once.length(), std::min(w.size(), tr));
    EXPECT_EQ(w.rfind(once.str(), 0), 0u);
  }
}

TEST(Cut, Examples) {
  EXPECT_EQ(cut("abab", CutPoints({1, 2, 3})), (Sentence{"a", "b", "a"}));
  EXPECT_EQ(cut("abab", CutPoints({2, 4})), (Sentence{"ab", "ab"}));
}

TEST(Cut, BeyondEndIsInputError) { EXPECT_THROW(cut("ab", CutPoints({1, 3})), InputError); }

TEST(CutPoints, MustIncreaseFromOne) {
  EXPECT_THROW(CutPoints({0, 1}), InputError);
  EXPECT_THROW(CutPoints({2, 2}), InputError);
  EXPECT_THROW(CutPoints(std::vector<std::size_t>{}), InputError);
}

TEST(Cut, RoundTripAndLengths) {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 300; ++t) {
    std::string x(1 + gen() % 30, 'a');
    for (char& c : x) c = static_cast<char>('a' + gen() % 2);
    std::vector<std::size_t> j;
    for (std::size_t p = 1; p <= x.size(); ++p) {
      if (gen() % 3 == 0 || p == 1) j.push_back(p);
    }
    const auto s = cut(x, CutPoints(j));
    ASSERT_EQ(s.size(), j.size());
    EXPECT_EQ(concat(s), x.substr(0, j.back()));
    std::size_t prev = 0;
    for (std::size_t i = 0; i < j.size(); ++i) {
      EXPECT_EQ(s[i].length(), j[i] - prev);
      prev = j[i];
    }
  }
}

TEST(EmpiricalPatterns, Examples) {
  const auto t1 = empirical_patterns(Sentence{"a", "b", "a"}, 1);
  EXPECT_DOUBLE_EQ(t1.at("a"), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(t1.at("b"), 1.0 / 3.0);
  const auto t2 = empirical_patterns(Sentence{"a", "b"}, 2);
  EXPECT_DOUBLE_EQ(t2.at("a,b"), 0.5);
  EXPECT_DOUBLE_EQ(t2.at("b,a"), 0.5);
  EXPECT_EQ(t2.probs.size(), 2u);
}

TEST(EmpiricalPatterns, KLargerThanNIsInputError) {
  EXPECT_THROW(empirical_patterns(Sentence{"a", "b"}, 3), InputError);
}

TEST(EmpiricalPatterns, MassConsistencyAndShiftInvariance) {
  std::mt19937_64 gen(17);
  const std::vector<std::string> pool = {"a", "b", "ab", "ba", "aab"};
  for (int t = 0; t < 100; ++t) {
    Sentence s;
    const std::size_t n = 3 + gen() % 12;
    for (std::size_t i = 0; i < n; ++i) s.emplace_back(pool[gen() % pool.size()]);
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto tk = empirical_patterns(s, k);
      EXPECT_NEAR(tk.total(), 1.0, 1e-12);
      for (const auto& [key, p] : tk.probs) {
        const double c = p * static_cast<double>(n);
        EXPECT_NEAR(c, std::round(c), 1e-9) << key;
      }
      if (k >= 2) {
        const auto dropped = drop_last_word(tk);
        const auto lower = empirical_patterns(s, k - 1);
        ASSERT_EQ(dropped.probs.size(), lower.probs.size());
        for (const auto& [key, p] : lower.probs) EXPECT_NEAR(dropped.at(key), p, 1e-15) << key;
      }
      // Rotating the sentence leaves the cyclic pattern table unchanged.
      Sentence rot(s.begin() + 1, s.end());
      rot.push_back(s.front());
      const auto tr = empirical_patterns(rot, k);
      EXPECT_EQ(tr.probs, tk.probs);
    }
  }
}

TEST(PatternKey, CommaJoined) { EXPECT_EQ(pattern_key(Sentence{"ab", "c"}), "ab,c"); }

}  // namespace
}  // namespace quenchlab
