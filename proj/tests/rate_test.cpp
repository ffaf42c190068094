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

#include "quenchlab/rate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_laws.hpp"

namespace quenchlab {
namespace {

const double kLog2 = std::log(2.0);

WordProcessLaw as_iid(const WordDistribution& d, const Alphabet& e) { return WordProcessLaw::iid(e, d.words, d.probs); }

ReferenceLaw default_reference() {
  return ReferenceLaw(RenewalLaw::algebraic(2.0, 4), LetterLaw::uniform(Alphabet("ab")));
}

TEST(AnnRate, Examples) {
  const auto ref = default_reference();
  EXPECT_NEAR(ann_rate(as_iid(reference_marginal(ref), Alphabet("ab")), ref).value(), 0.0, 1e-12);
  const ReferenceLaw quarter(RenewalLaw::uniform(1, 2, TailExponent::algebraic(2.0)), LetterLaw::uniform(Alphabet("ab")));
  EXPECT_NEAR(ann_rate(WordProcessLaw::iid(Alphabet("ab"), {"a"}, {1.0}), quarter).value(), std::log(4.0), 1e-14);
  EXPECT_TRUE(ann_rate(WordProcessLaw::iid(Alphabet("ab"), {"abb"}, {1.0}), quarter).is_infinite());
}

TEST(FinRate, ZeroAtReferenceLaw) {
  const auto ref = default_reference();
  const auto q = as_iid(reference_marginal(ref), Alphabet("ab"));
  for (double alpha : {1.5, 2.0, 3.0}) {
    const auto r = fin_rate(q, ref, alpha, 8).value();
    EXPECT_TRUE(r.contains(0.0, 1e-12)) << r.lower << " " << r.upper;
    EXPECT_LE(r.width(), 1e-9);
  }
}

TEST(FinRate, ClosedFormSingleLetterConcatenation) {
  const ReferenceLaw ref(RenewalLaw::uniform(1, 2, TailExponent::algebraic(2.0)), LetterLaw::uniform(Alphabet("01")));
  const auto q = WordProcessLaw::iid(Alphabet("01"), {"0", "00"}, {0.5, 0.5});
  for (std::size_t depth : {2, 6, 12}) {
    const auto r = fin_rate(q, ref, 2.0, depth).value();
    EXPECT_NEAR(r.lower, 3.0 * kLog2, 1e-12);
    EXPECT_NEAR(r.upper, 3.0 * kLog2, 1e-12);
  }
  EXPECT_NEAR(3.0 * kLog2, 2.0794, 1e-4);
}

TEST(FinRate, AlphaTowardsOneApproachesAnnealed) {
  const auto ref = default_reference();
  const auto q = WordProcessLaw::iid(Alphabet("ab"), {"ab", "b"}, {0.7, 0.3});
  const double ann = ann_rate(q, ref).value();
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha : {1.5, 1.1, 1.01, 1.0001}) {
    const auto r = fin_rate(q, ref, alpha, 10).value();
    const double gap = r.upper - ann;
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-4);
  EXPECT_THROW(fin_rate(q, ref, 1.0, 10), InputError);
}

TEST(FinRate, QuenchedDominatesAnnealed) {
  std::mt19937_64 gen(21);
  const auto ref = default_reference();
  for (int rep = 0; rep < 30; ++rep) {
    const auto q = rep % 3 == 0 ? testing_laws::random_markov(gen, Alphabet("ab"), 5, 4)
                                : testing_laws::random_iid(gen, Alphabet("ab"), 6, 4);
    const double ann = ann_rate(q, ref).value();
    for (double alpha : {1.5, 3.0}) {
      const auto r = fin_rate(q, ref, alpha, 10).value();
      EXPECT_GE(r.lower, ann - 1e-10);
      if (r_nu_test(q, ref.nu(), 10).in_r_nu) EXPECT_LE(r.lower - ann, r.width() + 1e-10);
    }
  }
}

TEST(FinRate, EqualsAnnealedOnLengthBiasedLaws) {
  const auto ref = default_reference();
  std::vector<Word> words{"a", "b", "aa", "ab", "ba", "bb"};
  std::vector<double> probs{0.1, 0.1, 0.2, 0.2, 0.2, 0.2};
  const auto q = WordProcessLaw::iid(Alphabet("ab"), words, probs);
  ASSERT_TRUE(r_nu_test(q, ref.nu(), 8).in_r_nu);
  const auto r = fin_rate(q, ref, 2.5, 8).value();
  EXPECT_NEAR(r.lower, ann_rate(q, ref).value(), 1e-10);
  EXPECT_NEAR(r.upper, ann_rate(q, ref).value(), 1e-10);
}

// Two blocks of words that mix only through cross-transitions of size eps.
WordProcessLaw two_block_law(double eps) {
  const std::vector<Word> words{"a", "b", "aa", "ab", "ba", "bb"};
  const std::vector<double> q1{0.5, 0.5, 0, 0, 0, 0};
  const std::vector<double> q2{0, 0, 0.25, 0.25, 0.25, 0.25};
  std::vector<std::vector<double>> p(6, std::vector<double>(6));
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& own = i < 2 ? q1 : q2;
    const auto& other = i < 2 ? q2 : q1;
    for (std::size_t j = 0; j < 6; ++j) p[i][j] = (1.0 - eps) * own[j] + eps * other[j];
  }
  return WordProcessLaw::markov(Alphabet("ab"), words, p);
}

TEST(FinRate, AffineAlongDecomposableMixtures) {
  const auto ref = default_reference();
  const auto q1 = WordProcessLaw::iid(Alphabet("ab"), {"a", "b"}, {0.5, 0.5});
  const auto q2 = WordProcessLaw::iid(Alphabet("ab"), {"aa", "ab", "ba", "bb"}, {0.25, 0.25, 0.25, 0.25});
  const double alpha = 2.0;
  const double target = 0.5 * fin_rate(q1, ref, alpha, 8).value().mid() + 0.5 * fin_rate(q2, ref, alpha, 8).value().mid();
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto q = two_block_law(eps);
    EXPECT_NEAR(q.marginal()[0] + q.marginal()[1], 0.5, 1e-12);
    const double gap = std::abs(fin_rate(q, ref, alpha, 8).value().mid() - target);
    EXPECT_LT(gap, prev) << "eps=" << eps;
    prev = gap;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(Ladder, StabilisesPastMaximalLength) {
  const auto ref = default_reference();
  const auto q = WordProcessLaw::iid(Alphabet("ab"), {"a", "ab", "bab"}, {0.3, 0.5, 0.2});
  const auto ladder = que_rate_ladder(q, ref, 2.0, {1, 2, 3, 4}, 8);
  ASSERT_EQ(ladder.size(), 4u);
  const auto full = fin_rate(q, ref, 2.0, 8).value();
  for (std::size_t i : {2u, 3u}) {
    EXPECT_EQ(ladder[i].rate.value().lower, full.lower);
    EXPECT_EQ(ladder[i].rate.value().upper, full.upper);
  }
  EXPECT_EQ(ladder[0].depth, 8u);
  EXPECT_THROW(que_rate_ladder(q, ref, 2.0, {2, 1}, 8), InputError);
}

TEST(Ladder, TruncationMergesAtoms) {
  const auto ref = default_reference();
  const auto q = WordProcessLaw::iid(Alphabet("ab"), {"a", "ab"}, {0.5, 0.5});
  const auto ladder = que_rate_ladder(q, ref, 2.0, {1}, 6);
  const auto delta = fin_rate(WordProcessLaw::iid(Alphabet("ab"), {"a"}, {1.0}), ref, 2.0, 6).value();
  EXPECT_DOUBLE_EQ(ladder[0].rate.value().lower, delta.lower);
  EXPECT_DOUBLE_EQ(ladder[0].rate.value().upper, delta.upper);
}

TEST(BoundaryRate, Examples) {
  const auto ref = default_reference();
  const auto q = WordProcessLaw::iid(Alphabet("ab"), {"ab", "b"}, {0.6, 0.4});
  const auto one = boundary_rate(q, ref, BoundaryMode::AlphaOne, 8).value();
  EXPECT_EQ(one.lower, ann_rate(q, ref).value());
  EXPECT_EQ(one.width(), 0.0);

  const auto r = as_iid(reference_marginal(ref), Alphabet("ab"));
  EXPECT_NEAR(boundary_rate(r, ref, BoundaryMode::AlphaInfinity, 8).value().upper, 0.0, 1e-12);
  const auto periodic = WordProcessLaw::iid(Alphabet("ab"), {"ab"}, {1.0});
  EXPECT_TRUE(boundary_rate(periodic, ref, BoundaryMode::AlphaInfinity, 8).is_infinite());
}

WordDistribution six_atom_reference() {
  return {{"a", "b", "aa", "ab", "ba", "bb"}, {0.25, 0.25, 0.125, 0.125, 0.125, 0.125}};
}

Neighbourhood one_word(const char* w, double lo, double hi) {
  Neighbourhood n;
  n.constraints.push_back({{Word(w)}, lo, hi});
  return n;
}

TEST(IProjection, Example) {
  const auto ref = six_atom_reference();
  const auto p = i_projection(ref, one_word("a", 0.5, 1.0));
  EXPECT_NEAR(p.value, 0.1438, 1e-4);
  EXPECT_NEAR(p.value, 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(p.minimizer.probs[0], 0.5, 1e-12);
  for (std::size_t i = 1; i < 6; ++i) EXPECT_NEAR(p.minimizer.probs[i], ref.probs[i] * 2.0 / 3.0, 1e-12);
}

TEST(IProjection, FeasibleReferenceGivesZero) {
  const auto ref = six_atom_reference();
  const auto all = i_projection(ref, one_word("a", 0.0, 1.0));
  EXPECT_EQ(all.value, 0.0);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(all.minimizer.probs[i], ref.probs[i], 1e-15);
  EXPECT_NEAR(i_projection(ref, one_word("a", 0.25, 0.3)).value, 0.0, 1e-15);
}

TEST(IProjection, InfeasibleIsInputError) {
  Neighbourhood n = one_word("a", 0.6, 1.0);
  n.constraints.push_back({{Word("b")}, 0.6, 1.0});
  EXPECT_THROW(i_projection(six_atom_reference(), n), InputError);
}

TEST(IProjection, NoFeasiblePointBeatsTheMinimum) {
  const auto ref = six_atom_reference();
  Neighbourhood n = one_word("a", 0.4, 0.7);
  n.constraints.push_back({{Word("bb")}, 0.0, 0.05});
  const double best = i_projection(ref, n).value;
  std::mt19937_64 gen(9);
  int feasible = 0;
  for (int rep = 0; rep < 20000; ++rep) {
    const auto q = testing_laws::random_simplex(gen, 6);
    if (q[0] < 0.4 || q[0] > 0.7 || q[5] > 0.05) continue;
    ++feasible;
    EXPECT_LE(best, rel_entropy(q, ref.probs).nats.value() + 1e-12);
  }
  EXPECT_GT(feasible, 10);
}

TEST(Contraction, Examples) {
  const auto ref = default_reference();
  const auto r = contraction_upper(as_iid(reference_marginal(ref), Alphabet("ab")), ref, 2.0, 8);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.exact_value.value(), 0.0, 1e-12);

  std::vector<Word> words{"a", "b", "aa", "ab", "ba", "bb"};
  const auto biased = WordProcessLaw::iid(Alphabet("ab"), words, {0.4, 0.4, 0.05, 0.05, 0.05, 0.05});
  const auto b = contraction_upper(biased, ref, 2.0, 8);
  EXPECT_TRUE(b.exact);
  EXPECT_NEAR(b.exact_value.value(), ann_rate(biased, ref).value(), 1e-15);

  const auto periodic = WordProcessLaw::iid(Alphabet("ab"), {"ab"}, {1.0});
  const auto c = contraction_upper(periodic, ref, 3.0, 6);
  EXPECT_FALSE(c.exact);
  const auto br = psi_rel_entropy_bracket(periodic, ref.nu(), 6);
  const double h = ann_rate(periodic, ref).value();
  EXPECT_NEAR(c.bound.value().lower, h + 2.0 * 2.0 * br.lower, 1e-12);
  EXPECT_NEAR(c.bound.value().upper, h + 2.0 * 2.0 * br.upper, 1e-12);
}

}  // namespace
}  // namespace quenchlab
