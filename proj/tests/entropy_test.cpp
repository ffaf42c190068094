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

#include "quenchlab/entropy.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_laws.hpp"

namespace quenchlab {
namespace {

const double kLog2 = std::log(2.0);

WordProcessLaw reference_as_iid(const ReferenceLaw& ref) {
  std::vector<Word> words;
  std::vector<double> probs;
  for (const auto& [w, p] : ref.enumerate()) {
    words.push_back(w);
    probs.push_back(p);
  }
  return WordProcessLaw::iid(ref.nu().alphabet(), words, probs);
}

ReferenceLaw default_reference() {
  return ReferenceLaw(RenewalLaw::algebraic(2.0, 4), LetterLaw::uniform(Alphabet("ab")));
}

ReferenceLaw zero_reference() {
  return ReferenceLaw(RenewalLaw::uniform(1, 2, TailExponent::algebraic(2.0)), LetterLaw::uniform(Alphabet("01")));
}

WordProcessLaw zero_words() { return WordProcessLaw::iid(Alphabet("01"), {"0", "00"}, {0.5, 0.5}); }

TEST(RelEntropy, Examples) {
  const std::vector<double> mu{0.2, 0.3, 0.5};
  EXPECT_EQ(rel_entropy(mu, mu).nats.value(), 0.0);
  EXPECT_NEAR(rel_entropy(std::vector<double>{1, 0, 0, 0}, std::vector<double>(4, 0.25)).nats.value(),
              std::log(4.0), 1e-15);
  const auto inf = rel_entropy(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0});
  EXPECT_TRUE(inf.nats.is_infinite());
  ASSERT_TRUE(inf.offending_atom.has_value());
  EXPECT_EQ(*inf.offending_atom, 1u);
}

TEST(RelEntropy, NonNegativeAndZeroOnlyAtEquality) {
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = testing_laws::random_simplex(gen, 5);
    const auto b = testing_laws::random_simplex(gen, 5);
    EXPECT_GT(rel_entropy(a, b).nats.value(), 0.0);
  }
}

TEST(EntropyRate, Examples) {
  EXPECT_NEAR(entropy_rate(WordProcessLaw::iid(Alphabet("ab"), {"a", "ab"}, {0.5, 0.5})), kLog2, 1e-15);
  const auto cycle = WordProcessLaw::markov(Alphabet("ab"), {"a", "b", "ab"}, {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  EXPECT_EQ(entropy_rate(cycle), 0.0);
  EXPECT_NEAR(entropy_rate(WordProcessLaw::iid(Alphabet("ab"), {"a", "b", "aa", "ab"}, {0.25, 0.25, 0.25, 0.25})),
              std::log(4.0), 1e-15);
}

TEST(EntropyRate, MarkovMatchesBlockEnumeration) {
  std::mt19937_64 gen(2);
  for (int rep = 0; rep < 10; ++rep) {
    const auto q = testing_laws::random_markov(gen, Alphabet("ab"), 4, 3);
    // h(Y_1..Y_n) - h(Y_1..Y_{n-1}) equals the rate for a stationary chain.
    EXPECT_NEAR(block_entropy(q, 4) - block_entropy(q, 3), entropy_rate(q), 1e-12);
  }
}

TEST(SpecRelEntropy, Examples) {
  const auto ref = default_reference();
  EXPECT_NEAR(spec_rel_entropy(reference_as_iid(ref), ref).value(), 0.0, 1e-12);

  const ReferenceLaw quarter(RenewalLaw::uniform(1, 2, TailExponent::algebraic(2.0)), LetterLaw::uniform(Alphabet("ab")));
  EXPECT_NEAR(quarter.prob("a"), 0.25, 1e-15);
  EXPECT_NEAR(spec_rel_entropy(WordProcessLaw::iid(Alphabet("ab"), {"a"}, {1.0}), quarter).value(), std::log(4.0),
              1e-14);

  const double v = spec_rel_entropy(zero_words(), zero_reference()).value();
  EXPECT_NEAR(v, 0.5 * kLog2 + 0.5 * std::log(4.0), 1e-14);
  EXPECT_NEAR(v, 1.0397, 1e-4);

  const auto long_word = WordProcessLaw::iid(Alphabet("ab"), {"aaaaa"}, {1.0});
  EXPECT_TRUE(spec_rel_entropy(long_word, ref).is_infinite());
}

TEST(SpecRelEntropy, BlockMarginalsNonDecreasingPerWord) {
  std::mt19937_64 gen(3);
  const auto ref = default_reference();
  for (int rep = 0; rep < 15; ++rep) {
    const auto q = testing_laws::random_markov(gen, Alphabet("ab"), 5, 4);
    double prev = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
      const double v = block_rel_entropy(q, ref, n).value() / static_cast<double>(n);
      EXPECT_GE(v, prev - 1e-12) << "N=" << n;
      prev = v;
    }
    // The per-word limit is approached from below.
    EXPECT_LE(prev, spec_rel_entropy(q, ref).value() + 1e-12);
  }
}

TEST(PsiBracket, PeriodicWordClosedForm) {
  const auto q = WordProcessLaw::iid(Alphabet("ab"), {"ab"}, {1.0});
  const auto b = psi_rel_entropy_bracket(q, LetterLaw::uniform(Alphabet("ab")), 4);
  EXPECT_NEAR(b.lower, kLog2 * 0.75, 1e-14);
  EXPECT_NEAR(b.lower, 0.5199, 1e-4);
  EXPECT_NEAR(b.upper, kLog2, 1e-14);
  EXPECT_EQ(b.depth, 4u);
}

TEST(PsiBracket, ExactZeroAndSingleLetter) {
  const auto ref = default_reference();
  const auto b = psi_rel_entropy_bracket(reference_as_iid(ref), ref.nu(), 1);
  EXPECT_NEAR(b.lower, 0.0, 1e-9);
  EXPECT_NEAR(b.upper, 0.0, 1e-9);

  const auto one = psi_rel_entropy_bracket(WordProcessLaw::iid(Alphabet("a"), {"a", "aa"}, {0.5, 0.5}),
                                           LetterLaw::uniform(Alphabet("a")), 6);
  EXPECT_EQ(one.lower, 0.0);
  EXPECT_EQ(one.upper, 0.0);
}

TEST(PsiBracket, SandwichAndMonotone) {
  std::mt19937_64 gen(4);
  const LetterLaw nu(Alphabet("ab"), {0.45, 0.55});
  for (int rep = 0; rep < 20; ++rep) {
    const auto q = rep % 2 ? testing_laws::random_markov(gen, nu.alphabet(), 5, 4)
                           : testing_laws::random_iid(gen, nu.alphabet(), 6, 4);
    const auto bs = psi_rel_entropy_brackets(q, nu, 10);
    for (std::size_t i = 0; i < bs.size(); ++i) {
      EXPECT_LE(bs[i].lower, bs[i].upper + 1e-10);
      if (i > 0) {
        EXPECT_GE(bs[i].lower, bs[i - 1].lower - 1e-10);
        EXPECT_LE(bs[i].upper, bs[i - 1].upper + 1e-10);
      }
    }
  }
}

TEST(PsiProfile, NormalisedBlockEntropiesAreMonotone) {
  std::mt19937_64 gen(5);
  const LetterLaw nu = LetterLaw::uniform(Alphabet("abc"));
  for (int rep = 0; rep < 10; ++rep) {
    const auto q = testing_laws::random_iid(gen, nu.alphabet(), 6, 3);
    const auto prof = psi_profile(q, 7);
    const double e_log_nu = expected_log_nu(prof, nu);
    for (std::size_t l = 2; l <= 7; ++l) {
      const auto lf = static_cast<double>(l);
      EXPECT_LE(prof.block_entropy[l] / lf, prof.block_entropy[l - 1] / (lf - 1.0) + 1e-12);
      const double rel = (-prof.block_entropy[l] - lf * e_log_nu) / lf;
      const double rel_prev = (-prof.block_entropy[l - 1] - (lf - 1.0) * e_log_nu) / (lf - 1.0);
      EXPECT_GE(rel, rel_prev - 1e-12);
    }
  }
}

TEST(HTauGivenK, Examples) {
  const auto ref = zero_reference();
  const auto rep = entropy_report(zero_words(), ref, 6);
  EXPECT_NEAR(rep.psi_entropy.lower, 0.0, 1e-15);
  EXPECT_NEAR(rep.psi_entropy.upper, 0.0, 1e-15);
  EXPECT_NEAR(rep.h_tau_given_k.lower, kLog2, 1e-15);
  EXPECT_NEAR(rep.h_tau_given_k.upper, kLog2, 1e-15);

  const auto fixed = WordProcessLaw::iid(Alphabet("ab"), {"ab", "ba"}, {0.5, 0.5});
  const auto r2 = entropy_report(fixed, default_reference(), 10);
  EXPECT_TRUE(r2.h_tau_given_k.contains(0.0, 1e-12));
}

TEST(EntropyReport, FieldsAreFinite) {
  const auto rep = entropy_report(zero_words(), zero_reference(), 4);
  EXPECT_NEAR(rep.h_q, kLog2, 1e-15);
  EXPECT_NEAR(rep.m_q, 1.5, 1e-15);
  EXPECT_NEAR(rep.e_log_rho.value(), -kLog2, 1e-15);
  EXPECT_NEAR(rep.e_log_nu, -kLog2, 1e-15);
  EXPECT_NEAR(rep.h_rel.value(), 1.5 * kLog2, 1e-14);
}

TEST(IdentityResidual, Examples) {
  const auto ref = default_reference();
  EXPECT_TRUE(identity_residual(reference_as_iid(ref), ref).value().contains(0.0, 1e-9));

  const auto r = identity_residual(zero_words(), zero_reference(), 4).value();
  EXPECT_NEAR(r.lower, 0.0, 1e-14);
  EXPECT_NEAR(r.upper, 0.0, 1e-14);
}

TEST(IdentityResidual, RandomLawsContainZero) {
  std::mt19937_64 gen(6);
  const auto ref = default_reference();
  for (int rep = 0; rep < 12; ++rep) {
    const auto q = rep % 3 == 0 ? testing_laws::random_markov(gen, Alphabet("ab"), 5, 4)
                                : testing_laws::random_iid(gen, Alphabet("ab"), 6, 4);
    const auto res = identity_residual(q, ref, 10).value();
    const auto b = psi_rel_entropy_bracket(q, ref.nu(), 10);
    EXPECT_TRUE(res.contains(0.0, 1e-10)) << res.lower << " " << res.upper;
    EXPECT_LE(res.width(), mean_length(q) * b.width() + 1e-10);
  }
}

TEST(Truncation, EntropyQuantitiesContinuous) {
  std::mt19937_64 gen(8);
  const Alphabet e("ab");
  const ReferenceLaw ref(RenewalLaw::algebraic(2.0, 12), LetterLaw::uniform(e));
  const auto words = testing_laws::random_words(gen, e, 5, 12);
  std::vector<Word> ws = words;
  ws.emplace_back("abababababab");
  auto probs = testing_laws::random_simplex(gen, ws.size());
  const auto q = WordProcessLaw::iid(e, ws, probs);
  const auto full_h = spec_rel_entropy(q, ref).value();
  const auto full_b = psi_rel_entropy_bracket(q, ref.nu(), 8);
  const double m = mean_length(q);
  for (std::size_t tr = 2; tr <= 12; ++tr) {
    const auto t = truncate_process(q, tr);
    const auto h = spec_rel_entropy(t, ref).value();
    const auto b = psi_rel_entropy_bracket(t, ref.nu(), 8);
    EXPECT_TRUE(std::isfinite(h));
    EXPECT_LE(b.lower, b.upper + 1e-10);
    if (tr == 12) {
      EXPECT_NEAR(h, full_h, 1e-9);
      EXPECT_NEAR(mean_length(t) * b.lower, m * full_b.lower, 1e-9);
      EXPECT_NEAR(mean_length(t) * b.upper, m * full_b.upper, 1e-9);
    }
  }
  const auto past = truncate_process(q, 20);
  EXPECT_EQ(spec_rel_entropy(past, ref).value(), full_h);
  EXPECT_EQ(psi_rel_entropy_bracket(past, ref.nu(), 8).lower, full_b.lower);
}

}  // namespace
}  // namespace quenchlab
