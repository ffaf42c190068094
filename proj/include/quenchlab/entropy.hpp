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

// Relative entropies and entropy rates for the supported word-process laws.
// Everything is in nats. Quantities that depend on the entropy rate of the
// concatenated letter process are reported as certified intervals.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quenchlab/common.hpp"
#include "quenchlab/laws.hpp"
#include "quenchlab/psi.hpp"

namespace quenchlab {

struct Divergence {
  Extended<double> nats = 0.0;
  /// First atom with mu > 0 and lambda = 0, when the value is infinite.
  std::optional<std::size_t> offending_atom;
};

/// h(mu | lambda) over aligned atoms.
inline Divergence rel_entropy(std::span<const double> mu, std::span<const double> lambda) {
  require(mu.size() == lambda.size(), "rel_entropy: distributions must be aligned");
  CompensatedSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] <= 0.0) continue;
    if (lambda[i] <= 0.0) return {Extended<double>::infinity(), i};
    s.add(mu[i] * std::log(mu[i] / lambda[i]));
  }
  return {std::max(0.0, s.value()), std::nullopt};
}

/// Specific entropy in nats per word.
inline double entropy_rate(const WordProcessLaw& q) {
  if (q.is_iid()) return shannon_entropy(q.marginal());
  CompensatedSum s;
  for (std::size_t i = 0; i < q.size(); ++i) {
    s.add(q.marginal()[i] * shannon_entropy(q.transition_matrix()[i]));
  }
  return s.value();
}

inline void require_same_alphabet(const WordProcessLaw& q, const LetterLaw& nu, const char* who) {
  require(q.alphabet() == nu.alphabet(),
          std::string(who) + ": word law alphabet \"" + q.alphabet().symbols() +
              "\" differs from letter law alphabet \"" + nu.alphabet().symbols() + "\"");
}

/// E_Q[log rho(tau_1)]; infinite (i.e. -inf) when a word length is off-support.
inline Extended<double> expected_log_rho(const WordProcessLaw& q, const RenewalLaw& rho) {
  CompensatedSum s;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double r = rho.prob(q.words()[i].length());
    if (r <= 0.0) return Extended<double>::infinity();
    s.add(q.marginal()[i] * std::log(r));
  }
  return s.value();
}

/// H(Q | q^{(x)N}) = -H(Q) - E_Q[log q(Y_1)], exact because the reference is a
/// product measure.
inline Extended<double> spec_rel_entropy(const WordProcessLaw& q, const ReferenceLaw& ref) {
  require_same_alphabet(q, ref.nu(), "spec_rel_entropy");
  CompensatedSum cross;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double r = ref.prob(q.words()[i]);
    if (r <= 0.0) return Extended<double>::infinity();
    cross.add(q.marginal()[i] * std::log(r));
  }
  return std::max(0.0, -entropy_rate(q) - cross.value());
}

inline constexpr std::size_t kBlockEnumerationBudget = std::size_t{1} << 20;

/// Visits every N-tuple of word indices with its Q-probability.
template <class Visit>
void for_each_block(const WordProcessLaw& q, std::size_t n, Visit&& visit) {
  require(n >= 1, "block enumeration: N must be >= 1");
  const double count = std::pow(static_cast<double>(q.size()), static_cast<double>(n));
  if (count > static_cast<double>(kBlockEnumerationBudget)) {
    throw SizeError("block enumeration: |W|^N = " + std::to_string(count) + " exceeds budget 2^20");
  }
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    double p = q.marginal()[idx[0]];
    for (std::size_t i = 1; i < n && p > 0.0; ++i) p *= q.transition(idx[i - 1], idx[i]);
    visit(std::span<const std::size_t>(idx), p);
    std::size_t i = n;
    while (i > 0 && ++idx[i - 1] == q.size()) idx[--i] = 0;
    if (i == 0) break;
  }
}

/// h(Q restricted to N words) by exhaustive enumeration.
inline double block_entropy(const WordProcessLaw& q, std::size_t n) {
  CompensatedSum s;
  for_each_block(q, n, [&](std::span<const std::size_t>, double p) { s.add(-xlogx(p)); });
  return s.value();
}

/// h(Q restricted to N words | q^{(x)N}) by exhaustive enumeration.
inline Extended<double> block_rel_entropy(const WordProcessLaw& q, const ReferenceLaw& ref, std::size_t n) {
  require_same_alphabet(q, ref.nu(), "block_rel_entropy");
  std::vector<double> word_ref(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) word_ref[i] = ref.prob(q.words()[i]);
  CompensatedSum s;
  bool infinite = false;
  for_each_block(q, n, [&](std::span<const std::size_t> idx, double p) {
    if (p <= 0.0 || infinite) return;
    double r = 1.0;
    for (std::size_t i : idx) r *= word_ref[i];
    if (r <= 0.0) {
      infinite = true;
      return;
    }
    s.add(p * std::log(p / r));
  });
  if (infinite) return Extended<double>::infinity();
  return std::max(0.0, s.value());
}

/// Two-sided bound on H(Psi_Q | nu^{(x)N}), nats per letter.
struct EntropyBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t depth = 0;

  Interval interval() const { return {lower, upper}; }
  double width() const { return upper - lower; }
};

inline double expected_log_nu(const PsiProfile& prof, const LetterLaw& nu) {
  CompensatedSum s;
  for (std::size_t c = 0; c < prof.first_letter.size(); ++c) {
    if (prof.first_letter[c] > 0.0) s.add(prof.first_letter[c] * std::log(nu.probs()[c]));
  }
  return s.value();
}

/// H(Q | q_{lambda,nu}^{(x)N}) / m_Q with lambda the word-length law of Q.
/// Any renewal law bounds m_Q H(Psi_Q | nu) from above this way; the length
/// law of Q itself is the natural choice and is exact on reference laws.
inline double word_level_upper(const WordProcessLaw& q, const LetterLaw& nu) {
  std::vector<double> lambda(q.max_length() + 1, 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) lambda[q.words()[i].length()] += q.marginal()[i];
  CompensatedSum cross;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Word& w = q.words()[i];
    double lp = std::log(lambda[w.length()]);
    for (char c : w.str()) lp += nu.log_prob(c);
    cross.add(q.marginal()[i] * lp);
  }
  return std::max(0.0, -entropy_rate(q) - cross.value()) / mean_length(q);
}

/// lower = h(pi_L Psi | nu^L) / L, from the block entropy.
/// upper = -H(X_{L+1} | X_1..X_L, S_1) - E[log nu(X_1)], where S_1 is the
/// hidden (word, offset) state: conditioning on it bounds the entropy rate
/// from below, which bounds the relative entropy rate from above. The upper
/// end is capped by `word_bound` when given.
inline EntropyBracket bracket_from_profile(const PsiProfile& prof, const LetterLaw& nu, std::size_t depth,
                                           double word_bound = std::numeric_limits<double>::infinity()) {
  require(depth >= 1 && depth + 1 <= prof.max_depth, "psi bracket: profile too shallow for depth");
  const double e_log_nu = expected_log_nu(prof, nu);
  const auto l = static_cast<double>(depth);
  EntropyBracket b;
  b.depth = depth;
  b.lower = (-prof.block_entropy[depth] - l * e_log_nu) / l;
  const double cond = prof.state_conditional[depth + 1] - prof.state_conditional[depth];
  b.upper = std::min(-cond - e_log_nu, word_bound);
  b.lower = std::min(b.lower, b.upper);
  return b;
}

inline EntropyBracket psi_rel_entropy_bracket(const WordProcessLaw& q, const LetterLaw& nu, std::size_t depth) {
  require_same_alphabet(q, nu, "psi_rel_entropy_bracket");
  require(depth >= 1, "psi_rel_entropy_bracket: depth must be >= 1");
  if (nu.alphabet().size() == 1) return {0.0, 0.0, depth};
  return bracket_from_profile(psi_profile(q, depth + 1), nu, depth, word_level_upper(q, nu));
}

/// Brackets for every depth 1..max_depth from a single profile.
inline std::vector<EntropyBracket> psi_rel_entropy_brackets(const WordProcessLaw& q, const LetterLaw& nu,
                                                            std::size_t max_depth) {
  require_same_alphabet(q, nu, "psi_rel_entropy_brackets");
  std::vector<EntropyBracket> out;
  if (nu.alphabet().size() == 1) {
    for (std::size_t l = 1; l <= max_depth; ++l) out.push_back({0.0, 0.0, l});
    return out;
  }
  const auto prof = psi_profile(q, max_depth + 1);
  const double cap = word_level_upper(q, nu);
  for (std::size_t l = 1; l <= max_depth; ++l) out.push_back(bracket_from_profile(prof, nu, l, cap));
  return out;
}

/// H(Psi_Q) interval implied by a relative-entropy bracket.
inline Interval psi_entropy_interval(const EntropyBracket& b, double e_log_nu) {
  return {-b.upper - e_log_nu, -b.lower - e_log_nu};
}

/// H_{tau|K}(Q) = H(Q) - m_Q H(Psi_Q) over an H(Psi_Q) interval, clipped to [0, H(Q)].
inline Interval h_tau_given_k(const WordProcessLaw& q, const Interval& psi_entropy) {
  const double h = entropy_rate(q);
  const double m = mean_length(q);
  auto clip = [&](double x) { return std::clamp(x, 0.0, h); };
  return {clip(h - m * psi_entropy.upper), clip(h - m * psi_entropy.lower)};
}

struct EntropyReport {
  double h_q = 0.0;                         // nats per word
  Extended<double> h_rel = 0.0;             // nats per word
  double m_q = 0.0;
  EntropyBracket psi_bracket;               // nats per letter
  Interval psi_entropy;                     // nats per letter
  Interval h_tau_given_k;                   // nats per word
  Extended<double> e_log_rho = 0.0;         // infinite means -inf
  double e_log_nu = 0.0;
};

inline EntropyReport entropy_report(const WordProcessLaw& q, const ReferenceLaw& ref, std::size_t depth) {
  require_same_alphabet(q, ref.nu(), "entropy_report");
  EntropyReport r;
  r.h_q = entropy_rate(q);
  r.h_rel = spec_rel_entropy(q, ref);
  r.m_q = mean_length(q);
  r.e_log_rho = expected_log_rho(q, ref.rho());
  if (ref.nu().alphabet().size() == 1) {
    r.psi_bracket = {0.0, 0.0, depth};
    r.e_log_nu = 0.0;
  } else {
    const auto prof = psi_profile(q, depth + 1);
    r.psi_bracket = bracket_from_profile(prof, ref.nu(), depth, word_level_upper(q, ref.nu()));
    r.e_log_nu = expected_log_nu(prof, ref.nu());
  }
  r.psi_entropy = psi_entropy_interval(r.psi_bracket, r.e_log_nu);
  r.h_tau_given_k = h_tau_given_k(q, r.psi_entropy);
  return r;
}

/// H(Q | q^{(x)N}) - (m_Q H(Psi_Q | nu) - H_{tau|K}(Q) - E_Q[log rho(tau_1)]).
///
/// Both bracketed terms are functions of the single unknown x = H(Psi_Q | nu),
/// so the residual is evaluated as a function of x over the bracket rather
/// than by independent interval arithmetic. It is non-increasing in x, so the
/// endpoints give the interval. Infinite when the annealed side is.
inline Extended<Interval> identity_residual(const WordProcessLaw& q, const ReferenceLaw& ref, std::size_t depth = 12) {
  const auto rep = entropy_report(q, ref, depth);
  if (rep.h_rel.is_infinite() || rep.e_log_rho.is_infinite()) return Extended<Interval>::infinity();
  const double m = rep.m_q;
  auto residual = [&](double x) {
    const double psi_entropy = -x - rep.e_log_nu;
    const double h_tau = std::clamp(rep.h_q - m * psi_entropy, 0.0, rep.h_q);
    return rep.h_rel.value() - (m * x - h_tau - rep.e_log_rho.value());
  };
  const double a = residual(rep.psi_bracket.upper);
  const double b = residual(rep.psi_bracket.lower);
  return Interval{std::min(a, b), std::max(a, b)};
}

}  // namespace quenchlab
