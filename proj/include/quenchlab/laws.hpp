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

// Letter laws, renewal (cut-increment) laws, the reference word law built from
// the two, and the two computable families of stationary word-process laws:
// i.i.d. words and a stationary irreducible Markov chain on a finite word set.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "quenchlab/common.hpp"
#include "quenchlab/rng.hpp"
#include "quenchlab/words.hpp"

namespace quenchlab {

inline constexpr double kMassTolerance = 1e-12;
inline constexpr double kStationarityTolerance = 1e-10;
inline constexpr std::size_t kMaxMarkovWords = 64;

inline void require_unit_mass(std::span<const double> probs, const std::string& what) {
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0, what + ": probabilities must be finite and >= 0");
  }
  const double total = compensated_sum(probs);
  require(std::abs(total - 1.0) <= kMassTolerance,
          what + ": probabilities sum to " + std::to_string(total) + ", not 1");
}

/// Law of a single letter; full support on its alphabet.
class LetterLaw {
 public:
  LetterLaw(Alphabet alphabet, std::vector<double> probs)
      : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
    require(probs_.size() == alphabet_.size(), "LetterLaw: one probability per letter required");
    require_unit_mass(probs_, "LetterLaw");
    for (double p : probs_) require(p > 0.0, "LetterLaw: every letter needs positive mass");
  }

  static LetterLaw uniform(Alphabet alphabet) {
    const std::size_t n = alphabet.size();
    return LetterLaw(std::move(alphabet), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<double>& probs() const { return probs_; }
  double prob(char c) const { return probs_[alphabet_.index_of(c)]; }
  double log_prob(char c) const { return std::log(prob(c)); }

 private:
  Alphabet alphabet_;
  std::vector<double> probs_;
};

/// Declared tail exponent of a renewal law: a real alpha > 1, or one of the
/// two boundary regimes.
class TailExponent {
 public:
  enum class Kind { Algebraic, One, Infinity };

  static TailExponent algebraic(double alpha) {
    require(alpha > 1.0, "TailExponent: algebraic alpha must be > 1");
    return TailExponent(Kind::Algebraic, alpha);
  }
  static TailExponent one() { return TailExponent(Kind::One, 1.0); }
  static TailExponent infinity() { return TailExponent(Kind::Infinity, 0.0); }

  Kind kind() const { return kind_; }
  bool is_algebraic() const { return kind_ == Kind::Algebraic; }
  double alpha() const {
    require(kind_ != Kind::Infinity, "TailExponent: alpha is infinite");
    return alpha_;
  }
  std::string to_string() const {
    switch (kind_) {
      case Kind::One:
        return "one";
      case Kind::Infinity:
        return "infinity";
      default:
        return std::to_string(alpha_);
    }
  }

 private:
  TailExponent(Kind k, double a) : kind_(k), alpha_(a) {}
  Kind kind_;
  double alpha_;
};

/// Law of the cut increments on {1, ..., cap}, stored densely.
class RenewalLaw {
 public:
  /// rho(n) proportional to n^-alpha on {1, ..., cap}.
  static RenewalLaw algebraic(double alpha, std::size_t cap) {
    if (!(alpha > 1.0)) {
      throw InputError("make_algebraic_renewal: alpha=" + std::to_string(alpha) +
                       " must be > 1 (use the explicit-atoms constructor for boundary cases)");
    }
    require(cap >= 1, "make_algebraic_renewal: cap must be >= 1");
    std::vector<double> w(cap + 1, 0.0);
    CompensatedSum z;
    for (std::size_t n = 1; n <= cap; ++n) {
      w[n] = std::pow(static_cast<double>(n), -alpha);
    }
    for (std::size_t n = cap; n >= 1; --n) z.add(w[n]);
    const double norm = z.value();
    for (std::size_t n = 1; n <= cap; ++n) w[n] /= norm;
    RenewalLaw r(std::move(w), TailExponent::algebraic(alpha));
    r.c_rho_ = 1.0 / norm;
    r.discarded_tail_ = std::max(0.0, 1.0 - norm / boost::math::zeta(alpha));
    return r;
  }

  /// Explicit atoms (n, p); gaps in the support are allowed.
  static RenewalLaw from_atoms(const std::vector<std::pair<std::size_t, double>>& atoms,
                               TailExponent tail) {
    require(!atoms.empty(), "RenewalLaw: support must be non-empty");
    std::size_t cap = 0;
    for (const auto& [n, p] : atoms) {
      require(n >= 1, "RenewalLaw: atoms must be positive integers");
      cap = std::max(cap, n);
    }
    std::vector<double> w(cap + 1, 0.0);
    std::vector<double> masses;
    for (const auto& [n, p] : atoms) {
      require(w[n] == 0.0, "RenewalLaw: duplicate atom " + std::to_string(n));
      w[n] = p;
      masses.push_back(p);
    }
    require_unit_mass(masses, "RenewalLaw");
    RenewalLaw r(std::move(w), tail);
    if (tail.is_algebraic()) {
      double c = 0.0;
      for (std::size_t n = 1; n <= cap; ++n) {
        c = std::max(c, r.probs_[n] * std::pow(static_cast<double>(n), tail.alpha()));
      }
      r.c_rho_ = c;
    }
    return r;
  }

  static RenewalLaw uniform(std::size_t lo, std::size_t hi, TailExponent tail) {
    require(lo >= 1 && lo <= hi, "RenewalLaw::uniform: need 1 <= lo <= hi");
    std::vector<std::pair<std::size_t, double>> atoms;
    for (std::size_t n = lo; n <= hi; ++n) atoms.emplace_back(n, 1.0 / static_cast<double>(hi - lo + 1));
    return from_atoms(atoms, tail);
  }

  double prob(std::size_t n) const { return n < probs_.size() ? probs_[n] : 0.0; }
  std::size_t cap() const { return probs_.size() - 1; }
  const TailExponent& tail() const { return tail_; }
  /// Smallest C with rho(n) <= C n^-alpha on the support (algebraic tails only).
  double c_rho() const { return c_rho_; }
  /// Mass of the uncapped power law beyond the cap (algebraic constructor only).
  double discarded_tail() const { return discarded_tail_; }
  /// Dense vector indexed by n, entry 0 unused.
  const std::vector<double>& dense() const { return probs_; }

  std::vector<std::pair<std::size_t, double>> atoms() const {
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t n = 1; n < probs_.size(); ++n) {
      if (probs_[n] > 0.0) out.emplace_back(n, probs_[n]);
    }
    return out;
  }

  double mass_up_to(std::size_t j) const {
    CompensatedSum s;
    for (std::size_t n = 1; n < probs_.size() && n <= j; ++n) s.add(probs_[n]);
    return s.value();
  }

 private:
  RenewalLaw(std::vector<double> dense, TailExponent tail) : probs_(std::move(dense)), tail_(tail) {}

  std::vector<double> probs_;
  TailExponent tail_;
  double c_rho_ = 0.0;
  double discarded_tail_ = 0.0;
};

/// Law of one word when i.i.d. letters are cut by i.i.d. increments:
/// q(x_1..x_n) = rho(n) nu(x_1) ... nu(x_n).
class ReferenceLaw {
 public:
  ReferenceLaw(RenewalLaw rho, LetterLaw nu) : rho_(std::move(rho)), nu_(std::move(nu)) {}

  const RenewalLaw& rho() const { return rho_; }
  const LetterLaw& nu() const { return nu_; }

  /// Zero when the length is off-support or a letter is foreign.
  double prob(const Word& w) const {
    if (!nu_.alphabet().contains_all(w.str())) return 0.0;
    double p = rho_.prob(w.length());
    for (char c : w.str()) p *= nu_.prob(c);
    return p;
  }

  /// Every positive-mass word, ordered by length then alphabet order.
  std::vector<std::pair<Word, double>> enumerate(std::size_t budget = 1u << 20) const {
    const std::size_t k = nu_.alphabet().size();
    std::vector<std::pair<Word, double>> out;
    double count = 0.0;
    for (std::size_t n = 1; n <= rho_.cap(); ++n) {
      if (rho_.prob(n) > 0.0) count += std::pow(static_cast<double>(k), static_cast<double>(n));
    }
    if (count > static_cast<double>(budget)) {
      throw SizeError("ReferenceLaw::enumerate: " + std::to_string(count) + " words exceed budget " +
                      std::to_string(budget));
    }
    for (std::size_t n = 1; n <= rho_.cap(); ++n) {
      if (rho_.prob(n) <= 0.0) continue;
      std::vector<std::size_t> digits(n, 0);
      for (;;) {
        std::string s(n, ' ');
        double p = rho_.prob(n);
        for (std::size_t i = 0; i < n; ++i) {
          s[i] = nu_.alphabet().letter(digits[i]);
          p *= nu_.probs()[digits[i]];
        }
        out.emplace_back(Word(std::move(s)), p);
        std::size_t i = n;
        while (i > 0 && ++digits[i - 1] == k) digits[--i] = 0;
        if (i == 0) break;
      }
    }
    return out;
  }

 private:
  RenewalLaw rho_;
  LetterLaw nu_;
};

/// Stationary law on word sequences: i.i.d. words, or a stationary
/// irreducible Markov chain on a finite word set.
class WordProcessLaw {
 public:
  enum class Variant { Iid, Markov };

  static WordProcessLaw iid(Alphabet alphabet, std::vector<Word> words, std::vector<double> probs) {
    require(words.size() == probs.size(), "WordProcessLaw: one probability per word required");
    require(!words.empty(), "WordProcessLaw: empty word set");
    require_unit_mass(probs, "WordProcessLaw(iid)");
    WordProcessLaw q(Variant::Iid, std::move(alphabet));
    std::map<Word, double> merged;
    for (std::size_t i = 0; i < words.size(); ++i) {
      require(q.alphabet_.contains_all(words[i].str()),
              "WordProcessLaw: word \"" + words[i].str() + "\" uses letters outside the alphabet");
      require(!merged.contains(words[i]), "WordProcessLaw: duplicate word \"" + words[i].str() + "\"");
      merged.emplace(words[i], probs[i]);
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (probs[i] > 0.0) {
        q.words_.push_back(words[i]);
        q.marginal_.push_back(probs[i]);
      }
    }
    return q;
  }

  static WordProcessLaw markov(Alphabet alphabet, std::vector<Word> words,
                               std::vector<std::vector<double>> transition) {
    const std::size_t n = words.size();
    require(n >= 1, "WordProcessLaw: empty word set");
    if (n > kMaxMarkovWords) {
      throw SizeError("WordProcessLaw(markov): " + std::to_string(n) + " words exceed the cap of " +
                      std::to_string(kMaxMarkovWords));
    }
    require(transition.size() == n, "WordProcessLaw(markov): transition must be |W| x |W|");
    WordProcessLaw q(Variant::Markov, std::move(alphabet));
    std::map<Word, int> seen;
    for (std::size_t i = 0; i < n; ++i) {
      require(q.alphabet_.contains_all(words[i].str()),
              "WordProcessLaw: word \"" + words[i].str() + "\" uses letters outside the alphabet");
      require(!seen.contains(words[i]), "WordProcessLaw: duplicate word \"" + words[i].str() + "\"");
      seen.emplace(words[i], 0);
      require(transition[i].size() == n, "WordProcessLaw(markov): transition must be |W| x |W|");
      require_unit_mass(transition[i], "WordProcessLaw(markov) row " + std::to_string(i));
    }
    require(irreducible(transition), "WordProcessLaw(markov): chain is not irreducible");
    q.words_ = std::move(words);
    q.transition_ = std::move(transition);
    q.marginal_ = stationary_row(q.transition_);
    return q;
  }

  Variant variant() const { return variant_; }
  bool is_iid() const { return variant_ == Variant::Iid; }
  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<Word>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  /// Law of the first word: the i.i.d. law, or the stationary row.
  const std::vector<double>& marginal() const { return marginal_; }
  /// Kernel to the next word; for i.i.d. laws every row is the marginal.
  double transition(std::size_t from, std::size_t to) const {
    return is_iid() ? marginal_[to] : transition_[from][to];
  }
  const std::vector<std::vector<double>>& transition_matrix() const { return transition_; }

  std::size_t max_length() const {
    std::size_t m = 0;
    for (const auto& w : words_) m = std::max(m, w.length());
    return m;
  }

  /// Stationary row after construction; throws if it fails to verify.
  static std::vector<double> stationary_row(const std::vector<std::vector<double>>& p);
  static bool irreducible(const std::vector<std::vector<double>>& p);

 private:
  WordProcessLaw(Variant v, Alphabet a) : variant_(v), alphabet_(std::move(a)) {}

  Variant variant_;
  Alphabet alphabet_;
  std::vector<Word> words_;
  std::vector<double> marginal_;
  std::vector<std::vector<double>> transition_;
};

inline bool WordProcessLaw::irreducible(const std::vector<std::vector<double>>& p) {
  const std::size_t n = p.size();
  auto reach_all = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        const double w = forward ? p[i][j] : p[j][i];
        if (w > 0.0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reach_all(true) && reach_all(false);
}

inline std::vector<double> WordProcessLaw::stationary_row(const std::vector<std::vector<double>>& p) {
  const std::size_t n = p.size();
  auto residual = [&](const std::vector<double>& pi) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      CompensatedSum s;
      for (std::size_t i = 0; i < n; ++i) s.add(pi[i] * p[i][j]);
      r = std::max(r, std::abs(s.value() - pi[j]));
    }
    return r;
  };

  // Direct solve of pi (P - I) = 0 with one equation replaced by sum(pi) = 1.
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) a[j][i] = p[i][j] - (i == j ? 1.0 : 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) a[n - 1][i] = 1.0;
  a[n - 1][n] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    if (std::abs(a[c][c]) < 1e-300) continue;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0.0) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = std::max(0.0, a[i][n] / a[i][i]);
  double total = compensated_sum(pi);
  for (double& x : pi) x /= total;

  // Polish with power iteration on the lazy chain (same fixed point, aperiodic).
  std::vector<double> next(n);
  for (int it = 0; it < 200000 && residual(pi) > 1e-13; ++it) {
    for (std::size_t j = 0; j < n; ++j) {
      CompensatedSum s;
      for (std::size_t i = 0; i < n; ++i) s.add(pi[i] * p[i][j]);
      next[j] = 0.5 * (pi[j] + s.value());
    }
    total = compensated_sum(next);
    for (std::size_t j = 0; j < n; ++j) pi[j] = next[j] / total;
  }
  const double r = residual(pi);
  if (r > kStationarityTolerance) {
    throw InputError("WordProcessLaw(markov): stationary row residual " + std::to_string(r) +
                     " exceeds tolerance");
  }
  return pi;
}

inline double mean_length(const WordProcessLaw& q) {
  CompensatedSum s;
  for (std::size_t i = 0; i < q.size(); ++i) {
    s.add(static_cast<double>(q.words()[i].length()) * q.marginal()[i]);
  }
  return s.value();
}

namespace detail {

struct TruncationClasses {
  std::vector<Word> words;            // truncated words in first-appearance order
  std::vector<std::size_t> class_of;  // original index -> class index
};

inline TruncationClasses truncation_classes(const WordProcessLaw& q, std::size_t tr) {
  TruncationClasses c;
  std::map<Word, std::size_t> index;
  for (const auto& w : q.words()) {
    Word t = truncate(w, tr);
    auto [it, inserted] = index.emplace(t, c.words.size());
    if (inserted) c.words.push_back(t);
    c.class_of.push_back(it->second);
  }
  return c;
}

}  // namespace detail

/// Image of Q under truncating every word to its first tr letters.
///
/// An i.i.d. law maps to the i.i.d. law of merged atoms. A Markov law maps to
/// a Markov law only when the truncation classes are strongly lumpable (all
/// members of a class send the same mass to every class); otherwise the image
/// is not Markov and InputError names the offending class.
inline WordProcessLaw truncate_process(const WordProcessLaw& q, std::size_t tr) {
  require(tr >= 1, "truncate_process: tr must be >= 1");
  if (tr >= q.max_length()) return q;
  const auto cls = detail::truncation_classes(q, tr);
  const std::size_t k = cls.words.size();
  if (q.is_iid()) {
    std::vector<CompensatedSum> mass(k);
    for (std::size_t i = 0; i < q.size(); ++i) mass[cls.class_of[i]].add(q.marginal()[i]);
    std::vector<double> probs(k);
    for (std::size_t c = 0; c < k; ++c) probs[c] = mass[c].value();
    return WordProcessLaw::iid(q.alphabet(), cls.words, probs);
  }
  std::vector<std::vector<double>> lumped(k, std::vector<double>(k, 0.0));
  std::vector<char> filled(k, 0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::vector<CompensatedSum> row(k);
    for (std::size_t j = 0; j < q.size(); ++j) row[cls.class_of[j]].add(q.transition(i, j));
    const std::size_t c = cls.class_of[i];
    for (std::size_t d = 0; d < k; ++d) {
      const double v = row[d].value();
      if (!filled[c]) {
        lumped[c][d] = v;
      } else if (std::abs(lumped[c][d] - v) > 1e-12) {
        throw InputError("truncate_process: truncation at tr=" + std::to_string(tr) +
                         " is not Markov: words mapping to \"" + cls.words[c].str() +
                         "\" send different mass to \"" + cls.words[d].str() + "\"");
      }
    }
    filled[c] = 1;
  }
  return WordProcessLaw::markov(q.alphabet(), cls.words, lumped);
}

/// Markov chain on truncated words with pi-weighted row merging. Its one-word
/// marginal matches the truncated image; longer marginals generally do not,
/// so this is for sampling only.
inline WordProcessLaw truncate_process_lumped(const WordProcessLaw& q, std::size_t tr) {
  require(tr >= 1, "truncate_process_lumped: tr must be >= 1");
  if (q.is_iid() || tr >= q.max_length()) return truncate_process(q, tr);
  const auto cls = detail::truncation_classes(q, tr);
  const std::size_t k = cls.words.size();
  std::vector<std::vector<double>> lumped(k, std::vector<double>(k, 0.0));
  std::vector<double> weight(k, 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const std::size_t c = cls.class_of[i];
    weight[c] += q.marginal()[i];
    for (std::size_t j = 0; j < q.size(); ++j) {
      lumped[c][cls.class_of[j]] += q.marginal()[i] * q.transition(i, j);
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    double total = 0.0;
    for (double& x : lumped[c]) total += (x /= weight[c]);
    for (double& x : lumped[c]) x /= total;
  }
  return WordProcessLaw::markov(q.alphabet(), cls.words, lumped);
}

struct SamplePath {
  std::string letters;
  CutPoints cuts;
  Sentence sentence;
};

/// Letter i and increment i are pure functions of (seed, i), so the result
/// does not depend on how generation is scheduled. X is extended past
/// n_letters when the N-th cut lands beyond it.
inline SamplePath sample_path(const LetterLaw& nu, const RenewalLaw& rho, std::size_t n_letters,
                              std::size_t n_words, std::uint64_t seed) {
  require(n_words >= 1, "sample_path: need at least one word");
  const CounterRng letter_rng(seed, 1);
  const CounterRng jump_rng(seed, 2);
  const DiscreteSampler letter(nu.probs());
  const DiscreteSampler jump(rho.dense());

  std::vector<std::size_t> cuts(n_words);
  std::size_t t = 0;
  for (std::size_t i = 0; i < n_words; ++i) {
    t += jump.from_uniform(jump_rng.uniform_at(i));
    cuts[i] = t;
  }
  const std::size_t len = std::max(n_letters, t);
  std::string x(len, ' ');
  for (std::size_t i = 0; i < len; ++i) {
    x[i] = nu.alphabet().letter(letter.from_uniform(letter_rng.uniform_at(i)));
  }
  CutPoints cp(std::move(cuts));
  Sentence s = cut(x, cp);
  return SamplePath{std::move(x), std::move(cp), std::move(s)};
}

/// Indices of n consecutive words of Q, started from the first-word marginal.
inline std::vector<std::size_t> sample_word_indices(const WordProcessLaw& q, std::size_t n,
                                                    CounterRng& rng) {
  std::vector<std::size_t> out;
  out.reserve(n);
  if (n == 0) return out;
  const DiscreteSampler first(q.marginal());
  out.push_back(first(rng));
  if (q.is_iid()) {
    for (std::size_t i = 1; i < n; ++i) out.push_back(first(rng));
    return out;
  }
  std::vector<DiscreteSampler> rows;
  rows.reserve(q.size());
  for (const auto& row : q.transition_matrix()) rows.emplace_back(row);
  for (std::size_t i = 1; i < n; ++i) out.push_back(rows[out.back()](rng));
  return out;
}

}  // namespace quenchlab
