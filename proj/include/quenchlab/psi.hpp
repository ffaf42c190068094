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

// Exact finite-depth letter marginals of the stationary letter law obtained
// by concatenating the words of a word process and placing the origin
// uniformly inside a length-biased first word.
//
// The letter process is a deterministic function of a hidden Markov chain
// whose states are (word, offset) pairs. Marginals come from a forward pass
// over (letter prefix, hidden state).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "quenchlab/common.hpp"
#include "quenchlab/laws.hpp"

namespace quenchlab {

/// Largest letter table psi_marginal will build.
inline constexpr std::size_t kPsiTableBudget = std::size_t{1} << 22;
/// Largest (prefix, hidden state) layer the forward pass will hold.
inline constexpr std::size_t kPsiCellBudget = std::size_t{1} << 26;

struct HiddenState {
  std::size_t word;
  std::size_t offset;
};

class HiddenChain {
 public:
  explicit HiddenChain(const WordProcessLaw& q) : law_(&q), mean_length_(quenchlab::mean_length(q)) {
    for (std::size_t w = 0; w < q.size(); ++w) {
      first_.push_back(states_.size());
      const Word& word = q.words()[w];
      for (std::size_t k = 0; k < word.length(); ++k) {
        states_.push_back({w, k});
        letter_.push_back(q.alphabet().index_of(word[k]));
        initial_.push_back(q.marginal()[w] / mean_length_);
      }
    }
  }

  std::size_t size() const { return states_.size(); }
  const HiddenState& state(std::size_t s) const { return states_[s]; }
  std::size_t first_state(std::size_t word) const { return first_[word]; }
  /// Index (in alphabet order) of the letter emitted in state s.
  std::size_t letter(std::size_t s) const { return letter_[s]; }
  const std::vector<double>& initial() const { return initial_; }
  const WordProcessLaw& law() const { return *law_; }
  double mean_length() const { return mean_length_; }

  bool at_word_end(std::size_t s) const {
    return states_[s].offset + 1 == law_->words()[states_[s].word].length();
  }

  /// One step of the chain applied to a distribution over states.
  std::vector<double> step(const std::vector<double>& dist) const {
    std::vector<double> out(size(), 0.0);
    for (std::size_t s = 0; s < size(); ++s) {
      if (dist[s] == 0.0) continue;
      if (!at_word_end(s)) {
        out[s + 1] += dist[s];
        continue;
      }
      for (std::size_t w = 0; w < law_->size(); ++w) {
        out[first_[w]] += dist[s] * law_->transition(states_[s].word, w);
      }
    }
    return out;
  }

 private:
  const WordProcessLaw* law_;
  double mean_length_;
  std::vector<HiddenState> states_;
  std::vector<std::size_t> first_;
  std::vector<std::size_t> letter_;
  std::vector<double> initial_;
};

inline HiddenChain hidden_chain(const WordProcessLaw& q) { return HiddenChain(q); }

/// Distribution on E^L, indexed in base |E| with the first letter most
/// significant (lexicographic in alphabet order).
class LetterMarginal {
 public:
  LetterMarginal(Alphabet alphabet, std::size_t depth, std::vector<double> probs)
      : alphabet_(std::move(alphabet)), depth_(depth), probs_(std::move(probs)) {}

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t depth() const { return depth_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  std::string pattern(std::size_t index) const {
    std::string s(depth_, ' ');
    const std::size_t k = alphabet_.size();
    for (std::size_t i = depth_; i > 0; --i) {
      s[i - 1] = alphabet_.letter(index % k);
      index /= k;
    }
    return s;
  }
  std::size_t index(const std::string& pattern) const {
    require(pattern.size() == depth_, "LetterMarginal: pattern length differs from depth");
    std::size_t idx = 0;
    for (char c : pattern) idx = idx * alphabet_.size() + alphabet_.index_of(c);
    return idx;
  }
  double prob(const std::string& pattern) const { return probs_[index(pattern)]; }
  double total() const { return compensated_sum(probs_); }

  /// Law of the first depth-1 letters.
  LetterMarginal drop_last() const {
    require(depth_ >= 1, "LetterMarginal: depth 0");
    const std::size_t k = alphabet_.size();
    std::vector<double> out(probs_.size() / k, 0.0);
    for (std::size_t i = 0; i < probs_.size(); ++i) out[i / k] += probs_[i];
    return LetterMarginal(alphabet_, depth_ - 1, std::move(out));
  }
  /// Law of the last depth-1 letters.
  LetterMarginal drop_first() const {
    require(depth_ >= 1, "LetterMarginal: depth 0");
    const std::size_t m = probs_.size() / alphabet_.size();
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < probs_.size(); ++i) out[i % m] += probs_[i];
    return LetterMarginal(alphabet_, depth_ - 1, std::move(out));
  }

 private:
  Alphabet alphabet_;
  std::size_t depth_;
  std::vector<double> probs_;
};

namespace detail {

inline std::size_t checked_table_size(std::size_t letters, std::size_t depth, std::size_t states) {
  double cells = std::pow(static_cast<double>(letters), static_cast<double>(depth));
  if (cells > static_cast<double>(kPsiTableBudget)) {
    throw SizeError("psi: |E|^L = " + std::to_string(letters) + "^" + std::to_string(depth) +
                    " exceeds table budget 2^22");
  }
  if (cells * static_cast<double>(states) > static_cast<double>(kPsiCellBudget)) {
    throw SizeError("psi: |E|^L * states = " + std::to_string(cells) + " * " +
                    std::to_string(states) + " exceeds layer budget 2^26");
  }
  return static_cast<std::size_t>(cells);
}

/// Forward pass over (prefix, state). Layer l has |E|^l * S cells laid out
/// as prefix * S + state; `visit(l, layer)` is called for l = 1..depth.
template <class Visit>
void forward_letters(const HiddenChain& chain, const std::vector<double>& start, std::size_t depth,
                     Visit&& visit) {
  const std::size_t k = chain.law().alphabet().size();
  const std::size_t n_states = chain.size();
  const auto& law = chain.law();
  detail::checked_table_size(k, depth, n_states);

  std::vector<double> layer(k * n_states, 0.0);
  for (std::size_t s = 0; s < n_states; ++s) layer[chain.letter(s) * n_states + s] += start[s];
  visit(std::size_t{1}, layer);

  std::vector<std::size_t> end_word;  // word-end states and their words
  std::vector<std::size_t> end_state;
  for (std::size_t s = 0; s < n_states; ++s) {
    if (chain.at_word_end(s)) {
      end_state.push_back(s);
      end_word.push_back(chain.state(s).word);
    }
  }
  // i.i.d. laws share one kernel, so end mass can be pooled per prefix.
  const bool pooled = law.is_iid();

  std::size_t prefixes = k;
  std::vector<double> next;
  for (std::size_t l = 2; l <= depth; ++l) {
    next.assign(prefixes * k * n_states, 0.0);
    for (std::size_t pre = 0; pre < prefixes; ++pre) {
      const double* row = layer.data() + pre * n_states;
      double* out = next.data() + pre * k * n_states;
      for (std::size_t s = 0; s + 1 < n_states; ++s) {
        if (row[s] != 0.0 && !chain.at_word_end(s)) out[chain.letter(s + 1) * n_states + s + 1] += row[s];
      }
      if (pooled) {
        double mass = 0.0;
        for (std::size_t s : end_state) mass += row[s];
        if (mass == 0.0) continue;
        for (std::size_t w = 0; w < law.size(); ++w) {
          const std::size_t f = chain.first_state(w);
          out[chain.letter(f) * n_states + f] += mass * law.marginal()[w];
        }
      } else {
        for (std::size_t e = 0; e < end_state.size(); ++e) {
          const double mass = row[end_state[e]];
          if (mass == 0.0) continue;
          for (std::size_t w = 0; w < law.size(); ++w) {
            const double t = law.transition(end_word[e], w);
            if (t == 0.0) continue;
            const std::size_t f = chain.first_state(w);
            out[chain.letter(f) * n_states + f] += mass * t;
          }
        }
      }
    }
    layer.swap(next);
    prefixes *= k;
    visit(l, layer);
  }
}

inline std::vector<double> collapse_states(const std::vector<double>& layer, std::size_t n_states) {
  std::vector<double> out(layer.size() / n_states, 0.0);
  for (std::size_t p = 0; p < out.size(); ++p) {
    CompensatedSum s;
    for (std::size_t j = 0; j < n_states; ++j) s.add(layer[p * n_states + j]);
    out[p] = s.value();
  }
  return out;
}

}  // namespace detail

/// Exact law of the first L letters of the randomized-origin concatenation.
inline LetterMarginal psi_marginal(const WordProcessLaw& q, std::size_t depth) {
  require(depth >= 1, "psi_marginal: depth must be >= 1");
  const HiddenChain chain(q);
  std::vector<double> out;
  detail::forward_letters(chain, chain.initial(), depth, [&](std::size_t l, const std::vector<double>& layer) {
    if (l == depth) out = detail::collapse_states(layer, chain.size());
  });
  return LetterMarginal(q.alphabet(), depth, std::move(out));
}

/// Entropy profile of the concatenated letter process up to a maximal depth.
struct PsiProfile {
  std::size_t max_depth = 0;
  double mean_length = 0.0;
  /// block_entropy[l] = h(first l letters), l = 0..max_depth.
  std::vector<double> block_entropy;
  /// state_conditional[l] = h(first l letters | hidden state at time 1).
  std::vector<double> state_conditional;
  /// One-letter marginal, alphabet order.
  std::vector<double> first_letter;
};

/// One forward pass for the block entropies and one pass per distinct
/// transition row for the state-conditional ones: given the hidden state
/// (w, k) the rest of w is determined, after which the process restarts from
/// w's transition row.
inline PsiProfile psi_profile(const WordProcessLaw& q, std::size_t max_depth) {
  require(max_depth >= 1, "psi_profile: depth must be >= 1");
  const HiddenChain chain(q);
  const std::size_t n_states = chain.size();
  PsiProfile prof;
  prof.max_depth = max_depth;
  prof.mean_length = chain.mean_length();
  prof.block_entropy.assign(max_depth + 1, 0.0);
  prof.state_conditional.assign(max_depth + 1, 0.0);

  detail::forward_letters(chain, chain.initial(), max_depth, [&](std::size_t l, const std::vector<double>& layer) {
    const auto m = detail::collapse_states(layer, n_states);
    prof.block_entropy[l] = shannon_entropy(m);
    if (l == 1) prof.first_letter = m;
  });

  // restart[r][m] = entropy of the first m letters after a word with row r ends.
  std::map<std::vector<double>, std::vector<double>> restart_cache;
  std::vector<const std::vector<double>*> restart_of_word(q.size());
  for (std::size_t w = 0; w < q.size(); ++w) {
    std::vector<double> row(q.size());
    for (std::size_t v = 0; v < q.size(); ++v) row[v] = q.transition(w, v);
    auto it = restart_cache.find(row);
    if (it == restart_cache.end()) {
      std::vector<double> ent(max_depth + 1, 0.0);
      std::vector<double> start(n_states, 0.0);
      for (std::size_t v = 0; v < q.size(); ++v) start[chain.first_state(v)] = row[v];
      detail::forward_letters(chain, start, max_depth, [&](std::size_t l, const std::vector<double>& layer) {
        ent[l] = shannon_entropy(detail::collapse_states(layer, n_states));
      });
      it = restart_cache.emplace(std::move(row), std::move(ent)).first;
    }
    restart_of_word[w] = &it->second;
  }

  for (std::size_t l = 1; l <= max_depth; ++l) {
    CompensatedSum s;
    for (std::size_t st = 0; st < n_states; ++st) {
      const auto& hs = chain.state(st);
      const std::size_t remaining = q.words()[hs.word].length() - hs.offset;
      if (l > remaining) s.add(chain.initial()[st] * (*restart_of_word[hs.word])[l - remaining]);
    }
    prof.state_conditional[l] = s.value();
  }
  return prof;
}

struct RNuTestResult {
  bool in_r_nu = false;
  double max_deviation = 0.0;
  std::size_t worst_depth = 0;
};

inline constexpr double kRNuDefaultTolerance = 1e-9;

/// Sup-norm comparison of the concatenation marginals with nu^L, L <= max_depth.
inline RNuTestResult r_nu_test(const WordProcessLaw& q, const LetterLaw& nu, std::size_t max_depth,
                               double tol = kRNuDefaultTolerance) {
  require(q.alphabet() == nu.alphabet(), "r_nu_test: word law and letter law use different alphabets");
  require(max_depth >= 1, "r_nu_test: depth must be >= 1");
  RNuTestResult res;
  if (nu.alphabet().size() == 1) {
    res.in_r_nu = true;
    return res;
  }
  const HiddenChain chain(q);
  const std::size_t k = nu.alphabet().size();
  std::vector<double> product = nu.probs();
  detail::forward_letters(chain, chain.initial(), max_depth, [&](std::size_t l, const std::vector<double>& layer) {
    if (l > 1) {
      std::vector<double> next(product.size() * k);
      for (std::size_t i = 0; i < product.size(); ++i) {
        for (std::size_t c = 0; c < k; ++c) next[i * k + c] = product[i] * nu.probs()[c];
      }
      product.swap(next);
    }
    const auto m = detail::collapse_states(layer, chain.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double d = std::abs(m[i] - product[i]);
      if (d > res.max_deviation) {
        res.max_deviation = d;
        res.worst_depth = l;
      }
    }
  });
  res.in_r_nu = res.max_deviation <= tol;
  return res;
}

}  // namespace quenchlab
