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

// Exact conditional probability, given a fixed letter string X, that the
// empirical process of the first N cut words lands in a neighbourhood.
//
// The sum over cut vectors j_1 < ... < j_N weighted by prod rho(j_i - j_{i-1})
// is computed by a dynamic program whose state records the cut position,
// the running count of every constrained pattern, and (for two-word
// patterns) the class of the last and of the first word so that the
// periodic wrap-around pair can be scored at the end.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "quenchlab/common.hpp"
#include "quenchlab/laws.hpp"
#include "quenchlab/rate.hpp"
#include "quenchlab/rng.hpp"

namespace quenchlab {

inline constexpr std::size_t kQuenchedStateBudget = std::size_t{1} << 22;

struct QuenchedProb {
  double log_prob = 0.0;  // -inf when no admissible cut vector qualifies
  double prob = 0.0;
  std::size_t peak_states = 0;
};

namespace detail {

inline bool window_holds(std::size_t count, std::size_t n, const PatternConstraint& c) {
  const double f = static_cast<double>(count) / static_cast<double>(n);
  return f >= c.lower - 1e-12 && f <= c.upper + 1e-12;
}

}  // namespace detail

/// Increments are restricted to supp(rho) within [1, jmax] and are not
/// renormalized, so the whole simplex receives (sum_{n<=jmax} rho(n))^N.
inline QuenchedProb quenched_prob_enum(std::string_view x, const RenewalLaw& rho, std::size_t n_words,
                                       const Neighbourhood& nbhd, std::size_t jmax,
                                       std::size_t state_budget = kQuenchedStateBudget) {
  nbhd.validate();
  require(n_words >= 1, "quenched_prob_enum: N must be >= 1");
  require(jmax >= 1, "quenched_prob_enum: jmax must be >= 1");
  if (n_words * jmax > x.size()) {
    throw InputError("quenched_prob_enum: N*jmax = " + std::to_string(n_words * jmax) +
                     " exceeds |X| = " + std::to_string(x.size()));
  }
  const bool pairs = nbhd.max_pattern_length() == 2;
  require(!pairs || n_words >= 2, "quenched_prob_enum: two-word patterns need N >= 2");

  // Word classes: every word named by a constraint, plus "other".
  std::unordered_map<std::string, std::uint16_t> klass;
  for (const auto& c : nbhd.constraints) {
    for (const auto& w : c.pattern) klass.emplace(w.str(), static_cast<std::uint16_t>(klass.size()));
  }
  const auto other = static_cast<std::uint16_t>(klass.size());
  struct Tracked {
    std::uint16_t first;
    std::uint16_t second;  // unused for one-word patterns
    bool pair;
  };
  std::vector<Tracked> tracked;
  for (const auto& c : nbhd.constraints) {
    const bool p = c.pattern.size() == 2;
    tracked.push_back({klass.at(c.pattern[0].str()), p ? klass.at(c.pattern[1].str()) : other, p});
  }
  const std::size_t u = tracked.size();
  require(n_words < 65535, "quenched_prob_enum: N too large for the count encoding");

  std::vector<double> jumps;
  std::vector<std::size_t> jump_len;
  for (std::size_t d = 1; d <= jmax; ++d) {
    if (rho.prob(d) > 0.0) {
      jumps.push_back(rho.prob(d));
      jump_len.push_back(d);
    }
  }

  // Key layout: [pos, count_1..count_U, last, first].
  using Key = std::u32string;
  auto make_key = [&](std::uint32_t pos, const std::uint32_t* counts, std::uint32_t last, std::uint32_t first) {
    Key k;
    k.reserve(u + 3);
    k.push_back(static_cast<char32_t>(pos));
    for (std::size_t t = 0; t < u; ++t) k.push_back(static_cast<char32_t>(counts[t]));
    if (pairs) {
      k.push_back(static_cast<char32_t>(last));
      k.push_back(static_cast<char32_t>(first));
    }
    return k;
  };

  std::unordered_map<Key, double> layer, next;
  std::vector<std::uint32_t> zero(u, 0);
  layer.emplace(make_key(0, zero.data(), other, other), 1.0);
  double log_scale = 0.0;
  QuenchedProb res;
  std::vector<std::uint32_t> counts(u);

  for (std::size_t i = 0; i < n_words; ++i) {
    next.clear();
    const std::size_t remaining_after = n_words - i - 1;
    for (const auto& [key, mass] : layer) {
      const std::uint32_t pos = key[0];
      const std::uint32_t last = pairs ? key[u + 1] : other;
      const std::uint32_t first = pairs ? key[u + 2] : other;
      for (std::size_t jj = 0; jj < jumps.size(); ++jj) {
        const std::size_t d = jump_len[jj];
        auto it = klass.find(std::string(x.substr(pos, d)));
        const std::uint32_t c = it == klass.end() ? other : it->second;
        bool alive = true;
        for (std::size_t t = 0; t < u; ++t) {
          std::uint32_t cnt = key[1 + t];
          if (!tracked[t].pair) {
            cnt += (c == tracked[t].first);
          } else if (i > 0) {
            cnt += (last == tracked[t].first && c == tracked[t].second);
          }
          counts[t] = cnt;
          // Prune: the window can no longer be met. A pair pattern may still
          // gain one count from the wrap-around pair.
          const std::size_t reachable = cnt + remaining_after + (tracked[t].pair ? 1 : 0);
          const auto& con = nbhd.constraints[t];
          if (static_cast<double>(cnt) > con.upper * static_cast<double>(n_words) + 1e-9 ||
              static_cast<double>(reachable) < con.lower * static_cast<double>(n_words) - 1e-9) {
            alive = false;
            break;
          }
        }
        if (!alive) continue;
        next[make_key(static_cast<std::uint32_t>(pos + d), counts.data(), c, i == 0 ? c : first)] +=
            mass * jumps[jj];
      }
    }
    if (next.size() > state_budget) {
      throw SizeError("quenched_prob_enum: " + std::to_string(next.size()) + " states after word " +
                      std::to_string(i + 1) + " exceed budget " + std::to_string(state_budget) + " (positions <= " +
                      std::to_string(n_words * jmax) + ", " + std::to_string(u) + " counters up to N=" +
                      std::to_string(n_words) + ")");
    }
    res.peak_states = std::max(res.peak_states, next.size());
    double mx = 0.0;
    for (const auto& [k, m] : next) mx = std::max(mx, m);
    if (mx > 0.0) {
      for (auto& [k, m] : next) m /= mx;
      log_scale += std::log(mx);
    }
    layer.swap(next);
  }

  CompensatedSum total;
  for (const auto& [key, mass] : layer) {
    bool ok = true;
    for (std::size_t t = 0; t < u && ok; ++t) {
      std::uint32_t cnt = key[1 + t];
      if (tracked[t].pair) cnt += (key[u + 1] == tracked[t].first && key[u + 2] == tracked[t].second);
      ok = detail::window_holds(cnt, n_words, nbhd.constraints[t]);
    }
    if (ok) total.add(mass);
  }
  if (total.value() <= 0.0) {
    res.log_prob = -std::numeric_limits<double>::infinity();
    res.prob = 0.0;
  } else {
    res.log_prob = log_scale + std::log(total.value());
    res.prob = std::exp(res.log_prob);
  }
  return res;
}

struct SlopePoint {
  std::size_t n_words = 0;
  double log_prob = 0.0;
  /// -(1/N) log P(R_N in nbhd | X); +inf when the probability is zero.
  double slope = 0.0;
};

struct SlopeSeries {
  std::uint64_t seed = 0;
  std::size_t jmax = 0;
  std::string medium;
  std::vector<SlopePoint> points;
  /// inf h(q | q_ref) over the neighbourhood, for one-word constraints.
  std::optional<double> annealed_slope;
  /// -log(sum_{n <= jmax} rho(n)): per-word cost of the increment cap.
  double jmax_offset = 0.0;
};

/// One medium X ~ nu_X^{|X|}, |X| = max(N) * jmax, shared by every N.
inline SlopeSeries quenched_slope_series(const LetterLaw& nu_x, const RenewalLaw& rho, const Neighbourhood& nbhd,
                                         const std::vector<std::size_t>& n_list, std::size_t jmax,
                                         std::uint64_t seed) {
  require(!n_list.empty(), "quenched_slope_series: empty N list");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    require(n_list[i] > n_list[i - 1], "quenched_slope_series: N list must be strictly increasing");
  }
  SlopeSeries s;
  s.seed = seed;
  s.jmax = jmax;
  const std::size_t len = n_list.back() * jmax;
  const CounterRng rng(seed, 3);
  const DiscreteSampler letter(nu_x.probs());
  s.medium.resize(len);
  for (std::size_t i = 0; i < len; ++i) s.medium[i] = nu_x.alphabet().letter(letter.from_uniform(rng.uniform_at(i)));

  const double mass = rho.mass_up_to(jmax);
  s.jmax_offset = mass > 0.0 ? -std::log(mass) : std::numeric_limits<double>::infinity();
  for (std::size_t n : n_list) {
    const auto p = quenched_prob_enum(s.medium, rho, n, nbhd, jmax);
    const double slope = std::isfinite(p.log_prob) ? -p.log_prob / static_cast<double>(n)
                                                   : std::numeric_limits<double>::infinity();
    s.points.push_back({n, p.log_prob, slope});
  }
  if (nbhd.max_pattern_length() <= 1) {
    s.annealed_slope = i_projection(reference_marginal(ReferenceLaw(rho, nu_x)), nbhd).value;
  }
  return s;
}

}  // namespace quenchlab
