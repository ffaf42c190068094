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

// Brute-force reference implementations. They enumerate everything and share
// no code with the dynamic programs they check.

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "quenchlab/laws.hpp"
#include "quenchlab/mc/core_lemma.hpp"
#include "quenchlab/rate.hpp"
#include "quenchlab/words.hpp"

namespace quenchlab::oracles {

/// Sum of prod rho(increment) over every cut vector with increments in
/// [1, jmax] whose sentence satisfies every constraint of nbhd.
inline double brute_quenched_prob(std::string_view x, const RenewalLaw& rho, std::size_t n_words,
                                  const Neighbourhood& nbhd, std::size_t jmax) {
  std::vector<std::size_t> cuts(n_words);
  double total = 0.0;
  std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t i, std::size_t pos, double w) {
    if (i == n_words) {
      const Sentence s = cut(x, CutPoints(cuts));
      for (const auto& c : nbhd.constraints) {
        const auto table = empirical_patterns(s, c.pattern.size());
        const double f = table.at(pattern_key(c.pattern));
        if (f < c.lower - 1e-12 || f > c.upper + 1e-12) return;
      }
      total += w;
      return;
    }
    for (std::size_t d = 1; d <= jmax; ++d) {
      if (rho.prob(d) <= 0.0 || pos + d > x.size()) continue;
      cuts[i] = pos + d;
      rec(i + 1, pos + d, w * rho.prob(d));
    }
  };
  rec(0, 0, 1.0);
  return total;
}

/// S_N(omega) over all increasing N-tuples of marked sites.
inline double brute_s_n(const Marks& m, double alpha, std::size_t n) {
  double total = 0.0;
  std::function<void(std::size_t, std::size_t, std::size_t, double)> rec = [&](std::size_t depth, std::size_t from,
                                                                              std::size_t prev, double w) {
    if (depth == n) {
      total += w;
      return;
    }
    for (std::size_t k = from; k < m.sites.size(); ++k) {
      const std::size_t j = m.sites[k];
      rec(depth + 1, k + 1, j, w * std::pow(static_cast<double>(j - prev), -alpha));
    }
  };
  rec(0, 0, 0, 1.0);
  return total;
}

/// E[S_N] over every omega in {0,1}^T with Bernoulli(p) weights.
inline double exhaustive_s_n_mean(double alpha, double p, std::size_t n, std::size_t horizon) {
  double total = 0.0;
  for (std::size_t bits = 0; bits < (std::size_t{1} << horizon); ++bits) {
    Marks m;
    m.horizon = horizon;
    for (std::size_t j = 0; j < horizon; ++j) {
      if (bits >> j & 1) m.sites.push_back(static_cast<std::uint32_t>(j + 1));
    }
    const auto k = static_cast<double>(m.sites.size());
    const double weight = std::pow(p, k) * std::pow(1.0 - p, static_cast<double>(horizon) - k);
    total += weight * brute_s_n(m, alpha, n);
  }
  return total;
}

/// |a - b| in the log domain, zero when both are -inf.
inline double log_gap(double log_a, double b) {
  const double log_b = b > 0.0 ? std::log(b) : -std::numeric_limits<double>::infinity();
  if (std::isinf(log_a) && std::isinf(log_b) && log_a < 0 && log_b < 0) return 0.0;
  return std::abs(log_a - log_b);
}

/// The micro-grid neighbourhoods over {a, b}.
inline std::vector<Neighbourhood> micro_neighbourhoods(std::size_t n_words) {
  std::vector<Neighbourhood> out;
  auto one = [](std::vector<PatternConstraint> cs) {
    Neighbourhood n;
    n.constraints = std::move(cs);
    return n;
  };
  out.push_back(one({{{Word("a")}, 0.0, 1.0}}));
  out.push_back(one({{{Word("b")}, 0.5, 1.0}}));
  out.push_back(one({{{Word("ab")}, 0.0, 0.5}}));
  out.push_back(one({{{Word("a")}, 0.25, 0.75}, {{Word("ba")}, 0.0, 0.5}}));
  if (n_words >= 2) {
    out.push_back(one({{{Word("a"), Word("b")}, 0.25, 1.0}}));
    out.push_back(one({{{Word("b"), Word("b")}, 0.0, 0.5}, {{Word("a")}, 0.0, 0.75}}));
  }
  return out;
}

}  // namespace quenchlab::oracles
