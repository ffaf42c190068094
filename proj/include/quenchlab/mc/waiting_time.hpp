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

// Waiting time until an i.i.d. letter string first shows a block of length M
// whose empirical letter frequencies look like a target law psi. Its log
// grows like M h(psi | nu), the search cost of the lower-bound strategy
// specialised to i.i.d. targets.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "quenchlab/common.hpp"
#include "quenchlab/entropy.hpp"
#include "quenchlab/laws.hpp"
#include "quenchlab/rng.hpp"

namespace quenchlab {

struct WaitingTimeParams {
  std::vector<std::size_t> block_lengths;
  std::size_t trials = 200;
  double tolerance = 0.02;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  /// Letters scanned per trial before the trial is reported as censored.
  std::uint64_t horizon_cap = std::uint64_t{1} << 34;
};

struct WaitingTimePoint {
  std::size_t block_length = 0;
  double mean_log_sigma = 0.0;
  double std_error = 0.0;
  std::size_t censored = 0;
};

struct WaitingTimeResult {
  std::vector<WaitingTimePoint> points;
  /// Least-squares slope of E[log sigma_1] against M.
  double slope = 0.0;
  double intercept = 0.0;
  /// h(psi | nu) per letter.
  double predicted = 0.0;
};

namespace detail {

/// Per-letter count windows [lo, hi] for blocks of length m: frequency within
/// tol of psi, widened to the nearest achievable count so the set is never
/// empty.
inline std::vector<std::pair<double, double>> typical_windows(const std::vector<double>& psi, std::size_t m,
                                                              double tol) {
  std::vector<std::pair<double, double>> out;
  const auto md = static_cast<double>(m);
  for (double p : psi) {
    const double centre = md * p;
    const double nearest = std::abs(centre - std::round(centre));
    const double half = std::max(tol * md, nearest) + 1e-9;
    out.emplace_back(centre - half, centre + half);
  }
  return out;
}

/// 1-based start of the first typical block, capped at horizon_cap.
inline std::uint64_t first_typical_block(const CounterRng& rng, const DiscreteSampler& letter, std::size_t k,
                                         std::size_t m, const std::vector<std::pair<double, double>>& win,
                                         std::uint64_t cap, bool& censored) {
  std::vector<std::uint32_t> ring(m);
  std::vector<double> count(k, 0.0);
  auto typical = [&] {
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] < win[c].first || count[c] > win[c].second) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < m; ++i) {
    ring[i] = static_cast<std::uint32_t>(letter.from_uniform(rng.uniform_at(i)));
    count[ring[i]] += 1.0;
  }
  censored = false;
  for (std::uint64_t start = 0;; ++start) {
    if (typical()) return start + 1;
    if (start + m >= cap) {
      censored = true;
      return cap;
    }
    const auto incoming = static_cast<std::uint32_t>(letter.from_uniform(rng.uniform_at(start + m)));
    std::uint32_t& slot = ring[start % m];
    count[slot] -= 1.0;
    slot = incoming;
    count[incoming] += 1.0;
  }
}

}  // namespace detail

inline WaitingTimeResult waiting_time(const LetterLaw& nu, const std::vector<double>& psi,
                                      const WaitingTimeParams& params) {
  require(psi.size() == nu.alphabet().size(), "waiting_time: target must give one probability per letter");
  require_unit_mass(psi, "waiting_time target");
  require(!params.block_lengths.empty(), "waiting_time: empty block-length list");
  require(params.trials >= 2, "waiting_time: need at least two trials");
  const std::size_t k = nu.alphabet().size();
  const DiscreteSampler letter(nu.probs());

  WaitingTimeResult res;
  res.predicted = rel_entropy(psi, nu.probs()).nats.value();
  const CounterRng root(params.seed, 10);
  for (std::size_t m : params.block_lengths) {
    require(m >= 1, "waiting_time: block length must be >= 1");
    const auto win = detail::typical_windows(psi, m, params.tolerance);
    const CounterRng per_m = root.split(m);
    std::vector<double> logs(params.trials);
    std::vector<char> censored(params.trials, 0);
    parallel_for(params.trials, params.threads, [&](std::size_t t) {
      bool c = false;
      const auto sigma =
          detail::first_typical_block(per_m.split(t), letter, k, m, win, params.horizon_cap, c);
      logs[t] = std::log(static_cast<double>(sigma));
      censored[t] = c ? 1 : 0;
    });
    CompensatedSum s, s2;
    WaitingTimePoint pt;
    pt.block_length = m;
    for (std::size_t t = 0; t < params.trials; ++t) {
      s.add(logs[t]);
      pt.censored += static_cast<std::size_t>(censored[t]);
    }
    const auto n = static_cast<double>(params.trials);
    pt.mean_log_sigma = s.value() / n;
    for (double v : logs) s2.add((v - pt.mean_log_sigma) * (v - pt.mean_log_sigma));
    pt.std_error = std::sqrt(s2.value() / (n - 1.0) / n);
    res.points.push_back(pt);
  }

  if (res.points.size() >= 2) {
    CompensatedSum sx, sy;
    for (const auto& p : res.points) {
      sx.add(static_cast<double>(p.block_length));
      sy.add(p.mean_log_sigma);
    }
    const auto n = static_cast<double>(res.points.size());
    const double mx = sx.value() / n, my = sy.value() / n;
    CompensatedSum sxy, sxx;
    for (const auto& p : res.points) {
      const double dx = static_cast<double>(p.block_length) - mx;
      sxy.add(dx * (p.mean_log_sigma - my));
      sxx.add(dx * dx);
    }
    res.slope = sxy.value() / sxx.value();
    res.intercept = my - res.slope * mx;
  } else {
    res.slope = res.points[0].mean_log_sigma / static_cast<double>(res.points[0].block_length);
  }
  return res;
}

}  // namespace quenchlab
