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

// Exact check of the convolution tail bound
//   rho^{*m}(n) <= (C v 1) m^{alpha + 1} n^{-alpha}
// for a renewal law with rho(n) <= C n^{-alpha}.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "quenchlab/common.hpp"
#include "quenchlab/laws.hpp"

namespace quenchlab {

inline constexpr double kConvTailTolerance = 1e-12;

struct ConvTailRow {
  std::size_t m = 0;
  double worst_ratio = 0.0;
  std::size_t worst_n = 0;
};

struct ConvTailResult {
  double alpha = 0.0;
  double c_rho = 0.0;
  std::size_t n_max = 0;
  std::vector<ConvTailRow> rows;
  double worst_ratio = 0.0;
  std::size_t worst_m = 0;
  std::size_t worst_n = 0;
  bool passed = false;
};

/// rho^{*m}(n) for n <= n_max, index 0 unused.
inline std::vector<std::vector<double>> convolution_powers(const RenewalLaw& rho, std::size_t m_max,
                                                           std::size_t n_max) {
  std::vector<double> base(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) base[n] = rho.prob(n);
  std::vector<std::vector<double>> out{base};
  for (std::size_t m = 2; m <= m_max; ++m) {
    const auto& prev = out.back();
    std::vector<double> cur(n_max + 1, 0.0);
    for (std::size_t n = m; n <= n_max; ++n) {
      CompensatedSum s;
      for (std::size_t k = m - 1; k < n; ++k) {
        if (prev[k] > 0.0 && base[n - k] > 0.0) s.add(prev[k] * base[n - k]);
      }
      cur[n] = s.value();
    }
    out.push_back(std::move(cur));
  }
  return out;
}

inline ConvTailResult conv_tail_check(const RenewalLaw& rho, double alpha, double c_rho, std::size_t m_max,
                                      std::size_t n_max) {
  require(alpha > 0.0 && std::isfinite(alpha), "conv_tail_check: alpha must be positive and finite");
  require(c_rho > 0.0, "conv_tail_check: C_rho must be positive");
  require(m_max >= 1 && n_max >= 1, "conv_tail_check: m_max and n_max must be >= 1");
  for (const auto& [n, p] : rho.atoms()) {
    const double bound = c_rho * std::pow(static_cast<double>(n), -alpha);
    if (p > bound * (1.0 + kConvTailTolerance)) {
      throw InputError("conv_tail_check: premise rho(n) <= C n^-alpha fails at atom n = " + std::to_string(n) +
                       " (rho = " + std::to_string(p) + ", bound = " + std::to_string(bound) + ")");
    }
  }
  ConvTailResult res;
  res.alpha = alpha;
  res.c_rho = c_rho;
  res.n_max = n_max;
  const double c = std::max(c_rho, 1.0);
  const auto powers = convolution_powers(rho, m_max, n_max);
  for (std::size_t m = 1; m <= m_max; ++m) {
    ConvTailRow row;
    row.m = m;
    const double denom = c * std::pow(static_cast<double>(m), alpha + 1.0);
    for (std::size_t n = 1; n <= n_max; ++n) {
      const double v = powers[m - 1][n];
      if (v <= 0.0) continue;
      const double ratio = v * std::pow(static_cast<double>(n), alpha) / denom;
      if (ratio > row.worst_ratio) {
        row.worst_ratio = ratio;
        row.worst_n = n;
      }
    }
    if (row.worst_ratio > res.worst_ratio) {
      res.worst_ratio = row.worst_ratio;
      res.worst_m = m;
      res.worst_n = row.worst_n;
    }
    res.rows.push_back(row);
  }
  res.passed = res.worst_ratio <= 1.0 + kConvTailTolerance;
  return res;
}

}  // namespace quenchlab
