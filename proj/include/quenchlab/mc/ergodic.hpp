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

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "quenchlab/laws.hpp"
#include "quenchlab/words.hpp"

namespace quenchlab {

struct ErgodicGap {
  std::size_t n_words = 0;
  std::size_t k = 0;
  double gap = 0.0;
  std::string worst_pattern;
  /// max over reference patterns of sqrt(q(pattern) / N).
  double clt_scale = 0.0;
};

/// Sup distance between the k-word marginal of the empirical process of N
/// sampled words and the reference product law.
inline ErgodicGap ergodic_gap(const LetterLaw& nu, const RenewalLaw& rho, std::size_t n_words, std::size_t k,
                              std::uint64_t seed) {
  require(k == 1 || k == 2, "ergodic_gap: k must be 1 or 2");
  const ReferenceLaw ref(rho, nu);
  const auto atoms = ref.enumerate();
  const auto path = sample_path(nu, rho, 0, n_words, seed);
  const auto emp = empirical_patterns(path.sentence, k);

  ErgodicGap res;
  res.n_words = n_words;
  res.k = k;
  const auto n = static_cast<double>(n_words);
  auto consider = [&](const std::string& key, double expected) {
    const double d = std::abs(emp.at(key) - expected);
    if (d > res.gap) {
      res.gap = d;
      res.worst_pattern = key;
    }
    res.clt_scale = std::max(res.clt_scale, std::sqrt(expected / n));
  };
  if (k == 1) {
    for (const auto& [w, p] : atoms) consider(w.str(), p);
  } else {
    for (const auto& [w1, p1] : atoms) {
      for (const auto& [w2, p2] : atoms) consider(w1.str() + "," + w2.str(), p1 * p2);
    }
  }
  return res;
}

}  // namespace quenchlab
