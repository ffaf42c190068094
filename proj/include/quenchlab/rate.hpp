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

// Annealed and quenched rate functions of the word empirical process.
//
// The quenched rate of a finite-mean law is
//   H(Q | q^{(x)N}) + (alpha - 1) m_Q H(Psi_Q | nu^{(x)N}),
// which is evaluated as an interval because the second term is only known
// through a bracket. All coefficients are non-negative, so intervals
// propagate by endpoint arithmetic.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "quenchlab/common.hpp"
#include "quenchlab/entropy.hpp"
#include "quenchlab/laws.hpp"
#include "quenchlab/psi.hpp"
#include "quenchlab/words.hpp"

namespace quenchlab {

/// Closed frequency window for one word pattern of length 1 or 2.
struct PatternConstraint {
  Sentence pattern;
  double lower = 0.0;
  double upper = 1.0;
};

/// Set of laws whose pattern frequencies lie in the given windows.
struct Neighbourhood {
  std::vector<PatternConstraint> constraints;

  void validate() const {
    for (const auto& c : constraints) {
      require(c.pattern.size() == 1 || c.pattern.size() == 2,
              "Neighbourhood: pattern length must be 1 or 2, got " + std::to_string(c.pattern.size()));
      require(c.lower >= 0.0 && c.upper <= 1.0 && c.lower < c.upper,
              "Neighbourhood: window for \"" + pattern_key(c.pattern) + "\" must satisfy 0 <= a < b <= 1");
    }
  }
  std::size_t max_pattern_length() const {
    std::size_t m = 0;
    for (const auto& c : constraints) m = std::max(m, c.pattern.size());
    return m;
  }
};

struct WordDistribution {
  std::vector<Word> words;
  std::vector<double> probs;
};

/// Positive-mass atoms of the reference word law.
inline WordDistribution reference_marginal(const ReferenceLaw& ref) {
  WordDistribution d;
  for (auto& [w, p] : ref.enumerate()) {
    d.words.push_back(w);
    d.probs.push_back(p);
  }
  return d;
}

/// Annealed rate: the specific relative entropy.
inline Extended<double> ann_rate(const WordProcessLaw& q, const ReferenceLaw& ref) {
  return spec_rel_entropy(q, ref);
}

struct RateComponents {
  Extended<double> h_rel = 0.0;
  double m_q = 0.0;
  EntropyBracket psi_bracket;
};

inline RateComponents rate_components(const WordProcessLaw& q, const ReferenceLaw& ref, std::size_t depth) {
  return {spec_rel_entropy(q, ref), mean_length(q), psi_rel_entropy_bracket(q, ref.nu(), depth)};
}

inline Extended<Interval> combine_fin_rate(const RateComponents& c, double alpha) {
  return c.h_rel.map([&](double h) {
    return Interval::point(h) + ((alpha - 1.0) * c.m_q) * c.psi_bracket.interval();
  });
}

/// Quenched rate of a finite-mean law at tail exponent alpha in (1, inf).
inline Extended<Interval> fin_rate(const WordProcessLaw& q, const ReferenceLaw& ref, double alpha,
                                   std::size_t depth) {
  require(alpha > 1.0 && std::isfinite(alpha), "fin_rate: alpha must lie in (1, inf)");
  return combine_fin_rate(rate_components(q, ref, depth), alpha);
}

struct LadderEntry {
  std::size_t tr = 0;
  std::size_t depth = 0;
  Extended<Interval> rate = Interval{};
};

/// fin_rate of the truncated laws [Q]_tr for each tr in the list.
inline std::vector<LadderEntry> que_rate_ladder(const WordProcessLaw& q, const ReferenceLaw& ref, double alpha,
                                                const std::vector<std::size_t>& tr_list, std::size_t depth) {
  require(!tr_list.empty(), "que_rate_ladder: empty truncation list");
  for (std::size_t i = 1; i < tr_list.size(); ++i) {
    require(tr_list[i] > tr_list[i - 1], "que_rate_ladder: truncation levels must be increasing");
  }
  std::vector<LadderEntry> out;
  for (std::size_t tr : tr_list) {
    out.push_back({tr, depth, fin_rate(truncate_process(q, tr), ref, alpha, depth)});
  }
  return out;
}

enum class BoundaryMode { AlphaOne, AlphaInfinity };

/// Quenched rate in the two boundary regimes: equal to the annealed rate at
/// alpha = 1; at alpha = inf, the annealed rate on concatenation-typical laws
/// and +inf elsewhere.
inline Extended<Interval> boundary_rate(const WordProcessLaw& q, const ReferenceLaw& ref, BoundaryMode mode,
                                        std::size_t depth, double tol = kRNuDefaultTolerance) {
  const auto ann = ann_rate(q, ref);
  if (mode == BoundaryMode::AlphaInfinity && !r_nu_test(q, ref.nu(), depth, tol).in_r_nu) {
    return Extended<Interval>::infinity();
  }
  return ann.map([](double v) { return Interval::point(v); });
}

struct IProjection {
  WordDistribution minimizer;
  double value = 0.0;
};

/// Minimizes h(q | ref) subject to q(w_u) in [a_u, b_u] for one-word
/// patterns. The KKT conditions give q_i = clip(c ref_i, a_i, b_i) with a
/// single scale c, found by bisection on the monotone total mass.
inline IProjection i_projection(const WordDistribution& ref, const Neighbourhood& nbhd) {
  nbhd.validate();
  require(ref.words.size() == ref.probs.size(), "i_projection: one probability per word required");
  require_unit_mass(ref.probs, "i_projection reference");
  std::map<Word, std::size_t> index;
  for (std::size_t i = 0; i < ref.words.size(); ++i) index.emplace(ref.words[i], i);

  const std::size_t n = ref.words.size();
  std::vector<double> lo(n, 0.0), hi(n, 1.0);
  std::vector<char> constrained(n, 0);
  for (const auto& c : nbhd.constraints) {
    require(c.pattern.size() == 1, "i_projection: only single-word constraints are supported");
    auto it = index.find(c.pattern[0]);
    if (it == index.end()) {
      require(c.lower <= 0.0, "i_projection: infeasible, word \"" + c.pattern[0].str() +
                                  "\" has zero reference mass but lower bound " + std::to_string(c.lower));
      continue;
    }
    const std::size_t i = it->second;
    lo[i] = std::max(lo[i], c.lower);
    hi[i] = std::min(hi[i], c.upper);
    constrained[i] = 1;
    require(lo[i] <= hi[i], "i_projection: infeasible, empty window for \"" + c.pattern[0].str() + "\"");
  }

  double min_mass = 0.0, max_mass = 0.0;
  bool unbounded = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (ref.probs[i] <= 0.0) {
      require(lo[i] <= 0.0, "i_projection: infeasible, word \"" + ref.words[i].str() +
                                "\" has zero reference mass but a positive lower bound");
      continue;
    }
    min_mass += lo[i];
    if (constrained[i]) {
      max_mass += hi[i];
    } else {
      unbounded = true;
    }
  }
  require(min_mass <= 1.0 + 1e-12, "i_projection: infeasible, lower bounds sum to " + std::to_string(min_mass));
  require(unbounded || max_mass >= 1.0 - 1e-12,
          "i_projection: infeasible, upper bounds sum to " + std::to_string(max_mass));

  auto mass_at = [&](double c, std::vector<double>* out) {
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      if (ref.probs[i] > 0.0) v = constrained[i] ? std::clamp(c * ref.probs[i], lo[i], hi[i]) : c * ref.probs[i];
      if (out) (*out)[i] = v;
      s.add(v);
    }
    return s.value();
  };

  // log-scale bisection on c; mass(c) is continuous and non-decreasing.
  double a = -700.0, b = 700.0;
  for (int it = 0; it < 300; ++it) {
    const double m = 0.5 * (a + b);
    if (mass_at(std::exp(m), nullptr) < 1.0) {
      a = m;
    } else {
      b = m;
    }
  }
  IProjection res;
  res.minimizer.words = ref.words;
  res.minimizer.probs.assign(n, 0.0);
  const double c = std::exp(0.5 * (a + b));
  mass_at(c, &res.minimizer.probs);

  // Close the residual mass on atoms strictly inside their windows.
  CompensatedSum fixed, free;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = res.minimizer.probs[i];
    const bool at_bound = constrained[i] && (v <= lo[i] || v >= hi[i]);
    (at_bound ? fixed : free).add(v);
  }
  if (free.value() > 0.0) {
    const double scale = (1.0 - fixed.value()) / free.value();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = res.minimizer.probs[i];
      const bool at_bound = constrained[i] && (v <= lo[i] || v >= hi[i]);
      if (!at_bound) res.minimizer.probs[i] = v * scale;
    }
  }
  res.value = rel_entropy(res.minimizer.probs, ref.probs).nats.value();
  return res;
}

struct ContractionBound {
  /// I^fin(q^{(x)N}), an upper bound on the contracted first-word rate.
  Extended<Interval> bound = Interval{};
  /// True when q^{(x)N} is concatenation-typical; then the rate is h(q | ref).
  bool exact = false;
  Extended<double> exact_value = 0.0;
};

inline ContractionBound contraction_upper(const WordProcessLaw& q, const ReferenceLaw& ref, double alpha,
                                          std::size_t depth, double tol = kRNuDefaultTolerance) {
  require(q.is_iid(), "contraction_upper: expects an i.i.d. law built from a first-word marginal");
  ContractionBound res;
  res.bound = fin_rate(q, ref, alpha, depth);
  res.exact = r_nu_test(q, ref.nu(), depth, tol).in_r_nu;
  if (res.exact) res.exact_value = ann_rate(q, ref);
  return res;
}

}  // namespace quenchlab
