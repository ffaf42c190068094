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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <span>
#include <thread>
#include <vector>

#include "quenchlab/common.hpp"

namespace quenchlab {

/// Seed used whenever a run does not name one.
inline constexpr std::uint64_t kDefaultSeed = 20260101;

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the i-th output is a pure function of
/// (key, i), so any draw can be reproduced without replaying the stream and
/// work can be split across threads by index.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(mix64(seed + kGoldenGamma) ^ (stream * 0xD1B54A32D192ED03ULL + 1))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type at(std::uint64_t counter) const {
    return mix64(mix64(key_ + kGoldenGamma * counter) ^ key_);
  }
  result_type operator()() { return at(counter_++); }

  /// Child stream, independent of the parent's current position.
  CounterRng split(std::uint64_t child) const {
    CounterRng r(0, 0);
    r.key_ = mix64(key_ ^ mix64(child * kGoldenGamma + 0x632BE59BD9B4E019ULL));
    return r;
  }

  void seek(std::uint64_t counter) { counter_ = counter; }
  std::uint64_t position() const { return counter_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }
  /// Uniform on (0, 1).
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Inverse-CDF sampler over indices 0..n-1.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> probs) {
    require(!probs.empty(), "DiscreteSampler: empty distribution");
    cdf_.reserve(probs.size());
    CompensatedSum s;
    for (double p : probs) {
      require(p >= 0.0, "DiscreteSampler: negative mass");
      s.add(p);
      cdf_.push_back(s.value());
    }
    require(cdf_.back() > 0.0, "DiscreteSampler: zero total mass");
    for (double& c : cdf_) c /= cdf_.back();
    cdf_.back() = 1.0;
  }

  std::size_t operator()(CounterRng& rng) const { return from_uniform(rng.uniform()); }

  std::size_t from_uniform(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    auto idx = static_cast<std::size_t>(it - cdf_.begin());
    return std::min(idx, cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

/// Runs f(i) for i in [0, n) on `threads` workers with a static block
/// partition. Callers write results into slot i, so outputs do not depend on
/// the worker count. The lowest-index exception is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace quenchlab
