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
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace quenchlab {

/// Invalid argument, malformed law, or violated precondition.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation would exceed its declared state or table budget.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

/// A value in [0, +inf]. The infinite case carries no payload, so arithmetic
/// on it is impossible without checking first.
template <class T>
class Extended {
 public:
  Extended(T v) : value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  static Extended infinity() { return Extended(); }

  bool is_infinite() const { return !value_.has_value(); }
  bool is_finite() const { return value_.has_value(); }

  const T& value() const {
    if (!value_) throw std::logic_error("value() on an infinite Extended");
    return *value_;
  }

  template <class F>
  auto map(F&& f) const -> Extended<decltype(f(std::declval<const T&>()))> {
    using U = decltype(f(std::declval<const T&>()));
    if (!value_) return Extended<U>::infinity();
    return Extended<U>(f(*value_));
  }

 private:
  Extended() = default;
  std::optional<T> value_;
};

/// Closed real interval with endpoint arithmetic.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  static Interval point(double x) { return {x, x}; }

  double width() const { return upper - lower; }
  double mid() const { return 0.5 * (lower + upper); }
  bool contains(double x, double tol = 0.0) const {
    return x >= lower - tol && x <= upper + tol;
  }

  friend Interval operator+(Interval a, Interval b) {
    return {a.lower + b.lower, a.upper + b.upper};
  }
  friend Interval operator+(Interval a, double c) { return {a.lower + c, a.upper + c}; }
  friend Interval operator-(Interval a, double c) { return {a.lower - c, a.upper - c}; }
  // Non-negative scalars only.
  friend Interval operator*(double c, Interval a) { return {c * a.lower, c * a.upper}; }
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// x log x with 0 log 0 = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Shannon entropy in nats of a (not necessarily normalized) mass vector.
inline double shannon_entropy(std::span<const double> p) {
  CompensatedSum s;
  for (double x : p) s.add(-xlogx(x));
  return s.value();
}

/// log(sum exp(x_i)) with max shift; -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  CompensatedSum s;
  for (double x : xs) s.add(std::exp(x - m));
  return m + std::log(s.value());
}

}  // namespace quenchlab
