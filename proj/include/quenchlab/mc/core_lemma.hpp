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

// The marked-site sum
//   S_N(omega) = sum_{0 < j_1 < ... < j_N <= T, omega_{j_i} = 1} prod (j_i - j_{i-1})^{-alpha},
// with j_0 = 0, and the bounds on its almost-sure decay rate phi(alpha, p).
//
// S_N is evaluated by the layer recursion
//   f_1(j) = j^{-alpha} omega_j,
//   f_i(j) = omega_j sum_{j' < j} f_{i-1}(j') (j - j')^{-alpha},
// either directly over the marked sites or, for dense marks, as a linear
// convolution through FFTW. Every layer is rescaled by its maximum.

#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "quenchlab/common.hpp"
#include "quenchlab/rng.hpp"

namespace quenchlab {

/// 1-based positions of the marked sites in [1, T], strictly increasing.
struct Marks {
  std::size_t horizon = 0;
  std::vector<std::uint32_t> sites;
};

/// Marks from a '0'/'1' string: character i - 1 is omega_i.
inline Marks marks_from_bits(std::string_view bits) {
  Marks m;
  m.horizon = bits.size();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    require(bits[i] == '0' || bits[i] == '1', "marks_from_bits: omega must be a string of '0' and '1'");
    if (bits[i] == '1') m.sites.push_back(static_cast<std::uint32_t>(i + 1));
  }
  return m;
}

/// i.i.d. Bernoulli(p) marks on [1, T], drawn through geometric gaps.
inline Marks bernoulli_marks(double p, std::size_t horizon, const CounterRng& rng) {
  require(p > 0.0 && p <= 1.0, "bernoulli_marks: p must lie in (0, 1]");
  require(horizon < (std::size_t{1} << 32), "bernoulli_marks: horizon too large");
  Marks m;
  m.horizon = horizon;
  if (p == 1.0) {
    m.sites.resize(horizon);
    for (std::size_t i = 0; i < horizon; ++i) m.sites[i] = static_cast<std::uint32_t>(i + 1);
    return m;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t pos = 0;
  for (std::uint64_t c = 0;; ++c) {
    const double u = 1.0 - rng.uniform_at(c);  // in (0, 1]
    const double gap = 1.0 + std::floor(std::log(u) / log_q);
    if (gap > static_cast<double>(horizon - pos)) break;
    pos += static_cast<std::uint64_t>(gap);
    m.sites.push_back(static_cast<std::uint32_t>(pos));
  }
  return m;
}

enum class SnMethod { Auto, Direct, Fft };

namespace detail {

inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

inline std::size_t fft_size(std::size_t horizon) {
  std::size_t n = 1;
  while (n < 2 * horizon + 1) n <<= 1;
  return n;
}

}  // namespace detail

/// Kernel d^{-alpha}, d = 1..T, with its spectrum for the FFT path.
/// Plans are built with FFTW_ESTIMATE under a global lock and executed on
/// per-call buffers, so a kernel can be shared across threads.
class SnKernel {
 public:
  SnKernel(double alpha, std::size_t horizon) : alpha_(alpha), horizon_(horizon), table_(horizon + 1, 0.0) {
    require(alpha > 0.0 && std::isfinite(alpha), "S_N kernel: alpha must be positive and finite");
    require(horizon >= 1, "S_N kernel: horizon must be >= 1");
    for (std::size_t d = 1; d <= horizon; ++d) table_[d] = std::pow(static_cast<double>(d), -alpha);
  }
  SnKernel(const SnKernel&) = delete;
  SnKernel& operator=(const SnKernel&) = delete;
  ~SnKernel() {
    if (forward_ != nullptr) {
      std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
      fftw_destroy_plan(forward_);
      fftw_destroy_plan(backward_);
    }
  }

  double alpha() const { return alpha_; }
  std::size_t horizon() const { return horizon_; }
  double operator[](std::size_t d) const { return table_[d]; }
  const std::vector<double>& table() const { return table_; }

  /// Prepares the spectrum; idempotent and thread-safe.
  void prepare_fft() const {
    std::call_once(fft_once_, [this] {
      n_ = detail::fft_size(horizon_);
      spectrum_ = detail::fftw_buffer<fftw_complex>(n_ / 2 + 1);
      auto real = detail::fftw_buffer<double>(n_);
      std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
      forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real.get(), spectrum_.get(), FFTW_ESTIMATE);
      backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spectrum_.get(), real.get(), FFTW_ESTIMATE);
      std::fill(real.get(), real.get() + n_, 0.0);
      std::copy(table_.begin(), table_.end(), real.get());
      fftw_execute_dft_r2c(forward_, real.get(), spectrum_.get());
    });
  }
  std::size_t fft_length() const { return n_; }

  /// out[j] = sum_{j' < j} in[j'] k(j - j') for j = 0..T; in has size T + 1.
  void convolve(std::span<const double> in, std::span<double> out) const {
    prepare_fft();
    auto real = detail::fftw_buffer<double>(n_);
    auto freq = detail::fftw_buffer<fftw_complex>(n_ / 2 + 1);
    std::fill(real.get(), real.get() + n_, 0.0);
    std::copy(in.begin(), in.end(), real.get());
    fftw_execute_dft_r2c(forward_, real.get(), freq.get());
    for (std::size_t i = 0; i <= n_ / 2; ++i) {
      const double a = freq[i][0], b = freq[i][1];
      const double c = spectrum_[i][0], d = spectrum_[i][1];
      freq[i][0] = a * c - b * d;
      freq[i][1] = a * d + b * c;
    }
    fftw_execute_dft_c2r(backward_, freq.get(), real.get());
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = real[j] * inv;
  }

 private:
  double alpha_;
  std::size_t horizon_;
  std::vector<double> table_;
  mutable std::once_flag fft_once_;
  mutable std::size_t n_ = 0;
  mutable detail::FftwBuffer<fftw_complex> spectrum_;
  mutable fftw_plan forward_ = nullptr;
  mutable fftw_plan backward_ = nullptr;
};

/// log S_i for i = 1..N; -inf when fewer than i marks lie in the horizon.
struct SnProfile {
  std::vector<double> log_s;
  std::size_t marks = 0;
  SnMethod method = SnMethod::Direct;
};

namespace detail {

inline SnMethod resolve_method(SnMethod m, std::size_t marks, std::size_t horizon) {
  if (m != SnMethod::Auto) return m;
  const double direct = 0.5 * static_cast<double>(marks) * static_cast<double>(marks);
  const auto n = static_cast<double>(fft_size(horizon));
  return direct > 4.0 * n * std::log2(n) ? SnMethod::Fft : SnMethod::Direct;
}

inline double log_total(std::span<const double> f, double log_scale) {
  CompensatedSum s;
  for (double v : f) s.add(v);
  return s.value() > 0.0 ? log_scale + std::log(s.value()) : -std::numeric_limits<double>::infinity();
}

inline double rescale(std::span<double> f) {
  double mx = 0.0;
  for (double v : f) mx = std::max(mx, v);
  if (mx <= 0.0) return 0.0;
  for (double& v : f) v /= mx;
  return std::log(mx);
}

inline double dot4(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

inline void sn_direct(const Marks& m, const SnKernel& k, std::size_t n, SnProfile& out) {
  const std::size_t cnt = m.sites.size();
  std::vector<double> prev(cnt), cur(cnt), kbuf(cnt);
  for (std::size_t a = 0; a < cnt; ++a) prev[a] = k[m.sites[a]];
  double log_scale = rescale(prev);
  out.log_s[0] = log_total(prev, log_scale);
  for (std::size_t i = 2; i <= n && i <= cnt; ++i) {
    std::fill(cur.begin(), cur.end(), 0.0);
    for (std::size_t a = i - 1; a < cnt; ++a) {
      const std::uint32_t ja = m.sites[a];
      const std::size_t b0 = i - 2;
      for (std::size_t b = b0; b < a; ++b) kbuf[b] = k[ja - m.sites[b]];
      cur[a] = dot4(prev.data() + b0, kbuf.data() + b0, a - b0);
    }
    log_scale += rescale(cur);
    out.log_s[i - 1] = log_total(cur, log_scale);
    prev.swap(cur);
  }
}

/// All layers in one pass over the marks, without rescaling; the caller
/// guarantees that no intermediate value underflows.
inline void sn_direct_fused(const Marks& m, const SnKernel& k, std::size_t n, SnProfile& out) {
  const std::size_t cnt = m.sites.size();
  std::vector<std::vector<double>> f(n, std::vector<double>(cnt, 0.0));
  std::vector<double> kbuf(cnt);
  for (std::size_t a = 0; a < cnt; ++a) {
    const std::uint32_t ja = m.sites[a];
    for (std::size_t b = 0; b < a; ++b) kbuf[b] = k[ja - m.sites[b]];
    f[0][a] = k[ja];
    for (std::size_t i = 1; i < n && i <= a; ++i) f[i][a] = dot4(f[i - 1].data(), kbuf.data(), a);
  }
  for (std::size_t i = 0; i < n && i < cnt; ++i) {
    CompensatedSum s;
    for (double v : f[i]) s.add(v);
    out.log_s[i] = s.value() > 0.0 ? std::log(s.value()) : -std::numeric_limits<double>::infinity();
  }
}

inline void sn_fft(const Marks& m, const SnKernel& k, std::size_t n, SnProfile& out) {
  const std::size_t t = m.horizon;
  std::vector<double> dense(t + 1, 0.0), conv(t + 1);
  for (std::uint32_t j : m.sites) dense[j] = k[j];
  double log_scale = rescale(dense);
  out.log_s[0] = log_total(dense, log_scale);
  std::vector<char> marked(t + 1, 0);
  for (std::uint32_t j : m.sites) marked[j] = 1;
  for (std::size_t i = 2; i <= n && i <= m.sites.size(); ++i) {
    k.convolve(dense, conv);
    for (std::size_t j = 0; j <= t; ++j) {
      // Sites before the (i-1)-th mark cannot end an i-chain; round-off there is dropped.
      dense[j] = (marked[j] && j >= m.sites[i - 1]) ? std::max(conv[j], 0.0) : 0.0;
    }
    log_scale += rescale(dense);
    out.log_s[i - 1] = log_total(dense, log_scale);
  }
}

}  // namespace detail

inline SnProfile s_n_profile(const Marks& marks, const SnKernel& kernel, std::size_t n_max,
                             SnMethod method = SnMethod::Auto) {
  require(n_max >= 1, "s_n_eval: N must be >= 1");
  require(marks.horizon >= n_max, "s_n_eval: horizon T must be >= N");
  require(kernel.horizon() >= marks.horizon, "s_n_eval: kernel horizon shorter than T");
  SnProfile out;
  out.log_s.assign(n_max, -std::numeric_limits<double>::infinity());
  out.marks = marks.sites.size();
  out.method = detail::resolve_method(method, out.marks, marks.horizon);
  if (out.marks == 0) return out;
  if (out.method == SnMethod::Fft) {
    detail::sn_fft(marks, kernel, n_max, out);
  } else {
    detail::sn_direct(marks, kernel, n_max, out);
  }
  return out;
}

inline SnProfile s_n_profile(const Marks& marks, double alpha, std::size_t n_max, SnMethod method = SnMethod::Auto) {
  const SnKernel kernel(alpha, std::max<std::size_t>(marks.horizon, 1));
  return s_n_profile(marks, kernel, n_max, method);
}

/// log S_N; -inf when fewer than N marks lie in the horizon.
inline double s_n_eval(const Marks& marks, double alpha, std::size_t n, SnMethod method = SnMethod::Auto) {
  return s_n_profile(marks, alpha, n, method).log_s.back();
}

/// zeta_T(alpha) = sum_{n <= T} n^{-alpha}, summed from the small end last.
inline double partial_zeta(double alpha, std::size_t horizon) {
  CompensatedSum s;
  for (std::size_t n = horizon; n >= 1; --n) s.add(std::pow(static_cast<double>(n), -alpha));
  return s.value();
}

struct PhiBounds {
  double lower = 0.0;
  double upper = 0.0;
  double beta_star = 1.0;
};

/// -(1/beta)(log p + log zeta(alpha beta)).
inline double phi_lower_objective(double alpha, double p, double beta) {
  return -(std::log(p) + std::log(boost::math::zeta(alpha * beta))) / beta;
}

inline PhiBounds phi_bounds(double alpha, double p) {
  require(alpha > 1.0 && std::isfinite(alpha), "phi_bounds: alpha must lie in (1, inf)");
  require(p > 0.0 && p < 1.0, "phi_bounds: p must lie in (0, 1)");
  PhiBounds b;
  b.upper = alpha * std::log(1.0 / p);
  auto g = [&](double beta) { return phi_lower_objective(alpha, p, beta); };
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 1.0 / alpha, hi = 1.0;
  lo += 1e-12 * (hi - lo);
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + invphi * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - invphi * (hi - lo);
      g1 = g(x1);
    }
  }
  b.beta_star = 0.5 * (lo + hi);
  b.lower = g(b.beta_star);
  if (g(1.0) > b.lower) {
    b.beta_star = 1.0;
    b.lower = g(1.0);
  }
  return b;
}

struct SnMeanRow {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  /// 95% normal half-width, 1.96 standard errors.
  double ci_half_width = 0.0;
  /// (p zeta_T(alpha))^N.
  double target = 0.0;
  /// p^N S_N(all ones): the exact expectation with j_N <= T.
  double finite_horizon = 0.0;
  bool within_3ci = false;
};

struct SnMeanCheck {
  double alpha = 0.0;
  double p = 0.0;
  std::size_t horizon = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<SnMeanRow> rows;
};

/// Marks for trial t come from CounterRng(seed, 20).split(t).
inline SnMeanCheck s_n_mean_check(double alpha, double p, std::size_t n_max, std::size_t horizon,
                                  std::size_t trials, std::uint64_t seed, unsigned threads = 1) {
  require(trials >= 2, "s_n_mean_check: need at least two trials");
  require(horizon >= n_max && n_max >= 1, "s_n_mean_check: need T >= N >= 1");
  const SnKernel kernel(alpha, horizon);
  const CounterRng root(seed, 20);
  // The fused pass multiplies at most N kernel values, each >= T^{-alpha}.
  const bool fused = alpha * static_cast<double>(n_max) * std::log(static_cast<double>(horizon) + 1.0) < 600.0;
  std::vector<double> values(trials * n_max);
  parallel_for(trials, threads, [&](std::size_t t) {
    const Marks m = bernoulli_marks(p, horizon, root.split(t));
    SnProfile prof;
    prof.log_s.assign(n_max, -std::numeric_limits<double>::infinity());
    if (!m.sites.empty()) {
      if (fused && detail::resolve_method(SnMethod::Auto, m.sites.size(), horizon) == SnMethod::Direct) {
        detail::sn_direct_fused(m, kernel, n_max, prof);
      } else {
        prof = s_n_profile(m, kernel, n_max);
      }
    }
    for (std::size_t i = 0; i < n_max; ++i) values[t * n_max + i] = std::exp(prof.log_s[i]);
  });

  SnMeanCheck res{alpha, p, horizon, trials, seed, {}};
  const double zt = partial_zeta(alpha, horizon);
  Marks ones;
  ones.horizon = horizon;
  for (std::size_t j = 1; j <= horizon; ++j) ones.sites.push_back(static_cast<std::uint32_t>(j));
  const auto full = s_n_profile(ones, kernel, n_max);
  const auto nt = static_cast<double>(trials);
  for (std::size_t i = 0; i < n_max; ++i) {
    SnMeanRow row;
    row.n = i + 1;
    CompensatedSum s;
    for (std::size_t t = 0; t < trials; ++t) s.add(values[t * n_max + i]);
    row.mean = s.value() / nt;
    CompensatedSum s2;
    for (std::size_t t = 0; t < trials; ++t) {
      const double d = values[t * n_max + i] - row.mean;
      s2.add(d * d);
    }
    row.std_error = std::sqrt(s2.value() / (nt - 1.0) / nt);
    row.ci_half_width = 1.96 * row.std_error;
    const auto ni = static_cast<double>(row.n);
    row.target = std::pow(p * zt, ni);
    row.finite_horizon = std::exp(ni * std::log(p) + full.log_s[i]);
    row.within_3ci = std::abs(row.mean - row.target) <= 3.0 * row.ci_half_width;
    res.rows.push_back(row);
  }
  return res;
}

}  // namespace quenchlab
