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

// quenchlab command-line driver. One experiment per invocation.
//
// Parameters resolve as: built-in default, then the --config document, then
// explicit flags. The resolved parameters are embedded in every artifact.
// Exit codes: 0 success, 1 invalid input, 2 budget exceeded, 3 unknown
// command.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quenchlab/quenchlab.hpp"

namespace ql = quenchlab;
using ql::Json;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitSize = 2;
constexpr int kExitUnknownCommand = 3;

struct Param {
  std::string key;
  Json fallback;
  std::string help;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<Param> params;
  std::function<void(struct Context&)> run;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Json>> rows;

  void add(std::vector<Json> row) { rows.push_back(std::move(row)); }

  std::string csv() const {
    ql::CsvWriter w(header);
    for (const auto& r : rows) {
      for (const auto& c : r) {
        if (c.is_string()) {
          w.cell(c.get<std::string>());
        } else if (c.is_number_unsigned()) {
          w.cell(std::to_string(c.get<std::uint64_t>()));
        } else if (c.is_number_integer()) {
          w.cell(std::to_string(c.get<std::int64_t>()));
        } else if (c.is_number()) {
          w.cell(c.get<double>());
        } else if (c.is_boolean()) {
          w.cell(c.get<bool>() ? "true" : "false");
        } else {
          w.cell(c.dump());
        }
      }
      w.end_row();
    }
    return w.str();
  }

  Json json() const {
    Json out = Json::array();
    for (const auto& r : rows) {
      Json o = Json::object();
      for (std::size_t i = 0; i < header.size(); ++i) o[header[i]] = r[i];
      out.push_back(o);
    }
    return out;
  }
};

struct Context {
  std::string command;
  Json config;  // resolved parameters, threads excluded
  std::uint64_t seed = ql::kDefaultSeed;
  unsigned threads = 1;
  std::string out;
  std::string format = "csv";
  double unit = 1.0;  // nats -> display unit
  std::string unit_name = "nat";

  const Json& get(const std::string& key) const { return config.at(key); }
  double number(const std::string& key) const {
    const auto& v = get(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      try {
        std::size_t used = 0;
        const double d = std::stod(v.get<std::string>(), &used);
        if (used == v.get<std::string>().size()) return d;
      } catch (const std::exception&) {
      }
    }
    throw ql::InputError("parameter \"" + key + "\" must be a number");
  }
  std::size_t count(const std::string& key) const {
    const double d = number(key);
    if (!(d >= 0.0) || d != std::floor(d) || d > 9.0e18) {
      throw ql::InputError("parameter \"" + key + "\" must be a non-negative integer");
    }
    return static_cast<std::size_t>(d);
  }
  std::string text(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_string()) throw ql::InputError("parameter \"" + key + "\" must be a string");
    return v.get<std::string>();
  }
};

/// "a..b", "a,b,c", a JSON array, or a single integer.
std::vector<std::size_t> parse_list(const Json& v, const std::string& key) {
  std::vector<std::size_t> out;
  auto as_count = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const unsigned long long x = std::stoull(s, &used);
      if (used == s.size()) return static_cast<std::size_t>(x);
    } catch (const std::exception&) {
    }
    throw ql::InputError("parameter \"" + key + "\": \"" + s + "\" is not a non-negative integer");
  };
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.is_number() ? e.get<std::size_t>() : as_count(e.dump()));
  } else if (v.is_number()) {
    out.push_back(v.get<std::size_t>());
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
      const std::size_t a = as_count(s.substr(0, dots)), b = as_count(s.substr(dots + 2));
      if (a > b) throw ql::InputError("parameter \"" + key + "\": empty range \"" + s + "\"");
      for (std::size_t i = a; i <= b; ++i) out.push_back(i);
    } else if (!s.empty()) {
      std::size_t start = 0;
      for (;;) {
        const auto comma = s.find(',', start);
        out.push_back(as_count(s.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
  } else if (!v.is_null()) {
    throw ql::InputError("parameter \"" + key + "\" must be a list");
  }
  return out;
}

std::vector<double> parse_numbers(const Json& v, const std::string& key) {
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ql::InputError("parameter \"" + key + "\" must be a list of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  if (v.is_string()) {
    std::vector<double> out;
    const std::string s = v.get<std::string>();
    std::size_t start = 0;
    for (;;) {
      const auto comma = s.find(',', start);
      const std::string part = s.substr(start, comma - start);
      try {
        std::size_t used = 0;
        out.push_back(std::stod(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw ql::InputError("parameter \"" + key + "\": \"" + part + "\" is not a number");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }
  throw ql::InputError("parameter \"" + key + "\" must be a list of numbers");
}

/// A law parameter is either an inline document or a path to one. Paths are
/// replaced by the document so that artifacts carry the full law.
Json resolve_document(const Json& v) {
  if (!v.is_string()) return v;
  const auto& s = v.get<std::string>();
  if (!s.empty() && (s.front() == '{' || s.front() == '[')) {
    try {
      return Json::parse(s);
    } catch (const nlohmann::json::parse_error& e) {
      throw ql::InputError("inline document is not valid JSON: " + std::string(e.what()));
    }
  }
  return ql::load_json_file(s);
}

ql::LetterLaw letter_law(const Context& c, const std::string& key = "letter_law") {
  return ql::parse_letter_law(c.get(key), key);
}
ql::RenewalLaw renewal_law(const Context& c) { return ql::parse_renewal_law(c.get("renewal_law"), "renewal_law"); }
ql::WordProcessLaw word_law(const Context& c, const ql::Alphabet& fallback) {
  if (c.get("word_law").is_null()) throw ql::InputError("parameter \"word_law\" is required");
  return ql::parse_word_law(c.get("word_law"), fallback, "word_law");
}
ql::Neighbourhood neighbourhood(const Context& c) {
  return ql::parse_neighbourhood(c.get("neighbourhood"), "neighbourhood");
}

void emit(const Context& c, const Table& table, const Json& results, const std::string& summary) {
  Json meta = Json::object();
  meta["command"] = c.command;
  meta["version"] = ql::kVersion;
  meta["seed"] = c.seed;
  meta["log_base"] = c.unit_name;
  meta["config"] = c.config;
  if (!results.is_null()) meta["results"] = results;
  if (c.format == "json") {
    meta["rows"] = table.json();
    const std::string text = meta.dump(2) + "\n";
    if (c.out.empty()) {
      std::cout << text;
    } else {
      ql::write_text_file(c.out, text);
    }
  } else {
    const std::string text = table.csv();
    if (c.out.empty()) {
      std::cout << text;
    } else {
      ql::write_text_file(c.out, text);
      ql::write_text_file(c.out + ".json", meta.dump(2) + "\n");
    }
  }
  std::cerr << c.command << ": " << summary << "\n";
}

Json disp(const Context& c, double nats) { return ql::number_json(nats * c.unit); }
Json disp(const Context& c, const ql::Extended<double>& nats) {
  return nats.is_infinite() ? Json("inf") : disp(c, nats.value());
}
Json disp(const Context& c, const ql::Interval& i) {
  return Json{{"lower", disp(c, i.lower)}, {"upper", disp(c, i.upper)}};
}
Json disp(const Context& c, const ql::Extended<ql::Interval>& i) {
  return i.is_infinite() ? Json("inf") : disp(c, i.value());
}

// ---------------------------------------------------------------------------

void run_simulate(Context& c) {
  const auto nu = letter_law(c);
  const auto rho = renewal_law(c);
  const auto path = ql::sample_path(nu, rho, c.count("n_letters"), c.count("n_words"), c.seed);
  Table t{{"index", "start", "end", "word"}, {}};
  std::size_t prev = 0;
  for (std::size_t i = 0; i < path.sentence.size(); ++i) {
    t.add({i + 1, prev + 1, path.cuts[i], path.sentence[i].str()});
    prev = path.cuts[i];
  }
  emit(c, t, Json{{"letters", path.letters.size()}},
       std::to_string(path.sentence.size()) + " words over " + std::to_string(path.letters.size()) + " letters");
}

void run_ergodic(Context& c) {
  const auto nu = letter_law(c);
  const auto rho = renewal_law(c);
  const auto k = c.count("k");
  Table t{{"n_words", "k", "gap", "worst_pattern", "clt_scale", "bound"}, {}};
  double last = 0.0;
  for (std::size_t n : parse_list(c.get("n"), "n")) {
    const auto g = ql::ergodic_gap(nu, rho, n, k, c.seed);
    t.add({n, k, g.gap, g.worst_pattern, g.clt_scale, 5.0 * g.clt_scale});
    last = g.gap;
  }
  emit(c, t, Json(), "gap " + ql::format_number(last) + " at the largest N");
}

void run_psi(Context& c) {
  const auto nu = letter_law(c);
  const auto q = word_law(c, nu.alphabet());
  const auto m = ql::psi_marginal(q, c.count("depth"));
  Table t{{"pattern", "probability"}, {}};
  for (std::size_t i = 0; i < m.size(); ++i) t.add({m.pattern(i), m.probs()[i]});
  emit(c, t, Json(), std::to_string(m.size()) + " letter patterns at depth " + std::to_string(m.depth()));
}

void run_entropy(Context& c) {
  const auto nu = letter_law(c);
  const auto q = word_law(c, nu.alphabet());
  const ql::ReferenceLaw ref(renewal_law(c), nu);
  const auto depth = c.count("depth");
  const auto r = ql::entropy_report(q, ref, depth);
  const auto resid = ql::identity_residual(q, ref, depth);
  Json res{{"depth", depth},
           {"h_q", disp(c, r.h_q)},
           {"h_rel", disp(c, r.h_rel)},
           {"m_q", r.m_q},
           {"psi_rel_entropy", disp(c, r.psi_bracket.interval())},
           {"psi_entropy", disp(c, r.psi_entropy)},
           {"h_tau_given_k", disp(c, r.h_tau_given_k)},
           {"e_log_rho", r.e_log_rho.is_infinite() ? Json("-inf") : disp(c, r.e_log_rho)},
           {"e_log_nu", disp(c, r.e_log_nu)},
           {"identity_residual", disp(c, resid)}};
  Table t{{"quantity", "lower", "upper"}, {}};
  auto row = [&](const char* name, const Json& v) {
    if (v.is_object()) {
      t.add({name, v["lower"], v["upper"]});
    } else {
      t.add({name, v, v});
    }
  };
  for (const char* k : {"h_q", "h_rel", "m_q", "psi_rel_entropy", "psi_entropy", "h_tau_given_k", "e_log_rho",
                        "e_log_nu", "identity_residual"}) {
    row(k, res[k]);
  }
  emit(c, t, res, "bracket width " + ql::format_number(r.psi_bracket.width() * c.unit) + " at L = " +
                      std::to_string(depth));
}

struct AlphaSpec {
  std::optional<ql::BoundaryMode> boundary;
  double alpha = 2.0;
  Json json;
};

AlphaSpec alpha_spec(const Context& c) {
  const auto& v = c.get("alpha");
  AlphaSpec a;
  a.json = v;
  if (v.is_string() && v.get<std::string>() == "one") {
    a.boundary = ql::BoundaryMode::AlphaOne;
    a.alpha = 1.0;
    return a;
  }
  if (v.is_string() && (v.get<std::string>() == "infinity" || v.get<std::string>() == "inf")) {
    a.boundary = ql::BoundaryMode::AlphaInfinity;
    a.alpha = INFINITY;
    return a;
  }
  a.alpha = c.number("alpha");
  if (a.alpha == 1.0) a.boundary = ql::BoundaryMode::AlphaOne;
  if (a.boundary || a.alpha > 1.0) return a;
  throw ql::InputError("parameter \"alpha\" must be >= 1, \"one\" or \"infinity\"");
}

void require_finite_alpha(const AlphaSpec& a) {
  ql::require(!a.boundary, "parameter \"tr\": the truncation ladder needs alpha in (1, inf)");
}

void run_rate(Context& c) {
  const auto nu = letter_law(c);
  const auto q = word_law(c, nu.alphabet());
  const ql::ReferenceLaw ref(renewal_law(c), nu);
  const auto depth = c.count("depth");
  const auto a = alpha_spec(c);
  const auto comp = ql::rate_components(q, ref, depth);
  const auto quenched = a.boundary ? ql::boundary_rate(q, ref, *a.boundary, depth) : ql::combine_fin_rate(comp, a.alpha);
  Json res{{"alpha", a.json},
           {"annealed", disp(c, ql::ann_rate(q, ref))},
           {"quenched_bracket", disp(c, quenched)},
           {"components",
            Json{{"h_rel", disp(c, comp.h_rel)}, {"m_q", comp.m_q}, {"psi_bracket", disp(c, comp.psi_bracket.interval())}}},
           {"depth", depth}};
  const auto trs = parse_list(c.get("tr"), "tr");
  Table t{{"tr", "lower", "upper", "L", "width"}, {}};
  if (!trs.empty()) {
    require_finite_alpha(a);
    Json ladder = Json::array();
    for (const auto& e : ql::que_rate_ladder(q, ref, a.alpha, trs, depth)) {
      ladder.push_back(Json{{"tr", e.tr}, {"quenched_bracket", disp(c, e.rate)}});
    }
    res["ladder"] = ladder;
  }
  if (quenched.is_infinite()) {
    t.add({Json("inf"), "inf", "inf", depth, "inf"});
  } else {
    const auto& iv = quenched.value();
    t.add({"inf", disp(c, iv.lower), disp(c, iv.upper), depth, disp(c, iv.width())});
  }
  emit(c, t, res,
       quenched.is_infinite() ? std::string("quenched rate +inf")
                              : "quenched in [" + ql::format_number(quenched.value().lower * c.unit) + ", " +
                                    ql::format_number(quenched.value().upper * c.unit) + "]");
}


void run_ladder(Context& c) {
  const auto nu = letter_law(c);
  const auto q = word_law(c, nu.alphabet());
  const ql::ReferenceLaw ref(renewal_law(c), nu);
  const auto a = alpha_spec(c);
  require_finite_alpha(a);
  auto trs = parse_list(c.get("tr"), "tr");
  if (trs.empty()) {
    for (std::size_t tr = 1; tr <= q.max_length(); ++tr) trs.push_back(tr);
  }
  const auto ladder = ql::que_rate_ladder(q, ref, a.alpha, trs, c.count("depth"));
  Table t{{"tr", "lower", "upper", "L", "width"}, {}};
  for (const auto& e : ladder) {
    if (e.rate.is_infinite()) {
      t.add({e.tr, "inf", "inf", e.depth, "inf"});
    } else {
      const auto& r = e.rate.value();
      t.add({e.tr, disp(c, r.lower), disp(c, r.upper), e.depth, disp(c, r.width())});
    }
  }
  emit(c, t, Json(), std::to_string(ladder.size()) + " truncation levels");
}

std::string medium_for(const Context& c, std::size_t length) {
  std::string x = c.text("medium");
  if (!x.empty()) return x;
  const auto nu = letter_law(c);
  const ql::CounterRng rng(c.seed, 3);
  const ql::DiscreteSampler letter(nu.probs());
  x.resize(length);
  for (std::size_t i = 0; i < length; ++i) x[i] = nu.alphabet().letter(letter.from_uniform(rng.uniform_at(i)));
  return x;
}

void run_quench_enum(Context& c) {
  const auto rho = renewal_law(c);
  const auto nbhd = neighbourhood(c);
  const auto n = c.count("n");
  const auto jmax = c.count("jmax");
  const std::string x = medium_for(c, n * jmax);
  const auto p = ql::quenched_prob_enum(x, rho, n, nbhd, jmax);
  Table t{{"n_words", "jmax", "log_prob", "prob", "peak_states"}, {}};
  t.add({n, jmax, ql::number_json(p.log_prob), p.prob, p.peak_states});
  emit(c, t, Json{{"medium", x}}, "P = " + ql::format_number(p.prob));
}

void run_quench_slopes(Context& c) {
  const auto nu = letter_law(c);
  const auto rho = renewal_law(c);
  const auto s = ql::quenched_slope_series(nu, rho, neighbourhood(c), parse_list(c.get("n"), "n"), c.count("jmax"),
                                           c.seed);
  Table t{{"n_words", "log_prob", "slope", "annealed_slope", "excess"}, {}};
  for (const auto& p : s.points) {
    const Json ann = s.annealed_slope ? disp(c, *s.annealed_slope) : Json("");
    const Json excess = s.annealed_slope ? disp(c, p.slope - *s.annealed_slope) : Json("");
    t.add({p.n_words, ql::number_json(p.log_prob), disp(c, p.slope), ann, excess});
  }
  emit(c, t, Json{{"medium", s.medium}, {"jmax_offset", disp(c, s.jmax_offset)}},
       std::to_string(s.points.size()) + " slopes");
}

void run_waiting_time(Context& c) {
  const auto nu = letter_law(c);
  ql::WaitingTimeParams wp;
  wp.block_lengths = parse_list(c.get("m"), "m");
  wp.trials = c.count("trials");
  wp.tolerance = c.number("tol");
  wp.seed = c.seed;
  wp.threads = c.threads;
  wp.horizon_cap = c.count("horizon_cap");
  const auto r = ql::waiting_time(nu, parse_numbers(c.get("psi"), "psi"), wp);
  Table t{{"m", "mean_log_sigma", "std_error", "per_letter", "censored"}, {}};
  for (const auto& p : r.points) {
    t.add({p.block_length, disp(c, p.mean_log_sigma), disp(c, p.std_error),
           disp(c, p.mean_log_sigma / static_cast<double>(p.block_length)), p.censored});
  }
  emit(c, t, Json{{"slope", disp(c, r.slope)}, {"intercept", disp(c, r.intercept)}, {"predicted", disp(c, r.predicted)}},
       "slope " + ql::format_number(r.slope * c.unit) + " vs predicted " + ql::format_number(r.predicted * c.unit));
}

ql::SnMethod sn_method(const Context& c) {
  const auto m = c.text("method");
  if (m == "auto") return ql::SnMethod::Auto;
  if (m == "direct") return ql::SnMethod::Direct;
  if (m == "fft") return ql::SnMethod::Fft;
  throw ql::InputError("parameter \"method\" must be auto, direct or fft");
}

void run_core_lemma(Context& c) {
  const double alpha = c.number("alpha");
  const double p = c.number("p");
  const auto ns = parse_list(c.get("n"), "n");
  ql::require(!ns.empty() && ns.front() >= 1, "parameter \"n\" must list positive integers");
  const std::size_t n_max = *std::max_element(ns.begin(), ns.end());
  const auto horizon = c.count("horizon");
  // The bounds need p < 1; at p = 1 the sum is deterministic and they are omitted.
  ql::PhiBounds bounds{NAN, NAN, NAN};
  Json phi = nullptr;
  if (p < 1.0) {
    bounds = ql::phi_bounds(alpha, p);
    phi = Json{{"lower", disp(c, bounds.lower)}, {"upper", disp(c, bounds.upper)}, {"beta_star", bounds.beta_star}};
  }
  if (c.text("mode") == "mean") {
    const auto r = ql::s_n_mean_check(alpha, p, n_max, horizon, c.count("trials"), c.seed, c.threads);
    Table t{{"n", "mean", "std_error", "ci_half_width", "target", "finite_horizon", "within_3ci"}, {}};
    for (const auto& row : r.rows) {
      t.add({row.n, row.mean, row.std_error, row.ci_half_width, row.target, row.finite_horizon, row.within_3ci});
    }
    emit(c, t, Json{{"phi_bounds", phi}}, std::to_string(r.rows.size()) + " mean checks");
    return;
  }
  if (c.text("mode") != "slopes") throw ql::InputError("parameter \"mode\" must be slopes or mean");
  const auto samples = c.count("samples");
  const ql::SnKernel kernel(alpha, horizon);
  const ql::CounterRng root(c.seed, 21);
  const auto method = sn_method(c);
  std::vector<ql::SnProfile> profiles(samples);
  ql::parallel_for(samples, c.threads, [&](std::size_t s) {
    profiles[s] = ql::s_n_profile(ql::bernoulli_marks(p, horizon, root.split(s)), kernel, n_max, method);
  });
  Table t{{"sample", "n", "log_s", "rate", "ratio_to_upper", "phi_lower", "phi_upper"}, {}};
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t n : ns) {
      const double ls = profiles[s].log_s[n - 1];
      const double rate = -ls / static_cast<double>(n);
      t.add({s, n, disp(c, ls), disp(c, rate), ql::number_json(rate / bounds.upper), disp(c, bounds.lower),
             disp(c, bounds.upper)});
    }
  }
  emit(c, t, Json{{"phi_bounds", phi}},
       std::to_string(samples) + " samples, phi in [" + ql::format_number(bounds.lower * c.unit) + ", " +
           ql::format_number(bounds.upper * c.unit) + "]");
}

void run_conv_tail(Context& c) {
  const double alpha = c.number("alpha");
  const auto rho = ql::RenewalLaw::algebraic(alpha, c.count("cap"));
  const double c_rho = c.get("c_rho").is_null() ? rho.c_rho() : c.number("c_rho");
  const auto r = ql::conv_tail_check(rho, alpha, c_rho, c.count("m_max"), c.count("n_max"));
  Table t{{"m", "worst_ratio", "worst_n"}, {}};
  for (const auto& row : r.rows) t.add({row.m, row.worst_ratio, row.worst_n});
  emit(c, t, Json{{"c_rho", r.c_rho}, {"worst_ratio", r.worst_ratio}, {"passed", r.passed}},
       std::string(r.passed ? "bound holds" : "bound VIOLATED") + ", worst ratio " + ql::format_number(r.worst_ratio));
}

void run_iproj(Context& c) {
  const ql::ReferenceLaw ref(renewal_law(c), letter_law(c));
  const auto dist = ql::reference_marginal(ref);
  const auto r = ql::i_projection(dist, neighbourhood(c));
  Table t{{"word", "reference", "minimizer"}, {}};
  for (std::size_t i = 0; i < dist.words.size(); ++i) t.add({dist.words[i].str(), dist.probs[i], r.minimizer.probs[i]});
  emit(c, t, Json{{"value", disp(c, r.value)}}, "inf h = " + ql::format_number(r.value * c.unit));
}

// ---------------------------------------------------------------------------

const Json kDefaultLetters = Json{{"alphabet", "ab"}};
const Json kDefaultRenewal = Json{{"alpha", 2}, {"cap", 4}};
const Json kDefaultNbhd = Json::array({Json{{"pattern", Json::array({"b"})}, {"lower", 0.9}, {"upper", 1.0}}});

std::vector<Command> commands() {
  const Param letters{"letter_law", kDefaultLetters, "letter law document or path"};
  const Param renewal{"renewal_law", kDefaultRenewal, "renewal law document or path"};
  const Param words{"word_law", nullptr, "word-process law document or path"};
  const Param nbhd{"neighbourhood", kDefaultNbhd, "constraint list or path"};
  return {
      {"simulate", "sample letters, cuts and words",
       {letters, renewal, {"n_words", 20, "words to cut"}, {"n_letters", 0, "minimum letters to draw"}},
       run_simulate},
      {"ergodic", "distance of the empirical word process to the reference law",
       {letters, renewal, {"n", "100000", "word counts N"}, {"k", 1, "pattern length, 1 or 2"}},
       run_ergodic},
      {"psi", "letter marginal of the concatenated process",
       {letters, words, {"depth", 4, "marginal depth L"}},
       run_psi},
      {"entropy", "entropy report and identity residual",
       {letters, renewal, words, {"depth", 12, "bracket depth L"}},
       run_entropy},
      {"rate", "annealed and quenched rate of a word law",
       {letters, renewal, words, {"alpha", 2, "tail exponent, number, one or infinity"},
        {"depth", 12, "bracket depth L"}, {"tr", "", "optional truncation levels"}},
       run_rate},
      {"ladder", "quenched rate of truncated laws",
       {letters, renewal, words, {"alpha", 2, "tail exponent"}, {"depth", 12, "bracket depth L"},
        {"tr", "", "truncation levels, default 1..max length"}},
       run_ladder},
      {"quench-enum", "exact conditional probability of a neighbourhood",
       {letters, renewal, nbhd, {"n", 6, "word count N"}, {"jmax", 4, "largest increment"},
        {"medium", "", "letter string X, sampled from letter_law when empty"}},
       run_quench_enum},
      {"quench-slopes", "quenched slope series on one sampled medium",
       {letters, renewal, nbhd, {"n", "6,8,10", "word counts N"}, {"jmax", 4, "largest increment"}},
       run_quench_slopes},
      {"waiting-time", "waiting time for a psi-typical block",
       {{"letter_law", Json{{"alphabet", "01"}}, "letter law document or path"},
        {"psi", Json::array({0.8, 0.2}), "target letter probabilities"},
        {"m", "10..30", "block lengths M"},
        {"trials", 200, "trials per M"},
        {"tol", 0.02, "typicality tolerance on letter frequencies"},
        {"horizon_cap", std::uint64_t{1} << 34, "letters scanned before censoring"}},
       run_waiting_time},
      {"core-lemma", "marked-site sums S_N and phi bounds",
       {{"alpha", 2, "kernel exponent"}, {"p", 0.1, "mark density"}, {"n", "1..40", "N values"},
        {"horizon", 200000, "horizon T"}, {"samples", 20, "sampled omegas (slopes mode)"},
        {"mode", "slopes", "slopes or mean"}, {"trials", 100000, "Monte Carlo trials (mean mode)"},
        {"method", "auto", "auto, direct or fft"}},
       run_core_lemma},
      {"conv-tail", "exact convolution tail bound check",
       {{"alpha", 2, "tail exponent"}, {"cap", 2000, "support cap"}, {"m_max", 5, "largest m"},
        {"n_max", 2000, "largest n"}, {"c_rho", nullptr, "constant C, default the law's sup rho(n) n^alpha"}},
       run_conv_tail},
      {"iproj", "I-projection of the reference word law onto a neighbourhood",
       {letters, renewal, nbhd},
       run_iproj},
  };
}

std::string flag_name(const std::string& key) {
  std::string f = "--";
  for (char ch : key) f += ch == '_' ? '-' : ch;
  return f;
}

/// Flag text is read as JSON when it parses, otherwise as a plain string.
Json flag_value(const std::string& s) {
  try {
    return Json::parse(s);
  } catch (const nlohmann::json::exception&) {
    return s;
  }
}

bool is_document_key(const std::string& key) {
  return key == "letter_law" || key == "renewal_law" || key == "word_law" || key == "neighbourhood";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quenchlab: quenched large deviations laboratory"};
  app.require_subcommand(1);
  std::string config_path, out, format = "csv", log_base = "nat";
  std::uint64_t seed = ql::kDefaultSeed;
  unsigned threads = 1;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out, "output path (stdout when absent)");
  auto* seed_opt = app.add_option("--seed", seed, "64-bit seed");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--log-base", log_base, "nat or bit")->check(CLI::IsMember({"nat", "bit"}));
  app.fallthrough();

  const auto cmds = commands();
  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  for (const auto& cmd : cmds) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    for (const auto& p : cmd.params) {
      opts[cmd.name][p.key] = sub->add_option(flag_name(p.key), flags[cmd.name][p.key], p.help);
    }
  }

  // The first bare word must name a command.
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("-", 0) == 0) {
      if (a.find('=') == std::string::npos && a != "--help" && a != "-h") ++i;  // skip the option value
      continue;
    }
    bool known = false;
    for (const auto& c : cmds) known = known || c.name == a;
    if (!known) {
      std::cerr << "error: unknown command \"" << a << "\"\n";
      return kExitUnknownCommand;
    }
    break;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ExtrasError& e) {
    app.exit(e);
    return app.get_subcommands().empty() ? kExitUnknownCommand : kExitInput;
  } catch (const CLI::RequiredError& e) {
    app.exit(e);
    return app.get_subcommands().empty() ? kExitUnknownCommand : kExitInput;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const Command* cmd = nullptr;
  for (const auto& c : cmds) {
    if (c.name == sub->get_name()) cmd = &c;
  }

  try {
    Json file = Json::object();
    if (!config_path.empty()) {
      file = ql::load_json_file(config_path);
      // A bare word law document is accepted as the whole configuration.
      if (file.is_object() && file.contains("variant")) file = Json{{"word_law", file}};
      if (!file.is_object()) throw ql::InputError("\"" + config_path + "\": configuration must be a JSON object");
    }
    Context ctx;
    ctx.command = cmd->name;
    ctx.config = Json::object();
    for (const auto& p : cmd->params) {
      Json v = p.fallback;
      if (file.contains(p.key)) v = file.at(p.key);
      if (opts[cmd->name][p.key]->count() > 0) {
        const auto& s = flags[cmd->name][p.key];
        v = is_document_key(p.key) ? Json(s) : flag_value(s);
      }
      if (is_document_key(p.key)) v = resolve_document(v);
      ctx.config[p.key] = v;
    }
    for (const auto& [k, v] : file.items()) {
      if (k == "seed" || k == "threads" || k == "format" || k == "log_base") continue;
      bool known = false;
      for (const auto& p : cmd->params) known = known || p.key == k;
      if (!known) throw ql::InputError("configuration field \"" + k + "\" is not used by " + cmd->name);
    }
    ctx.seed = seed;
    if (seed_opt->count() == 0 && file.contains("seed")) ctx.seed = file.at("seed").get<std::uint64_t>();
    ctx.threads = threads;
    if (file.contains("threads") && app.get_option("--threads")->count() == 0) {
      ctx.threads = std::max(1u, file.at("threads").get<unsigned>());
    }
    ctx.out = out;
    ctx.format = format;
    if (log_base == "bit") {
      ctx.unit = 1.0 / std::log(2.0);
      ctx.unit_name = "bit";
    }
    cmd->run(ctx);
  } catch (const ql::SizeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSize;
  } catch (const ql::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
