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

// JSON law documents and CSV output.
//
// Numbers are written in shortest round-trip form through std::to_chars, so
// identical values always produce identical bytes. Infinite quantities are
// written as "inf".

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "quenchlab/common.hpp"
#include "quenchlab/entropy.hpp"
#include "quenchlab/laws.hpp"
#include "quenchlab/psi.hpp"
#include "quenchlab/rate.hpp"
#include "quenchlab/words.hpp"

namespace quenchlab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

inline std::string format_number(const Extended<double>& v) {
  return v.is_infinite() ? "inf" : format_number(v.value());
}

/// JSON numbers cannot hold infinities; they become the string "inf".
inline Json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

inline Json number_json(const Extended<double>& v) {
  return v.is_infinite() ? Json("inf") : number_json(v.value());
}

inline Json interval_json(const Interval& i) { return Json{{"lower", number_json(i.lower)}, {"upper", number_json(i.upper)}}; }

inline Json interval_json(const Extended<Interval>& i) {
  if (i.is_infinite()) return Json("inf");
  return interval_json(i.value());
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file \"" + path + "\"");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("\"" + path + "\" is not valid JSON: " + e.what());
  }
}

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

template <class T>
T get_as(const Json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(where + ": wrong type");
  }
}

}  // namespace detail

inline LetterLaw parse_letter_law(const Json& j, const std::string& where = "letter law") {
  const auto alphabet = detail::get_as<std::string>(detail::field(j, "alphabet", where), where + ".alphabet");
  if (!j.contains("probs")) return LetterLaw::uniform(Alphabet(alphabet));
  auto probs = detail::get_as<std::vector<double>>(j.at("probs"), where + ".probs");
  return LetterLaw(Alphabet(alphabet), std::move(probs));
}

inline TailExponent parse_tail(const Json& j, const std::string& where) {
  if (j.is_number()) return TailExponent::algebraic(j.get<double>());
  const auto s = detail::get_as<std::string>(j, where);
  if (s == "one") return TailExponent::one();
  if (s == "infinity") return TailExponent::infinity();
  throw InputError(where + ": expected a number, \"one\" or \"infinity\", got \"" + s + "\"");
}

/// Either {alpha, cap} for a capped algebraic law or {atoms: [[n, p], ...], alpha}.
inline RenewalLaw parse_renewal_law(const Json& j, const std::string& where = "renewal law") {
  if (j.is_object() && j.contains("cap")) {
    const auto alpha = detail::get_as<double>(detail::field(j, "alpha", where), where + ".alpha");
    const auto cap = detail::get_as<std::size_t>(j.at("cap"), where + ".cap");
    return RenewalLaw::algebraic(alpha, cap);
  }
  const auto& atoms_j = detail::field(j, "atoms", where);
  std::vector<std::pair<std::size_t, double>> atoms;
  for (const auto& a : atoms_j) {
    if (!a.is_array() || a.size() != 2) throw InputError(where + ".atoms: each atom must be [n, p]");
    atoms.emplace_back(detail::get_as<std::size_t>(a[0], where + ".atoms"), detail::get_as<double>(a[1], where + ".atoms"));
  }
  const TailExponent tail = j.contains("alpha") ? parse_tail(j.at("alpha"), where + ".alpha") : TailExponent::infinity();
  return RenewalLaw::from_atoms(atoms, tail);
}

inline WordProcessLaw parse_word_law(const Json& j, const Alphabet& fallback, const std::string& where = "word law") {
  const auto variant = detail::get_as<std::string>(detail::field(j, "variant", where), where + ".variant");
  const Alphabet alphabet =
      j.contains("alphabet") ? Alphabet(detail::get_as<std::string>(j.at("alphabet"), where + ".alphabet")) : fallback;
  const auto names = detail::get_as<std::vector<std::string>>(detail::field(j, "words", where), where + ".words");
  std::vector<Word> words(names.begin(), names.end());
  if (variant == "iid") {
    auto probs = detail::get_as<std::vector<double>>(detail::field(j, "probs", where), where + ".probs");
    return WordProcessLaw::iid(alphabet, std::move(words), std::move(probs));
  }
  if (variant == "markov") {
    auto p = detail::get_as<std::vector<std::vector<double>>>(detail::field(j, "transition", where),
                                                               where + ".transition");
    return WordProcessLaw::markov(alphabet, std::move(words), std::move(p));
  }
  throw InputError(where + ".variant: expected \"iid\" or \"markov\", got \"" + variant + "\"");
}

/// [{pattern: ["b"], lower: 0.9, upper: 1}, ...]
inline Neighbourhood parse_neighbourhood(const Json& j, const std::string& where = "neighbourhood") {
  if (!j.is_array()) throw InputError(where + ": expected an array of constraints");
  Neighbourhood n;
  for (const auto& c : j) {
    PatternConstraint pc;
    for (const auto& w : detail::get_as<std::vector<std::string>>(detail::field(c, "pattern", where), where + ".pattern")) {
      pc.pattern.emplace_back(w);
    }
    pc.lower = c.contains("lower") ? detail::get_as<double>(c.at("lower"), where + ".lower") : 0.0;
    pc.upper = c.contains("upper") ? detail::get_as<double>(c.at("upper"), where + ".upper") : 1.0;
    n.constraints.push_back(std::move(pc));
  }
  n.validate();
  return n;
}

inline Json to_json(const LetterLaw& nu) { return Json{{"alphabet", nu.alphabet().symbols()}, {"probs", nu.probs()}}; }

inline Json to_json(const RenewalLaw& rho) {
  Json atoms = Json::array();
  for (const auto& [n, p] : rho.atoms()) atoms.push_back(Json::array({n, p}));
  Json alpha;
  if (rho.tail().is_algebraic()) {
    alpha = rho.tail().alpha();
  } else {
    alpha = rho.tail().to_string();
  }
  return Json{{"atoms", atoms}, {"alpha", alpha}};
}

inline Json to_json(const WordProcessLaw& q) {
  std::vector<std::string> words;
  for (const auto& w : q.words()) words.push_back(w.str());
  Json j{{"variant", q.is_iid() ? "iid" : "markov"}, {"alphabet", q.alphabet().symbols()}, {"words", words}};
  if (q.is_iid()) {
    j["probs"] = q.marginal();
  } else {
    j["transition"] = q.transition_matrix();
  }
  return j;
}

inline Json to_json(const Neighbourhood& n) {
  Json out = Json::array();
  for (const auto& c : n.constraints) {
    std::vector<std::string> pat;
    for (const auto& w : c.pattern) pat.push_back(w.str());
    out.push_back(Json{{"pattern", pat}, {"lower", c.lower}, {"upper", c.upper}});
  }
  return out;
}

inline Json to_json(const EntropyBracket& b) {
  return Json{{"lower", number_json(b.lower)}, {"upper", number_json(b.upper)}, {"depth", b.depth}};
}

inline Json to_json(const EntropyReport& r) {
  return Json{{"depth", r.psi_bracket.depth},
              {"h_q", number_json(r.h_q)},
              {"h_rel", number_json(r.h_rel)},
              {"m_q", number_json(r.m_q)},
              {"psi_rel_entropy", to_json(r.psi_bracket)},
              {"psi_entropy", interval_json(r.psi_entropy)},
              {"h_tau_given_k", interval_json(r.h_tau_given_k)},
              {"e_log_rho", r.e_log_rho.is_infinite() ? Json("-inf") : number_json(r.e_log_rho.value())},
              {"e_log_nu", number_json(r.e_log_nu)}};
}

/// Minimal CSV writer: ',' separator, '.' decimal, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

  CsvWriter& cell(const std::string& s) {
    pending_.push_back(quote(s));
    return *this;
  }
  CsvWriter& cell(double v) { return cell(format_number(v)); }
  CsvWriter& cell(const Extended<double>& v) { return cell(format_number(v)); }
  CsvWriter& cell(std::size_t v) { return cell(std::to_string(v)); }
  CsvWriter& cell(int v) { return cell(std::to_string(v)); }

  void end_row() {
    require(pending_.size() == columns_, "CsvWriter: row has " + std::to_string(pending_.size()) +
                                              " cells, header has " + std::to_string(columns_));
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      if (i) out_ << ',';
      out_ << pending_[i];
    }
    out_ << '\n';
    pending_.clear();
  }

  std::string str() const { return out_.str(); }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }
  void row_strings(const std::vector<std::string>& cells) {
    for (const auto& c : cells) pending_.push_back(quote(c));
    end_row();
  }

  std::size_t columns_;
  std::vector<std::string> pending_;
  std::ostringstream out_;
};

/// (pattern, probability) rows in canonical lexicographic order.
inline std::string marginal_csv(const LetterMarginal& m) {
  CsvWriter w({"pattern", "probability"});
  for (std::size_t i = 0; i < m.size(); ++i) w.cell(m.pattern(i)).cell(m.probs()[i]).end_row();
  return w.str();
}

inline std::string pattern_table_csv(const PatternTable& t) {
  CsvWriter w({"pattern", "probability"});
  for (const auto& [k, p] : t.probs) w.cell(k).cell(p).end_row();
  return w.str();
}

/// (tr, lower, upper, L, width); infinite rates write "inf" bounds and width.
inline std::string ladder_csv(const std::vector<LadderEntry>& ladder, double unit = 1.0) {
  CsvWriter w({"tr", "lower", "upper", "L", "width"});
  for (const auto& e : ladder) {
    w.cell(e.tr);
    if (e.rate.is_infinite()) {
      w.cell("inf").cell("inf").cell(e.depth).cell("inf");
    } else {
      const auto& r = e.rate.value();
      w.cell(r.lower * unit).cell(r.upper * unit).cell(e.depth).cell(r.width() * unit);
    }
    w.end_row();
  }
  return w.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file \"" + path + "\"");
  out << text;
  if (!out) throw InputError("failed writing file \"" + path + "\"");
}

}  // namespace quenchlab
