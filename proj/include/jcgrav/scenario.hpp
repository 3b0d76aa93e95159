#pragma once

// Experiment descriptions: the built-in figure scenarios and a flat
// `key = value` text format with `#` comments.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "jcgrav/analytic.hpp"
#include "jcgrav/core.hpp"
#include "jcgrav/observables.hpp"
#include "jcgrav/ode.hpp"

namespace jcgrav {

enum class Backend { analytic, ode, both };
enum class Output { inversion, entropy, qgrid, cat_report };

inline const char* to_string(Backend b) {
  switch (b) {
    case Backend::analytic: return "analytic";
    case Backend::ode: return "ode";
    case Backend::both: return "both";
  }
  return "?";
}

inline const char* to_string(Output o) {
  switch (o) {
    case Output::inversion: return "inversion";
    case Output::entropy: return "entropy";
    case Output::qgrid: return "qgrid";
    case Output::cat_report: return "cat_report";
  }
  return "?";
}

/// Sample times in scaled time lambda*t. A set `t_at` selects a single instant.
struct TimeSpec {
  double t_start = 0.0;
  double t_end = 25.0;
  std::size_t n_samples = 2000;
  std::optional<double> t_at;

  std::vector<double> samples() const {
    if (t_at) return {*t_at};
    return linspace(t_start, t_end, n_samples);
  }

  bool operator==(const TimeSpec&) const = default;
};

struct Tolerances {
  double ode = 1e-10;
  double quad = 1e-12;

  bool operator==(const Tolerances&) const = default;
};

struct Scenario {
  std::string name = "custom";
  PhysicalParams params;
  std::vector<double> qg_list{ReferenceConstants::qg_values[0], ReferenceConstants::qg_values[1],
                              ReferenceConstants::qg_values[2]};
  TimeSpec time;
  // rad/s: t = (lambda t) / time_rate. Unset means lambda.
  std::optional<double> time_rate;
  Backend backend = Backend::ode;
  std::set<Output> outputs{Output::inversion};
  QGridSpec qgrid;
  Tolerances tol;
  bool literal_paper_mode = false;
  Frame ode_frame = Frame::rotating;
  bool weight_scaled_tolerance = true;
  std::size_t momentum_nodes = kDefaultMomentumNodes;
  std::optional<std::size_t> nmax;  // unset: adaptive

  double seconds_per_lambda_t() const { return 1.0 / time_rate.value_or(params.lambda); }

  bool operator==(const Scenario& o) const {
    return name == o.name && params == o.params && qg_list == o.qg_list && time == o.time &&
           time_rate == o.time_rate && backend == o.backend && outputs == o.outputs &&
           qgrid.extent == o.qgrid.extent && qgrid.n == o.qgrid.n && tol == o.tol &&
           literal_paper_mode == o.literal_paper_mode && ode_frame == o.ode_frame &&
           weight_scaled_tolerance == o.weight_scaled_tolerance && momentum_nodes == o.momentum_nodes &&
           nmax == o.nmax;
  }
};

/// fig1 (inversion sweep), fig2 (entropy sweep) or fig3 (Q function at lambda t = 7 pi / 2).
inline Scenario builtin_scenario(std::string_view name) {
  Scenario s;
  s.name = std::string(name);
  if (name == "fig1") {
    s.outputs = {Output::inversion};
  } else if (name == "fig2") {
    s.outputs = {Output::entropy};
  } else if (name == "fig3") {
    s.outputs = {Output::qgrid, Output::cat_report};
    s.time.t_at = kHalfRevivalLambdaT;
  } else {
    throw ValidationError("unknown builtin scenario '" + std::string(name) + "' (valid: fig1, fig2, fig3)");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Text format

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  std::size_t e = s.size();
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  if (lead) *lead = b;
  return s.substr(b, e - b);
}

struct Token {
  std::string_view text;
  int line;
  int column;
};

inline double parse_double(const Token& t) {
  double v = 0.0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  if (!t.text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || t.text.empty() || !std::isfinite(v))
    throw ParseError("expected a finite number, got '" + std::string(t.text) + "'", t.line, t.column);
  return v;
}

inline std::size_t parse_size(const Token& t) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc() || ptr != t.text.data() + t.text.size() || t.text.empty())
    throw ParseError("expected a non-negative integer, got '" + std::string(t.text) + "'", t.line, t.column);
  return v;
}

inline bool parse_bool(const Token& t) {
  if (t.text == "true") return true;
  if (t.text == "false") return false;
  throw ParseError("expected true or false, got '" + std::string(t.text) + "'", t.line, t.column);
}

/// Comma-separated items with their columns.
inline std::vector<Token> split_list(const Token& t) {
  std::vector<Token> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = t.text.find(',', start);
    const std::string_view raw = t.text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                        : comma - start);
    std::size_t lead = 0;
    const auto item = trim(raw, &lead);
    const int col = t.column + static_cast<int>(start + lead);
    if (item.empty()) throw ParseError("empty list item", t.line, col);
    out.push_back({item, t.line, col});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Throws ValidationError naming the first violated invariant.
inline void validate(const Scenario& s) {
  auto fail = [](const std::string& m) { throw ValidationError("scenario: " + m); };
  try {
    validate(s.params);
  } catch (const DomainError& e) {
    fail(e.what());
  }
  if (!(s.time.t_start >= 0.0)) fail("t_start >= 0 violated");
  if (!(s.time.t_end > s.time.t_start)) fail("t_end > t_start violated");
  if (s.time.n_samples < 2) fail("n_samples >= 2 violated");
  if (s.name.empty() || s.name.find_first_of("#\n\r") != std::string::npos || s.name != detail::trim(s.name))
    fail("name must be non-empty, single-line, without '#' or surrounding blanks");
  if (s.time.t_at && !(*s.time.t_at >= 0.0 && std::isfinite(*s.time.t_at))) fail("t_at >= 0 violated");
  if (s.qg_list.empty()) fail("qg list must not be empty");
  for (double qg : s.qg_list)
    if (!(qg >= 0.0) || !std::isfinite(qg)) fail("qg entries must be >= 0");
  if (s.time_rate && !(*s.time_rate > 0.0 && std::isfinite(*s.time_rate))) fail("time_rate > 0 violated");
  if (!s.time_rate && !(s.params.lambda > 0.0))
    fail("lambda = 0 needs an explicit time_rate to convert lambda*t to seconds");
  if (s.outputs.empty()) fail("outputs must not be empty");
  if (!(s.tol.ode >= kMinOdeTolerance && s.tol.ode <= kMaxOdeTolerance)) fail("tol.ode must lie in [1e-12, 1e-6]");
  if (!(s.tol.quad > 0.0 && s.tol.quad < 1.0)) fail("tol.quad must lie in (0, 1)");
  if (s.qgrid.n < 3) fail("qgrid.n >= 3 violated");
  if (!(s.qgrid.extent > 0.0) || !std::isfinite(s.qgrid.extent)) fail("qgrid.extent > 0 violated");
  if ((s.outputs.count(Output::qgrid) != 0) && s.qgrid.extent < std::abs(s.params.alpha) + 4.0)
    fail("qgrid.extent must cover |beta| <= |alpha| + 4");
  if (s.momentum_nodes < 1) fail("momentum_nodes >= 1 violated");
}

/// Keys in canonical order, each with its unit or accepted values.
inline const std::vector<std::pair<std::string, std::string>>& scenario_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"name", "label written to run metadata"},
      {"q", "1/m, optional; with mass, checked against omega_rec"},
      {"mass", "kg, optional"},
      {"lambda", "rad/s, atom-field coupling"},
      {"omega_rec", "rad/s, recoil frequency"},
      {"delta0", "rad/s, bare detuning"},
      {"sigma0", "momentum width (scaled)"},
      {"alpha.re", "coherent amplitude, real part"},
      {"alpha.im", "coherent amplitude, imaginary part"},
      {"p_unit", "momentum unit in photon recoils"},
      {"qg", "rad/s^2, comma-separated list"},
      {"t_start", "lambda*t"},
      {"t_end", "lambda*t"},
      {"n_samples", "integer >= 2"},
      {"t_at", "lambda*t, single instant (overrides the sweep)"},
      {"time_rate", "rad/s used to convert lambda*t to seconds (default lambda)"},
      {"backend", "analytic | ode | both"},
      {"outputs", "comma-separated: inversion, entropy, qgrid, cat_report"},
      {"qgrid.extent", "half width of the square Q grid"},
      {"qgrid.n", "points per axis"},
      {"tol.ode", "ODE tolerance in [1e-12, 1e-6]"},
      {"tol.quad", "relative quadrature tolerance"},
      {"literal_paper_mode", "true | false"},
      {"ode.frame", "rotating | literal"},
      {"ode.weight_scaled_tolerance", "true | false"},
      {"momentum_nodes", "Gauss-Hermite nodes"},
      {"nmax", "Fock cutoff, or auto"},
  };
  return keys;
}

/// Parses and validates a scenario document. Keys not present keep their
/// defaults; `provenance`, when given, receives one line per key saying where
/// its value came from.
inline Scenario parse_scenario(std::string_view text, std::vector<std::string>* provenance = nullptr) {
  std::map<std::string, detail::Token> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t lead = 0;
    if (detail::trim(line, &lead).empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, static_cast<int>(lead) + 1);
    std::size_t key_lead = 0, val_lead = 0;
    const auto key = detail::trim(line.substr(0, eq), &key_lead);
    const auto val = detail::trim(line.substr(eq + 1), &val_lead);
    const int key_col = static_cast<int>(key_lead) + 1;
    const int val_col = static_cast<int>(eq + 1 + val_lead) + 1;
    if (key.empty()) throw ParseError("missing key before '='", line_no, static_cast<int>(eq) + 1);
    bool known = false;
    for (const auto& [k, _] : scenario_keys()) known = known || k == key;
    if (!known) throw ParseError("unknown key '" + std::string(key) + "'", line_no, key_col);
    if (seen.count(std::string(key)))
      throw ParseError("duplicate key '" + std::string(key) + "' (first set on line " +
                           std::to_string(seen.at(std::string(key)).line) + ")",
                       line_no, key_col);
    if (val.empty()) throw ParseError("missing value for '" + std::string(key) + "'", line_no, val_col);
    seen.emplace(std::string(key), detail::Token{val, line_no, val_col});
  }

  Scenario s;
  auto get = [&](const char* key) -> const detail::Token* {
    auto it = seen.find(key);
    return it == seen.end() ? nullptr : &it->second;
  };
  if (auto t = get("name")) s.name = std::string(t->text);
  if (auto t = get("q")) s.params.q = detail::parse_double(*t);
  if (auto t = get("mass")) s.params.mass = detail::parse_double(*t);
  if (auto t = get("lambda")) s.params.lambda = detail::parse_double(*t);
  if (auto t = get("omega_rec")) s.params.omega_rec = detail::parse_double(*t);
  if (auto t = get("delta0")) s.params.delta0 = detail::parse_double(*t);
  if (auto t = get("sigma0")) s.params.sigma0 = detail::parse_double(*t);
  if (auto t = get("alpha.re")) s.params.alpha.real(detail::parse_double(*t));
  if (auto t = get("alpha.im")) s.params.alpha.imag(detail::parse_double(*t));
  if (auto t = get("p_unit")) s.params.p_unit = detail::parse_double(*t);
  if (auto t = get("qg")) {
    s.qg_list.clear();
    for (const auto& item : detail::split_list(*t)) s.qg_list.push_back(detail::parse_double(item));
  }
  if (auto t = get("t_start")) s.time.t_start = detail::parse_double(*t);
  if (auto t = get("t_end")) s.time.t_end = detail::parse_double(*t);
  if (auto t = get("n_samples")) s.time.n_samples = detail::parse_size(*t);
  if (auto t = get("t_at")) s.time.t_at = detail::parse_double(*t);
  if (auto t = get("time_rate")) s.time_rate = detail::parse_double(*t);
  if (auto t = get("backend")) {
    if (t->text == "analytic") s.backend = Backend::analytic;
    else if (t->text == "ode") s.backend = Backend::ode;
    else if (t->text == "both") s.backend = Backend::both;
    else throw ParseError("backend must be analytic, ode or both", t->line, t->column);
  }
  if (auto t = get("outputs")) {
    s.outputs.clear();
    for (const auto& item : detail::split_list(*t)) {
      if (item.text == "inversion") s.outputs.insert(Output::inversion);
      else if (item.text == "entropy") s.outputs.insert(Output::entropy);
      else if (item.text == "qgrid") s.outputs.insert(Output::qgrid);
      else if (item.text == "cat_report") s.outputs.insert(Output::cat_report);
      else throw ParseError("unknown output '" + std::string(item.text) + "'", item.line, item.column);
    }
  }
  if (auto t = get("qgrid.extent")) s.qgrid.extent = detail::parse_double(*t);
  if (auto t = get("qgrid.n")) s.qgrid.n = detail::parse_size(*t);
  if (auto t = get("tol.ode")) s.tol.ode = detail::parse_double(*t);
  if (auto t = get("tol.quad")) s.tol.quad = detail::parse_double(*t);
  if (auto t = get("literal_paper_mode")) s.literal_paper_mode = detail::parse_bool(*t);
  if (auto t = get("ode.frame")) {
    if (t->text == "rotating") s.ode_frame = Frame::rotating;
    else if (t->text == "literal") s.ode_frame = Frame::literal;
    else throw ParseError("ode.frame must be rotating or literal", t->line, t->column);
  }
  if (auto t = get("ode.weight_scaled_tolerance")) s.weight_scaled_tolerance = detail::parse_bool(*t);
  if (auto t = get("momentum_nodes")) s.momentum_nodes = detail::parse_size(*t);
  if (auto t = get("nmax")) {
    if (t->text == "auto") s.nmax.reset();
    else s.nmax = detail::parse_size(*t);
  }

  validate(s);

  if (provenance) {
    provenance->clear();
    for (const auto& [k, _] : scenario_keys()) {
      auto it = seen.find(k);
      if (it != seen.end())
        provenance->push_back(k + ": line " + std::to_string(it->second.line));
      else
        provenance->push_back(k + ": default");
    }
  }
  return s;
}

/// Canonical document: every key, in scenario_keys() order. Optional keys that
/// are unset are written as comments.
inline std::string serialize(const Scenario& s) {
  using detail::format_double;
  std::ostringstream os;
  auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  kv("name", s.name);
  if (s.params.q) kv("q", format_double(*s.params.q));
  else os << "# q unset\n";
  if (s.params.mass) kv("mass", format_double(*s.params.mass));
  else os << "# mass unset\n";
  kv("lambda", format_double(s.params.lambda));
  kv("omega_rec", format_double(s.params.omega_rec));
  kv("delta0", format_double(s.params.delta0));
  kv("sigma0", format_double(s.params.sigma0));
  kv("alpha.re", format_double(s.params.alpha.real()));
  kv("alpha.im", format_double(s.params.alpha.imag()));
  kv("p_unit", format_double(s.params.p_unit));
  std::string qg;
  for (std::size_t i = 0; i < s.qg_list.size(); ++i) qg += (i ? ", " : "") + format_double(s.qg_list[i]);
  kv("qg", qg);
  kv("t_start", format_double(s.time.t_start));
  kv("t_end", format_double(s.time.t_end));
  kv("n_samples", std::to_string(s.time.n_samples));
  if (s.time.t_at) kv("t_at", format_double(*s.time.t_at));
  else os << "# t_at unset (sweep)\n";
  if (s.time_rate) kv("time_rate", format_double(*s.time_rate));
  else os << "# time_rate unset (lambda)\n";
  kv("backend", to_string(s.backend));
  std::string outs;
  for (auto o : s.outputs) outs += (outs.empty() ? "" : ", ") + std::string(to_string(o));
  kv("outputs", outs);
  kv("qgrid.extent", format_double(s.qgrid.extent));
  kv("qgrid.n", std::to_string(s.qgrid.n));
  kv("tol.ode", format_double(s.tol.ode));
  kv("tol.quad", format_double(s.tol.quad));
  kv("literal_paper_mode", s.literal_paper_mode ? "true" : "false");
  kv("ode.frame", to_string(s.ode_frame));
  kv("ode.weight_scaled_tolerance", s.weight_scaled_tolerance ? "true" : "false");
  kv("momentum_nodes", std::to_string(s.momentum_nodes));
  kv("nmax", s.nmax ? std::to_string(*s.nmax) : "auto");
  return os.str();
}

}  // namespace jcgrav
