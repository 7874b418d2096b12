#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "activemedia/analysis.hpp"
#include "activemedia/weak_coupling.hpp"

namespace activemedia::cli {

namespace {

constexpr std::array<std::pair<ExperimentKind, const char*>, 10> kKindNames{{
    {ExperimentKind::Simulate, "simulate"},
    {ExperimentKind::Rotation, "rotation"},
    {ExperimentKind::Classify, "classify"},
    {ExperimentKind::Boundary, "boundary"},
    {ExperimentKind::Heterogeneity, "heterogeneity"},
    {ExperimentKind::Bistability, "bistability"},
    {ExperimentKind::Pitchfork, "pitchfork"},
    {ExperimentKind::WeakCoupling, "weakcoupling"},
    {ExperimentKind::MLScan, "ml-scan"},
    {ExperimentKind::LongChain, "longchain"},
}};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a number, got '" + text + "'");
  }
  return v;
}

template <class I>
I parse_integer(const std::string& text) {
  const std::string s = trim(text);
  I v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected an integer, got '" + text + "'");
  }
  return v;
}

std::string method_name(IntegratorConfig::Method m) { return m == IntegratorConfig::Method::Rk4 ? "rk4" : "dp45"; }

IntegratorConfig::Method method_from_string(const std::string& s) {
  if (s == "rk4") return IntegratorConfig::Method::Rk4;
  if (s == "dp45") return IntegratorConfig::Method::DormandPrince45;
  throw std::invalid_argument("expected rk4 or dp45, got '" + s + "'");
}

using Json = nlohmann::json;
using Pair = std::pair<double, double>;
using OptPair = std::optional<Pair>;

template <class T>
struct Codec;

template <>
struct Codec<double> {
  static double parse(const std::string& s) { return parse_double(s); }
  static std::string text(double v) { return format_double(v); }
  static Json json(double v) { return v; }
  static double from_json(const Json& j) { return j.get<double>(); }
};

template <>
struct Codec<int> {
  static int parse(const std::string& s) { return parse_integer<int>(s); }
  static std::string text(int v) { return std::to_string(v); }
  static Json json(int v) { return v; }
  static int from_json(const Json& j) { return j.get<int>(); }
};

template <>
struct Codec<std::uint64_t> {
  static std::uint64_t parse(const std::string& s) { return parse_integer<std::uint64_t>(s); }
  static std::string text(std::uint64_t v) { return std::to_string(v); }
  static Json json(std::uint64_t v) { return v; }
  static std::uint64_t from_json(const Json& j) { return j.get<std::uint64_t>(); }
};

template <>
struct Codec<bool> {
  static bool parse(const std::string& text) {
    const std::string s = trim(text);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw std::invalid_argument("expected true or false, got '" + text + "'");
  }
  static std::string text(bool v) { return v ? "true" : "false"; }
  static Json json(bool v) { return v; }
  static bool from_json(const Json& j) { return j.get<bool>(); }
};

template <>
struct Codec<std::string> {
  static std::string parse(const std::string& s) { return trim(s); }
  static std::string text(const std::string& v) { return v; }
  static Json json(const std::string& v) { return v; }
  static std::string from_json(const Json& j) { return j.get<std::string>(); }
};

template <>
struct Codec<std::vector<double>> {
  static std::vector<double> parse(const std::string& s) { return parse_list(s); }
  static std::string text(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
    return out;
  }
  static Json json(const std::vector<double>& v) { return v; }
  static std::vector<double> from_json(const Json& j) { return j.get<std::vector<double>>(); }
};

template <>
struct Codec<Pair> {
  static Pair parse(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 2) throw std::invalid_argument("expected two comma-separated numbers, got '" + s + "'");
    return {parse_double(parts[0]), parse_double(parts[1])};
  }
  static std::string text(const Pair& v) { return format_double(v.first) + ", " + format_double(v.second); }
  static Json json(const Pair& v) { return Json::array({v.first, v.second}); }
  static Pair from_json(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
};

template <>
struct Codec<OptPair> {
  static OptPair parse(const std::string& s) {
    if (trim(s).empty()) return std::nullopt;
    return Codec<Pair>::parse(s);
  }
  static std::string text(const OptPair& v) { return v ? Codec<Pair>::text(*v) : std::string{}; }
  static Json json(const OptPair& v) { return v ? Codec<Pair>::json(*v) : Json(nullptr); }
  static OptPair from_json(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return Codec<Pair>::from_json(j);
  }
};

template <>
struct Codec<ExperimentKind> {
  static ExperimentKind parse(const std::string& s) { return kind_from_string(trim(s)); }
  static std::string text(ExperimentKind v) { return to_string(v); }
  static Json json(ExperimentKind v) { return to_string(v); }
  static ExperimentKind from_json(const Json& j) { return kind_from_string(j.get<std::string>()); }
};

template <>
struct Codec<Model> {
  static Model parse(const std::string& s) { return model_from_string(trim(s)); }
  static std::string text(Model v) { return to_string(v); }
  static Json json(Model v) { return to_string(v); }
  static Model from_json(const Json& j) { return model_from_string(j.get<std::string>()); }
};

template <>
struct Codec<IntegratorConfig::Method> {
  static IntegratorConfig::Method parse(const std::string& s) { return method_from_string(trim(s)); }
  static std::string text(IntegratorConfig::Method v) { return method_name(v); }
  static Json json(IntegratorConfig::Method v) { return method_name(v); }
  static IntegratorConfig::Method from_json(const Json& j) { return method_from_string(j.get<std::string>()); }
};

struct Field {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> parse;
  std::function<std::string(const ExperimentConfig&)> text;
  std::function<Json(const ExperimentConfig&)> json;
  std::function<void(ExperimentConfig&, const Json&)> from_json;
};

template <class T, class Access>
Field make_field(std::string section, std::string key, Access access) {
  Field f;
  f.section = std::move(section);
  f.key = std::move(key);
  f.parse = [access](ExperimentConfig& c, const std::string& s) { access(c) = Codec<T>::parse(s); };
  f.text = [access](const ExperimentConfig& c) { return Codec<T>::text(access(const_cast<ExperimentConfig&>(c))); };
  f.json = [access](const ExperimentConfig& c) { return Codec<T>::json(access(const_cast<ExperimentConfig&>(c))); };
  f.from_json = [access](ExperimentConfig& c, const Json& j) { access(c) = Codec<T>::from_json(j); };
  return f;
}

#define AM_FIELD(T, SECTION, KEY, EXPR) \
  make_field<T>(SECTION, KEY, [](ExperimentConfig& c) -> T& { return EXPR; })

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(AM_FIELD(ExperimentKind, "experiment", "kind", c.kind));
    f.push_back(AM_FIELD(std::string, "experiment", "name", c.name));
    f.push_back(AM_FIELD(std::uint64_t, "experiment", "seed", c.seed));
    f.push_back(AM_FIELD(int, "experiment", "n_ic", c.n_ic));
    f.push_back(AM_FIELD(double, "experiment", "x0", c.x0));
    f.push_back(AM_FIELD(double, "experiment", "z0", c.z0));
    f.push_back(AM_FIELD(std::vector<double>, "experiment", "c_oe_values", c.c_oe_values));
    f.push_back(AM_FIELD(std::vector<double>, "experiment", "c_eo_values", c.c_eo_values));
    f.push_back(AM_FIELD(double, "experiment", "c_eo_lo", c.c_eo_lo));
    f.push_back(AM_FIELD(double, "experiment", "c_eo_hi", c.c_eo_hi));
    f.push_back(AM_FIELD(double, "experiment", "tol", c.tol));
    f.push_back(AM_FIELD(std::string, "experiment", "predicate", c.predicate));
    f.push_back(AM_FIELD(std::string, "experiment", "warm_start", c.warm_start));
    f.push_back(AM_FIELD(Pair, "experiment", "line_start", c.line_start));
    f.push_back(AM_FIELD(Pair, "experiment", "line_end", c.line_end));
    f.push_back(AM_FIELD(int, "experiment", "samples", c.samples));
    f.push_back(AM_FIELD(std::string, "experiment", "target", c.target));
    f.push_back(AM_FIELD(double, "experiment", "d_lo", c.d_lo));
    f.push_back(AM_FIELD(double, "experiment", "d_hi", c.d_hi));
    f.push_back(AM_FIELD(bool, "experiment", "poincare", c.poincare));
    f.push_back(AM_FIELD(int, "experiment", "poincare_coordinate", c.poincare_coordinate));
    f.push_back(AM_FIELD(double, "experiment", "poincare_level", c.poincare_level));
    f.push_back(AM_FIELD(double, "experiment", "section_tol", c.section_tol));
    f.push_back(AM_FIELD(bool, "experiment", "lyapunov", c.lyapunov));
    f.push_back(AM_FIELD(int, "experiment", "n_seeds", c.n_seeds));
    f.push_back(AM_FIELD(bool, "experiment", "critical", c.critical));
    f.push_back(AM_FIELD(std::vector<double>, "experiment", "b_values", c.b_values));
    f.push_back(AM_FIELD(std::vector<double>, "experiment", "c_ee_values", c.c_ee_values));
    f.push_back(AM_FIELD(std::vector<double>, "experiment", "g_oe_values", c.g_oe_values));
    f.push_back(AM_FIELD(std::vector<double>, "experiment", "g_eo_values", c.g_eo_values));

    f.push_back(AM_FIELD(Model, "system", "model", c.model));
    f.push_back(AM_FIELD(int, "system", "n_excitable", c.chain.n_excitable));
    f.push_back(AM_FIELD(bool, "system", "second_oscillator", c.chain.second_oscillator));
    f.push_back(AM_FIELD(double, "system", "omega", c.chain.omega));
    f.push_back(AM_FIELD(double, "system", "d", c.chain.d));
    f.push_back(AM_FIELD(OptPair, "system", "end_frequencies", c.chain.end_frequencies));
    f.push_back(AM_FIELD(double, "system", "b", c.chain.b));
    f.push_back(AM_FIELD(double, "system", "c_oe", c.chain.c_oe));
    f.push_back(AM_FIELD(double, "system", "c_eo", c.chain.c_eo));
    f.push_back(AM_FIELD(double, "system", "c_ee", c.chain.c_ee));
    f.push_back(AM_FIELD(double, "system", "second_harmonic", c.chain.second_harmonic));
    f.push_back(AM_FIELD(int, "system", "ml_n_excitable", c.ml.n_excitable));
    f.push_back(AM_FIELD(double, "system", "i_oscillator", c.ml.I_oscillator));
    f.push_back(AM_FIELD(double, "system", "i_excitable", c.ml.I_excitable));
    f.push_back(AM_FIELD(double, "system", "g_oe", c.ml.g_oe));
    f.push_back(AM_FIELD(double, "system", "g_eo", c.ml.g_eo));
    f.push_back(AM_FIELD(double, "system", "g_ee", c.ml.g_ee));

    f.push_back(AM_FIELD(IntegratorConfig::Method, "integrator", "method", c.integrator.method));
    f.push_back(AM_FIELD(double, "integrator", "dt", c.integrator.dt));
    f.push_back(AM_FIELD(double, "integrator", "abs_tol", c.integrator.abs_tol));
    f.push_back(AM_FIELD(double, "integrator", "rel_tol", c.integrator.rel_tol));
    f.push_back(AM_FIELD(double, "integrator", "t_transient", c.integrator.t_transient));
    f.push_back(AM_FIELD(double, "integrator", "t_record", c.integrator.t_record));
    f.push_back(AM_FIELD(double, "integrator", "sample_interval", c.integrator.sample_interval));
    f.push_back(AM_FIELD(bool, "integrator", "record_states", c.integrator.record_states));

    f.push_back(AM_FIELD(std::string, "output", "dir", c.out_dir));
    f.push_back(AM_FIELD(std::string, "output", "prefix", c.prefix));
    f.push_back(AM_FIELD(bool, "output", "write_trajectory", c.write_trajectory));
    return f;
  }();
  return fields;
}

#undef AM_FIELD

constexpr std::array<const char*, 4> kSections{"experiment", "system", "integrator", "output"};

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : schema()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

void apply(ExperimentConfig& config, const Field& field, const std::string& value) {
  try {
    field.parse(config, value);
  } catch (const std::exception& e) {
    throw ConfigError(field.section + "." + field.key + ": " + e.what());
  }
}

void fail_if(bool bad, const std::string& where, const std::string& what) {
  if (bad) throw ConfigError(where + ": " + what);
}

void check_unit_box(const std::pair<double, double>& p, const std::string& where) {
  const bool ok = std::isfinite(p.first) && std::isfinite(p.second) && p.first >= 0.0 && p.second >= 0.0;
  fail_if(!ok, where, "coupling values must be finite and nonnegative");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind kind_from_string(const std::string& text) {
  for (const auto& [k, name] : kKindNames) {
    if (text == name) return k;
  }
  throw std::invalid_argument("unknown experiment kind '" + text + "'");
}

std::string to_string(Model model) { return model == Model::Phase ? "phase" : "ml"; }

Model model_from_string(const std::string& text) {
  if (text == "phase") return Model::Phase;
  if (text == "ml") return Model::MorrisLecar;
  throw std::invalid_argument("expected phase or ml, got '" + text + "'");
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

std::vector<double> parse_list(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) return {};
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw std::invalid_argument("range must be lo:hi:n, got '" + text + "'");
    const double lo = parse_double(parts[0]);
    const double hi = parse_double(parts[1]);
    const int n = parse_integer<int>(parts[2]);
    if (n < 1) throw std::invalid_argument("range count must be positive, got '" + text + "'");
    if (n == 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    out.back() = hi;
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_double(item));
  return out;
}

ProbePredicate make_predicate(const std::string& text) {
  if (text == "fires") return predicates::excitable_fires();
  if (text == "one-to-one") return predicates::one_to_one();
  if (text == "fixed-point") return predicates::fixed_point();
  if (text.rfind("ratio>=", 0) == 0) return predicates::ratio_at_least(parse_double(text.substr(7)));
  if (text.rfind("ratio>", 0) == 0) return predicates::ratio_above(parse_double(text.substr(6)));
  const LockPattern p = pattern_from_label(text);
  return predicates::pattern_is(p.n, p.m, p.relation);
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  // The ini reader only knows whole-line comments; drop trailing ones too.
  std::ostringstream cleaned;
  for (std::string line; std::getline(in, line);) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos && hash > 0 && line.find_first_not_of(" \t") < hash) line.erase(hash);
    cleaned << line << '\n';
  }
  std::istringstream text(cleaned.str());
  pt::ptree tree;
  try {
    pt::read_ini(text, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::set<std::string> seen;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' is outside any section");
    if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!find_field(section, key)) throw ConfigError(section + "." + key + ": unknown key");
    }
  }

  ExperimentConfig config;
  const auto apply_section = [&](const std::string& section) {
    const auto child = tree.get_child_optional(section);
    if (!child) return;
    for (const auto& [key, value] : *child) apply(config, *find_field(section, key), value.data());
  };
  const auto experiment = tree.get_child_optional("experiment");
  if (!experiment || !experiment->get_child_optional("kind")) throw ConfigError("experiment.kind: required");
  apply_section("experiment");
  apply_section("system");
  if (config.model == Model::MorrisLecar) config.integrator = IntegratorConfig::ml_defaults();
  apply_section("integrator");
  apply_section("output");
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  return parse_config(in);
}

std::string to_ini(const ExperimentConfig& config) {
  std::ostringstream os;
  for (const char* section : kSections) {
    os << '[' << section << "]\n";
    for (const auto& f : schema()) {
      if (f.section == section) os << f.key << " = " << f.text(config) << '\n';
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const ExperimentConfig& config) {
  Json j = Json::object();
  for (const auto& f : schema()) j[f.section][f.key] = f.json(config);
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  for (const auto& [section, body] : j.items()) {
    for (const auto& [key, value] : body.items()) {
      const Field* f = find_field(section, key);
      if (!f) throw ConfigError(section + "." + key + ": unknown key");
      try {
        f->from_json(config, value);
      } catch (const std::exception& e) {
        throw ConfigError(section + "." + key + ": " + e.what());
      }
    }
  }
  return config;
}

void validate(const ExperimentConfig& c) {
  const auto wrap = [](const std::string& section, const auto& check) {
    try {
      check();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(section + "." + e.what());
    }
  };
  fail_if(c.name.empty(), "experiment.name", "must not be empty");
  fail_if(c.n_ic < 1, "experiment.n_ic", "must be at least 1");
  fail_if(!(c.tol > 0.0), "experiment.tol", "must be positive");
  fail_if(!(c.section_tol > 0.0), "experiment.section_tol", "must be positive");
  fail_if(c.n_seeds < 1, "experiment.n_seeds", "must be at least 1");
  fail_if(!std::isfinite(c.x0), "experiment.x0", "must be finite");
  fail_if(!std::isfinite(c.z0), "experiment.z0", "must be finite");
  fail_if(c.warm_start != "branch" && c.warm_start != "cold", "experiment.warm_start", "must be branch or cold");
  fail_if(c.out_dir.empty(), "output.dir", "must not be empty");
  for (const auto* list : {&c.c_oe_values, &c.c_eo_values, &c.b_values, &c.c_ee_values, &c.g_oe_values,
                           &c.g_eo_values}) {
    for (double v : *list) fail_if(!std::isfinite(v), "experiment", "grid values must be finite");
  }
  for (double v : c.c_oe_values) fail_if(v < 0.0, "experiment.c_oe_values", "must be nonnegative");
  for (double v : c.c_eo_values) fail_if(v < 0.0, "experiment.c_eo_values", "must be nonnegative");
  wrap("integrator", [&] { c.integrator.validate(); });

  const bool ml = c.model == Model::MorrisLecar;
  std::size_t dimension = 0;
  if (ml) {
    wrap("system", [&] { c.ml.validate(); });
    dimension = c.ml.dimension();
  } else {
    wrap("system", [&] { c.chain.validate(); });
    dimension = c.chain.dimension();
  }
  const std::string kind = "experiment.kind";
  switch (c.kind) {
    case ExperimentKind::Simulate:
    case ExperimentKind::Classify:
      fail_if(c.poincare_coordinate < 0 || static_cast<std::size_t>(c.poincare_coordinate) >= dimension,
              "experiment.poincare_coordinate", "outside the state dimension " + std::to_string(dimension));
      fail_if(ml && c.lyapunov, "experiment.lyapunov", "only available for the phase model");
      if (c.lyapunov) {
        fail_if(!(c.integrator.t_record >= 1.0), "integrator.t_record", "must be at least 1 for a Lyapunov estimate");
      }
      break;
    case ExperimentKind::Rotation:
      fail_if(ml, kind, "rotation needs the phase model");
      fail_if(!(c.integrator.t_record > 0.0), "integrator.t_record", "must be positive");
      break;
    case ExperimentKind::Boundary:
      fail_if(ml, kind, "boundary needs the phase model");
      fail_if(c.c_oe_values.empty(), "experiment.c_oe_values", "required for boundary");
      fail_if(!(c.c_eo_hi > c.c_eo_lo) || c.c_eo_lo < 0.0, "experiment.c_eo_lo",
              "need 0 <= c_eo_lo < c_eo_hi");
      try {
        make_predicate(c.predicate);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("experiment.predicate: ") + e.what());
      }
      break;
    case ExperimentKind::Heterogeneity: {
      fail_if(ml, kind, "heterogeneity needs the phase model");
      fail_if(!c.chain.second_oscillator, "system.second_oscillator", "heterogeneity needs both oscillators");
      fail_if(!(c.d_hi > c.d_lo) || c.d_lo < 0.0, "experiment.d_lo", "need 0 <= d_lo < d_hi");
      check_unit_box(c.line_start, "experiment.line_start");
      check_unit_box(c.line_end, "experiment.line_end");
      try {
        HomotopyLine{c.line_start, c.line_end, c.samples}.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("experiment.line_start: ") + e.what());
      }
      try {
        pattern_from_label(c.target);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("experiment.target: ") + e.what());
      }
      break;
    }
    case ExperimentKind::Bistability:
      fail_if(ml, kind, "bistability needs the phase model; use ml-scan for the ML network");
      fail_if(c.c_oe_values.empty() != c.c_eo_values.empty(), "experiment.c_oe_values",
              "give both c_oe_values and c_eo_values for a grid, or neither");
      break;
    case ExperimentKind::Pitchfork:
      fail_if(ml, kind, "pitchfork needs the phase model");
      fail_if(!c.chain.second_oscillator || c.chain.n_excitable != 2, "system.n_excitable",
              "pitchfork needs an OEEO chain");
      fail_if(c.chain.end_frequencies.has_value() || c.chain.d != 0.0, "system.d", "pitchfork needs d = 0");
      fail_if(c.c_eo_values.empty(), "experiment.c_eo_values", "required for pitchfork");
      break;
    case ExperimentKind::WeakCoupling: {
      fail_if(ml, kind, "weakcoupling needs the phase model");
      const std::vector<double> coe = c.c_oe_values.empty() ? std::vector<double>{c.chain.c_oe} : c.c_oe_values;
      for (double v : coe) {
        wrap("experiment", [&] {
          ReductionInputs in;
          in.c_oe = v;
          in.c_ee = c.chain.c_ee;
          in.b = c.chain.b;
          in.second_harmonic = c.chain.second_harmonic;
          in.validate();
        });
      }
      for (double v : c.b_values) fail_if(!(v > 1.0), "experiment.b_values", "must exceed 1");
      for (double v : c.c_ee_values) fail_if(v < 0.0, "experiment.c_ee_values", "must be nonnegative");
      break;
    }
    case ExperimentKind::MLScan:
      fail_if(!ml, kind, "ml-scan needs model = ml");
      fail_if(c.g_oe_values.empty() || c.g_eo_values.empty(), "experiment.g_oe_values",
              "g_oe_values and g_eo_values are required for ml-scan");
      for (double v : c.g_oe_values) fail_if(v < 0.0, "experiment.g_oe_values", "must be nonnegative");
      for (double v : c.g_eo_values) fail_if(v < 0.0, "experiment.g_eo_values", "must be nonnegative");
      break;
    case ExperimentKind::LongChain:
      fail_if(ml, kind, "longchain needs the phase model");
      fail_if(!c.chain.second_oscillator, "system.second_oscillator", "longchain needs both oscillators");
      break;
  }
}

}  // namespace activemedia::cli
