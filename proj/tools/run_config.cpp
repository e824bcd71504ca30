#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "geomech/errors.hpp"
#include "geomech/fieldcalc.hpp"
#include "geomech/geodesic.hpp"

namespace geomech::cli {

namespace {

struct Entry {
  std::string value;
  std::size_t line;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t j = s.find_first_of(" \t", i);
    if (i < s.size()) out.push_back(s.substr(i, j == std::string_view::npos ? s.size() - i : j - i));
    i = j == std::string_view::npos ? s.size() : j;
  }
  return out;
}

double to_double(std::string_view s, const Entry& e) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(e.line, "not a number: '" + std::string(s) + "'");
  return v;
}

template <class Int>
Int to_int(std::string_view s, const Entry& e) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(e.line, "not an integer: '" + std::string(s) + "'");
  return v;
}

std::vector<double> to_list(const Entry& e, std::size_t expected = 0) {
  std::vector<double> out;
  for (auto tok : split_ws(e.value)) out.push_back(to_double(tok, e));
  if (out.empty()) throw ParseError(e.line, "empty list");
  if (expected != 0 && out.size() != expected)
    throw ParseError(e.line, "expected " + std::to_string(expected) + " numbers, got " + std::to_string(out.size()));
  return out;
}

Vec3d to_vec3(const Entry& e) {
  const auto v = to_list(e, 3);
  return {v[0], v[1], v[2]};
}

const std::map<std::string_view, Experiment> kExperiments{
    {"rigidbody", Experiment::RigidBody},
    {"fluid2d", Experiment::Fluid2d},
    {"helmholtz", Experiment::Helmholtz},
    {"geodesic-check", Experiment::GeodesicCheck},
    {"variation-so3", Experiment::VariationSo3},
};

const std::vector<std::string_view> kCommon{"experiment", "seed", "output_dir", "emit_svg"};

const std::map<Experiment, std::vector<std::string_view>> kSpecific{
    {Experiment::RigidBody, {"dt", "t_end", "inertia", "mass", "omega0", "v0"}},
    {Experiment::Fluid2d, {"grid_n", "dt", "t_end", "initial", "max_mode"}},
    {Experiment::Helmholtz, {"grid_n", "max_mode"}},
    {Experiment::GeodesicCheck, {"grid_n", "dt", "t_end", "max_mode", "epsilons", "dynamics"}},
    {Experiment::VariationSo3, {"a", "b", "h", "family"}},
};

bool known_key(std::string_view key) {
  if (std::find(kCommon.begin(), kCommon.end(), key) != kCommon.end()) return true;
  for (const auto& [ex, keys] : kSpecific)
    if (std::find(keys.begin(), keys.end(), key) != keys.end()) return true;
  return false;
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  for (const auto& [name, value] : kExperiments)
    if (value == e) return name;
  return "?";
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!known_key(key)) throw ParseError(lineno, "unknown key '" + key + "'");
    if (value.empty()) throw ParseError(lineno, "empty value for '" + key + "'");
    if (!entries.emplace(key, Entry{std::string(value), lineno}).second)
      throw ParseError(lineno, "duplicate key '" + key + "'");
  }

  auto find = [&](const std::string& key) -> const Entry* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const Entry& {
    const Entry* e = find(key);
    if (!e) throw MissingKey(key);
    return *e;
  };

  RunConfig c;
  if (const Entry* e = find("grid_n")) {
    c.grid_n = to_int<int>(e->value, *e);
    try {
      Grid{c.grid_n};
    } catch (const InvalidGrid& err) {
      throw ParseError(e->line, err.what());
    }
  }
  if (const Entry* e = find("dt")) {
    c.dt = to_double(e->value, *e);
    if (c.dt <= 0) throw ParseError(e->line, "dt must be positive");
  }
  if (const Entry* e = find("t_end")) {
    c.t_end = to_double(e->value, *e);
    if (c.t_end <= 0) throw ParseError(e->line, "t_end must be positive");
  }
  if (const Entry* e = find("seed")) c.seed = to_int<std::uint64_t>(e->value, *e);
  if (const Entry* e = find("output_dir")) c.output_dir = e->value;
  if (const Entry* e = find("emit_svg")) {
    if (e->value != "true" && e->value != "false") throw ParseError(e->line, "emit_svg must be true or false");
    c.emit_svg = e->value == "true";
  }

  const Entry& ex = require("experiment");
  const auto it = kExperiments.find(ex.value);
  if (it == kExperiments.end()) throw ParseError(ex.line, "unknown experiment '" + ex.value + "'");
  c.experiment = it->second;
  const auto& specific = kSpecific.at(c.experiment);
  for (const auto& [key, e] : entries) {
    if (std::find(kCommon.begin(), kCommon.end(), key) == kCommon.end() &&
        std::find(specific.begin(), specific.end(), key) == specific.end())
      throw ParseError(e.line, "key '" + key + "' does not apply to " + ex.value);
  }
  if (c.experiment == Experiment::GeodesicCheck) {
    if (const Entry* e = find("t_end"); e && c.t_end != 1.0)
      throw ParseError(e->line, "geodesic-check paths run over [0, 1]; t_end must be 1");
    c.t_end = 1.0;
  }
  if (c.experiment == Experiment::Helmholtz) c.max_mode = 12;
  c.epsilons = PerturbationSpec{}.epsilons;

  switch (c.experiment) {
    case Experiment::RigidBody: {
      const Entry& in = require("inertia");
      const auto v = to_list(in, 6);
      std::copy(v.begin(), v.end(), c.inertia.begin());
      const Entry& m = require("mass");
      c.mass = to_double(m.value, m);
      if (c.mass <= 0) throw ParseError(m.line, "mass must be positive");
      c.omega0 = to_vec3(require("omega0"));
      if (const Entry* e = find("v0")) c.v0 = to_vec3(*e);
      break;
    }
    case Experiment::Fluid2d:
      if (const Entry* e = find("initial")) {
        if (e->value != "random" && e->value != "taylor-green")
          throw ParseError(e->line, "initial must be random or taylor-green");
        c.initial = e->value;
      }
      [[fallthrough]];
    case Experiment::Helmholtz:
    case Experiment::GeodesicCheck:
      if (const Entry* e = find("max_mode")) {
        c.max_mode = to_int<int>(e->value, *e);
        if (c.max_mode < 1) throw ParseError(e->line, "max_mode must be at least 1");
      }
      if (c.experiment != Experiment::GeodesicCheck) break;
      if (const Entry* e = find("epsilons")) {
        c.epsilons = to_list(*e);
        PerturbationSpec spec;
        spec.epsilons = c.epsilons;
        try {
          spec.validate();
        } catch (const Error& err) {
          throw ParseError(e->line, err.what());
        }
      }
      if (const Entry* e = find("dynamics")) {
        if (e->value != "euler" && e->value != "frozen") throw ParseError(e->line, "dynamics must be euler or frozen");
        c.dynamics = e->value;
      }
      break;
    case Experiment::VariationSo3:
      if (const Entry* e = find("a")) c.a = to_vec3(*e);
      if (const Entry* e = find("b")) c.b = to_vec3(*e);
      if (const Entry* e = find("h")) {
        c.h = to_double(e->value, *e);
        if (c.h <= 0) throw ParseError(e->line, "h must be positive");
      }
      if (const Entry* e = find("family")) {
        if (e->value != "exponential" && e->value != "product")
          throw ParseError(e->line, "family must be exponential or product");
        c.family = e->value;
      }
      break;
  }
  return c;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  auto vec = [](const Vec3d& v) { return std::vector<double>{v.x(), v.y(), v.z()}; };
  nlohmann::ordered_json j;
  j["experiment"] = experiment_name(c.experiment);
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["emit_svg"] = c.emit_svg;
  switch (c.experiment) {
    case Experiment::RigidBody:
      j["dt"] = c.dt;
      j["t_end"] = c.t_end;
      j["inertia"] = c.inertia;
      j["mass"] = c.mass;
      j["omega0"] = vec(c.omega0);
      j["v0"] = vec(c.v0);
      break;
    case Experiment::Fluid2d:
      j["grid_n"] = c.grid_n;
      j["dt"] = c.dt;
      j["t_end"] = c.t_end;
      j["initial"] = c.initial;
      j["max_mode"] = c.max_mode;
      break;
    case Experiment::Helmholtz:
      j["grid_n"] = c.grid_n;
      j["max_mode"] = c.max_mode;
      break;
    case Experiment::GeodesicCheck:
      j["grid_n"] = c.grid_n;
      j["dt"] = c.dt;
      j["t_end"] = c.t_end;
      j["max_mode"] = c.max_mode;
      j["epsilons"] = c.epsilons;
      j["dynamics"] = c.dynamics;
      break;
    case Experiment::VariationSo3:
      j["a"] = vec(c.a);
      j["b"] = vec(c.b);
      j["h"] = c.h;
      j["family"] = c.family;
      break;
  }
  return j;
}

}  // namespace geomech::cli
