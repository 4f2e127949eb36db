#pragma once

// Line-oriented scene files and the manufacturing-sensitivity sweep.
//
//   param   <name> <decimal>
//   mirror  <x1> <y1> <x2> <y2>
//   refract <x1> <y1> <x2> <y2> <eta>
//   absorb  <x1> <y1> <x2> <y2>
//   source  <x> <y> <angle_rad>
//   target  <x> <y> <radius>
//
// Any numeric field may be `$name`, resolved against the `param` lines (or
// overrides) when the template is instantiated.

#include <cstddef>
#include <future>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "precray/optics.hpp"
#include "precray/text.hpp"

namespace precray::optics {

/// A numeric field: literal value or parameter name.
using Field = std::variant<double, std::string>;

struct SceneTemplate {
  struct Entry {
    std::string keyword;
    std::vector<Field> fields;
    std::size_t line = 0;
  };

  std::vector<Entry> entries;
  std::map<std::string, double> params;  // declared defaults, in name order

  bool references(const std::string& name) const {
    for (const auto& e : entries)
      for (const auto& f : e.fields)
        if (const auto* p = std::get_if<std::string>(&f); p && *p == name) return true;
    return false;
  }
  bool knows(const std::string& name) const { return params.count(name) != 0 || references(name); }

  /// Resolves parameters (overrides win over declared values) and validates.
  /// Errors carry the offending line.
  Scene instantiate(const std::map<std::string, double>& overrides = {}) const {
    Scene scene;
    bool have_source = false;
    bool have_target = false;
    for (const auto& e : entries) {
      std::vector<double> v;
      for (const auto& f : e.fields) {
        if (const auto* d = std::get_if<double>(&f)) {
          v.push_back(*d);
          continue;
        }
        const auto& name = std::get<std::string>(f);
        if (auto it = overrides.find(name); it != overrides.end()) {
          v.push_back(it->second);
        } else if (auto jt = params.find(name); jt != params.end()) {
          v.push_back(jt->second);
        } else {
          throw ParseError(e.line, "undefined parameter '$" + name + "'");
        }
      }
      try {
        if (e.keyword == "source") {
          scene.source = {{v[0], v[1]}, v[2]};
          have_source = true;
        } else if (e.keyword == "target") {
          scene.target = {{v[0], v[1]}, v[2]};
          have_target = true;
          if (!(v[2] > 0.0)) throw std::invalid_argument("target radius must be positive");
        } else {
          Surface s;
          s.kind = e.keyword == "mirror"    ? SurfaceKind::Mirror
                   : e.keyword == "refract" ? SurfaceKind::Refract
                                            : SurfaceKind::Absorb;
          s.p1 = {v[0], v[1]};
          s.p2 = {v[2], v[3]};
          if (s.kind == SurfaceKind::Refract) s.eta = v[4];
          Scene one;
          one.surfaces.push_back(s);
          one.target.radius = 1.0;
          validate(one);
          scene.surfaces.push_back(s);
        }
      } catch (const std::invalid_argument& err) {
        throw ParseError(e.line, err.what());
      }
    }
    const std::size_t last = entries.empty() ? 0 : entries.back().line;
    if (!have_source) throw ParseError(last, "scene needs one 'source' line");
    if (!have_target) throw ParseError(last, "scene needs one 'target' line");
    try {
      validate(scene);
    } catch (const std::invalid_argument& err) {
      throw ParseError(last, err.what());
    }
    return scene;
  }
};

inline SceneTemplate parse_scene(std::istream& in) {
  static const std::map<std::string, std::size_t> arity = {
      {"mirror", 4}, {"refract", 5}, {"absorb", 4}, {"source", 3}, {"target", 3}};
  SceneTemplate tpl;
  std::string line;
  std::size_t lineno = 0;
  std::size_t sources = 0;
  std::size_t targets = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = text::tokenize(line);
    if (tok.empty()) continue;
    const std::string keyword(tok[0]);
    if (keyword == "param") {
      if (tok.size() != 3) throw ParseError(lineno, "expected 'param <name> <decimal>'");
      const auto value = text::parse_double(tok[2]);
      if (!value) throw ParseError(lineno, "malformed decimal literal '" + std::string(tok[2]) + "'");
      const std::string name(tok[1]);
      if (name.empty() || name.front() == '$') throw ParseError(lineno, "parameter names are written without '$'");
      if (!tpl.params.emplace(name, *value).second) throw ParseError(lineno, "parameter '" + name + "' redefined");
      continue;
    }
    const auto it = arity.find(keyword);
    if (it == arity.end()) throw ParseError(lineno, "unknown keyword '" + keyword + "'");
    if (tok.size() != it->second + 1)
      throw ParseError(lineno, "'" + keyword + "' takes " + std::to_string(it->second) + " values");
    SceneTemplate::Entry e{keyword, {}, lineno};
    for (std::size_t k = 1; k < tok.size(); ++k) {
      if (tok[k].front() == '$') {
        if (tok[k].size() == 1) throw ParseError(lineno, "empty parameter reference");
        e.fields.emplace_back(std::string(tok[k].substr(1)));
      } else if (const auto value = text::parse_double(tok[k])) {
        e.fields.emplace_back(*value);
      } else {
        throw ParseError(lineno, "malformed decimal literal '" + std::string(tok[k]) + "'");
      }
    }
    if (keyword == "source" && ++sources > 1) throw ParseError(lineno, "more than one 'source'");
    if (keyword == "target" && ++targets > 1) throw ParseError(lineno, "more than one 'target'");
    tpl.entries.push_back(std::move(e));
  }
  if (sources != 1) throw ParseError(lineno, "scene needs exactly one 'source' line");
  if (targets != 1) throw ParseError(lineno, "scene needs exactly one 'target' line");
  for (const auto& e : tpl.entries)
    for (const auto& f : e.fields)
      if (const auto* name = std::get_if<std::string>(&f); name && !tpl.params.count(*name))
        throw ParseError(e.line, "undefined parameter '$" + *name + "'");
  return tpl;
}

/// Vertices as `x y` lines, then the verdict line.
inline void write_trace(std::ostream& out, const Verdict& v) {
  for (const auto& p : v.path) out << text::full(p.x) << ' ' << text::full(p.y) << '\n';
  out << "verdict " << to_string(v.outcome) << " bounces " << v.bounces << " path_length "
      << text::full(v.path_length) << '\n';
}

struct SensitivityEntry {
  double value = 0.0;
  Verdict verdict;
};

struct SensitivityReport {
  std::vector<SensitivityEntry> entries;
  std::size_t flips = 0;  // adjacent entries whose outcomes differ
};

/// Exact traces of the template with `param` set to each value, in order.
inline SensitivityReport manufacturing_sensitivity(const SceneTemplate& tpl, const std::string& param,
                                                   std::span<const double> values, Budget budget = {},
                                                   unsigned threads = 1) {
  if (!tpl.knows(param)) throw std::invalid_argument("unknown parameter '" + param + "'");
  if (values.empty()) throw std::invalid_argument("need at least one approximation");
  // Instantiate up front so scene errors surface before any work starts.
  std::vector<Scene> scenes;
  for (double value : values) scenes.push_back(tpl.instantiate({{param, value}}));

  SensitivityReport report;
  report.entries.resize(values.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < values.size(); ++i) report.entries[i] = {values[i], trace(scenes[i], budget)};
  } else {
    std::vector<std::future<Verdict>> jobs;
    for (const auto& scene : scenes)
      jobs.push_back(std::async(std::launch::async, [&scene, budget] { return trace(scene, budget); }));
    for (std::size_t i = 0; i < values.size(); ++i) report.entries[i] = {values[i], jobs[i].get()};
  }
  for (std::size_t i = 1; i < report.entries.size(); ++i)
    if (report.entries[i].verdict.outcome != report.entries[i - 1].verdict.outcome) ++report.flips;
  return report;
}

}  // namespace precray::optics
