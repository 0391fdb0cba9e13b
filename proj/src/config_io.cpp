#include "beamfrac/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "beamfrac/run_io.hpp"

namespace beamfrac {

namespace {

struct RawEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
  bool consumed = false;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Known keys per section (union over scenarios; per-scenario membership is
// enforced after parsing so stray keys report their line).
const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"scenario", {"kind"}},
      {"geometry", {"length", "radius"}},
      {"material", {"youngs_modulus", "density"}},
      {"cohesive",
       {"strength", "fracture_energy", "mode_mixity",
        "bending_in_initiation"}},
      {"penalty", {"beta_p", "beta_t"}},
      {"mesh", {"element_size"}},
      {"solver",
       {"kind", "load_steps", "max_iters", "tol_rel", "tol_abs_scale",
        "time_step", "duration", "safety_factor"}},
      {"loading",
       {"end_moment", "applied_displacement", "perturbation_force", "sigma_f",
        "load_rate", "initial_curvature", "preload_steps"}},
      {"output", {"history_stride", "snapshot_stride", "vtk"}},
  };
  return s;
}

double parse_double(const RawEntry& e) {
  const std::string& v = e.value;
  double out = 0.0;
  const char* last = v.data() + v.size();
  const auto res = std::from_chars(v.data(), last, out);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("malformed number '" + v + "' for key '" + e.key + "'",
                      e.line);
  }
  return out;
}

int parse_int(const RawEntry& e) {
  const std::string& v = e.value;
  int out = 0;
  const char* last = v.data() + v.size();
  const auto res = std::from_chars(v.data(), last, out);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("malformed integer '" + v + "' for key '" + e.key + "'",
                      e.line);
  }
  return out;
}

bool parse_bool(const RawEntry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ConfigError(
      "malformed boolean '" + e.value + "' for key '" + e.key +
          "' (expected true or false)",
      e.line);
}

class EntryTable {
 public:
  explicit EntryTable(std::vector<RawEntry>& entries) : entries_(entries) {}

  RawEntry* find(const std::string& section, const std::string& key) {
    for (RawEntry& e : entries_) {
      if (e.section == section && e.key == key) {
        e.consumed = true;
        return &e;
      }
    }
    return nullptr;
  }

  RawEntry& require(const std::string& section, const std::string& key) {
    RawEntry* e = find(section, key);
    if (!e) {
      throw ConfigError("missing required key '" + key + "' in [" + section +
                        "]");
    }
    return *e;
  }

  bool has_section(const std::string& section) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const RawEntry& e) { return e.section == section; });
  }

  void reject_unconsumed(const std::string& scenario) const {
    for (const RawEntry& e : entries_) {
      if (!e.consumed) {
        throw ConfigError("key '" + e.key + "' in [" + e.section +
                              "] is not used by scenario '" + scenario + "'",
                          e.line);
      }
    }
  }

 private:
  std::vector<RawEntry>& entries_;
};

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  std::vector<RawEntry> entries;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  int section_line = 0;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("unterminated section header", line_no);
      }
      section = trim(line.substr(1, line.size() - 2));
      if (schema().find(section) == schema().end()) {
        throw ConfigError("unknown section [" + section + "]", line_no);
      }
      section_line = line_no;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value'", line_no);
    }
    if (section.empty()) {
      throw ConfigError("key outside of any section", line_no);
    }
    RawEntry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty() || e.value.empty()) {
      throw ConfigError("expected 'key = value'", line_no);
    }
    const auto& known = schema().at(section);
    if (known.find(e.key) == known.end()) {
      throw ConfigError("unknown key '" + e.key + "' in [" + section + "]",
                        line_no);
    }
    if (!seen.insert({section, e.key}).second) {
      throw ConfigError("duplicate key '" + e.key + "' in [" + section + "]",
                        line_no);
    }
    entries.push_back(std::move(e));
  }
  (void)section_line;

  EntryTable tab(entries);
  if (!tab.has_section("scenario")) {
    throw ConfigError("missing [scenario] section");
  }

  ScenarioConfig cfg;
  cfg.kind = scenario_from_string(tab.require("scenario", "kind").value);
  cfg.length = parse_double(tab.require("geometry", "length"));
  cfg.radius = parse_double(tab.require("geometry", "radius"));
  cfg.youngs_modulus = parse_double(tab.require("material", "youngs_modulus"));
  cfg.density = parse_double(tab.require("material", "density"));
  cfg.element_size = parse_double(tab.require("mesh", "element_size"));

  if (RawEntry* e = tab.find("penalty", "beta_p")) cfg.beta_p = parse_double(*e);
  if (RawEntry* e = tab.find("penalty", "beta_t")) cfg.beta_t = parse_double(*e);

  cfg.has_cohesive = tab.has_section("cohesive");
  if (cfg.has_cohesive) {
    cfg.strength = parse_double(tab.require("cohesive", "strength"));
    cfg.fracture_energy =
        parse_double(tab.require("cohesive", "fracture_energy"));
    if (RawEntry* e = tab.find("cohesive", "mode_mixity")) {
      cfg.mode_mixity = parse_double(*e);
    }
    if (RawEntry* e = tab.find("cohesive", "bending_in_initiation")) {
      cfg.bending_in_initiation = parse_bool(*e);
    }
  }

  RawEntry& solver_kind = tab.require("solver", "kind");
  cfg.solver_kind = solver_kind.value;
  if (cfg.solver_kind != "newton" && cfg.solver_kind != "explicit") {
    throw ConfigError("solver kind must be 'newton' or 'explicit'",
                      solver_kind.line);
  }
  if (RawEntry* e = tab.find("solver", "load_steps")) {
    cfg.load_steps = parse_int(*e);
  }
  if (RawEntry* e = tab.find("solver", "max_iters")) {
    cfg.max_iters = parse_int(*e);
  }
  if (RawEntry* e = tab.find("solver", "tol_rel")) cfg.tol_rel = parse_double(*e);
  if (RawEntry* e = tab.find("solver", "tol_abs_scale")) {
    cfg.tol_abs_scale = parse_double(*e);
  }
  if (RawEntry* e = tab.find("solver", "time_step")) {
    cfg.time_step = parse_double(*e);
  }
  if (RawEntry* e = tab.find("solver", "duration")) {
    cfg.duration = parse_double(*e);
  }
  if (RawEntry* e = tab.find("solver", "safety_factor")) {
    cfg.safety_factor = parse_double(*e);
  }

  switch (cfg.kind) {
    case ScenarioKind::cantilever:
      if (RawEntry* e = tab.find("loading", "end_moment")) {
        cfg.end_moment = parse_double(*e);
      }
      break;
    case ScenarioKind::buckling:
      cfg.applied_displacement =
          parse_double(tab.require("loading", "applied_displacement"));
      cfg.perturbation_force =
          parse_double(tab.require("loading", "perturbation_force"));
      break;
    case ScenarioKind::spall:
      cfg.sigma_f = parse_double(tab.require("loading", "sigma_f"));
      break;
    case ScenarioKind::transverse:
      cfg.load_rate = parse_double(tab.require("loading", "load_rate"));
      break;
    case ScenarioKind::spaghetti:
      cfg.initial_curvature =
          parse_double(tab.require("loading", "initial_curvature"));
      if (RawEntry* e = tab.find("loading", "preload_steps")) {
        cfg.preload_steps = parse_int(*e);
      }
      break;
  }

  if (RawEntry* e = tab.find("output", "history_stride")) {
    cfg.history_stride = parse_int(*e);
    if (cfg.history_stride < 1) {
      throw ConfigError("history_stride must be at least 1", e->line);
    }
  }
  if (RawEntry* e = tab.find("output", "snapshot_stride")) {
    cfg.snapshot_stride = parse_int(*e);
    if (cfg.snapshot_stride < 0) {
      throw ConfigError("snapshot_stride must be non-negative", e->line);
    }
  }
  if (RawEntry* e = tab.find("output", "vtk")) cfg.write_vtk = parse_bool(*e);

  tab.reject_unconsumed(to_string(cfg.kind));

  // Structural validation shared with build_scenario, surfaced early with
  // the parser's error type.
  build_scenario(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

// Locale-independent round-trip formatting (shared with the CSV writers).
std::string fmt(double v) { return format_double(v); }

}  // namespace

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "[scenario]\nkind = " << to_string(cfg.kind) << "\n\n";
  out << "[geometry]\nlength = " << fmt(cfg.length)
      << "\nradius = " << fmt(cfg.radius) << "\n\n";
  out << "[material]\nyoungs_modulus = " << fmt(cfg.youngs_modulus)
      << "\ndensity = " << fmt(cfg.density) << "\n\n";
  if (cfg.has_cohesive) {
    out << "[cohesive]\nstrength = " << fmt(cfg.strength)
        << "\nfracture_energy = " << fmt(cfg.fracture_energy)
        << "\nmode_mixity = " << fmt(cfg.mode_mixity)
        << "\nbending_in_initiation = "
        << (cfg.bending_in_initiation ? "true" : "false") << "\n\n";
  }
  out << "[penalty]\nbeta_p = " << fmt(cfg.beta_p)
      << "\nbeta_t = " << fmt(cfg.beta_t) << "\n\n";
  out << "[mesh]\nelement_size = " << fmt(cfg.element_size) << "\n\n";
  out << "[solver]\nkind = " << cfg.solver_kind << "\n";
  if (cfg.solver_kind == "newton") {
    out << "load_steps = " << cfg.load_steps << "\n"
        << "max_iters = " << cfg.max_iters << "\n"
        << "tol_rel = " << fmt(cfg.tol_rel) << "\n"
        << "tol_abs_scale = " << fmt(cfg.tol_abs_scale) << "\n";
  } else {
    if (cfg.time_step > 0.0) out << "time_step = " << fmt(cfg.time_step) << "\n";
    out << "duration = " << fmt(cfg.duration) << "\n"
        << "safety_factor = " << fmt(cfg.safety_factor) << "\n";
    if (cfg.kind == ScenarioKind::spaghetti) {
      out << "load_steps = " << cfg.load_steps << "\n"
          << "max_iters = " << cfg.max_iters << "\n"
          << "tol_rel = " << fmt(cfg.tol_rel) << "\n"
          << "tol_abs_scale = " << fmt(cfg.tol_abs_scale) << "\n";
    }
  }
  out << "\n[loading]\n";
  switch (cfg.kind) {
    case ScenarioKind::cantilever:
      if (cfg.end_moment > 0.0) out << "end_moment = " << fmt(cfg.end_moment) << "\n";
      break;
    case ScenarioKind::buckling:
      out << "applied_displacement = " << fmt(cfg.applied_displacement) << "\n"
          << "perturbation_force = " << fmt(cfg.perturbation_force) << "\n";
      break;
    case ScenarioKind::spall:
      out << "sigma_f = " << fmt(cfg.sigma_f) << "\n";
      break;
    case ScenarioKind::transverse:
      out << "load_rate = " << fmt(cfg.load_rate) << "\n";
      break;
    case ScenarioKind::spaghetti:
      out << "initial_curvature = " << fmt(cfg.initial_curvature) << "\n"
          << "preload_steps = " << cfg.preload_steps << "\n";
      break;
  }
  out << "\n[output]\nhistory_stride = " << cfg.history_stride
      << "\nsnapshot_stride = " << cfg.snapshot_stride
      << "\nvtk = " << (cfg.write_vtk ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace beamfrac
