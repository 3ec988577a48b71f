#include "ampcrit/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ampcrit {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse '" + s + "' as a real number", line);
  }
}

std::int64_t parse_int(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse '" + s + "' as an integer", line);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t cut = raw.find('#');
    std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line);
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line);
    if (section.empty()) throw ConfigError("key outside any [section]", line);
    auto& sec = cfg.sections_[section];
    if (sec.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
    sec[key] = Entry{value, line, false};
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

void KeyValueConfig::apply_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be section.key=value", 0);
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const std::size_t dot = path.find('.');
  if (dot == std::string::npos) throw ConfigError("override must be section.key=value", 0);
  const std::string section = path.substr(0, dot);
  const std::string key = path.substr(dot + 1);
  if (section.empty() || key.empty())
    throw ConfigError("override must be section.key=value", 0);
  sections_[section][key] = Entry{value, 0, false};
}

const KeyValueConfig::Entry* KeyValueConfig::find(const std::string& section,
                                                  const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  k->second.consumed = true;
  return &k->second;
}

bool KeyValueConfig::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string KeyValueConfig::get_string(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key [" + section + "] " + key, 0);
  return e->value;
}

std::string KeyValueConfig::get_string_or(const std::string& section, const std::string& key,
                                          const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double KeyValueConfig::get_double(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key [" + section + "] " + key, 0);
  return parse_double(e->value, e->line);
}

double KeyValueConfig::get_double_or(const std::string& section, const std::string& key,
                                     double fallback) const {
  const Entry* e = find(section, key);
  return e ? parse_double(e->value, e->line) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key [" + section + "] " + key, 0);
  return parse_int(e->value, e->line);
}

std::int64_t KeyValueConfig::get_int_or(const std::string& section, const std::string& key,
                                        std::int64_t fallback) const {
  const Entry* e = find(section, key);
  return e ? parse_int(e->value, e->line) : fallback;
}

bool KeyValueConfig::get_bool_or(const std::string& section, const std::string& key,
                                 bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  throw ConfigError("cannot parse '" + e->value + "' as a boolean", e->line);
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& section,
                                                const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key [" + section + "] " + key, 0);
  std::vector<double> out;
  for (const std::string& tok : split(e->value, ' '))
    if (!tok.empty()) out.push_back(parse_double(tok, e->line));
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'", e->line);
  return out;
}

std::vector<double> KeyValueConfig::get_doubles_or(const std::string& section,
                                                   const std::string& key,
                                                   const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  return get_doubles(section, key);
}

void KeyValueConfig::reject_unknown_keys() const {
  for (const auto& [sec, keys] : sections_)
    for (const auto& [key, entry] : keys)
      if (!entry.consumed)
        throw ConfigError("unknown key [" + sec + "] " + key, entry.line);
}

std::map<std::string, std::map<std::string, std::string>> KeyValueConfig::snapshot() const {
  std::map<std::string, std::map<std::string, std::string>> out;
  for (const auto& [sec, keys] : sections_)
    for (const auto& [key, entry] : keys) out[sec][key] = entry.value;
  return out;
}

namespace {

std::vector<std::array<int, 3>> parse_mode_indices(const std::string& text, int dim) {
  // tuples separated by ';', components by ','; e.g. "0,0; 1,-1; 2,0"
  std::vector<std::array<int, 3>> out;
  for (const std::string& tuple : split(text, ';')) {
    if (tuple.empty()) continue;
    const auto comps = split(tuple, ',');
    if (static_cast<int>(comps.size()) != dim)
      throw ConfigError("mode index tuple '" + tuple + "' does not match dimension", 0);
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < dim; ++a) idx[a] = static_cast<int>(parse_int(comps[a], 0));
    out.push_back(idx);
  }
  if (out.empty()) throw ConfigError("mode_indices is empty", 0);
  return out;
}

}  // namespace

RunConfig RunConfig::from_text(const std::string& text, const std::vector<std::string>& overrides) {
  KeyValueConfig kv = KeyValueConfig::parse_text(text);
  for (const std::string& ov : overrides) kv.apply_override(ov);

  RunConfig rc;

  // [model]
  const int dim = static_cast<int>(kv.get_int("model", "dim"));
  const auto lengths = kv.get_doubles("model", "lengths");
  std::vector<int> ppa;
  for (double v : kv.get_doubles("model", "points_per_axis")) ppa.push_back(static_cast<int>(v));
  const TorusGrid grid = TorusGrid::make(dim, lengths, ppa);
  const auto indices = parse_mode_indices(kv.get_string("model", "mode_indices"), dim);
  const auto amplitudes = kv.get_doubles("model", "amplitudes");
  const double disp_a = kv.get_double("model", "dispersion_a");
  rc.model = build_beamlet_model(grid, indices, disp_a, amplitudes);

  // [solver]
  rc.horizon = kv.get_double("solver", "horizon");
  rc.dt = kv.get_double_or("solver", "dt", rc.horizon / 1024.0);
  if (kv.get_bool_or("solver", "infinite_mass", false)) {
    rc.mass = ComplexMass::infinite_mass();
  } else {
    rc.mass = ComplexMass::finite(Complex(kv.get_double_or("solver", "mass_re", 0.0),
                                          kv.get_double_or("solver", "mass_im", 1.0)));
  }

  // [optimizer]
  rc.optimizer.starts = static_cast<int>(kv.get_int_or("optimizer", "starts", 8));
  rc.optimizer.max_iters = static_cast<int>(kv.get_int_or("optimizer", "max_iters", 200));
  rc.optimizer.tol = kv.get_double_or("optimizer", "tol", 1e-10);
  rc.optimizer.nystrom_k = static_cast<int>(kv.get_int_or("optimizer", "nystrom_k", 256));
  rc.optimizer.sphere_resolution =
      static_cast<int>(kv.get_int_or("optimizer", "sphere_resolution", 100));
  rc.optimizer.time_slices = static_cast<int>(kv.get_int_or("optimizer", "time_slices", 256));

  // [experiment]
  rc.experiment.q = static_cast<int>(kv.get_int_or("experiment", "q", 1));
  const auto probe = kv.get_doubles_or("experiment", "probe", {});
  if (!probe.empty()) {
    if (static_cast<int>(probe.size()) != dim)
      throw ConfigError("probe must have one coordinate per dimension", 0);
    for (int a = 0; a < dim; ++a) rc.experiment.probe[a] = probe[static_cast<std::size_t>(a)];
  }
  rc.experiment.lambda = kv.get_double_or("experiment", "lambda", 0.1);
  rc.experiment.lambda_grid = kv.get_doubles_or("experiment", "lambda_grid", {});
  rc.experiment.radii = kv.get_doubles_or("experiment", "radii", {});
  rc.experiment.rho_ladder = kv.get_doubles_or("experiment", "rho_ladder", {});
  rc.experiment.samples = kv.get_int_or("experiment", "samples", 0);
  rc.experiment.axis = static_cast<int>(kv.get_int_or("experiment", "axis", -1));
  rc.experiment.sample_index =
      static_cast<std::uint64_t>(kv.get_int_or("experiment", "sample_index", 0));

  // [run]
  rc.seed = static_cast<std::uint64_t>(kv.get_int_or("run", "seed", 1));
  rc.threads = static_cast<int>(kv.get_int_or("run", "threads", 0));
  rc.output_dir = kv.get_string_or("run", "output_dir", "");

  kv.reject_unknown_keys();
  rc.echo = kv.snapshot();

  // Validate the cross-module preconditions up front.
  if (!(rc.horizon > 0.0)) throw ConfigError("[solver] horizon must be positive", 0);
  const long long nsteps = std::llround(rc.horizon / rc.dt);
  if (!(rc.dt > 0.0) || nsteps < 1 ||
      std::abs(nsteps * rc.dt - rc.horizon) > 1e-9 * std::max(1.0, rc.horizon))
    throw ConfigError("[solver] dt must divide the horizon", 0);
  if (rc.optimizer.time_slices < 1) throw ConfigError("[optimizer] time_slices must be >= 1", 0);
  if (rc.optimizer.starts < 1) throw ConfigError("[optimizer] starts must be >= 1", 0);
  if (rc.experiment.q < 1) throw ConfigError("[experiment] q must be >= 1", 0);
  for (int a = 0; a < rc.model.grid.dim; ++a)
    if (rc.model.grid.points_per_axis[a] < 8 * rc.model.max_index_on_axis(a))
      throw ConfigError("[model] grid does not resolve the beamlet spectrum (margin >= 2)", 0);
  return rc;
}

RunConfig RunConfig::load(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), overrides);
}

}  // namespace ampcrit
