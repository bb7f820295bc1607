#include "run_config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ghft::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const long x = to_long(key, v);
  if (x < -2147483647L || x > 2147483647L) throw ConfigError(key + ": integer out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return v;
  std::string msg = key + ": expected one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg + ", got '" + v + "'");
}

std::string fmt(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  Setter set;
  Getter get;
  bool number;  ///< emitted as a JSON number or bool rather than a string
};

#define GHFT_DOUBLE(member) \
  Field { [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_double(k, v); }, \
          [](const RunConfig& c) { return fmt(c.member); }, true }
#define GHFT_INT(member) \
  Field { [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_int(k, v); }, \
          [](const RunConfig& c) { return std::to_string(c.member); }, true }

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f = {
      {"model.t", GHFT_DOUBLE(model.t)},
      {"model.u", GHFT_DOUBLE(model.u)},
      {"model.mu", GHFT_DOUBLE(model.mu)},
      {"model.lx", GHFT_INT(model.lx)},
      {"model.ly", GHFT_INT(model.ly)},
      {"model.mu_sign",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.model.mu_sign = mu_sign_from_string(one_of(k, v, {"subtract", "add"}));
        },
        [](const RunConfig& c) { return to_string(c.model.mu_sign); }, false}},
      {"solver.dtau", GHFT_DOUBLE(dtau)},
      {"solver.tol", GHFT_DOUBLE(tol)},
      {"solver.max_iter",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.max_iter = to_long(k, v); },
        [](const RunConfig& c) { return std::to_string(c.max_iter); }, true}},
      {"solver.pairing_seed", GHFT_DOUBLE(pairing_seed)},
      {"solver.magnetic_seed", GHFT_DOUBLE(magnetic_seed)},
      {"solver.magnetic_start",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.magnetic_start = to_bool(k, v); },
        [](const RunConfig& c) { return std::string(c.magnetic_start ? "true" : "false"); }, true}},
      {"spectrum.zero_tol", GHFT_DOUBLE(zero_tol)},
      {"spectrum.degeneracy_tol", GHFT_DOUBLE(degeneracy_tol)},
      {"spectrum.presence", GHFT_DOUBLE(presence)},
      {"spectrum.flat_tol", GHFT_DOUBLE(flat_tol)},
      {"spectrum.momenta",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.momenta = one_of(k, v, {"grid", "path", "both"}); },
        [](const RunConfig& c) { return c.momenta; }, false}},
      {"output.dir",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.dir = v; },
        [](const RunConfig& c) { return c.dir; }, false}},
      {"output.prefix",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.prefix = v; },
        [](const RunConfig& c) { return c.prefix; }, false}},
      {"output.cm_format",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.cm_format = one_of(k, v, {"csv", "binary"}); },
        [](const RunConfig& c) { return c.cm_format; }, false}},
      {"sweep.u",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.sweep_u = to_list(k, v); },
        [](const RunConfig& c) { return list(c.sweep_u); }, false}},
      {"sweep.mu",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.sweep_mu = to_list(k, v); },
        [](const RunConfig& c) { return list(c.sweep_mu); }, false}},
      {"sweep.dispersion",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.sweep_dispersion = to_bool(k, v); },
        [](const RunConfig& c) { return std::string(c.sweep_dispersion ? "true" : "false"); }, true}},
      {"verify.lx", GHFT_INT(verify.lattice.lx)},
      {"verify.ly", GHFT_INT(verify.lattice.ly)},
      {"verify.u", GHFT_DOUBLE(verify.lattice.u)},
      {"verify.mu", GHFT_DOUBLE(verify.lattice.mu)},
      {"verify.seed",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          const long s = to_long(k, v);
          if (s < 0) throw ConfigError(k + ": must be non-negative");
          c.verify.seed = static_cast<unsigned>(s);
        },
        [](const RunConfig& c) { return std::to_string(c.verify.seed); }, true}},
      {"verify.wick_instances", GHFT_INT(verify.wick_instances)},
      {"verify.gradient_instances", GHFT_INT(verify.gradient_instances)},
      {"verify.max_modes", GHFT_INT(verify.max_modes)},
      {"verify.dynamics_steps", GHFT_INT(verify.dynamics_steps)},
      {"verify.dynamics_dt", GHFT_DOUBLE(verify.dynamics_dt)},
      {"verify.ground_tol", GHFT_DOUBLE(verify.ground_tol)},
      {"verify.wick_tol", GHFT_DOUBLE(verify.wick_tol)},
      {"verify.gradient_tol", GHFT_DOUBLE(verify.gradient_tol)},
      {"verify.roundtrip_tol", GHFT_DOUBLE(verify.roundtrip_tol)},
      {"verify.anticommutator_tol", GHFT_DOUBLE(verify.anticommutator_tol)},
      {"verify.purity_tol", GHFT_DOUBLE(verify.purity_tol)},
      {"verify.energy_drift_tol", GHFT_DOUBLE(verify.energy_drift_tol)},
      {"verify.monotone_tol", GHFT_DOUBLE(verify.monotone_tol)},
      {"verify.dense_tol", GHFT_DOUBLE(verify.dense_tol)},
      {"verify.u0_tol", GHFT_DOUBLE(verify.u0_tol)},
      {"verify.stability_tol", GHFT_DOUBLE(verify.stability_tol)},
      {"verify.pairing_tol", GHFT_DOUBLE(verify.pairing_tol)},
  };
  return f;
}

#undef GHFT_DOUBLE
#undef GHFT_INT

RunConfig defaults() {
  RunConfig c;
  c.verify.lattice.lx = c.verify.lattice.ly = 3;
  c.verify.lattice.u = -2.0;
  c.verify.lattice.mu = 2.0;
  c.verify.lattice.mu_sign = MuSign::Add;
  return c;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  for (double v : {tol, zero_tol, degeneracy_tol, presence, flat_tol})
    if (!(v > 0.0)) throw ConfigError("tolerances must be positive");
  if (dtau < 0.0) throw ConfigError("solver.dtau must be >= 0");
  if (max_iter < 1) throw ConfigError("solver.max_iter must be positive");
  if (pairing_seed < 0.0 || magnetic_seed < 0.0) throw ConfigError("seeds must be >= 0");
  verify.validate();
}

GroundStateOptions RunConfig::ground_options() const {
  GroundStateOptions o;
  o.flow.dtau = dtau;
  o.flow.tol = tol;
  o.flow.max_iter = max_iter;
  o.pairing_seed = pairing_seed;
  o.magnetic_seed = magnetic_seed;
  o.magnetic_start = magnetic_start;
  return o;
}

DispersionOptions RunConfig::dispersion_options() const {
  DispersionOptions o;
  o.zero_tol = zero_tol;
  o.spectrum.degeneracy_tol = degeneracy_tol;
  return o;
}

ClassificationOptions RunConfig::classification_options() const {
  ClassificationOptions o;
  o.flat_tol = flat_tol;
  o.presence = presence;
  o.degeneracy_tol = degeneracy_tol;
  return o;
}

void set_value(RunConfig& c, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown key '" + key + "'");
  it->second.set(c, key, value);
}

RunConfig parse_text(const std::string& text, const std::string& source) {
  RunConfig c = defaults();
  std::istringstream is(text);
  std::string line, section;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        static const char* known[] = {"model", "solver", "spectrum", "output", "sweep", "verify"};
        if (std::find(std::begin(known), std::end(known), section) == std::end(known))
          throw ConfigError("unknown section '" + section + "'");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key = value");
      std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.find('.') == std::string::npos) {
        if (section.empty()) throw ConfigError("key '" + key + "' outside a section");
        key = section + "." + key;
      }
      set_value(c, key, value);
    } catch (const Error& e) {
      throw ConfigError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return c;
}

RunConfig parse_json(const nlohmann::json& j) {
  RunConfig c = defaults();
  if (!j.is_object()) throw ConfigError("JSON config must be an object");
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object()) throw ConfigError("section '" + section + "' must be an object");
    for (const auto& [name, v] : body.items()) {
      std::string value;
      if (v.is_string())
        value = v.get<std::string>();
      else if (v.is_boolean())
        value = v.get<bool>() ? "true" : "false";
      else if (v.is_number_integer())
        value = std::to_string(v.get<long>());
      else if (v.is_number())
        value = fmt(v.get<double>());
      else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (!v[i].is_number()) throw ConfigError(section + "." + name + ": list entries must be numbers");
          value += (i ? "," : "") + fmt(v[i].get<double>());
        }
      } else {
        throw ConfigError(section + "." + name + ": unsupported value type");
      }
      set_value(c, section + "." + name, value);
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path + ": " + e.what());
    }
    return parse_json(j);
  }
  return parse_text(text, path);
}

std::string to_text(const RunConfig& c) {
  std::string out, section;
  for (const auto& [key, f] : fields()) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out += (section.empty() ? "[" : "\n[") + s + "]\n";
      section = s;
    }
    out += key.substr(dot + 1) + " = " + f.get(c) + "\n";
  }
  return out;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, f] : fields()) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot), name = key.substr(dot + 1);
    const std::string v = f.get(c);
    if (key == "sweep.u")
      j[s][name] = c.sweep_u;
    else if (key == "sweep.mu")
      j[s][name] = c.sweep_mu;
    else if (f.number)
      j[s][name] = nlohmann::json::parse(v);
    else
      j[s][name] = v;
  }
  return j;
}

std::string parameter_hash(const HubbardParams& p) {
  const std::string canon = "t=" + fmt(p.t) + ";u=" + fmt(p.u) + ";mu=" + fmt(p.mu) + ";lx=" + std::to_string(p.lx) +
                            ";ly=" + std::to_string(p.ly) + ";mu_sign=" + to_string(p.mu_sign);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ghft::cli
