#include "rdsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rdsim {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Scalar parsers; each must consume the whole token.
double parse_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty())
    throw std::runtime_error("key '" + key + "' expects a real number, got '" + value +
                             "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& value, long long lo,
                    long long hi) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty())
    throw std::runtime_error("key '" + key + "' expects an integer, got '" + value + "'");
  if (x < lo || x > hi)
    throw std::runtime_error("key '" + key + "' must lie in [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "], got " + std::to_string(x));
  return x;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::uint64_t x = 0;
  try {
    x = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty() || value.front() == '-')
    throw std::runtime_error("key '" + key + "' expects an unsigned integer, got '" +
                             value + "'");
  return x;
}

double parse_positive(const std::string& key, const std::string& value) {
  const double x = parse_real(key, value);
  if (!(x > 0.0)) throw std::runtime_error("key '" + key + "' must be > 0");
  return x;
}

double parse_nonneg(const std::string& key, const std::string& value) {
  const double x = parse_real(key, value);
  if (x < 0.0) throw std::runtime_error("key '" + key + "' must be >= 0");
  return x;
}

// Assign one key; throws a bare (location-free) message on any problem.
void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "omega_L") c.model.omega_L = parse_positive(key, value);
  else if (key == "omega_R") c.model.omega_R = parse_positive(key, value);
  else if (key == "g") c.model.g = parse_nonneg(key, value);
  else if (key == "J") c.model.J = parse_real(key, value);
  else if (key == "A_L") c.model.drive_L.amplitude = parse_real(key, value);
  else if (key == "Omega_L") c.model.drive_L.frequency = parse_nonneg(key, value);
  else if (key == "Phi_L") c.model.drive_L.phase = parse_real(key, value);
  else if (key == "A_R") c.model.drive_R.amplitude = parse_real(key, value);
  else if (key == "Omega_R") c.model.drive_R.frequency = parse_nonneg(key, value);
  else if (key == "Phi_R") c.model.drive_R.phase = parse_real(key, value);
  else if (key == "alpha") c.model.bath.alpha = parse_nonneg(key, value);
  else if (key == "s") c.model.bath.s = parse_positive(key, value);
  else if (key == "omega_c") c.model.bath.omega_c = parse_positive(key, value);
  else if (key == "omega_max") c.model.bath.omega_max = parse_positive(key, value);
  else if (key == "omega_min_factor")
    c.model.bath.omega_min_factor = parse_positive(key, value);
  else if (key == "N_bath")
    c.model.bath.n_modes = static_cast<int>(parse_int(key, value, 0, 100000));
  else if (key == "M") c.m = static_cast<int>(parse_int(key, value, 1, 100000));
  else if (key == "photons") c.photons = parse_nonneg(key, value);
  else if (key == "noise_scale") c.noise_scale = parse_nonneg(key, value);
  else if (key == "seed") c.seed = parse_seed(key, value);
  else if (key == "dt") c.prop.dt = parse_positive(key, value);
  else if (key == "t_max") c.prop.t_max = parse_nonneg(key, value);
  else if (key == "sample_every")
    c.prop.sample_every = static_cast<int>(parse_int(key, value, 1, 1000000000));
  else if (key == "rcond") c.prop.rcond = parse_positive(key, value);
  else if (key == "norm_tol") c.prop.norm_tol = parse_positive(key, value);
  else if (key == "checkpoint_every")
    c.prop.checkpoint_every = static_cast<int>(parse_int(key, value, 0, 1000000000));
  else if (key == "checkpoint_path") c.prop.checkpoint_path = value;
  else if (key == "n_max_photon")
    c.n_max_photon = static_cast<int>(parse_int(key, value, 0, 1000));
  else if (key == "n_max_bath")
    c.n_max_bath = static_cast<int>(parse_int(key, value, 0, 1000));
  else if (key == "oracle_max_dim")
    c.oracle_max_dim = static_cast<std::size_t>(parse_int(key, value, 1, 1000000000));
  else if (key == "out") {
    if (value.empty()) throw std::runtime_error("key 'out' must not be empty");
    c.out = value;
  } else if (key == "mode") {
    if (value != "variational" && value != "oracle")
      throw std::runtime_error("key 'mode' must be 'variational' or 'oracle', got '" +
                               value + "'");
    c.mode = value;
  } else {
    throw std::runtime_error("unknown key '" + key + "'");
  }
}

bool sweepable(const std::string& key) {
  return key != "out" && key != "mode" && key != "checkpoint_path";
}

void final_validate(const RunConfig& config) { validate(config.model); }

}  // namespace

void apply_override(RunConfig& config, const std::string& key, const std::string& value,
                    const std::string& where) {
  try {
    set_key(config, key, value);
  } catch (const std::runtime_error& err) {
    throw std::runtime_error("ERROR: " + where + ": " + err.what());
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno);

    const auto tokens = split_ws(line);
    if (tokens.front() == "sweep") {
      const auto ob = line.find('{');
      const auto cb = line.find('}');
      if (ob == std::string::npos || cb == std::string::npos || cb < ob ||
          !trim(line.substr(cb + 1)).empty())
        throw std::runtime_error("ERROR: " + where +
                                 ": sweep blocks are 'sweep key { v1 v2 ... }' on one "
                                 "line");
      const std::string key = trim(line.substr(5, ob - 5));
      const auto values = split_ws(line.substr(ob + 1, cb - ob - 1));
      if (key.empty())
        throw std::runtime_error("ERROR: " + where + ": sweep block names no key");
      if (!sweepable(key))
        throw std::runtime_error("ERROR: " + where + ": key '" + key +
                                 "' cannot be swept");
      if (values.empty())
        throw std::runtime_error("ERROR: " + where + ": sweep block for key '" + key +
                                 "' lists no values");
      for (const auto& existing : config.sweeps)
        if (existing.first == key)
          throw std::runtime_error("ERROR: " + where + ": key '" + key +
                                   "' already has a sweep block");
      // Vet every value now so the error points at this line, not at expansion.
      for (const auto& v : values) {
        RunConfig probe = config;
        apply_override(probe, key, v, where);
      }
      config.sweeps.emplace_back(key, values);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("ERROR: " + where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("ERROR: " + where + ": expected 'key = value'");
    apply_override(config, key, value, where);
  }
  final_validate(config);
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ERROR: cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::vector<RunConfig> expand_sweeps(const RunConfig& config) {
  std::vector<RunConfig> runs;
  std::size_t total = 1;
  for (const auto& [key, values] : config.sweeps) total *= values.size();

  for (std::size_t index = 0; index < total; ++index) {
    RunConfig run = config;
    run.sweeps.clear();
    // Row-major expansion: the last sweep block varies fastest.
    std::size_t rem = index;
    for (auto it = config.sweeps.rbegin(); it != config.sweeps.rend(); ++it) {
      const auto& [key, values] = *it;
      apply_override(run, key, values[rem % values.size()], "sweep expansion");
      rem /= values.size();
    }
    if (!config.sweeps.empty()) {
      char tag[32];
      std::snprintf(tag, sizeof tag, "run_%03zu", index);
      run.out = config.out + "/" + tag;
    }
    final_validate(run);
    runs.push_back(std::move(run));
  }
  return runs;
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream out;
  auto real = [&](const char* key, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << " = " << buf << "\n";
  };
  auto integer = [&](const char* key, long long v) { out << key << " = " << v << "\n"; };
  auto text = [&](const char* key, const std::string& v) {
    out << key << " = " << v << "\n";
  };

  real("omega_L", c.model.omega_L);
  real("omega_R", c.model.omega_R);
  real("g", c.model.g);
  real("J", c.model.J);
  real("A_L", c.model.drive_L.amplitude);
  real("Omega_L", c.model.drive_L.frequency);
  real("Phi_L", c.model.drive_L.phase);
  real("A_R", c.model.drive_R.amplitude);
  real("Omega_R", c.model.drive_R.frequency);
  real("Phi_R", c.model.drive_R.phase);
  real("alpha", c.model.bath.alpha);
  real("s", c.model.bath.s);
  real("omega_c", c.model.bath.omega_c);
  real("omega_max", c.model.bath.omega_max);
  real("omega_min_factor", c.model.bath.omega_min_factor);
  integer("N_bath", c.model.bath.n_modes);
  integer("M", c.m);
  real("photons", c.photons);
  real("noise_scale", c.noise_scale);
  out << "seed = " << c.seed << "\n";
  real("dt", c.prop.dt);
  real("t_max", c.prop.t_max);
  integer("sample_every", c.prop.sample_every);
  real("rcond", c.prop.rcond);
  real("norm_tol", c.prop.norm_tol);
  integer("checkpoint_every", c.prop.checkpoint_every);
  text("checkpoint_path", c.prop.checkpoint_path);
  integer("n_max_photon", c.n_max_photon);
  integer("n_max_bath", c.n_max_bath);
  integer("oracle_max_dim", static_cast<long long>(c.oracle_max_dim));
  text("out", c.out);
  text("mode", c.mode);
  for (const auto& [key, values] : c.sweeps) {
    out << "sweep " << key << " {";
    for (const auto& v : values) out << " " << v;
    out << " }\n";
  }
  return out.str();
}

}  // namespace rdsim
