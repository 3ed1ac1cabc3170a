#include "egoe/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "egoe/errors.hpp"

namespace egoe {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' is not a number: '" + s + "'");
  }
}

long long to_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' is not an integer: '" + s + "'");
  }
}

bool to_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config: '" + key + "' is not a boolean: '" + s + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace

MeanField RunConfig::mean_field() const {
  if (mean_field_kind == "default") return default_mean_field(space.n_sp);
  MeanField mf;
  mf.sp_energies = Eigen::Map<const Eigen::VectorXd>(
      mean_field_epsilon.data(), static_cast<Eigen::Index>(mean_field_epsilon.size()));
  return mf;
}

void RunConfig::validate() const {
  space.validate();
  if (mean_field_kind != "default" && mean_field_kind != "explicit") {
    throw ConfigError("config: mean_field.kind must be 'default' or 'explicit'");
  }
  if (mean_field_kind == "explicit" &&
      static_cast<int>(mean_field_epsilon.size()) != space.n_sp) {
    throw ConfigError("config: mean_field.epsilon needs exactly N = " +
                      std::to_string(space.n_sp) + " entries");
  }
  if (!(v_scale > 0.0)) throw ConfigError("config: ensemble.v must be positive");
  if (members < 1) throw ConfigError("config: ensemble.members must be >= 1");
  if (lambdas.empty()) throw ConfigError("config: ensemble.lambda resolved to an empty grid");
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw ConfigError("config: lambda values must be positive and finite");
    }
  }
  if (bins < 20) throw ConfigError("config: observe.bins must be >= 20");
  if (!(e_hi > e_lo)) throw ConfigError("config: observe.e_hi must exceed observe.e_lo");
  if (!(k_halfwidth > 0.0)) throw ConfigError("config: observe.k_halfwidth must be positive");
  if (curve_points < 2) throw ConfigError("config: observe.curve_points must be >= 2");
  if (!(curve_window > 0.0)) throw ConfigError("config: observe.curve_window must be positive");
  if (duality_m_values.size() < 3) {
    throw ConfigError("config: duality.m_values needs >= 3 entries for the scaling fit");
  }
  for (int m : duality_m_values) {
    const int n = half_filling ? 2 * m : fixed_n;
    SpaceSpec{n, m}.validate();
  }
  if (!(central_halfwidth > 0.0)) {
    throw ConfigError("config: duality.central_halfwidth must be positive");
  }
  if (mode == RunMode::ingest && hamiltonian_file.empty() && strength_file.empty()) {
    throw ConfigError("config: ingest mode needs run.hamiltonian_file or run.strength_file");
  }
  if (out_dir.empty()) throw ConfigError("config: run.out must not be empty");
}

std::map<std::string, std::string> RunConfig::key_values() const {
  std::map<std::string, std::string> kv;
  kv["space.n"] = std::to_string(space.n_sp);
  kv["space.m"] = std::to_string(space.n_fermions);
  kv["mean_field.kind"] = mean_field_kind;
  if (!mean_field_epsilon.empty()) kv["mean_field.epsilon"] = join_doubles(mean_field_epsilon);
  kv["ensemble.v"] = format_double(v_scale);
  kv["ensemble.members"] = std::to_string(members);
  kv["ensemble.master_seed"] = std::to_string(master_seed);
  kv["ensemble.lambda"] = lambda_spec;
  kv["observe.bins"] = std::to_string(bins);
  kv["observe.e_lo"] = format_double(e_lo);
  kv["observe.e_hi"] = format_double(e_hi);
  kv["observe.k_halfwidth"] = format_double(k_halfwidth);
  kv["observe.curve_points"] = std::to_string(curve_points);
  kv["observe.curve_window"] = format_double(curve_window);
  {
    std::string ms;
    for (std::size_t i = 0; i < duality_m_values.size(); ++i) {
      if (i) ms += ',';
      ms += std::to_string(duality_m_values[i]);
    }
    kv["duality.m_values"] = ms;
  }
  kv["duality.half_filling"] = half_filling ? "true" : "false";
  kv["duality.fixed_n"] = std::to_string(fixed_n);
  kv["duality.observable"] = to_string(crossing_observable);
  kv["duality.central_halfwidth"] = format_double(central_halfwidth);
  kv["run.out"] = out_dir;
  kv["run.mode"] = mode == RunMode::simulate ? "simulate" : "ingest";
  if (!hamiltonian_file.empty()) kv["run.hamiltonian_file"] = hamiltonian_file;
  if (!strength_file.empty()) kv["run.strength_file"] = strength_file;
  return kv;
}

std::vector<double> parse_lambda_grid(const std::string& spec) {
  const std::string s = trim(spec);
  if (s.empty()) throw ConfigError("config: empty lambda grid");
  if (s.rfind("logspace:", 0) == 0) {
    const auto parts = split(s, ':');
    if (parts.size() != 4) {
      throw ConfigError("config: lambda logspace wants 'logspace:min:max:count'");
    }
    const double lo = to_double(parts[1], "lambda");
    const double hi = to_double(parts[2], "lambda");
    const long long count = to_int(parts[3], "lambda");
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
      throw ConfigError("config: lambda logspace needs 0 < min < max and count >= 2");
    }
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double step = (std::log(hi) - std::log(lo)) / (count - 1);
    for (long long i = 0; i < count; ++i) grid[i] = std::exp(std::log(lo) + i * step);
    grid.front() = lo;
    grid.back() = hi;
    return grid;
  }
  std::vector<double> grid;
  for (const auto& part : split(s, ',')) {
    if (!part.empty()) grid.push_back(to_double(part, "lambda"));
  }
  if (grid.empty()) throw ConfigError("config: empty lambda grid");
  return grid;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::map<std::string, std::string> raw;

  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // inline comments start at '#'
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key =
        (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
    raw[key] = trim(line.substr(eq + 1));
  }

  for (const auto& [key, value] : raw) {
    if (key == "space.n") config.space.n_sp = static_cast<int>(to_int(value, key));
    else if (key == "space.m") config.space.n_fermions = static_cast<int>(to_int(value, key));
    else if (key == "mean_field.kind") config.mean_field_kind = value;
    else if (key == "mean_field.epsilon") {
      config.mean_field_epsilon.clear();
      for (const auto& part : split(value, ',')) {
        config.mean_field_epsilon.push_back(to_double(part, key));
      }
    } else if (key == "ensemble.v") config.v_scale = to_double(value, key);
    else if (key == "ensemble.members") config.members = static_cast<int>(to_int(value, key));
    else if (key == "ensemble.master_seed") {
      config.master_seed = static_cast<std::uint64_t>(to_int(value, key));
    } else if (key == "ensemble.lambda") config.lambda_spec = value;
    else if (key == "observe.bins") config.bins = static_cast<int>(to_int(value, key));
    else if (key == "observe.e_lo") config.e_lo = to_double(value, key);
    else if (key == "observe.e_hi") config.e_hi = to_double(value, key);
    else if (key == "observe.k_halfwidth") config.k_halfwidth = to_double(value, key);
    else if (key == "observe.curve_points") {
      config.curve_points = static_cast<int>(to_int(value, key));
    } else if (key == "observe.curve_window") config.curve_window = to_double(value, key);
    else if (key == "duality.m_values") {
      config.duality_m_values.clear();
      for (const auto& part : split(value, ',')) {
        config.duality_m_values.push_back(static_cast<int>(to_int(part, key)));
      }
    } else if (key == "duality.half_filling") config.half_filling = to_bool(value, key);
    else if (key == "duality.fixed_n") config.fixed_n = static_cast<int>(to_int(value, key));
    else if (key == "duality.observable") {
      config.crossing_observable = dual_observable_from_string(value);
    } else if (key == "duality.central_halfwidth") {
      config.central_halfwidth = to_double(value, key);
    } else if (key == "run.out") config.out_dir = value;
    else if (key == "run.mode") {
      if (value == "simulate") config.mode = RunMode::simulate;
      else if (value == "ingest") config.mode = RunMode::ingest;
      else throw ConfigError("config: run.mode must be 'simulate' or 'ingest'");
    } else if (key == "run.hamiltonian_file") config.hamiltonian_file = value;
    else if (key == "run.strength_file") config.strength_file = value;
    else throw ConfigError("config: unknown key '" + key + "'");
  }

  config.lambdas = parse_lambda_grid(config.lambda_spec);
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a 64-bit
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& [key, value] : config.key_values()) {
    mix(key);
    mix("=");
    mix(value);
    mix("\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace egoe
