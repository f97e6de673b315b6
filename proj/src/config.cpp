#include "epsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "epsim/errors.hpp"

namespace epsim {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
  return v;
}

}  // namespace

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys{
      // scenario and model
      "scenario", "gamma", "delta", "pressure_law",
      // grid
      "x_min", "x_max", "n_cells", "boundary",
      // solver
      "epsilon", "tau", "cfl", "t_end", "source_variant", "flux_scheme",
      "smoothing_width",
      // initial data and device
      "background", "amplitude", "center", "width", "velocity", "doping",
      "e_minus", "a_value", "a1", "profile_a_file", "profile_b_file",
      // monitors
      "monitors", "monitor_cadence", "mass_tol", "positivity_tol", "field_tol",
      "riemann_tol", "plateau_tol",
      // picard
      "picard_t1", "picard_intervals", "picard_tol", "picard_max_iter",
      // relaxation study
      "tau_list", "horizon", "layer_fraction", "samples", "eps_coeff",
      "eps_power", "sound_speed_factor", "delta_coeff", "delta_power",
      "reference_refinement", "dd_cfl", "window_lo", "window_hi",
      // misc
      "seed"};
  return keys;
}

RunConfig RunConfig::parse(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(number);
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(where + ": empty key or value");
    }
    if (cfg.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  RunConfig cfg = parse(in, path.string());
  cfg.base_dir = path.parent_path();
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ConfigError("unknown key '" + key + "'");
  }
  values_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(it->second, key);
}

long RunConfig::get_long(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  long v = 0;
  const std::string& text = it->second;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": '" + text + "' is not an integer");
  }
  return v;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError(key + ": '" + it->second + "' is not a boolean");
}

std::vector<double> RunConfig::get_list(const std::string& key,
                                        const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), key));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string RunConfig::echo() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

// ---------------------------------------------------------------------------

ProfileTable::ProfileTable(std::vector<double> x, std::vector<double> v)
    : x_(std::move(x)), v_(std::move(v)) {
  if (x_.empty() || x_.size() != v_.size()) {
    throw ConfigError("profile table: need matching, non-empty columns");
  }
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw ConfigError("profile table: x must increase");
  }
}

ProfileTable ProfileTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile table " + path.string());
  std::vector<double> x, v;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    std::istringstream ss(body);
    double a = 0.0, b = 0.0;
    std::string extra;
    if (!(ss >> a >> b) || (ss >> extra)) {
      throw ConfigError(path.string() + ":" + std::to_string(number) +
                        ": expected two columns");
    }
    x.push_back(a);
    v.push_back(b);
  }
  return ProfileTable(std::move(x), std::move(v));
}

double ProfileTable::operator()(double x) const {
  if (x <= x_.front()) return v_.front();
  if (x >= x_.back()) return v_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - x_.begin());
  const double w = (x - x_[k - 1]) / (x_[k] - x_[k - 1]);
  return (1.0 - w) * v_[k - 1] + w * v_[k];
}

}  // namespace epsim
