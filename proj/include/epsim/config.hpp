#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace epsim {

/// Flat `key = value` run configuration. Lines starting with '#' and blank
/// lines are ignored; unknown keys are rejected.
class RunConfig {
 public:
  static RunConfig parse(std::istream& in, const std::string& origin = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  /// Every key the harness understands.
  static const std::vector<std::string>& known_keys();

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Sorted `key = value` lines; parsing the echo gives back this config.
  std::string echo() const;

  /// Directory that relative file names in the config resolve against.
  std::filesystem::path base_dir;

 private:
  std::map<std::string, std::string> values_;
};

/// Two-column (x, value) table, x strictly increasing.
class ProfileTable {
 public:
  static ProfileTable load(const std::filesystem::path& path);
  ProfileTable(std::vector<double> x, std::vector<double> v);

  /// Linear interpolation, constant beyond the end points.
  double operator()(double x) const;

 private:
  std::vector<double> x_;
  std::vector<double> v_;
};

}  // namespace epsim
