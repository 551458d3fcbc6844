#pragma once

#include <map>
#include <string>

#include "aoed/design_opt.hpp"

namespace aoed {

// Flat key-value configuration with [section] headers. A run is reproducible
// from the config plus its master seed alone; every key has a default
// matching the idealized flow-cell study.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_string(const std::string& text);

  void set(const std::string& dotted_key, const std::string& value);
  bool has(const std::string& dotted_key) const;

  std::string get(const std::string& key, const std::string& dflt) const;
  double get(const std::string& key, double dflt) const;
  int get(const std::string& key, int dflt) const;
  std::uint64_t seed() const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& dflt) const;

  std::string dump() const;

  // builders
  Mesh build_mesh() const;
  Mesh build_mesh(int nx, int ny) const;
  Scenario build_scenario() const;
  Vector truth_field(const Mesh& mesh) const;
  PriorParams prior_params(const Mesh& mesh) const;
  SensorArray build_sensors(const Mesh& mesh) const;
  OedOptions oed_options() const;
  OuterOptions outer_options() const;

 private:
  std::map<std::string, std::string> kv_;
};

// Documented stand-in truth field: two anisotropic Gaussian blobs plus an
// offset, in domain-normalized coordinates.
double truth_blobs(const Rect& box, const Eigen::Vector2d& x);

}  // namespace aoed
