#include "aoed/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aoed {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config: bad section header at line " +
                                 std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key = value at line " +
                               std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config: empty key at line " + std::to_string(lineno));
    cfg.kv_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  kv_[key] = trim(value);
}

bool ExperimentConfig::has(const std::string& key) const {
  return kv_.count(key) > 0;
}

std::string ExperimentConfig::get(const std::string& key,
                                  const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double ExperimentConfig::get(const std::string& key, double dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  return std::stod(it->second);
}

int ExperimentConfig::get(const std::string& key, int dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  return std::stoi(it->second);
}

std::uint64_t ExperimentConfig::seed() const {
  auto it = kv_.find("oed.master_seed");
  if (it == kv_.end()) return 1;
  return std::stoull(it->second);
}

std::vector<double> ExperimentConfig::get_list(
    const std::string& key, const std::vector<double>& dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  std::vector<double> out;
  std::istringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::string ExperimentConfig::dump() const {
  std::ostringstream out;
  std::string section;
  for (const auto& [k, v] : kv_) {
    const auto dot = k.find('.');
    const std::string sec = dot == std::string::npos ? "" : k.substr(0, dot);
    const std::string key = dot == std::string::npos ? k : k.substr(dot + 1);
    if (sec != section) {
      out << "[" << sec << "]\n";
      section = sec;
    }
    out << key << " = " << v << "\n";
  }
  return out.str();
}

double truth_blobs(const Rect& box, const Eigen::Vector2d& x) {
  const double u = (x.x() - box.x0) / box.width();
  const double v = (x.y() - box.y0) / box.height();
  const double b1 = 1.8 * std::exp(-((u - 0.30) * (u - 0.30)) / 0.05 -
                                   ((v - 0.65) * (v - 0.65)) / 0.16);
  const double b2 = -1.5 * std::exp(-((u - 0.72) * (u - 0.72)) / 0.09 -
                                    ((v - 0.30) * (v - 0.30)) / 0.04);
  return b1 + b2 + 0.3;
}

Mesh ExperimentConfig::build_mesh() const {
  return build_mesh(get("mesh.nx", 32), get("mesh.ny", 32));
}

Mesh ExperimentConfig::build_mesh(int nx, int ny) const {
  Rect box;
  box.x0 = get("mesh.x0", 0.0);
  box.y0 = get("mesh.y0", 0.0);
  box.x1 = get("mesh.x1", 1.0);
  box.y1 = get("mesh.y1", 1.0);
  Mesh mesh = build_rect_mesh(nx, ny, box);
  const double r_well = get("scenario.well_radius", 0.0);
  if (r_well > 0.0) mark_well_corners(mesh, r_well);
  return mesh;
}

Scenario ExperimentConfig::build_scenario() const {
  Scenario s;
  s.dirichlet_top = get("scenario.dirichlet_top", 1.0);
  s.dirichlet_bottom = get("scenario.dirichlet_bottom", 0.0);
  const std::string src = get("scenario.source", "none");
  if (src == "point") {
    s.source = Scenario::Source::MollifiedPoint;
    s.source_strength = get("scenario.source_strength", 50.0);
    s.source_width = get("scenario.source_width", 1e-4);
    s.source_center = Eigen::Vector2d(get("scenario.source_x", 1.1),
                                      get("scenario.source_y", 0.6));
  } else if (src != "none") {
    throw std::runtime_error("config: unknown scenario.source '" + src + "'");
  }
  s.well_radius = get("scenario.well_radius", 0.0);
  return s;
}

Vector ExperimentConfig::truth_field(const Mesh& mesh) const {
  const std::string kind = get("truth.kind", "blobs");
  if (kind == "blobs")
    return interpolate(mesh, [&](const Eigen::Vector2d& x) {
      return truth_blobs(mesh.box, x);
    });
  if (kind == "constant") {
    const double c = get("truth.constant", 0.0);
    return Vector::Constant(mesh.n_nodes(), c);
  }
  throw std::runtime_error("config: unknown truth.kind '" + kind + "'");
}

PriorParams ExperimentConfig::prior_params(const Mesh& mesh) const {
  PriorParams p;
  p.theta = Eigen::Matrix2d::Zero();
  p.theta(0, 0) = get("prior.theta_xx", 2.5e-2);
  p.theta(1, 1) = get("prior.theta_yy", 1.0e-1);
  p.alpha = get("prior.alpha", 1.0);
  p.mollified = get("prior.mollified", 0) != 0;
  p.mollify_radius = get("prior.mollify_radius", 0.05);

  const std::string anchors =
      get("prior.anchors", "0.1,0.1; 0.1,0.9; 0.9,0.1; 0.9,0.9; 0.5,0.5");
  std::istringstream ss(anchors);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("config: bad anchor '" + item + "'");
    p.anchors.emplace_back(std::stod(item.substr(0, comma)),
                           std::stod(item.substr(comma + 1)));
  }
  if (p.anchors.empty()) throw std::runtime_error("config: no anchors");

  const std::string av = get("prior.anchor_values", "auto");
  p.anchor_values.resize(static_cast<Eigen::Index>(p.anchors.size()));
  if (av == "auto") {
    for (std::size_t i = 0; i < p.anchors.size(); ++i)
      p.anchor_values[static_cast<Eigen::Index>(i)] =
          truth_blobs(mesh.box, p.anchors[i]);
  } else {
    std::istringstream vs(av);
    Eigen::Index i = 0;
    while (std::getline(vs, item, ';') && i < p.anchor_values.size())
      p.anchor_values[i++] = std::stod(trim(item));
    if (i != p.anchor_values.size())
      throw std::runtime_error("config: anchor_values count mismatch");
  }
  return p;
}

SensorArray ExperimentConfig::build_sensors(const Mesh& mesh) const {
  return make_sensor_grid(mesh, get("design.sensors_x", 10),
                          get("design.sensors_y", 10),
                          get("design.sigma", 0.05));
}

OedOptions ExperimentConfig::oed_options() const {
  OedOptions o;
  const std::string mode = get("oed.mode", "gn");
  if (mode == "gn")
    o.mode = HessMode::GaussNewton;
  else if (mode == "full")
    o.mode = HessMode::Full;
  else
    throw std::runtime_error("config: unknown oed.mode '" + mode + "'");
  o.map.rtol = get("solver.map_rtol", 1e-8);
  o.map.atol = get("solver.map_atol", 1e-11);
  o.map.max_newton = get("solver.max_newton", 50);
  o.map.gn_iters = get("solver.gn_iters", 5);
  o.hess_rtol = get("solver.hess_rtol", 1e-8);
  o.hess_maxiter = get("solver.hess_maxiter", 2000);
  o.threads = get("solver.threads", 0);
  return o;
}

OuterOptions ExperimentConfig::outer_options() const {
  OuterOptions o;
  o.gamma = get("oed.gamma", 0.008);
  o.eps_schedule = get_list("oed.eps_schedule", o.eps_schedule);
  o.mu_schedule = get_list("oed.mu_schedule", o.mu_schedule);
  o.stage_tol = get("solver.stage_tol", 1e-5);
  o.stage_max_iters = get("solver.stage_max_iters", 100);
  o.lbfgs_mem = get("solver.lbfgs_mem", 20);
  o.active_threshold = get("solver.active_threshold", 1e-2);
  return o;
}

}  // namespace aoed
