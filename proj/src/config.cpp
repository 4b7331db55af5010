#include "graspmetric/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "graspmetric/errors.hpp"

namespace graspmetric {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, const std::string& key) {
  const std::string text = trim(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("bad number '" + text + "' for key '" + key + "'");
  }
  return value;
}

std::size_t parse_count(const std::string& raw, const std::string& key) {
  const double v = parse_number(raw, key);
  if (v < 0 || v != std::floor(v)) throw ConfigError("key '" + key + "' needs a whole number");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& raw, const std::string& key) {
  const std::string t = trim(raw);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("bad boolean '" + t + "' for key '" + key + "'");
}

std::string join(const std::vector<double>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? ", " : "") << values[i];
  return out.str();
}

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) values.push_back(parse_number(item, text));
  if (values.empty()) throw ConfigError("empty list");
  return values;
}

MetricWeights weights_from_list(const std::vector<double>& values) {
  if (values.size() != 4) throw ConfigError("weights need exactly 4 values");
  MetricWeights w{values[0], values[1], values[2], values[3]};
  w.validate();
  return w;
}

void Config::validate() const {
  gripper.validate();
  metrics.weights.validate();
  metrics.bins.validate();
  if (metrics.knn_k == 0) throw ConfigError("knn_k must be >= 1");
  if (grid.seeds == 0 || grid.views == 0 || grid.rotations == 0) {
    throw ConfigError("grid sizes must be >= 1");
  }
  if (!(sample_density > 0)) throw ConfigError("sample_density must be > 0");
  if (max_surface_samples < min_surface_samples) {
    throw ConfigError("max_surface_samples < min_surface_samples");
  }
  if (!(nms_translation >= 0) || !(nms_rotation_deg >= 0)) {
    throw ConfigError("NMS thresholds must be >= 0");
  }
  if (eval_top_k == 0) throw ConfigError("eval_top_k must be >= 1");
  if (!(candidates.width_clearance >= 0)) throw ConfigError("width_clearance must be >= 0");
}

EvalOptions Config::eval_options() const {
  EvalOptions o;
  o.nms_translation = nms_translation;
  o.nms_rotation = nms_rotation_deg * kDeg;
  o.top_k = eval_top_k;
  o.gripper = gripper;
  o.metrics = metrics;
  return o;
}

Config parse_config(const std::string& text, Config c) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "max_width") c.gripper.max_width = parse_number(value, key);
    else if (key == "finger_length") c.gripper.finger_length = parse_number(value, key);
    else if (key == "finger_thickness") c.gripper.finger_thickness = parse_number(value, key);
    else if (key == "finger_height") c.gripper.finger_height = parse_number(value, key);
    else if (key == "depth_levels") c.gripper.depth_levels = parse_number_list(value);
    else if (key == "collision_margin") c.gripper.collision_margin = parse_number(value, key);
    else if (key == "weights") c.metrics.weights = weights_from_list(parse_number_list(value));
    else if (key == "lambda_t") c.metrics.weights.lambda_t = parse_number(value, key);
    else if (key == "lambda_f") c.metrics.weights.lambda_f = parse_number(value, key);
    else if (key == "lambda_g") c.metrics.weights.lambda_g = parse_number(value, key);
    else if (key == "lambda_c") c.metrics.weights.lambda_c = parse_number(value, key);
    else if (key == "friction_bins") c.metrics.bins.mus = parse_number_list(value);
    else if (key == "knn_k") c.metrics.knn_k = parse_count(value, key);
    else if (key == "grid_seeds") c.grid.seeds = parse_count(value, key);
    else if (key == "grid_views") c.grid.views = parse_count(value, key);
    else if (key == "grid_rotations") c.grid.rotations = parse_count(value, key);
    else if (key == "width_clearance") c.candidates.width_clearance = parse_number(value, key);
    else if (key == "reject_self_collision") c.candidates.reject_self_collision = parse_bool(value, key);
    else if (key == "sample_density") c.sample_density = parse_number(value, key);
    else if (key == "min_surface_samples") c.min_surface_samples = parse_count(value, key);
    else if (key == "max_surface_samples") c.max_surface_samples = parse_count(value, key);
    else if (key == "crease_angle_deg") c.crease_angle_deg = parse_number(value, key);
    else if (key == "nms_translation") c.nms_translation = parse_number(value, key);
    else if (key == "nms_rotation_deg") c.nms_rotation_deg = parse_number(value, key);
    else if (key == "eval_top_k") c.eval_top_k = parse_count(value, key);
    else if (key == "eval_thresholds") c.eval_thresholds = parse_number_list(value);
    else if (key == "table_spacing") c.table_spacing = parse_number(value, key);
    else if (key == "seed") c.seed = parse_count(value, key);
    else throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_config(const Config& c) {
  std::ostringstream out;
  out.precision(17);
  const auto& w = c.metrics.weights;
  out << "# gripper (meters)\n"
      << "max_width = " << c.gripper.max_width << "\n"
      << "finger_length = " << c.gripper.finger_length << "\n"
      << "finger_thickness = " << c.gripper.finger_thickness << "\n"
      << "finger_height = " << c.gripper.finger_height << "\n"
      << "depth_levels = " << join(c.gripper.depth_levels) << "\n"
      << "collision_margin = " << c.gripper.collision_margin << "\n"
      << "\n# hybrid metric\n"
      << "weights = " << join({w.lambda_t, w.lambda_f, w.lambda_g, w.lambda_c}) << "\n"
      << "friction_bins = " << join(c.metrics.bins.mus) << "\n"
      << "knn_k = " << c.metrics.knn_k << "\n"
      << "\n# candidate grid\n"
      << "grid_seeds = " << c.grid.seeds << "\n"
      << "grid_views = " << c.grid.views << "\n"
      << "grid_rotations = " << c.grid.rotations << "\n"
      << "width_clearance = " << c.candidates.width_clearance << "\n"
      << "reject_self_collision = " << (c.candidates.reject_self_collision ? "true" : "false") << "\n"
      << "sample_density = " << c.sample_density << "\n"
      << "min_surface_samples = " << c.min_surface_samples << "\n"
      << "max_surface_samples = " << c.max_surface_samples << "\n"
      << "crease_angle_deg = " << c.crease_angle_deg << "\n"
      << "\n# evaluation\n"
      << "nms_translation = " << c.nms_translation << "\n"
      << "nms_rotation_deg = " << c.nms_rotation_deg << "\n"
      << "eval_top_k = " << c.eval_top_k << "\n"
      << "eval_thresholds = " << join(c.eval_thresholds) << "\n"
      << "table_spacing = " << c.table_spacing << "\n"
      << "\nseed = " << c.seed << "\n";
  return out.str();
}

}  // namespace graspmetric
