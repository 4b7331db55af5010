#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "graspmetric/candidates.hpp"
#include "graspmetric/gripper.hpp"
#include "graspmetric/metrics.hpp"
#include "graspmetric/scene_eval.hpp"

namespace graspmetric {

// Every tunable constant of the pipeline. Loaded from a `key = value` text
// file ('#' starts a comment, lists are comma separated):
//
//   max_width = 0.085
//   depth_levels = 0.01, 0.02, 0.03, 0.04
//   weights = 0.7, 0.2, 0.05, 0.05
//
struct Config {
  GripperModel gripper;
  MetricSettings metrics;
  GridSizes grid;
  CandidateOptions candidates;

  double sample_density = 250000.0;  // points per m^2 (1 per 4 mm^2)
  std::size_t min_surface_samples = 256;
  std::size_t max_surface_samples = 20000;
  double crease_angle_deg = 45.0;

  double nms_translation = 0.03;
  double nms_rotation_deg = 30.0;
  std::size_t eval_top_k = 50;
  std::vector<double> eval_thresholds{0.0, 0.1, 0.3, 0.5, 0.7, 0.9};
  double table_spacing = 0.005;

  std::uint64_t seed = 0;

  void validate() const;
  EvalOptions eval_options() const;
};

Config load_config(const std::filesystem::path& path);
// Applies `key = value` lines on top of `base`.
Config parse_config(const std::string& text, Config base = {});
std::string format_config(const Config& config);

// "a,b,c" -> doubles; throws ConfigError on malformed input.
std::vector<double> parse_number_list(const std::string& text);
MetricWeights weights_from_list(const std::vector<double>& values);

}  // namespace graspmetric
