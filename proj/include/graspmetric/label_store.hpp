#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "graspmetric/gripper.hpp"
#include "graspmetric/metrics.hpp"
#include "graspmetric/scene_eval.hpp"

namespace graspmetric {

// One labeled grasp. Text schema, one record per line after the header:
//
//   object_id,r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz,width,depth,
//   s_t,s_f1,s_f2,s_f,s_g_raw,s_g,s_c_raw,s_c,s_hybrid
//
// Rotation is row-major gripper->world, lengths in meters, numbers in
// shortest round-trip decimal form.
struct GraspRecord {
  std::string object_id;
  std::array<double, 9> rotation{};
  std::array<double, 3> translation{};
  double width = 0.0;
  double depth = 0.0;
  ScoreBreakdown breakdown;

  GraspPose pose() const;
  static GraspRecord from(const std::string& object_id, const GraspPose& pose,
                          const ScoreBreakdown& breakdown);
};

extern const std::vector<std::string> kLabelColumns;
extern const std::vector<std::string> kPredictionColumns;

// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

std::size_t write_labels(std::span<const GraspRecord> records, std::ostream& out);
std::size_t write_labels(std::span<const GraspRecord> records, const std::filesystem::path& path);
std::vector<GraspRecord> read_labels(const std::filesystem::path& path);

// Accepts prediction files (object_id, pose, width, depth, predicted_score)
// and label files, whose s_hybrid column is read as the predicted score.
std::vector<PredictedGrasp> read_predictions(const std::filesystem::path& path);
std::vector<PredictedGrasp> read_predictions(std::istream& in);
void write_predictions(std::span<const PredictedGrasp> predictions,
                       const std::filesystem::path& path);

// Scene JSON: {"table_height": h, "instances": [{"object_id": s,
// "rotation": [9 row-major], "translation": [3]}]}. The scene cloud is not
// stored; it is rebuilt from the object library.
void write_scene(const SceneLayout& scene, const std::filesystem::path& path);
SceneLayout read_scene(const std::filesystem::path& path);

void write_report(const EvalReport& report, const std::filesystem::path& path);

}  // namespace graspmetric
