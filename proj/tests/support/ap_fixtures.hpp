#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "graspmetric/pipeline.hpp"
#include "graspmetric/primitives.hpp"
#include "graspmetric/scene_eval.hpp"
#include "test_support.hpp"

// A 50 x 4 x 4 cm bar lying along x on a table at z = 0. Grasps are scored
// with weights (1, 0, 0, 0) so a true score is exactly the force-closure
// score: 1 for the side grasps below, 0 for grasps in empty space.
namespace apfixture {

using namespace graspmetric;

struct BarScene {
  ObjectLibrary library;
  SceneLayout scene;
  EvalOptions options;
  std::vector<double> thresholds{0.0, 0.1, 0.3, 0.5, 0.7, 0.9};
};

inline BarScene make_bar_scene() {
  BarScene s;
  Config config = testsupport::small_config();
  config.grid.seeds = 8;
  config.grid.views = 20;
  config.grid.rotations = 6;
  config.max_surface_samples = 8000;
  const TriangleMesh bar = prepare_mesh(primitives::box(0.5, 0.04, 0.04), config);
  s.library.emplace("bar", make_object_model(bar, config));

  ObjectInstance inst;
  inst.object_id = "bar";
  inst.pose.translation() = Vec3(0, 0, 0.02);
  s.scene.instances.push_back(inst);
  s.scene.table_height = 0.0;
  s.scene.scene_cloud = build_scene_cloud(s.scene, s.library);

  s.options = config.eval_options();
  s.options.metrics.weights = MetricWeights{1.0, 0.0, 0.0, 0.0};
  return s;
}

// Side grasps closing across the bar's 4 cm width: 9 sites 4.5 cm apart, each
// with approach tilts of -35, 0, 35 degrees about the closing axis and both
// finger assignments. 54 grasps, no two within the NMS thresholds.
inline std::vector<PredictedGrasp> good_grasps() {
  std::vector<PredictedGrasp> out;
  const double tilt = 35.0 * std::numbers::pi / 180.0;
  for (int site = 0; site < 9; ++site) {
    for (double theta : {0.0, -tilt, tilt}) {
      for (double side : {1.0, -1.0}) {
        const Vec3 approach(std::sin(theta), 0, -std::cos(theta));
        PredictedGrasp p;
        p.grasp.rotation = testsupport::frame_from(approach, Vec3(0, side, 0));
        p.grasp.translation = Vec3(-0.2 + 0.045 * site, 0, 0.03);
        p.grasp.width = 0.06;
        p.grasp.depth = 0.01;
        out.push_back(p);
      }
    }
  }
  return out;
}

// 50 downward grasps on a 10 x 5 grid, 5 cm apart, 30 cm above the table.
inline std::vector<PredictedGrasp> empty_space_grasps() {
  std::vector<PredictedGrasp> out;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 5; ++j) {
      PredictedGrasp p;
      p.grasp.rotation = testsupport::frame_from(Vec3(0, 0, -1), Vec3(0, 1, 0));
      p.grasp.translation = Vec3(-0.25 + 0.05 * i, -0.1 + 0.05 * j, 0.3);
      p.grasp.width = 0.06;
      p.grasp.depth = 0.01;
      out.push_back(p);
    }
  }
  return out;
}

// Descending predicted scores in list order.
inline void rank(std::vector<PredictedGrasp>& grasps, double top) {
  for (std::size_t i = 0; i < grasps.size(); ++i) {
    grasps[i].predicted_score = top - 0.001 * static_cast<double>(i);
  }
}

inline std::vector<PredictedGrasp> perfect_predictions() {
  auto g = good_grasps();
  g.resize(50);
  rank(g, 1.0);
  return g;
}

inline std::vector<PredictedGrasp> zero_predictions() {
  auto g = empty_space_grasps();
  rank(g, 1.0);
  return g;
}

// First 25 by predicted score are good, the next 25 score zero.
inline std::vector<PredictedGrasp> quarter_predictions() {
  auto good = good_grasps();
  good.resize(25);
  rank(good, 0.9);
  auto bad = empty_space_grasps();
  bad.resize(25);
  rank(bad, 0.5);
  good.insert(good.end(), bad.begin(), bad.end());
  return good;
}

// AP(tau) when exactly the first 25 of 50 ranked slots are hits:
// (1/50) * sum_{k=1..50} min(k, 25) / k, summed with exact rationals.
inline constexpr double kQuarterAp = 0.8416235802879591;
// mAP over [0, .1, .3, .5, .7, .9] for that fixture: (1 + 5 * kQuarterAp) / 6.
inline constexpr double kQuarterMap = 0.8680196502399659;

}  // namespace apfixture
