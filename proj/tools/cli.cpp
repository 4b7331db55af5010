#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "graspmetric/config.hpp"
#include "graspmetric/errors.hpp"
#include "graspmetric/label_store.hpp"
#include "graspmetric/pipeline.hpp"
#include "graspmetric/scene_eval.hpp"

namespace graspmetric::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config_path;
  double unit_scale = 1.0;
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
};

Config resolve_config(const GlobalOptions& g) {
  Config config = g.config_path.empty() ? Config{} : load_config(g.config_path);
  if (g.seed) config.seed = *g.seed;
  config.candidates.workers =
      g.workers > 0 ? g.workers : std::max(1u, std::thread::hardware_concurrency());
  if (!(g.unit_scale > 0.0)) throw ConfigError("--unit-scale must be > 0");
  config.validate();
  return config;
}

TriangleMesh load_scaled(const fs::path& path, const Config& config, double unit_scale,
                         std::ostream& err) {
  LoadedMesh loaded = load_mesh(path, mesh_options(config));
  if (loaded.report.degenerate_faces_dropped > 0) {
    err << "warning: dropped " << loaded.report.degenerate_faces_dropped
        << " degenerate face(s) from " << path.string() << "\n";
  }
  if (unit_scale != 1.0) return loaded.mesh.scaled(unit_scale);
  return std::move(loaded.mesh);
}

fs::path find_object_mesh(const fs::path& dir, const std::string& id) {
  for (const char* ext : {".obj", ".ply", ".OBJ", ".PLY"}) {
    const fs::path candidate = dir / (id + ext);
    if (fs::exists(candidate)) return candidate;
  }
  throw UnknownObjectId(id + " (no mesh in " + dir.string() + ")");
}

ObjectLibrary load_library(const std::set<std::string>& ids, const fs::path& dir,
                           const Config& config, double unit_scale, std::ostream& err) {
  ObjectLibrary library;
  for (const std::string& id : ids) {
    const TriangleMesh mesh = load_scaled(find_object_mesh(dir, id), config, unit_scale, err);
    library.emplace(id, make_object_model(prepare_mesh(mesh, config), config));
  }
  return library;
}

void print_histograms(const std::vector<ScoreBreakdown>& scores, std::ostream& out) {
  std::map<long, std::size_t> st_counts;
  std::array<std::size_t, 10> hybrid_bins{};
  std::set<double> distinct_st;
  std::set<double> distinct_hybrid;
  for (const ScoreBreakdown& s : scores) {
    ++st_counts[std::lround(s.s_t * 10)];
    const auto bin = static_cast<std::size_t>(std::clamp(std::floor(s.s_hybrid * 10), 0.0, 9.0));
    ++hybrid_bins[bin];
    distinct_st.insert(s.s_t);
    distinct_hybrid.insert(s.s_hybrid);
  }
  out << "force-closure S_t          hybrid S\n";
  for (int i = 0; i <= 10; ++i) {
    out << "  " << std::fixed << std::setprecision(1) << i / 10.0 << "  " << std::setw(8)
        << st_counts[i];
    if (i < 10) {
      out << "      [" << i / 10.0 << ", " << (i + 1) / 10.0 << (i == 9 ? "]" : ")") << "  "
          << std::setw(8) << hybrid_bins[static_cast<std::size_t>(i)];
    }
    out << "\n";
  }
  out << "distinct values: S_t " << distinct_st.size() << ", hybrid " << distinct_hybrid.size()
      << "\n";
  out.unsetf(std::ios::floatfield);
}

void dump_ply(const std::vector<GraspCandidate>& candidates,
              const std::vector<ScoreBreakdown>& scores, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "ply\nformat ascii 1.0\nelement vertex " << candidates.size()
      << "\nproperty double x\nproperty double y\nproperty double z\n"
         "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Vec3 c = 0.5 * (candidates[i].frame.p_cl + candidates[i].frame.p_cr);
    const double s = std::clamp(scores[i].s_hybrid, 0.0, 1.0);
    out << format_double(c.x()) << ' ' << format_double(c.y()) << ' ' << format_double(c.z())
        << ' ' << std::lround(255 * (1 - s)) << ' ' << std::lround(255 * s) << " 0\n";
  }
}

int cmd_label(const GlobalOptions& g, const std::string& mesh_path, const std::string& out_path,
              std::string object_id, const std::string& weights, const std::string& ply_path,
              std::ostream& out, std::ostream& err) {
  Config config = resolve_config(g);
  if (!weights.empty()) config.metrics.weights = weights_from_list(parse_number_list(weights));
  const TriangleMesh mesh = load_scaled(mesh_path, config, g.unit_scale, err);
  if (object_id.empty()) object_id = fs::path(mesh_path).stem().string();

  const LabelResult labels = label_mesh(prepare_mesh(mesh, config), config);
  std::vector<GraspRecord> records;
  records.reserve(labels.candidates.size());
  for (std::size_t i = 0; i < labels.candidates.size(); ++i) {
    records.push_back(GraspRecord::from(object_id, labels.candidates[i].pose, labels.scores[i]));
  }
  const std::size_t written = write_labels(records, fs::path(out_path));
  if (!ply_path.empty()) dump_ply(labels.candidates, labels.scores, ply_path);

  out << "object " << object_id << ": " << labels.grid.seed_points.size() << " seeds x "
      << labels.grid.views.size() << " views x " << labels.grid.rotations.size()
      << " rotations x " << labels.grid.depths.size() << " depths = "
      << labels.stats.considered << " poses\n"
      << "  invalid contact " << labels.stats.invalid << ", self-collision "
      << labels.stats.collided << ", labeled " << written << "\n"
      << "  gravity center (" << labels.mass.gravity_center.transpose() << ") via "
      << (labels.mass.method_used == MassMethod::volume_centroid ? "volume" : "surface-area")
      << " centroid\n";
  print_histograms(labels.scores, out);
  out << "wrote " << out_path << "\n";
  return 0;
}

int cmd_rescore(const GlobalOptions& g, const std::string& in_path, const std::string& out_path,
                const std::string& weights, std::ostream& out) {
  Config config = resolve_config(g);
  if (!weights.empty()) config.metrics.weights = weights_from_list(parse_number_list(weights));
  std::vector<GraspRecord> records = read_labels(in_path);
  for (GraspRecord& r : records) r.breakdown.s_hybrid = combine(r.breakdown, config.metrics.weights);
  std::vector<ScoreBreakdown> scores;
  for (const GraspRecord& r : records) scores.push_back(r.breakdown);
  write_labels(records, fs::path(out_path));
  print_histograms(scores, out);
  out << "rescored " << records.size() << " records -> " << out_path << "\n";
  return 0;
}

int cmd_scene(const GlobalOptions& g, const std::string& meshes_dir,
              const std::vector<std::string>& objects, double table_height,
              const std::string& out_path, const std::string& cloud_path, std::ostream& out,
              std::ostream& err) {
  const Config config = resolve_config(g);
  const std::set<std::string> ids(objects.begin(), objects.end());
  const ObjectLibrary library = load_library(ids, meshes_dir, config, g.unit_scale, err);
  const SceneLayout scene = compose_scene(objects, library, table_height, config.seed);
  write_scene(scene, out_path);
  if (!cloud_path.empty()) {
    std::ofstream ply(cloud_path, std::ios::binary);
    if (!ply) throw IoError("cannot write '" + cloud_path + "'");
    ply << "ply\nformat ascii 1.0\nelement vertex " << scene.scene_cloud.size()
        << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    for (const Vec3& p : scene.scene_cloud) {
      ply << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z())
          << '\n';
    }
  }
  out << "scene with " << scene.instances.size() << " object(s), " << scene.scene_cloud.size()
      << " cloud points -> " << out_path << "\n";
  return 0;
}

int cmd_eval(const GlobalOptions& g, const std::string& pred_path, const std::string& scene_path,
             const std::string& meshes_dir, const std::string& report_path, std::ostream& out,
             std::ostream& err) {
  const Config config = resolve_config(g);
  const auto predictions = read_predictions(fs::path(pred_path));
  SceneLayout scene = read_scene(scene_path);
  std::set<std::string> ids;
  for (const ObjectInstance& inst : scene.instances) ids.insert(inst.object_id);
  const ObjectLibrary library = load_library(ids, meshes_dir, config, g.unit_scale, err);
  scene.scene_cloud = build_scene_cloud(scene, library, config.table_spacing);

  const EvalReport report =
      evaluate_ap(predictions, scene, library, config.eval_thresholds, config.eval_options());
  write_report(report, report_path);

  out << "predictions " << report.n_predictions << ", removed by NMS " << report.n_filtered_nms
      << ", removed by collision " << report.n_filtered_collision << ", evaluated "
      << report.true_scores.size() << " (top " << config.eval_top_k << ")\n";
  if (report.empty_after_filtering) out << "warning: no grasps left after filtering\n";
  out << "threshold      AP\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& [tau, ap] : report.ap_at_threshold) {
    out << std::setw(9) << std::setprecision(1) << tau << "  " << std::setprecision(3)
        << std::setw(6) << ap << "\n";
  }
  out << "      mAP  " << std::setw(6) << report.map_value << "\n";
  out.unsetf(std::ios::floatfield);
  out << "report -> " << report_path << "\n";
  return 0;
}

int cmd_views(std::size_t count, std::ostream& out) {
  out << "x,y,z\n";
  for (const Vec3& v : generate_views(count)) {
    out << format_double(v.x()) << ',' << format_double(v.y()) << ',' << format_double(v.z())
        << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid physical grasp metric: label meshes, compose scenes, evaluate predictions"};
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--unit-scale", g.unit_scale, "scale applied to meshes on load");
  app.add_option("--workers", g.workers, "worker threads (default: all cores)");
  auto* seed_opt = app.add_option("--seed", seed, "sampling seed (overrides config)");

  std::string mesh_path, out_path, object_id, weights, ply_path;
  auto* label = app.add_subcommand("label", "generate and score grasp candidates on a mesh");
  label->add_option("mesh", mesh_path, "OBJ or PLY mesh")->required();
  label->add_option("-o,--out", out_path, "label file")->required();
  label->add_option("--object-id", object_id, "id written to records (default: file stem)");
  label->add_option("--weights", weights, "lambda_t,lambda_f,lambda_g,lambda_c");
  label->add_option("--dump-ply", ply_path, "colored grasp-center point cloud");

  std::string labels_in;
  auto* rescore = app.add_subcommand("rescore", "recombine an existing label file");
  rescore->add_option("labels", labels_in, "label file")->required();
  rescore->add_option("-o,--out", out_path, "rescored label file")->required();
  rescore->add_option("--weights", weights, "lambda_t,lambda_f,lambda_g,lambda_c");

  std::string meshes_dir, cloud_path;
  std::vector<std::string> objects;
  double table_height = 0.0;
  auto* scene = app.add_subcommand("scene", "place objects on a table");
  scene->add_option("--meshes-dir", meshes_dir, "directory of <object_id>.obj|ply")->required();
  scene->add_option("--objects", objects, "object ids")->required()->delimiter(',');
  scene->add_option("--table-height", table_height, "table plane height (m)");
  scene->add_option("-o,--out", out_path, "scene JSON")->required();
  scene->add_option("--cloud", cloud_path, "also write the scene cloud as PLY");

  std::string pred_path, scene_path, report_path = "eval_report.json";
  auto* eval = app.add_subcommand("eval", "top-k AP/mAP of predicted grasps on a scene");
  eval->add_option("predictions", pred_path, "prediction file")->required();
  eval->add_option("--scene", scene_path, "scene JSON")->required();
  eval->add_option("--meshes-dir", meshes_dir, "directory of <object_id>.obj|ply")->required();
  eval->add_option("-o,--out", report_path, "JSON report");

  std::size_t view_count = 300;
  auto* views = app.add_subcommand("views", "print the approach-view covering");
  views->add_option("--count", view_count, "number of views");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (label->parsed()) {
      return cmd_label(g, mesh_path, out_path, object_id, weights, ply_path, out, err);
    }
    if (rescore->parsed()) return cmd_rescore(g, labels_in, out_path, weights, out);
    if (scene->parsed()) {
      return cmd_scene(g, meshes_dir, objects, table_height, out_path, cloud_path, out, err);
    }
    if (eval->parsed()) return cmd_eval(g, pred_path, scene_path, meshes_dir, report_path, out, err);
    if (views->parsed()) return cmd_views(view_count, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const GraspError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace graspmetric::cli
