#include "graspmetric/label_store.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/SVD>
#include <json.hpp>

#include "graspmetric/errors.hpp"

namespace graspmetric {

const std::vector<std::string> kLabelColumns{
    "object_id", "r00",  "r01",  "r02", "r10",     "r11", "r12",     "r20",
    "r21",       "r22",  "tx",   "ty",  "tz",      "width", "depth", "s_t",
    "s_f1",      "s_f2", "s_f",  "s_g_raw", "s_g", "s_c_raw", "s_c", "s_hybrid"};

const std::vector<std::string> kPredictionColumns{
    "object_id", "r00", "r01", "r02", "r10",   "r11",   "r12",
    "r20",       "r21", "r22", "tx",  "ty",    "tz",    "width",
    "depth",     "predicted_score"};

GraspPose GraspRecord::pose() const {
  GraspPose p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) p.rotation(r, c) = rotation[static_cast<std::size_t>(3 * r + c)];
  }
  p.translation = Vec3(translation[0], translation[1], translation[2]);
  p.width = width;
  p.depth = depth;
  return p;
}

GraspRecord GraspRecord::from(const std::string& object_id, const GraspPose& pose,
                              const ScoreBreakdown& breakdown) {
  GraspRecord rec;
  rec.object_id = object_id;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rec.rotation[static_cast<std::size_t>(3 * r + c)] = pose.rotation(r, c);
  }
  rec.translation = {pose.translation.x(), pose.translation.y(), pose.translation.z()};
  rec.width = pose.width;
  rec.depth = pose.depth;
  rec.breakdown = breakdown;
  return rec;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

namespace {

std::string join_header(const std::vector<std::string>& columns) {
  std::string line;
  for (std::size_t i = 0; i < columns.size(); ++i) line += (i ? "," : "") + columns[i];
  return line;
}

void check_id(const std::string& id) {
  if (id.find_first_of(",\n\r") != std::string::npos) {
    throw IoError("object id '" + id + "' contains a separator");
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_field(const std::string& text, std::size_t line, const std::string& column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw SchemaError(line, "bad number '" + text + "' in column " + column);
  }
  return value;
}

struct Table {
  std::map<std::string, std::size_t> column;
  std::size_t width = 0;
};

Table read_header(std::istream& in, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(1, "missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Table table;
  const auto names = split(line);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!table.column.emplace(names[i], i).second) {
      throw SchemaError(line_no, "duplicate column '" + names[i] + "'");
    }
  }
  table.width = names.size();
  return table;
}

std::size_t require(const Table& t, const std::string& name) {
  const auto it = t.column.find(name);
  if (it == t.column.end()) throw SchemaError(1, "missing column '" + name + "'");
  return it->second;
}

}  // namespace

std::size_t write_labels(std::span<const GraspRecord> records, std::ostream& out) {
  out << join_header(kLabelColumns) << '\n';
  for (const GraspRecord& r : records) {
    check_id(r.object_id);
    out << r.object_id;
    for (double v : r.rotation) out << ',' << format_double(v);
    for (double v : r.translation) out << ',' << format_double(v);
    const ScoreBreakdown& b = r.breakdown;
    for (double v : {r.width, r.depth, b.s_t, b.s_f1, b.s_f2, b.s_f, b.s_g_raw, b.s_g, b.s_c_raw,
                     b.s_c, b.s_hybrid}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
  return records.size();
}

std::size_t write_labels(std::span<const GraspRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const std::size_t n = write_labels(records, out);
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
  return n;
}

std::vector<GraspRecord> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::size_t line_no = 0;
  const Table table = read_header(in, line_no);
  std::vector<std::size_t> idx;
  for (const std::string& c : kLabelColumns) idx.push_back(require(table, c));

  std::vector<GraspRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != table.width) {
      throw SchemaError(line_no, "expected " + std::to_string(table.width) + " fields, got " +
                                     std::to_string(f.size()));
    }
    const auto num = [&](std::size_t column) {
      return parse_field(f[idx[column]], line_no, kLabelColumns[column]);
    };
    GraspRecord r;
    r.object_id = f[idx[0]];
    for (std::size_t k = 0; k < 9; ++k) r.rotation[k] = num(1 + k);
    for (std::size_t k = 0; k < 3; ++k) r.translation[k] = num(10 + k);
    r.width = num(13);
    r.depth = num(14);
    ScoreBreakdown& b = r.breakdown;
    b.s_t = num(15);
    b.s_f1 = num(16);
    b.s_f2 = num(17);
    b.s_f = num(18);
    b.s_g_raw = num(19);
    b.s_g = num(20);
    b.s_c_raw = num(21);
    b.s_c = num(22);
    b.s_hybrid = num(23);
    records.push_back(r);
  }
  return records;
}

std::vector<PredictedGrasp> read_predictions(std::istream& in) {
  std::size_t line_no = 0;
  const Table table = read_header(in, line_no);
  std::vector<std::size_t> pose_idx;
  for (std::size_t c = 1; c <= 14; ++c) pose_idx.push_back(require(table, kPredictionColumns[c]));
  std::size_t score_idx = 0;
  std::string score_name;
  if (table.column.contains("predicted_score")) {
    score_name = "predicted_score";
  } else if (table.column.contains("s_hybrid")) {
    score_name = "s_hybrid";
  } else {
    throw SchemaError(1, "missing column 'predicted_score'");
  }
  score_idx = table.column.at(score_name);
  const auto id_it = table.column.find("object_id");

  std::vector<PredictedGrasp> out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != table.width) {
      throw SchemaError(line_no, "expected " + std::to_string(table.width) + " fields, got " +
                                     std::to_string(f.size()));
    }
    PredictedGrasp p;
    Mat3 r;
    for (int k = 0; k < 9; ++k) {
      r(k / 3, k % 3) = parse_field(f[pose_idx[static_cast<std::size_t>(k)]], line_no,
                                    kPredictionColumns[static_cast<std::size_t>(k) + 1]);
    }
    if (!r.allFinite() || !is_rotation(r, 1e-4)) {
      throw SchemaError(line_no, "rotation is not orthonormal with determinant +1");
    }
    if (!is_rotation(r, 1e-12)) {
      Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
      r = svd.matrixU() * svd.matrixV().transpose();
    }
    p.grasp.rotation = r;
    for (int k = 0; k < 3; ++k) {
      p.grasp.translation[k] = parse_field(f[pose_idx[static_cast<std::size_t>(9 + k)]], line_no,
                                           kPredictionColumns[static_cast<std::size_t>(10 + k)]);
    }
    p.grasp.width = parse_field(f[pose_idx[12]], line_no, "width");
    p.grasp.depth = parse_field(f[pose_idx[13]], line_no, "depth");
    p.predicted_score = parse_field(f[score_idx], line_no, score_name);
    if (!std::isfinite(p.predicted_score) || !p.grasp.translation.allFinite()) {
      throw SchemaError(line_no, "non-finite value");
    }
    if (id_it != table.column.end() && !f[id_it->second].empty()) p.object_id = f[id_it->second];
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PredictedGrasp> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_predictions(in);
}

void write_predictions(std::span<const PredictedGrasp> predictions,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << join_header(kPredictionColumns) << '\n';
  for (const PredictedGrasp& p : predictions) {
    const std::string id = p.object_id.value_or("");
    check_id(id);
    out << id;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << ',' << format_double(p.grasp.rotation(r, c));
    }
    for (int k = 0; k < 3; ++k) out << ',' << format_double(p.grasp.translation[k]);
    out << ',' << format_double(p.grasp.width) << ',' << format_double(p.grasp.depth) << ','
        << format_double(p.predicted_score) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_scene(const SceneLayout& scene, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["table_height"] = scene.table_height;
  doc["instances"] = nlohmann::ordered_json::array();
  for (const ObjectInstance& inst : scene.instances) {
    nlohmann::ordered_json item;
    item["object_id"] = inst.object_id;
    std::vector<double> rot;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) rot.push_back(inst.pose.linear()(r, c));
    }
    item["rotation"] = rot;
    item["translation"] = {inst.pose.translation().x(), inst.pose.translation().y(),
                           inst.pose.translation().z()};
    doc["instances"].push_back(item);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

SceneLayout read_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scene '" + path.string() + "'");
  SceneLayout scene;
  try {
    const auto doc = nlohmann::json::parse(in);
    scene.table_height = doc.value("table_height", 0.0);
    for (const auto& item : doc.at("instances")) {
      ObjectInstance inst;
      inst.object_id = item.at("object_id").get<std::string>();
      const auto rot = item.at("rotation").get<std::vector<double>>();
      const auto trans = item.at("translation").get<std::vector<double>>();
      if (rot.size() != 9 || trans.size() != 3) {
        throw ParseError("instance '" + inst.object_id + "' needs 9 rotation and 3 translation values");
      }
      Mat3 r;
      for (int k = 0; k < 9; ++k) r(k / 3, k % 3) = rot[static_cast<std::size_t>(k)];
      if (!is_rotation(r, 1e-6)) {
        throw ParseError("instance '" + inst.object_id + "' rotation is not rigid");
      }
      inst.pose.linear() = r;
      inst.pose.translation() = Vec3(trans[0], trans[1], trans[2]);
      scene.instances.push_back(inst);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("scene '" + path.string() + "': " + e.what());
  }
  return scene;
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["ap"] = nlohmann::ordered_json::array();
  for (const auto& [tau, ap] : report.ap_at_threshold) {
    doc["ap"].push_back({{"threshold", tau}, {"ap", ap}});
  }
  doc["map"] = report.map_value;
  doc["n_predictions"] = report.n_predictions;
  doc["n_filtered_nms"] = report.n_filtered_nms;
  doc["n_filtered_collision"] = report.n_filtered_collision;
  doc["empty_after_filtering"] = report.empty_after_filtering;
  doc["true_scores"] = report.true_scores;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace graspmetric
