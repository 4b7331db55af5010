#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "graspmetric/errors.hpp"
#include "graspmetric/label_store.hpp"
#include "test_support.hpp"

using namespace graspmetric;

namespace {

std::size_t count_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

GraspRecord random_record(std::mt19937_64& rng, int i) {
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_real_distribution<double> wide(-1e3, 1e3);
  GraspPose pose;
  pose.rotation = testsupport::random_rotation(rng);
  pose.translation = Vec3(wide(rng), wide(rng), u(rng) * 1e-7);
  pose.width = u(rng) * 0.085;
  pose.depth = 0.01 * (1 + i % 4);
  ScoreBreakdown b;
  b.s_t = (i % 11) / 10.0;
  b.s_f1 = u(rng);
  b.s_f2 = u(rng);
  b.s_f = b.s_f1 * b.s_f2;
  b.s_g_raw = u(rng) * 1e-3;
  b.s_g = u(rng);
  b.s_c_raw = std::ldexp(u(rng), -40);
  b.s_c = i % 7 == 0 ? 0.0 : u(rng);
  b.s_hybrid = u(rng);
  return GraspRecord::from("obj" + std::to_string(i % 5), pose, b);
}

bool same(const GraspRecord& a, const GraspRecord& b) {
  const auto& x = a.breakdown;
  const auto& y = b.breakdown;
  return a.object_id == b.object_id && a.rotation == b.rotation &&
         a.translation == b.translation && a.width == b.width && a.depth == b.depth &&
         x.s_t == y.s_t && x.s_f1 == y.s_f1 && x.s_f2 == y.s_f2 && x.s_f == y.s_f &&
         x.s_g_raw == y.s_g_raw && x.s_g == y.s_g && x.s_c_raw == y.s_c_raw && x.s_c == y.s_c &&
         x.s_hybrid == y.s_hybrid;
}

// A prediction file with one valid row per grasp of the identity pose.
std::string prediction_text(std::size_t rows) {
  std::string text = "object_id,r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz,width,depth,"
                     "predicted_score\n";
  for (std::size_t i = 0; i < rows; ++i) {
    text += "cube,1,0,0,0,1,0,0,0,1,0," + std::to_string(0.01 * i) + ",0.1,0.05,0.02,0.5\n";
  }
  return text;
}

}  // namespace

TEST_CASE("header names every column") {
  std::ostringstream out;
  CHECK(write_labels(std::span<const GraspRecord>{}, out) == 0);
  std::string expected;
  for (std::size_t i = 0; i < kLabelColumns.size(); ++i) {
    expected += (i ? "," : "") + kLabelColumns[i];
  }
  CHECK(out.str() == expected + "\n");
  CHECK(kLabelColumns.size() == 24);
}

TEST_CASE("empty label file has only the header") {
  testsupport::TempDir dir("labels_empty");
  CHECK(write_labels(std::span<const GraspRecord>{}, dir / "l.csv") == 0);
  CHECK(count_lines(dir / "l.csv") == 1);
  CHECK(read_labels(dir / "l.csv").empty());
}

TEST_CASE("48 records make 49 lines") {
  testsupport::TempDir dir("labels_48");
  std::mt19937_64 rng(40);
  std::vector<GraspRecord> recs;
  for (int i = 0; i < 48; ++i) recs.push_back(random_record(rng, i));
  CHECK(write_labels(recs, dir / "l.csv") == 48);
  CHECK(count_lines(dir / "l.csv") == 49);
}

TEST_CASE("1000 random records round-trip bit-exactly") {
  testsupport::TempDir dir("labels_rt");
  std::mt19937_64 rng(41);
  std::vector<GraspRecord> recs;
  for (int i = 0; i < 1000; ++i) recs.push_back(random_record(rng, i));
  write_labels(recs, dir / "l.csv");
  const auto back = read_labels(dir / "l.csv");
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(same(recs[i], back[i]));
  // the file is plain ASCII
  for (unsigned char ch : slurp(dir / "l.csv")) CHECK(ch < 128);
}

TEST_CASE("shortest round-trip number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.0) == "0");
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(u(rng), static_cast<int>(rng() % 80) - 40);
    CHECK(std::stod(format_double(v)) == v);
  }
  // at least 9 significant digits survive
  const double x = 0.123456789123;
  CHECK(std::abs(std::stod(format_double(x)) - x) <= 1e-9 * x);
}

TEST_CASE("pose helpers agree") {
  std::mt19937_64 rng(43);
  const GraspRecord r = random_record(rng, 3);
  const GraspPose p = r.pose();
  CHECK(p.rotation(1, 2) == r.rotation[5]);
  CHECK(p.translation.y() == r.translation[1]);
  CHECK(p.width == r.width);
}

TEST_CASE("well-formed prediction file") {
  std::istringstream in(prediction_text(50));
  const auto preds = read_predictions(in);
  REQUIRE(preds.size() == 50);
  CHECK(preds[7].object_id == "cube");
  CHECK(preds[7].predicted_score == 0.5);
  CHECK(preds[7].grasp.translation.y() == std::stod(std::to_string(0.07)));
  CHECK(preds[7].grasp.rotation == Mat3::Identity());
}

TEST_CASE("row with 8 rotation values is a schema error at that line") {
  std::string text = prediction_text(5);
  text += "cube,1,0,0,0,1,0,0,0,0,0,0.1,0.05,0.02,0.5\n";  // one field short
  text += prediction_text(1).substr(text.find('\n') + 1);
  std::istringstream in(text);
  try {
    read_predictions(in);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line == 7);
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
}

TEST_CASE("malformed prediction rows") {
  const std::string header = prediction_text(0);
  auto fails_at = [&](const std::string& row, std::size_t line) {
    std::istringstream in(header + row);
    try {
      read_predictions(in);
      return false;
    } catch (const SchemaError& e) {
      return e.line == line;
    }
  };
  CHECK(fails_at("cube,1,0,0,0,1,0,0,0,1,0,0,0.1,0.05,0.02,abc\n", 2));
  CHECK(fails_at("cube,2,0,0,0,1,0,0,0,1,0,0,0.1,0.05,0.02,0.5\n", 2));
  CHECK(fails_at("cube,1,0,0,0,1,0,0,0,1,0,0,nan,0.05,0.02,0.5\n", 2));
  std::istringstream empty("");
  CHECK_THROWS_AS(read_predictions(empty), SchemaError);
  std::istringstream no_score("object_id,r00\n");
  CHECK_THROWS_AS(read_predictions(no_score), SchemaError);
  CHECK_THROWS_AS(read_predictions(std::filesystem::path("/nonexistent/p.csv")), IoError);
}

TEST_CASE("label files read back as predictions") {
  testsupport::TempDir dir("labels_pred");
  std::mt19937_64 rng(44);
  std::vector<GraspRecord> recs;
  for (int i = 0; i < 30; ++i) recs.push_back(random_record(rng, i));
  write_labels(recs, dir / "l.csv");
  const auto preds = read_predictions(dir / "l.csv");
  REQUIRE(preds.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(preds[i].object_id == recs[i].object_id);
    CHECK(preds[i].predicted_score == recs[i].breakdown.s_hybrid);
    CHECK(preds[i].grasp.translation == recs[i].pose().translation);
    CHECK(preds[i].grasp.rotation == recs[i].pose().rotation);
  }
}

TEST_CASE("prediction round trip") {
  testsupport::TempDir dir("pred_rt");
  std::mt19937_64 rng(45);
  std::vector<PredictedGrasp> preds;
  for (int i = 0; i < 100; ++i) {
    PredictedGrasp p;
    if (i % 3) p.object_id = "a";
    p.grasp = random_record(rng, i).pose();
    p.predicted_score = std::ldexp(1.0, -i % 30);
    preds.push_back(p);
  }
  write_predictions(preds, dir / "p.csv");
  const auto back = read_predictions(dir / "p.csv");
  REQUIRE(back.size() == preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    CHECK(back[i].object_id == preds[i].object_id);
    CHECK(back[i].grasp.rotation == preds[i].grasp.rotation);
    CHECK(back[i].grasp.translation == preds[i].grasp.translation);
    CHECK(back[i].predicted_score == preds[i].predicted_score);
  }
}

TEST_CASE("object ids with separators are refused") {
  std::mt19937_64 rng(46);
  GraspRecord r = random_record(rng, 0);
  r.object_id = "a,b";
  std::ostringstream out;
  CHECK_THROWS_AS(write_labels(std::span<const GraspRecord>(&r, 1), out), IoError);
}

TEST_CASE("scene json round trip") {
  testsupport::TempDir dir("scene_rt");
  std::mt19937_64 rng(47);
  SceneLayout scene;
  scene.table_height = 0.7312;
  for (int i = 0; i < 4; ++i) {
    ObjectInstance inst;
    inst.object_id = "obj" + std::to_string(i);
    inst.pose = testsupport::random_rigid(rng, 0.5);
    scene.instances.push_back(inst);
  }
  write_scene(scene, dir / "s.json");
  const SceneLayout back = read_scene(dir / "s.json");
  CHECK(back.table_height == scene.table_height);
  REQUIRE(back.instances.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.instances[i].object_id == scene.instances[i].object_id);
    CHECK(back.instances[i].pose.matrix() == scene.instances[i].pose.matrix());
  }
}

TEST_CASE("bad scene files") {
  testsupport::TempDir dir("scene_bad");
  std::ofstream(dir / "a.json") << "{\"table_height\": 0, \"instances\": [{\"object_id\": \"x\", "
                                   "\"rotation\": [1,0,0], \"translation\": [0,0,0]}]}";
  CHECK_THROWS_AS(read_scene(dir / "a.json"), ParseError);
  std::ofstream(dir / "b.json") << "{not json";
  CHECK_THROWS_AS(read_scene(dir / "b.json"), ParseError);
  std::ofstream(dir / "c.json") << "{\"table_height\": 0, \"instances\": [{\"object_id\": \"x\", "
                                   "\"rotation\": [2,0,0,0,1,0,0,0,1], \"translation\": [0,0,0]}]}";
  CHECK_THROWS_AS(read_scene(dir / "c.json"), ParseError);
  CHECK_THROWS_AS(read_scene(dir / "missing.json"), IoError);
}
