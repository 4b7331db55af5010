#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "graspmetric/errors.hpp"
#include "graspmetric/mesh.hpp"

namespace graspmetric {

namespace {

void fan_triangulate(const std::vector<long long>& polygon, std::vector<Face>& out) {
  for (std::size_t i = 1; i + 1 < polygon.size(); ++i) {
    out.push_back({static_cast<std::uint32_t>(polygon[0]), static_cast<std::uint32_t>(polygon[i]),
                   static_cast<std::uint32_t>(polygon[i + 1])});
  }
}

LoadedMesh finish(std::vector<Vec3> vertices, std::vector<Face> faces,
                  const MeshBuildOptions& options) {
  if (faces.empty()) throw EmptyMesh("file contains no faces");
  MeshBuildReport report;
  TriangleMesh mesh = TriangleMesh::build(std::move(vertices), std::move(faces), options, &report);
  return {std::move(mesh), report};
}

LoadedMesh read_obj(std::istream& in, const std::string& name, const MeshBuildOptions& options) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) {
        throw ParseError(name + ":" + std::to_string(line_no) + ": malformed vertex");
      }
      vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<long long> polygon;
      std::string token;
      while (ls >> token) {
        // Accept i, i/t, i//n, i/t/n; only the position index matters.
        const std::string head = token.substr(0, token.find('/'));
        long long idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoll(head, &used);
          if (used != head.size()) throw std::invalid_argument(head);
        } catch (const std::exception&) {
          throw ParseError(name + ":" + std::to_string(line_no) + ": bad face index '" + token +
                           "'");
        }
        if (idx < 0) idx += static_cast<long long>(vertices.size()) + 1;
        if (idx < 1 || idx > static_cast<long long>(vertices.size())) {
          throw ParseError(name + ":" + std::to_string(line_no) + ": face index out of range");
        }
        polygon.push_back(idx - 1);
      }
      if (polygon.size() < 3) {
        throw ParseError(name + ":" + std::to_string(line_no) + ": face with fewer than 3 corners");
      }
      fan_triangulate(polygon, faces);
    }
  }
  return finish(std::move(vertices), std::move(faces), options);
}

enum class PlyEncoding { ascii, binary_le, binary_be };

struct PlyProperty {
  std::string name;
  std::string type;        // scalar type, or list item type
  std::string count_type;  // non-empty for list properties
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

std::size_t ply_type_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  if (type == "int" || type == "uint" || type == "float" || type == "int32" ||
      type == "uint32" || type == "float32")
    return 4;
  if (type == "double" || type == "float64") return 8;
  throw ParseError("unknown PLY type '" + type + "'");
}

class PlyReader {
 public:
  PlyReader(std::istream& in, PlyEncoding enc, std::string name)
      : in_(in), enc_(enc), name_(std::move(name)) {}

  double read(const std::string& type) {
    if (enc_ == PlyEncoding::ascii) {
      double value = 0.0;
      if (!(in_ >> value)) throw ParseError(name_ + ": truncated PLY body");
      return value;
    }
    const std::size_t size = ply_type_size(type);
    unsigned char buf[8];
    if (!in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(size))) {
      throw ParseError(name_ + ": truncated PLY body");
    }
    const bool swap = (enc_ == PlyEncoding::binary_le) != (std::endian::native == std::endian::little);
    if (swap) std::reverse(buf, buf + size);
    return decode(type, buf);
  }

 private:
  template <typename T>
  static double as(const unsigned char* buf) {
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return static_cast<double>(value);
  }

  static double decode(const std::string& t, const unsigned char* buf) {
    if (t == "char" || t == "int8") return as<std::int8_t>(buf);
    if (t == "uchar" || t == "uint8") return as<std::uint8_t>(buf);
    if (t == "short" || t == "int16") return as<std::int16_t>(buf);
    if (t == "ushort" || t == "uint16") return as<std::uint16_t>(buf);
    if (t == "int" || t == "int32") return as<std::int32_t>(buf);
    if (t == "uint" || t == "uint32") return as<std::uint32_t>(buf);
    if (t == "float" || t == "float32") return as<float>(buf);
    return as<double>(buf);
  }

  std::istream& in_;
  PlyEncoding enc_;
  std::string name_;
};

LoadedMesh read_ply(std::istream& in, const std::string& name, const MeshBuildOptions& options) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    throw ParseError(name + ": missing 'ply' magic");
  }
  PlyEncoding enc = PlyEncoding::ascii;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") enc = PlyEncoding::ascii;
      else if (fmt == "binary_little_endian") enc = PlyEncoding::binary_le;
      else if (fmt == "binary_big_endian") enc = PlyEncoding::binary_be;
      else throw ParseError(name + ": unknown PLY format '" + fmt + "'");
    } else if (key == "element") {
      PlyElement el;
      if (!(ls >> el.name >> el.count)) throw ParseError(name + ": malformed element line");
      elements.push_back(el);
    } else if (key == "property") {
      if (elements.empty()) throw ParseError(name + ": property before element");
      PlyProperty prop;
      std::string type;
      ls >> type;
      if (type == "list") {
        ls >> prop.count_type >> prop.type >> prop.name;
      } else {
        prop.type = type;
        ls >> prop.name;
      }
      if (prop.name.empty()) throw ParseError(name + ": malformed property line");
      elements.back().properties.push_back(prop);
    } else if (key == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError(name + ": PLY header not terminated");

  PlyReader reader(in, enc, name);
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  for (const PlyElement& el : elements) {
    if (el.name == "vertex") {
      for (const char* axis : {"x", "y", "z"}) {
        const bool found = std::any_of(el.properties.begin(), el.properties.end(),
                                       [&](const PlyProperty& p) { return p.name == axis; });
        if (!found) throw ParseError(name + ": vertex element lacks property " + axis);
      }
      vertices.reserve(el.count);
      for (std::size_t i = 0; i < el.count; ++i) {
        Vec3 p = Vec3::Zero();
        for (const PlyProperty& prop : el.properties) {
          if (!prop.count_type.empty()) {
            const auto n = static_cast<std::size_t>(reader.read(prop.count_type));
            for (std::size_t k = 0; k < n; ++k) reader.read(prop.type);
            continue;
          }
          const double value = reader.read(prop.type);
          if (prop.name == "x") p.x() = value;
          else if (prop.name == "y") p.y() = value;
          else if (prop.name == "z") p.z() = value;
        }
        vertices.push_back(p);
      }
    } else if (el.name == "face") {
      for (std::size_t i = 0; i < el.count; ++i) {
        for (const PlyProperty& prop : el.properties) {
          if (prop.count_type.empty()) {
            reader.read(prop.type);
            continue;
          }
          const auto n = static_cast<std::size_t>(reader.read(prop.count_type));
          std::vector<long long> polygon(n);
          for (std::size_t k = 0; k < n; ++k) {
            polygon[k] = static_cast<long long>(reader.read(prop.type));
          }
          if (prop.name != "vertex_indices" && prop.name != "vertex_index") continue;
          for (long long idx : polygon) {
            if (idx < 0 || idx >= static_cast<long long>(vertices.size())) {
              throw ParseError(name + ": face index out of range");
            }
          }
          if (n < 3) throw ParseError(name + ": face with fewer than 3 corners");
          fan_triangulate(polygon, faces);
        }
      }
    } else {
      for (std::size_t i = 0; i < el.count; ++i) {
        for (const PlyProperty& prop : el.properties) {
          if (prop.count_type.empty()) {
            reader.read(prop.type);
          } else {
            const auto n = static_cast<std::size_t>(reader.read(prop.count_type));
            for (std::size_t k = 0; k < n; ++k) reader.read(prop.type);
          }
        }
      }
    }
  }
  return finish(std::move(vertices), std::move(faces), options);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

LoadedMesh load_mesh(const std::filesystem::path& path, MeshFormat format,
                     const MeshBuildOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open mesh file '" + path.string() + "'");
  return format == MeshFormat::obj ? read_obj(in, path.string(), options)
                                   : read_ply(in, path.string(), options);
}

LoadedMesh load_mesh(const std::filesystem::path& path, const MeshBuildOptions& options) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".obj") return load_mesh(path, MeshFormat::obj, options);
  if (ext == ".ply") return load_mesh(path, MeshFormat::ply, options);
  throw ParseError("unrecognized mesh extension '" + ext + "' for '" + path.string() + "'");
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.precision(17);
  for (const Vec3& p : mesh.vertices()) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Face& f : mesh.faces()) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_ply(const TriangleMesh& mesh, const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
      << "element vertex " << mesh.vertices().size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.faces().size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  if (binary) {
    static_assert(std::endian::native == std::endian::little);
    for (const Vec3& p : mesh.vertices()) {
      out.write(reinterpret_cast<const char*>(p.data()), 3 * sizeof(double));
    }
    for (const Face& f : mesh.faces()) {
      const unsigned char n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      for (std::uint32_t idx : f) {
        const auto i = static_cast<std::int32_t>(idx);
        out.write(reinterpret_cast<const char*>(&i), sizeof(i));
      }
    }
  } else {
    out.precision(17);
    for (const Vec3& p : mesh.vertices()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const Face& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace graspmetric
