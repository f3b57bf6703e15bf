#include "edgerecon/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>
#include <vector>

#include "edgerecon/binary_io.hpp"
#include "edgerecon/errors.hpp"

namespace edgerecon {

namespace {

std::string extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t p = 0;
  while (p < line.size()) {
    while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    const std::size_t start = p;
    while (p < line.size() && !std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    if (p > start) out.push_back(line.substr(start, p - start));
  }
  return out;
}

double parse_real(std::string_view tok, const std::string& name, std::size_t line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(name, line, "expected a number, got '" + std::string(tok) + "'");
  }
  return v;
}

long long parse_integer(std::string_view tok, const std::string& name, std::size_t line) {
  long long v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(name, line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return v;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw IoError("cannot open '" + path + "'");
  return is;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

void check_face_indices(const TriMesh& mesh, const std::string& name) {
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (Index v : mesh.faces[f]) {
      if (v >= mesh.vertices.size()) {
        throw ParseError(name, 0, "face " + std::to_string(f) + " references missing vertex " + std::to_string(v));
      }
    }
  }
}

// ---- PLY ----

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

PlyType ply_type(std::string_view s, const std::string& name, std::size_t line) {
  if (s == "char" || s == "int8") return PlyType::kInt8;
  if (s == "uchar" || s == "uint8") return PlyType::kUint8;
  if (s == "short" || s == "int16") return PlyType::kInt16;
  if (s == "ushort" || s == "uint16") return PlyType::kUint16;
  if (s == "int" || s == "int32") return PlyType::kInt32;
  if (s == "uint" || s == "uint32") return PlyType::kUint32;
  if (s == "float" || s == "float32") return PlyType::kFloat32;
  if (s == "double" || s == "float64") return PlyType::kFloat64;
  throw ParseError(name, line, "unknown PLY type '" + std::string(s) + "'");
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUint8: return 1;
    case PlyType::kInt16:
    case PlyType::kUint16: return 2;
    case PlyType::kInt32:
    case PlyType::kUint32:
    case PlyType::kFloat32: return 4;
    case PlyType::kFloat64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

double read_binary_value(std::istream& is, PlyType t, const std::string& name) {
  unsigned char b[8] = {};
  const std::size_t n = ply_size(t);
  is.read(reinterpret_cast<char*>(b), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) throw ParseError(name, 0, "unexpected end of binary PLY data");
  std::uint64_t u = 0;
  for (std::size_t k = n; k-- > 0;) u = (u << 8) | b[k];
  switch (t) {
    case PlyType::kInt8: return static_cast<std::int8_t>(u);
    case PlyType::kUint8: return static_cast<std::uint8_t>(u);
    case PlyType::kInt16: return static_cast<std::int16_t>(u);
    case PlyType::kUint16: return static_cast<std::uint16_t>(u);
    case PlyType::kInt32: return static_cast<std::int32_t>(u);
    case PlyType::kUint32: return static_cast<std::uint32_t>(u);
    case PlyType::kFloat32: return std::bit_cast<float>(static_cast<std::uint32_t>(u));
    case PlyType::kFloat64: return std::bit_cast<double>(u);
  }
  return 0.0;
}

void push_polygon(TriMesh& mesh, const std::vector<long long>& poly, const std::string& name, std::size_t line) {
  if (poly.size() < 3) throw ParseError(name, line, "face with fewer than 3 vertices");
  for (long long v : poly) {
    if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertices.size()) {
      throw ParseError(name, line, "face index " + std::to_string(v) + " out of range");
    }
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    mesh.faces.push_back(Face{static_cast<Index>(poly[0]), static_cast<Index>(poly[k]), static_cast<Index>(poly[k + 1])});
  }
}

}  // namespace

// ---- OBJ ----

TriMesh read_obj(std::istream& is, const std::string& name) {
  TriMesh mesh;
  std::string line;
  std::size_t lineno = 0;
  std::vector<long long> poly;
  while (std::getline(is, line)) {
    ++lineno;
    const auto tok = split(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) throw ParseError(name, lineno, "vertex record needs 3 coordinates");
      mesh.vertices.emplace_back(parse_real(tok[1], name, lineno), parse_real(tok[2], name, lineno),
                                 parse_real(tok[3], name, lineno));
    } else if (tok[0] == "f") {
      if (tok.size() < 4) throw ParseError(name, lineno, "face record needs at least 3 vertices");
      poly.clear();
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const std::string_view ref = tok[k].substr(0, tok[k].find('/'));
        const long long v = parse_integer(ref, name, lineno);
        if (v == 0) throw ParseError(name, lineno, "OBJ indices are 1-based; got 0");
        // Negative indices count back from the latest vertex.
        poly.push_back(v > 0 ? v - 1 : static_cast<long long>(mesh.vertices.size()) + v);
      }
      push_polygon(mesh, poly, name, lineno);
    }
    // vn, vt, g, o, s, usemtl, mtllib and other records carry nothing we use.
  }
  return mesh;
}

void write_obj(std::ostream& os, const TriMesh& mesh) {
  os << std::setprecision(17);
  for (const Point3& v : mesh.vertices) os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Face& f : mesh.faces) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

// ---- PLY ----

TriMesh read_ply(std::istream& is, const std::string& name) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> std::vector<std::string_view> {
    if (!std::getline(is, line)) throw ParseError(name, lineno, "unexpected end of PLY header");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return split(line);
  };

  auto tok = next_line();
  if (tok.empty() || tok[0] != "ply") throw ParseError(name, lineno, "missing 'ply' magic");
  bool binary = false;
  std::vector<PlyElement> elements;
  while (true) {
    tok = next_line();
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw ParseError(name, lineno, "malformed format line");
      if (tok[1] == "ascii") {
        binary = false;
      } else if (tok[1] == "binary_little_endian") {
        binary = true;
      } else {
        throw ParseError(name, lineno, "unsupported PLY format '" + std::string(tok[1]) + "'");
      }
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError(name, lineno, "malformed element line");
      elements.push_back(PlyElement{std::string(tok[1]), static_cast<std::size_t>(parse_integer(tok[2], name, lineno)), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError(name, lineno, "property before any element");
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        prop.is_list = true;
        prop.count_type = ply_type(tok[2], name, lineno);
        prop.type = ply_type(tok[3], name, lineno);
        prop.name = tok[4];
      } else if (tok.size() == 3) {
        prop.type = ply_type(tok[1], name, lineno);
        prop.name = tok[2];
      } else {
        throw ParseError(name, lineno, "malformed property line");
      }
      elements.back().properties.push_back(prop);
    } else {
      throw ParseError(name, lineno, "unknown header keyword '" + std::string(tok[0]) + "'");
    }
  }

  TriMesh mesh;
  std::vector<long long> poly;
  for (const PlyElement& el : elements) {
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    int xyz[3] = {-1, -1, -1};
    for (std::size_t p = 0; p < el.properties.size(); ++p) {
      const auto& pn = el.properties[p].name;
      if (pn == "x") xyz[0] = static_cast<int>(p);
      if (pn == "y") xyz[1] = static_cast<int>(p);
      if (pn == "z") xyz[2] = static_cast<int>(p);
    }
    if (is_vertex && (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0)) {
      throw ParseError(name, lineno, "vertex element lacks x/y/z");
    }
    for (std::size_t r = 0; r < el.count; ++r) {
      std::vector<std::string_view> fields;
      std::size_t cursor = 0;
      if (!binary) {
        do {
          if (!std::getline(is, line)) throw ParseError(name, lineno, "unexpected end of PLY data");
          ++lineno;
          fields = split(line);
        } while (fields.empty());
      }
      auto scalar = [&](PlyType t) -> double {
        if (binary) return read_binary_value(is, t, name);
        if (cursor >= fields.size()) throw ParseError(name, lineno, "too few values in " + el.name + " record");
        return parse_real(fields[cursor++], name, lineno);
      };
      Point3 p = Point3::Zero();
      poly.clear();
      for (std::size_t pi = 0; pi < el.properties.size(); ++pi) {
        const PlyProperty& prop = el.properties[pi];
        if (prop.is_list) {
          const auto n = static_cast<long long>(scalar(prop.count_type));
          if (n < 0) throw ParseError(name, lineno, "negative list length");
          const bool indices = is_face && (prop.name == "vertex_indices" || prop.name == "vertex_index");
          for (long long k = 0; k < n; ++k) {
            const double v = scalar(prop.type);
            if (indices) poly.push_back(static_cast<long long>(v));
          }
        } else {
          const double v = scalar(prop.type);
          for (int a = 0; a < 3; ++a) {
            if (static_cast<int>(pi) == xyz[a]) p[a] = v;
          }
        }
      }
      if (!binary && cursor != fields.size()) throw ParseError(name, lineno, "too many values in " + el.name + " record");
      if (is_vertex) mesh.vertices.push_back(p);
      if (is_face) push_polygon(mesh, poly, name, lineno);
    }
  }
  return mesh;
}

void write_ply(std::ostream& os, const TriMesh& mesh, bool binary) {
  os << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
     << "element vertex " << mesh.vertices.size() << "\n"
     << "property double x\nproperty double y\nproperty double z\n"
     << "element face " << mesh.faces.size() << "\n"
     << "property list uchar int vertex_indices\nend_header\n";
  if (binary) {
    for (const Point3& v : mesh.vertices) {
      for (int a = 0; a < 3; ++a) binary::put_f64(os, v[a]);
    }
    for (const Face& f : mesh.faces) {
      os.put(3);
      for (Index i : f) binary::put_u32(os, i);
    }
  } else {
    os << std::setprecision(17);
    for (const Point3& v : mesh.vertices) os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const Face& f : mesh.faces) os << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
}

// ---- XYZ ----

PointCloud read_xyz(std::istream& is, const std::string& name) {
  PointCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto tok = split(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok.size() < 3) throw ParseError(name, lineno, "expected 3 coordinates");
    cloud.points.emplace_back(parse_real(tok[0], name, lineno), parse_real(tok[1], name, lineno),
                              parse_real(tok[2], name, lineno));
  }
  return cloud;
}

void write_xyz(std::ostream& os, const PointCloud& cloud) {
  os << std::setprecision(17);
  for (const Point3& p : cloud.points) os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

// ---- files ----

TriMesh load_mesh(const std::string& path) {
  const std::string ext = extension(path);
  TriMesh mesh;
  if (ext == "obj") {
    auto is = open_in(path);
    mesh = read_obj(is, path);
  } else if (ext == "ply") {
    auto is = open_in(path, std::ios::binary);
    mesh = read_ply(is, path);
  } else {
    throw ParseError(path, 0, "unsupported mesh extension '" + ext + "'");
  }
  check_face_indices(mesh, path);
  return mesh;
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
  const std::string ext = extension(path);
  if (ext == "obj") {
    auto os = open_out(path);
    write_obj(os, mesh);
  } else if (ext == "ply") {
    auto os = open_out(path, std::ios::binary);
    write_ply(os, mesh, true);
  } else {
    throw IoError("unsupported mesh extension '" + ext + "' for '" + path + "'");
  }
}

PointCloud load_cloud(const std::string& path) {
  const std::string ext = extension(path);
  PointCloud cloud;
  if (ext == "xyz" || ext == "txt") {
    auto is = open_in(path);
    cloud = read_xyz(is, path);
  } else if (ext == "obj" || ext == "ply") {
    cloud.points = load_mesh(path).vertices;
  } else {
    throw ParseError(path, 0, "unsupported point-cloud extension '" + ext + "'");
  }
  if (cloud.points.empty()) throw ParseError(path, 0, "file contains no points");
  return cloud;
}

void save_cloud(const PointCloud& cloud, const std::string& path) {
  const std::string ext = extension(path);
  if (ext == "xyz" || ext == "txt") {
    auto os = open_out(path);
    write_xyz(os, cloud);
  } else {
    save_mesh(TriMesh{cloud.points, {}}, path);
  }
}

}  // namespace edgerecon
