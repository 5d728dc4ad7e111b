// Copyright 2026 The ciplan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ciplan/geometry/mesh_io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ciplan/error.hpp"

namespace ciplan::geometry {
namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string point_text(const Vec3& p) {
  return fmt17(p.x()) + " " + fmt17(p.y()) + " " + fmt17(p.z());
}

[[noreturn]] void parse_error(const std::string& what, size_t line) {
  throw Error(ErrorKind::kParse,
              what + " (line " + std::to_string(line) + ")");
}

void check_units(const std::string& unit, size_t line) {
  if (unit != "mm") parse_error("unsupported unit '" + unit + "'", line);
}

double to_double(const std::string& token, size_t line) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    parse_error("bad number '" + token + "'", line);
  }
  return v;
}

}  // namespace

void write_ply(std::ostream& out, const TriMesh& mesh) {
  out << "ply\nformat ascii 1.0\n";
  out << "comment units mm\n";
  if (!mesh.label.empty()) out << "comment label " << mesh.label << "\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  out << "element face " << mesh.triangles.size() << "\n";
  out << "property list uchar int vertex_indices\n";
  out << "end_header\n";
  for (const Vec3& v : mesh.vertices) out << point_text(v) << "\n";
  for (const auto& t : mesh.triangles) {
    out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  }
}

TriMesh read_ply(std::istream& in, const std::string& label) {
  TriMesh mesh;
  mesh.label = label;
  std::string line;
  size_t lineno = 0;
  size_t n_vertices = 0;
  size_t n_faces = 0;
  bool have_units = false;
  if (!std::getline(in, line) || line != "ply") parse_error("missing 'ply' magic", 1);
  ++lineno;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "end_header") break;
    if (key == "format") {
      std::string kind;
      ss >> kind;
      if (kind != "ascii") parse_error("only ASCII PLY is supported", lineno);
    } else if (key == "comment") {
      std::string what, value;
      ss >> what >> value;
      if (what == "units") {
        check_units(value, lineno);
        have_units = true;
      } else if (what == "label" && mesh.label.empty()) {
        mesh.label = value;
      }
    } else if (key == "element") {
      std::string what;
      size_t count = 0;
      ss >> what >> count;
      if (what == "vertex") n_vertices = count;
      else if (what == "face") n_faces = count;
    }
  }
  if (!have_units) parse_error("PLY header lacks 'comment units mm'", lineno);
  mesh.vertices.reserve(n_vertices);
  for (size_t i = 0; i < n_vertices; ++i) {
    if (!std::getline(in, line)) parse_error("truncated vertex list", lineno);
    ++lineno;
    std::istringstream ss(line);
    std::array<std::string, 3> tok;
    if (!(ss >> tok[0] >> tok[1] >> tok[2])) parse_error("bad vertex", lineno);
    mesh.vertices.emplace_back(to_double(tok[0], lineno),
                               to_double(tok[1], lineno),
                               to_double(tok[2], lineno));
  }
  mesh.triangles.reserve(n_faces);
  for (size_t i = 0; i < n_faces; ++i) {
    if (!std::getline(in, line)) parse_error("truncated face list", lineno);
    ++lineno;
    std::istringstream ss(line);
    int count = 0;
    std::array<int, 3> tri{};
    if (!(ss >> count >> tri[0] >> tri[1] >> tri[2]) || count != 3) {
      parse_error("faces must be triangles", lineno);
    }
    mesh.triangles.push_back(tri);
  }
  mesh.validate();
  return mesh;
}

void write_stl(std::ostream& out, const TriMesh& mesh) {
  const std::string name = mesh.label.empty() ? "mesh" : mesh.label;
  out << "solid " << name << " units mm\n";
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const Vec3 n = (b - a).cross(c - a).normalized();
    out << "  facet normal " << point_text(n) << "\n    outer loop\n";
    for (const Vec3* p : {&a, &b, &c}) {
      out << "      vertex " << point_text(*p) << "\n";
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid " << name << "\n";
}

TriMesh read_stl(std::istream& in, const std::string& label) {
  TriMesh mesh;
  mesh.label = label;
  std::string line;
  size_t lineno = 0;
  bool have_units = false;
  std::map<std::array<double, 3>, int> index;
  std::array<int, 3> tri{};
  int corner = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "solid") {
      std::string name, what, unit;
      ss >> name >> what >> unit;
      if (what == "units") {
        check_units(unit, lineno);
        have_units = true;
      }
      if (mesh.label.empty()) mesh.label = name;
    } else if (key == "vertex") {
      std::array<std::string, 3> tok;
      if (!(ss >> tok[0] >> tok[1] >> tok[2])) parse_error("bad vertex", lineno);
      const std::array<double, 3> xyz{to_double(tok[0], lineno),
                                      to_double(tok[1], lineno),
                                      to_double(tok[2], lineno)};
      auto [it, inserted] =
          index.try_emplace(xyz, static_cast<int>(mesh.vertices.size()));
      if (inserted) mesh.vertices.emplace_back(xyz[0], xyz[1], xyz[2]);
      if (corner > 2) parse_error("facet with more than 3 vertices", lineno);
      tri[corner++] = it->second;
    } else if (key == "endloop") {
      if (corner != 3) parse_error("facet is not a triangle", lineno);
      mesh.triangles.push_back(tri);
      corner = 0;
    }
  }
  if (!have_units) parse_error("STL solid line lacks 'units mm'", 1);
  mesh.validate();
  return mesh;
}

void save_mesh(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string());
  }
  const auto ext = path.extension().string();
  if (ext == ".stl") write_stl(out, mesh);
  else write_ply(out, mesh);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

TriMesh load_mesh(const std::filesystem::path& path, const std::string& label) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  if (path.extension() == ".stl") return read_stl(in, label);
  return read_ply(in, label);
}

}  // namespace ciplan::geometry
