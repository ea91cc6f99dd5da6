// Copyright 2026 The Endovo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "endovo/error.hpp"
#include "endovo/io.hpp"

namespace endovo {

namespace {

void append(std::string& out, const char* fmt, auto... args) {
  char buf[256];
  const int n = std::snprintf(buf, sizeof(buf), fmt, args...);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

std::string format_tum(std::span<const TumEntry> entries) {
  std::string out;
  for (const TumEntry& e : entries) {
    const Vec3& t = e.pose.translation();
    const Eigen::Quaterniond q = e.pose.quaternion();
    append(out, "%.6f %.9f %.9f %.9f %.9f %.9f %.9f %.9f\n", e.timestamp, t.x(),
           t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
  }
  return out;
}

void write_tum(const fs::path& path, std::span<const TumEntry> entries) {
  write_text_file(path, format_tum(entries));
}

std::vector<TumEntry> read_tum(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<TumEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double v[8];
    for (double& x : v) {
      if (!(ls >> x)) {
        throw Error(ErrorCode::kIo, path.string() + ":" + std::to_string(line_no) +
                                        ": expected 8 numbers");
      }
    }
    out.push_back({v[0], Pose::from_quaternion(Vec3(v[1], v[2], v[3]), v[4], v[5],
                                               v[6], v[7])});
  }
  return out;
}

std::string format_ply(const TriangleMesh& mesh) {
  const bool color = !mesh.colors.empty();
  std::string out;
  out += "ply\nformat ascii 1.0\ncomment generated by endovo\n";
  append(out, "element vertex %zu\n", mesh.vertices.size());
  out += "property float x\nproperty float y\nproperty float z\n";
  if (color) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  append(out, "element face %zu\n", mesh.triangles.size());
  out += "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& p = mesh.vertices[i];
    append(out, "%.6f %.6f %.6f", p.x(), p.y(), p.z());
    if (color) {
      const Vec3 c = (mesh.colors[i].cwiseMax(0.0).cwiseMin(1.0) * 255.0).array().round();
      append(out, " %d %d %d", int(c.x()), int(c.y()), int(c.z()));
    }
    out += '\n';
  }
  for (const auto& t : mesh.triangles) {
    append(out, "3 %" PRId32 " %" PRId32 " %" PRId32 "\n", t[0], t[1], t[2]);
  }
  return out;
}

void write_ply(const fs::path& path, const TriangleMesh& mesh) {
  write_text_file(path, format_ply(mesh));
}

TriangleMesh read_ply(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t n_vertices = 0;
  std::size_t n_faces = 0;
  bool color = false;
  if (!std::getline(in, line) || line != "ply") {
    throw Error(ErrorCode::kIo, path.string() + " is not a PLY file");
  }
  bool ascii = false;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line == "end_header") {
      header_done = true;
      break;
    }
    std::istringstream ls(line);
    std::string word, kind;
    ls >> word;
    if (word == "format") {
      ls >> kind;
      ascii = kind == "ascii";
    } else if (word == "element") {
      ls >> kind;
      if (kind == "vertex") {
        ls >> n_vertices;
      } else if (kind == "face") {
        ls >> n_faces;
      } else {
        throw Error(ErrorCode::kIo, "unsupported PLY element '" + kind + "'");
      }
    } else if (word == "property" && line.find("red") != std::string::npos) {
      color = true;
    }
  }
  if (!header_done || !ascii) {
    throw Error(ErrorCode::kIo, path.string() + " is not an ASCII PLY file");
  }
  TriangleMesh mesh;
  mesh.vertices.resize(n_vertices);
  if (color) mesh.colors.resize(n_vertices);
  for (std::size_t i = 0; i < n_vertices; ++i) {
    Vec3& p = mesh.vertices[i];
    in >> p.x() >> p.y() >> p.z();
    if (color) {
      int r, g, b;
      in >> r >> g >> b;
      mesh.colors[i] = Vec3(r, g, b) / 255.0;
    }
  }
  mesh.triangles.resize(n_faces);
  for (std::size_t i = 0; i < n_faces; ++i) {
    int count;
    in >> count >> mesh.triangles[i][0] >> mesh.triangles[i][1] >> mesh.triangles[i][2];
    if (count != 3) throw Error(ErrorCode::kIo, "PLY face is not a triangle");
    for (int idx : mesh.triangles[i]) {
      if (idx < 0 || std::size_t(idx) >= n_vertices) {
        throw Error(ErrorCode::kIo, "PLY face index out of range in " + path.string());
      }
    }
  }
  if (!in) throw Error(ErrorCode::kIo, "truncated PLY file " + path.string());
  return mesh;
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace endovo
