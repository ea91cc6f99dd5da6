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

#include <array>
#include <unordered_map>
#include <vector>

#include "endovo/fusion.hpp"

namespace endovo {

namespace {

// Corner c of a cube sits at offset (c & 1, (c >> 1) & 1, (c >> 2) & 1).
constexpr int corner_offset(int c, int axis) { return (c >> axis) & 1; }

struct CubeEdge {
  int a;     // corner with the lower coordinate along `axis`
  int b;
  int axis;
};

struct CaseTable {
  std::array<CubeEdge, 12> edges{};
  // Per sign configuration, triangles as triples of edge indices.
  std::array<std::vector<std::array<int, 3>>, 256> triangles;
};

Eigen::Vector3d corner_position(int c) {
  return {double(corner_offset(c, 0)), double(corner_offset(c, 1)),
          double(corner_offset(c, 2))};
}

// Builds the 256-entry triangulation table. Every face of the cube is cut by
// zero or more segments joining its sign-changing edges; on faces with two
// diagonal inside corners each inside corner is cut off separately, which
// depends only on the face and keeps neighbouring cubes watertight. Segments
// are oriented with the inside corners on their right seen from outside the
// cube, chained into loops, and fanned into triangles whose normals then point
// from inside (negative) to outside (positive).
CaseTable build_case_table() {
  CaseTable table;
  int n = 0;
  int edge_id[8][8];
  for (int a = 0; a < 8; ++a) {
    for (int axis = 0; axis < 3; ++axis) {
      if (corner_offset(a, axis) != 0) continue;
      const int b = a | (1 << axis);
      table.edges[n] = {a, b, axis};
      edge_id[a][b] = edge_id[b][a] = n;
      ++n;
    }
  }

  struct Face {
    std::array<int, 4> corners;  // cyclic
    Eigen::Vector3d normal;      // outward
  };
  std::vector<Face> faces;
  for (int axis = 0; axis < 3; ++axis) {
    const int e1 = (axis + 1) % 3;
    const int e2 = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      Face f;
      const int base = side << axis;
      f.corners = {base, base | (1 << e1), base | (1 << e1) | (1 << e2),
                   base | (1 << e2)};
      f.normal = Eigen::Vector3d::Zero();
      f.normal[axis] = side ? 1.0 : -1.0;
      faces.push_back(f);
    }
  }

  auto midpoint = [&](int e) -> Eigen::Vector3d {
    return 0.5 * (corner_position(table.edges[e].a) + corner_position(table.edges[e].b));
  };

  for (int config = 0; config < 256; ++config) {
    auto inside = [config](int c) { return ((config >> c) & 1) != 0; };
    std::array<int, 12> next;
    next.fill(-1);
    auto add_segment = [&](int ea, int eb, int inside_corner, const Face& f) {
      const Eigen::Vector3d pa = midpoint(ea);
      const Eigen::Vector3d pb = midpoint(eb);
      const double side =
          (pb - pa).cross(corner_position(inside_corner) - pa).dot(f.normal);
      if (side < 0.0) {
        next[ea] = eb;
      } else {
        next[eb] = ea;
      }
    };

    for (const Face& f : faces) {
      std::array<int, 4> cut_edges{};
      std::array<bool, 4> cut{};
      int count = 0;
      for (int i = 0; i < 4; ++i) {
        const int c0 = f.corners[i];
        const int c1 = f.corners[(i + 1) % 4];
        cut_edges[i] = edge_id[c0][c1];
        cut[i] = inside(c0) != inside(c1);
        count += cut[i];
      }
      if (count == 2) {
        int first = -1;
        int second = -1;
        for (int i = 0; i < 4; ++i) {
          if (!cut[i]) continue;
          (first < 0 ? first : second) = cut_edges[i];
        }
        int inside_corner = -1;
        for (int c : f.corners) {
          if (inside(c)) inside_corner = c;
        }
        add_segment(first, second, inside_corner, f);
      } else if (count == 4) {
        for (int i = 0; i < 4; ++i) {
          const int c = f.corners[i];
          if (!inside(c)) continue;
          add_segment(cut_edges[(i + 3) % 4], cut_edges[i], c, f);
        }
      }
    }

    std::array<bool, 12> used{};
    for (int start = 0; start < 12; ++start) {
      if (next[start] < 0 || used[start]) continue;
      std::vector<int> loop;
      for (int e = start; !used[e]; e = next[e]) {
        used[e] = true;
        loop.push_back(e);
      }
      for (std::size_t i = 1; i + 1 < loop.size(); ++i) {
        table.triangles[config].push_back({loop[0], loop[i], loop[i + 1]});
      }
    }
  }
  return table;
}

const CaseTable& case_table() {
  static const CaseTable table = build_case_table();
  return table;
}

}  // namespace

TriangleMesh extract_mesh(const TsdfVolume& vol) {
  const CaseTable& table = case_table();
  const auto& dims = vol.dims();
  TriangleMesh mesh;
  const bool with_color = vol.has_color();
  // Key: grid point index of the edge's lower end * 3 + axis.
  std::unordered_map<std::size_t, std::int32_t> edge_vertex;

  for (int k = 0; k + 1 < dims[2]; ++k) {
    for (int j = 0; j + 1 < dims[1]; ++j) {
      for (int i = 0; i + 1 < dims[0]; ++i) {
        int config = 0;
        bool observed = true;
        double values[8];
        for (int c = 0; c < 8 && observed; ++c) {
          const int ci = i + corner_offset(c, 0);
          const int cj = j + corner_offset(c, 1);
          const int ck = k + corner_offset(c, 2);
          observed = vol.weight(ci, cj, ck) > 0.0;
          values[c] = vol.tsdf(ci, cj, ck);
          if (values[c] < 0.0) config |= 1 << c;
        }
        if (!observed) continue;
        const auto& tris = table.triangles[config];
        if (tris.empty()) continue;

        auto vertex_for = [&](int e) {
          const CubeEdge& edge = table.edges[e];
          const int ai = i + corner_offset(edge.a, 0);
          const int aj = j + corner_offset(edge.a, 1);
          const int ak = k + corner_offset(edge.a, 2);
          const std::size_t key = vol.index(ai, aj, ak) * 3 + edge.axis;
          auto [it, inserted] =
              edge_vertex.try_emplace(key, static_cast<std::int32_t>(mesh.vertices.size()));
          if (inserted) {
            const double fa = values[edge.a];
            const double fb = values[edge.b];
            const double t = fa / (fa - fb);
            Vec3 p = vol.voxel_position(ai, aj, ak);
            p[edge.axis] += t * vol.voxel_size();
            mesh.vertices.push_back(p);
            if (with_color) {
              const int bi = i + corner_offset(edge.b, 0);
              const int bj = j + corner_offset(edge.b, 1);
              const int bk = k + corner_offset(edge.b, 2);
              mesh.colors.push_back((1.0 - t) * vol.color(ai, aj, ak) +
                                    t * vol.color(bi, bj, bk));
            }
          }
          return it->second;
        };
        for (const auto& tri : tris) {
          mesh.triangles.push_back({vertex_for(tri[0]), vertex_for(tri[1]),
                                    vertex_for(tri[2])});
        }
      }
    }
  }
  return mesh;
}

}  // namespace endovo
