#pragma once
// Conforming triangle meshes: structured rectangle generation with the
// lower-left to upper-right diagonal split, red/green refinement toward a
// level-set band, ASCII import/export, a conformity audit and point location.
//
// Mesh file format (line comments start with '#'):
//   nv nt nb
//   nv lines: x y
//   nt lines: i j k        (0-based, counter-clockwise)
//   nb lines: i j tag      (tagged edges; outer boundary and optional
//                           interior edges tagged "interface")

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sddi/common.hpp"

namespace sddi {

struct BoundaryEdge {
  int a = 0, b = 0;
  std::string tag;
};

struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary;

  int nv() const { return static_cast<int>(vertices.size()); }
  int nt() const { return static_cast<int>(triangles.size()); }
};

inline double triangle_area(const TriMesh& m, int t) {
  const auto& tri = m.triangles[t];
  const Vec2 d1 = m.vertices[tri[1]] - m.vertices[tri[0]];
  const Vec2 d2 = m.vertices[tri[2]] - m.vertices[tri[0]];
  return 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
}

inline double longest_edge(const TriMesh& m, int t) {
  const auto& tri = m.triangles[t];
  double h = 0.0;
  for (int e = 0; e < 3; ++e)
    h = std::max(h, (m.vertices[tri[(e + 1) % 3]] - m.vertices[tri[e]]).norm());
  return h;
}

inline double h_max(const TriMesh& m) {
  double h = 0.0;
  for (int t = 0; t < m.nt(); ++t) h = std::max(h, longest_edge(m, t));
  return h;
}

// ---------------------------------------------------------------------------
// Conformity audit.  Throws with a description of the first violation.

inline void audit_mesh(const TriMesh& m) {
  require(m.nv() >= 3 && m.nt() >= 1, "mesh audit: too few vertices or triangles");
  for (int v = 0; v < m.nv(); ++v)
    require(std::isfinite(m.vertices[v].x()) && std::isfinite(m.vertices[v].y()),
            "mesh audit: non-finite vertex " + std::to_string(v));

  std::map<std::pair<int, int>, int> edge_count;
  std::vector<char> used(m.nv(), 0);
  for (int t = 0; t < m.nt(); ++t) {
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      require(tri[k] >= 0 && tri[k] < m.nv(),
              "mesh audit: vertex index out of range in triangle " + std::to_string(t));
      used[tri[k]] = 1;
    }
    require(tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2],
            "mesh audit: repeated vertex in triangle " + std::to_string(t));
    require(triangle_area(m, t) > 0.0,
            "mesh audit: non-positive area (orientation) in triangle " + std::to_string(t));
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  for (int v = 0; v < m.nv(); ++v)
    require(used[v], "mesh audit: isolated vertex " + std::to_string(v));
  for (const auto& [e, c] : edge_count)
    require(c <= 2, "mesh audit: edge shared by more than two triangles");

  std::map<std::pair<int, int>, std::string> tagged;
  for (const auto& be : m.boundary) {
    auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
    require(edge_count.count(key), "mesh audit: tagged edge is not a mesh edge");
    require(!tagged.count(key), "mesh audit: duplicate tagged edge");
    require(!be.tag.empty(), "mesh audit: empty tag");
    if (edge_count[key] == 2)
      require(be.tag == "interface",
              "mesh audit: interior edge tagged '" + be.tag + "' (only 'interface' allowed)");
    tagged[key] = be.tag;
  }
  for (const auto& [e, c] : edge_count)
    if (c == 1)
      require(tagged.count(e),
              "mesh audit: untagged outer boundary edge (" + std::to_string(e.first) + "," +
                  std::to_string(e.second) + ")");
}

// ---------------------------------------------------------------------------
// Structured rectangle mesh.

struct RectangleSpec {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  int nx = 1, ny = 1;
  // Optional grading: refine triangles meeting {|levelset| < band} this many
  // times after the uniform build.
  ScalarField grading_levelset;
  double grading_band = 0.0;
  int grading_levels = 0;
};

inline TriMesh build_uniform(const RectangleSpec& spec) {
  require(spec.nx >= 1 && spec.ny >= 1, "build_uniform: nx, ny must be positive");
  require(spec.x1 > spec.x0 && spec.y1 > spec.y0, "build_uniform: empty rectangle");
  TriMesh m;
  const int nvx = spec.nx + 1, nvy = spec.ny + 1;
  const double dx = (spec.x1 - spec.x0) / spec.nx;
  const double dy = (spec.y1 - spec.y0) / spec.ny;
  m.vertices.reserve(nvx * nvy);
  for (int j = 0; j < nvy; ++j)
    for (int i = 0; i < nvx; ++i)
      m.vertices.emplace_back(spec.x0 + i * dx, spec.y0 + j * dy);
  auto vid = [nvx](int i, int j) { return j * nvx + i; };
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  }
  for (int i = 0; i < spec.nx; ++i) {
    m.boundary.push_back({vid(i, 0), vid(i + 1, 0), "bottom"});
    m.boundary.push_back({vid(i, spec.ny), vid(i + 1, spec.ny), "top"});
  }
  for (int j = 0; j < spec.ny; ++j) {
    m.boundary.push_back({vid(0, j), vid(0, j + 1), "left"});
    m.boundary.push_back({vid(spec.nx, j), vid(spec.nx, j + 1), "right"});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Red/green refinement toward a level-set band.  Marked triangles are split
// into four similar children; neighbours with exactly one split edge are
// bisected (green) to keep the mesh conforming.

inline TriMesh refine_once(const TriMesh& m, const std::vector<char>& marked) {
  std::map<std::pair<int, int>, int> midpoint;  // split edge -> new vertex id
  TriMesh out;
  out.vertices = m.vertices;
  auto edge_key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };

  // Collect split edges from marked triangles, then propagate: a triangle
  // with two split edges is refined fully (all three edges split).
  std::map<std::pair<int, int>, char> split;
  for (int t = 0; t < m.nt(); ++t)
    if (marked[t])
      for (int e = 0; e < 3; ++e)
        split[edge_key(m.triangles[t][e], m.triangles[t][(e + 1) % 3])] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int t = 0; t < m.nt(); ++t) {
      const auto& tri = m.triangles[t];
      int n_split = 0;
      for (int e = 0; e < 3; ++e)
        n_split += split.count(edge_key(tri[e], tri[(e + 1) % 3])) ? 1 : 0;
      if (n_split == 2) {
        for (int e = 0; e < 3; ++e)
          if (!split.count(edge_key(tri[e], tri[(e + 1) % 3]))) {
            split[edge_key(tri[e], tri[(e + 1) % 3])] = 1;
            changed = true;
          }
      }
    }
  }
  for (const auto& [e, flag] : split) {
    (void)flag;
    midpoint[e] = out.nv();
    out.vertices.push_back(0.5 * (m.vertices[e.first] + m.vertices[e.second]));
  }

  auto mid = [&](int a, int b) -> int {
    auto it = midpoint.find(edge_key(a, b));
    return it == midpoint.end() ? -1 : it->second;
  };
  for (int t = 0; t < m.nt(); ++t) {
    const auto& tri = m.triangles[t];
    const int a = tri[0], b = tri[1], c = tri[2];
    const int mab = mid(a, b), mbc = mid(b, c), mca = mid(c, a);
    const int n_split = (mab >= 0) + (mbc >= 0) + (mca >= 0);
    if (n_split == 0) {
      out.triangles.push_back(tri);
    } else if (n_split == 3) {
      out.triangles.push_back({a, mab, mca});
      out.triangles.push_back({mab, b, mbc});
      out.triangles.push_back({mca, mbc, c});
      out.triangles.push_back({mab, mbc, mca});
    } else if (n_split == 1) {
      if (mab >= 0) {
        out.triangles.push_back({a, mab, c});
        out.triangles.push_back({mab, b, c});
      } else if (mbc >= 0) {
        out.triangles.push_back({b, mbc, a});
        out.triangles.push_back({mbc, c, a});
      } else {
        out.triangles.push_back({c, mca, b});
        out.triangles.push_back({mca, a, b});
      }
    } else {
      throw std::runtime_error("refine_once: closure left a triangle with two split edges");
    }
  }
  for (const auto& be : m.boundary) {
    const int mm = mid(be.a, be.b);
    if (mm < 0) {
      out.boundary.push_back(be);
    } else {
      out.boundary.push_back({be.a, mm, be.tag});
      out.boundary.push_back({mm, be.b, be.tag});
    }
  }
  return out;
}

inline TriMesh refine_toward_levelset(const TriMesh& m, const ScalarField& levelset,
                                      double band, int levels) {
  require(static_cast<bool>(levelset), "refine_toward_levelset: empty level set");
  require(band >= 0.0 && levels >= 0, "refine_toward_levelset: bad band/levels");
  TriMesh cur = m;
  for (int l = 0; l < levels; ++l) {
    std::vector<char> marked(cur.nt(), 0);
    for (int t = 0; t < cur.nt(); ++t) {
      const auto& tri = cur.triangles[t];
      double vals[7];
      int n = 0;
      for (int k = 0; k < 3; ++k) {
        const Vec2& v = cur.vertices[tri[k]];
        vals[n++] = levelset(v.x(), v.y());
      }
      for (int k = 0; k < 3; ++k) {
        const Vec2 mpt = 0.5 * (cur.vertices[tri[k]] + cur.vertices[tri[(k + 1) % 3]]);
        vals[n++] = levelset(mpt.x(), mpt.y());
      }
      const Vec2 cpt = (cur.vertices[tri[0]] + cur.vertices[tri[1]] + cur.vertices[tri[2]]) / 3.0;
      vals[n++] = levelset(cpt.x(), cpt.y());
      bool hit = false, pos = false, neg = false;
      for (int k = 0; k < n; ++k) {
        if (std::abs(vals[k]) < band) hit = true;
        (vals[k] > 0 ? pos : neg) = true;
      }
      marked[t] = (hit || (pos && neg)) ? 1 : 0;
    }
    cur = refine_once(cur, marked);
  }
  return cur;
}

inline TriMesh build_rectangle(const RectangleSpec& spec) {
  TriMesh m = build_uniform(spec);
  if (spec.grading_levelset && spec.grading_levels > 0)
    m = refine_toward_levelset(m, spec.grading_levelset, spec.grading_band, spec.grading_levels);
  return m;
}

// ---------------------------------------------------------------------------
// ASCII import/export.

inline void export_mesh(const TriMesh& m, std::ostream& os) {
  os.precision(17);
  os << m.nv() << " " << m.nt() << " " << m.boundary.size() << "\n";
  for (const auto& v : m.vertices) os << v.x() << " " << v.y() << "\n";
  for (const auto& t : m.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (const auto& b : m.boundary) os << b.a << " " << b.b << " " << b.tag << "\n";
}

inline void export_mesh_file(const TriMesh& m, const std::string& path) {
  std::ofstream os(path);
  require(os.good(), "export_mesh: cannot open " + path);
  export_mesh(m, os);
  require(os.good(), "export_mesh: write failed for " + path);
}

inline TriMesh import_mesh(std::istream& is) {
  auto next_line = [&is](int& lineno) -> std::string {
    std::string line;
    while (std::getline(is, line)) {
      ++lineno;
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      return line;
    }
    return {};
  };
  int lineno = 0;
  auto fail = [&lineno](const std::string& what) {
    throw std::runtime_error("mesh parse error at line " + std::to_string(lineno) + ": " + what);
  };

  std::string header = next_line(lineno);
  if (header.empty()) fail("missing header 'nv nt nb'");
  std::istringstream hs(header);
  long nv = -1, nt = -1, nb = -1;
  if (!(hs >> nv >> nt >> nb) || nv < 3 || nt < 1 || nb < 0) fail("bad header 'nv nt nb'");

  TriMesh m;
  m.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    std::string line = next_line(lineno);
    if (line.empty()) fail("unexpected end of file in vertex block");
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x >> y)) fail("bad vertex line");
    m.vertices.emplace_back(x, y);
  }
  for (long i = 0; i < nt; ++i) {
    std::string line = next_line(lineno);
    if (line.empty()) fail("unexpected end of file in triangle block");
    std::istringstream ls(line);
    int a, b, c;
    if (!(ls >> a >> b >> c)) fail("bad triangle line");
    m.triangles.push_back({a, b, c});
  }
  for (long i = 0; i < nb; ++i) {
    std::string line = next_line(lineno);
    if (line.empty()) fail("unexpected end of file in boundary block");
    std::istringstream ls(line);
    BoundaryEdge be;
    if (!(ls >> be.a >> be.b >> be.tag)) fail("bad boundary line");
    m.boundary.push_back(be);
  }
  audit_mesh(m);
  return m;
}

inline TriMesh import_mesh_file(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), "import_mesh: cannot open " + path);
  return import_mesh(is);
}

// ---------------------------------------------------------------------------
// Point location via a uniform background grid over the bounding box.

struct TriLocator {
  const TriMesh* mesh = nullptr;
  Vec2 lo, hi;
  int ncx = 1, ncy = 1;
  std::vector<std::vector<int>> buckets;

  explicit TriLocator(const TriMesh& m) : mesh(&m) {
    lo = Vec2(1e300, 1e300);
    hi = Vec2(-1e300, -1e300);
    for (const auto& v : m.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    const int n = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m.nt()) / 2.0)));
    ncx = n;
    ncy = n;
    buckets.assign(static_cast<size_t>(ncx) * ncy, {});
    for (int t = 0; t < m.nt(); ++t) {
      Vec2 tlo(1e300, 1e300), thi(-1e300, -1e300);
      for (int k = 0; k < 3; ++k) {
        tlo = tlo.cwiseMin(m.vertices[m.triangles[t][k]]);
        thi = thi.cwiseMax(m.vertices[m.triangles[t][k]]);
      }
      int i0, j0, i1, j1;
      cell_of(tlo, i0, j0);
      cell_of(thi, i1, j1);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) buckets[j * ncx + i].push_back(t);
    }
  }

  void cell_of(const Vec2& p, int& i, int& j) const {
    const Vec2 ext = hi - lo;
    i = std::clamp(static_cast<int>((p.x() - lo.x()) / std::max(ext.x(), 1e-300) * ncx), 0, ncx - 1);
    j = std::clamp(static_cast<int>((p.y() - lo.y()) / std::max(ext.y(), 1e-300) * ncy), 0, ncy - 1);
  }

  // Returns the containing triangle and its barycentric coordinates; the
  // triangle with the least-negative minimal coordinate wins ties on edges.
  bool locate(const Vec2& p, int& tri, std::array<double, 3>& bary) const {
    int ci, cj;
    cell_of(p, ci, cj);
    double best = -1e300;
    tri = -1;
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const int i = ci + di, j = cj + dj;
        if (i < 0 || j < 0 || i >= ncx || j >= ncy) continue;
        for (int t : buckets[j * ncx + i]) {
          const auto& tv = mesh->triangles[t];
          const Vec2& v0 = mesh->vertices[tv[0]];
          const Vec2& v1 = mesh->vertices[tv[1]];
          const Vec2& v2 = mesh->vertices[tv[2]];
          const double area2 = (v1 - v0).x() * (v2 - v0).y() - (v1 - v0).y() * (v2 - v0).x();
          const double l1 = ((p - v0).x() * (v2 - v0).y() - (p - v0).y() * (v2 - v0).x()) / area2;
          const double l2 = ((v1 - v0).x() * (p - v0).y() - (v1 - v0).y() * (p - v0).x()) / area2;
          const double l0 = 1.0 - l1 - l2;
          const double mn = std::min({l0, l1, l2});
          if (mn > best) {
            best = mn;
            tri = t;
            bary = {l0, l1, l2};
          }
        }
      }
    }
    return tri >= 0 && best > -1e-9;
  }
};

}  // namespace sddi
