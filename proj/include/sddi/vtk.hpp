#pragma once
// Legacy VTK 3.0 ASCII snapshot writer.  Emits the triangulation with point
// data for the blended fields u_tot = phi u - psi kappa grad(p) and
// p_tot = phi pi + psi p, plus the phase field itself.  Element quantities
// (the pressure gradient, the velocity bubble part) are averaged over the
// triangles incident to each vertex.

#include <fstream>
#include <ostream>
#include <string>

#include "sddi/coupled.hpp"

namespace sddi {

inline void write_vtk_snapshot(std::ostream& os, const CoupledSystem& cs, const Vec& x,
                               double t) {
  const TriMesh& mesh = *cs.velocity.mesh;
  const Vec u = cs.velocity_part(x);
  const Vec pi = cs.multiplier_part(x);
  const Vec p = cs.darcy_part(x);

  std::vector<Vec2> u_avg(mesh.nv(), Vec2::Zero());
  std::vector<Vec2> q_avg(mesh.nv(), Vec2::Zero());
  std::vector<double> pi_avg(mesh.nv(), 0.0), p_avg(mesh.nv(), 0.0);
  std::vector<int> count(mesh.nv(), 0);
  const std::array<std::array<double, 3>, 3> corner = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int tri = 0; tri < mesh.nt(); ++tri) {
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles[tri][k];
      u_avg[v] += eval_vector(cs.velocity, u, tri, corner[k]).value;
      pi_avg[v] += eval_scalar(cs.multiplier, pi, tri, corner[k]).value;
      const ScalarEval pe = eval_scalar(cs.darcy, p, tri, corner[k]);
      p_avg[v] += pe.value;
      q_avg[v] += -(cs.params.kappa * pe.grad);
      ++count[v];
    }
  }

  os << "# vtk DataFile Version 3.0\n";
  os << "total fields at t = " << t << "\n";
  os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.nv() << " double\n";
  for (const Vec2& v : mesh.vertices) os << v.x() << " " << v.y() << " 0\n";
  os << "CELLS " << mesh.nt() << " " << 4 * mesh.nt() << "\n";
  for (const auto& tri : mesh.triangles)
    os << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
  os << "CELL_TYPES " << mesh.nt() << "\n";
  for (int tri = 0; tri < mesh.nt(); ++tri) os << "5\n";

  os << "POINT_DATA " << mesh.nv() << "\n";
  os << "VECTORS u_tot double\n";
  for (int v = 0; v < mesh.nv(); ++v) {
    const double phi = cs.phase.phi(mesh.vertices[v].x(), mesh.vertices[v].y());
    const Vec2 val = (phi * u_avg[v] + (1.0 - phi) * q_avg[v]) / count[v];
    os << val.x() << " " << val.y() << " 0\n";
  }
  os << "SCALARS p_tot double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.nv(); ++v) {
    const double phi = cs.phase.phi(mesh.vertices[v].x(), mesh.vertices[v].y());
    os << (phi * pi_avg[v] + (1.0 - phi) * p_avg[v]) / count[v] << "\n";
  }
  os << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.nv(); ++v)
    os << cs.phase.phi(mesh.vertices[v].x(), mesh.vertices[v].y()) << "\n";
}

inline void write_vtk_snapshot_file(const std::string& path, const CoupledSystem& cs,
                                    const Vec& x, double t) {
  std::ofstream os(path);
  require(static_cast<bool>(os), "vtk: cannot open '" + path + "'");
  os.precision(12);
  write_vtk_snapshot(os, cs, x, t);
  require(static_cast<bool>(os.flush()), "vtk: write to '" + path + "' failed");
}

}  // namespace sddi
