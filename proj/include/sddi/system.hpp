#pragma once
// Transient block system (u, pi, p) and the implicit solve behind one time
// step.  The operator M/dt + K is factorized once; each step is a backsolve
// with refreshed loads and boundary values.  Dirichlet conditions are
// eliminated symmetrically so the factorized matrix keeps the original
// sparsity structure minus the constrained rows and columns.

#include <fstream>
#include <iomanip>

#include <Eigen/SparseLU>

#include "sddi/common.hpp"

namespace sddi {

struct BlockLayout {
  int n_u = 0, n_pi = 0, n_p = 0;
  int off_u() const { return 0; }
  int off_pi() const { return n_u; }
  int off_p() const { return n_u + n_pi; }
  int total() const { return n_u + n_pi + n_p; }
};

// Quadrature-side evaluation of the energy bookkeeping.  These closures walk
// the elements directly instead of using the assembled matrices, so the
// balance check exercises two independent code paths.
struct EnergyAudit {
  std::function<double(const Vec&)> kinetic;            // rho/2 ||u||^2 weighted
  std::function<double(const Vec&)> storage;            // c0/2 ||p||^2 weighted
  std::function<double(const Vec&)> viscous;            // 2 mu int |D u|^2 weighted
  std::function<double(const Vec&)> slip;               // alpha int (u.tau)^2 |grad phi|
  std::function<double(const Vec&)> seepage;            // int kappa grad p . grad p weighted
  std::function<double(const Vec&, double)> work_rate;  // rho(F,u) + (g,p) at time t

  bool complete() const {
    return kinetic && storage && viscous && slip && seepage && work_rate;
  }
};

struct TransientSystem {
  BlockLayout layout;
  SpMat M;  // time-derivative weights: blkdiag(rho M_u, 0, c0 M_p)
  SpMat K;  // stationary operator
  std::function<Vec(double)> load_volume;    // body force and source at time t
  std::function<Vec(double)> load_boundary;  // natural boundary data at time t (optional)
  std::vector<std::pair<int, std::function<double(double)>>> dirichlet;
  EnergyAudit audit;
};

struct SolveAudit {
  double t = 0.0;                  // time the new state belongs to
  double solver_residual = 0.0;    // relative residual of the eliminated solve
  double boundary_work_rate = 0.0; // sum over constrained dofs of x_i (A x - b)_i
  double neumann_work_rate = 0.0;  // x . load_boundary(t)
  double constraint_residual = 0.0;  // max residual of the mass-conservation rows
};

class ImplicitSolver {
 public:
  ImplicitSolver(const TransientSystem& sys, double dt) : sys_(&sys), dt_(dt) {
    require(dt > 0.0, "implicit solver: dt must be positive");
    const int n = sys.layout.total();
    require(sys.M.rows() == n && sys.K.rows() == n, "implicit solver: block size mismatch");
    A_full_ = sys.M / dt + sys.K;
    constrained_.assign(n, 0);
    for (const auto& [dof, fn] : sys.dirichlet) {
      require(dof >= 0 && dof < n, "implicit solver: dirichlet dof out of range");
      require(static_cast<bool>(fn), "implicit solver: dirichlet value missing");
      constrained_[dof] = 1;
    }
    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(A_full_.nonZeros()));
    for (int k = 0; k < A_full_.outerSize(); ++k)
      for (SpMat::InnerIterator it(A_full_, k); it; ++it)
        if (!constrained_[it.row()] && !constrained_[it.col()])
          trips.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < n; ++i)
      if (constrained_[i]) trips.emplace_back(i, i, 1.0);
    A_elim_.resize(n, n);
    A_elim_.setFromTriplets(trips.begin(), trips.end());
    lu_.compute(A_elim_);
    require(lu_.info() == Eigen::Success,
            "implicit solver: factorization failed; the system is singular (a zero "
            "regularization floor can leave one phase without coercive terms)");
  }

  double dt() const { return dt_; }
  const SpMat& full_matrix() const { return A_full_; }
  const std::vector<char>& constrained() const { return constrained_; }

  // Advance one step of length dt from (t_old, x_old).
  Vec advance(double t_old, const Vec& x_old, SolveAudit* audit = nullptr) const {
    const double t_new = t_old + dt_;
    Vec b_full = sys_->load_volume ? sys_->load_volume(t_new) : Vec::Zero(x_old.size());
    Vec b_neumann;
    if (sys_->load_boundary) {
      b_neumann = sys_->load_boundary(t_new);
      b_full += b_neumann;
    }
    b_full += (sys_->M * x_old) / dt_;

    Vec lift = Vec::Zero(x_old.size());
    for (const auto& [dof, fn] : sys_->dirichlet) lift[dof] = fn(t_new);
    Vec b_elim = b_full - A_full_ * lift;
    for (int i = 0; i < static_cast<int>(constrained_.size()); ++i)
      if (constrained_[i]) b_elim[i] = lift[i];

    Vec x = lu_.solve(b_elim);
    const double scale = std::max(b_elim.norm(), 1.0);
    const double resid = (A_elim_ * x - b_elim).norm() / scale;
    require(resid <= 1e-10, "implicit solver: backsolve residual above tolerance");

    if (audit) {
      audit->t = t_new;
      audit->solver_residual = resid;
      const Vec r_full = A_full_ * x - b_full;
      double w = 0.0;
      for (int i = 0; i < static_cast<int>(constrained_.size()); ++i)
        if (constrained_[i]) w += x[i] * r_full[i];
      audit->boundary_work_rate = w;
      audit->neumann_work_rate = b_neumann.size() ? x.dot(b_neumann) : 0.0;
      double c = 0.0;
      for (int i = sys_->layout.off_pi(); i < sys_->layout.off_pi() + sys_->layout.n_pi; ++i)
        c = std::max(c, std::abs(r_full[i]));
      audit->constraint_residual = c / std::max(1.0, x.lpNorm<Eigen::Infinity>());
    }
    return x;
  }

 private:
  const TransientSystem* sys_;
  double dt_;
  SpMat A_full_, A_elim_;
  std::vector<char> constrained_;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
};

inline void write_matrix_market(const SpMat& A, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "write_matrix_market: cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  out << std::setprecision(17);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
  require(out.good(), "write_matrix_market: write failed for " + path);
}

}  // namespace sddi
