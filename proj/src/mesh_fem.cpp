#include "lyapfun/mesh_fem.hpp"

#include <cmath>
#include <stdexcept>

namespace lyapfun {

Mesh1D build_mesh(int n_interior) {
  if (n_interior < 1)
    throw std::invalid_argument("build_mesh: n_interior must be at least 1");
  Mesh1D mesh;
  mesh.n_interior = n_interior;
  mesh.h = 1.0 / (n_interior + 1);
  mesh.nodes.resize(n_interior);
  for (int i = 0; i < n_interior; ++i) mesh.nodes[i] = (i + 1) * mesh.h;
  return mesh;
}

FemMatrices assemble(const Mesh1D& mesh, double a_scale, FunctionalKind r_kind,
                     FunctionalKind g_kind) {
  const int n = mesh.n_interior;
  const double h = mesh.h;
  if (n < 1 || h <= 0.0) throw std::invalid_argument("assemble: invalid mesh");
  if (a_scale <= 0.0) throw std::invalid_argument("assemble: a_scale must be positive");

  FemMatrices fem;
  fem.mass = TriDiag(n);
  fem.stiffness = TriDiag(n);
  for (int i = 0; i < n; ++i) {
    fem.mass.diag[i] = 2.0 * h / 3.0;
    fem.stiffness.diag[i] = a_scale * 2.0 / h;
  }
  for (int i = 0; i + 1 < n; ++i) {
    fem.mass.off[i] = h / 6.0;
    fem.stiffness.off[i] = -a_scale / h;
  }

  fem.g_kind = g_kind;
  fem.r_kind = r_kind;
  fem.g_mat = g_kind == FunctionalKind::Identity ? to_dense(fem.mass) : DenseMatrix(n);
  fem.r_mat = r_kind == FunctionalKind::Identity ? to_dense(fem.mass) : DenseMatrix(n);
  return fem;
}

std::uint64_t QuarticTable::key(int i, int j, int k, int l) {
  int a[4] = {i, j, k, l};
  if (a[0] > a[1]) std::swap(a[0], a[1]);
  if (a[2] > a[3]) std::swap(a[2], a[3]);
  if (a[0] > a[2]) std::swap(a[0], a[2]);
  if (a[1] > a[3]) std::swap(a[1], a[3]);
  if (a[1] > a[2]) std::swap(a[1], a[2]);
  std::uint64_t key = 0;
  for (int v : a) key = (key << 16) | static_cast<std::uint64_t>(v);
  return key;
}

QuarticTable::QuarticTable(int n_interior, double h) : n_(n_interior), h_(h) {
  // Exact element integrals for hat functions on uniform width-h cells:
  //   int phi_i^4             = 2h/5   (two supporting elements)
  //   int phi_i^3 phi_{i+1}   = h/20   (one shared element)
  //   int phi_i^2 phi_{i+1}^2 = h/30
  const double quart = 2.0 * h / 5.0;
  const double cubic_lin = h / 20.0;
  const double sq_sq = h / 30.0;
  for (int i = 0; i < n_; ++i) {
    values_[key(i, i, i, i)] = quart;
    if (i + 1 < n_) {
      values_[key(i, i, i, i + 1)] = cubic_lin;
      values_[key(i, i, i + 1, i + 1)] = sq_sq;
      values_[key(i, i + 1, i + 1, i + 1)] = cubic_lin;
    }
  }
}

double QuarticTable::value(int i, int j, int k, int l) const {
  auto it = values_.find(key(i, j, k, l));
  return it == values_.end() ? 0.0 : it->second;
}

bool QuarticTable::contains(int i, int j, int k, int l) const {
  return values_.count(key(i, j, k, l)) != 0;
}

QuarticTable quartic_overlaps(const Mesh1D& mesh) {
  if (mesh.n_interior < 1 || mesh.h <= 0.0)
    throw std::invalid_argument("quartic_overlaps: invalid mesh");
  return QuarticTable(mesh.n_interior, mesh.h);
}

std::vector<double> interpolate(const Mesh1D& mesh,
                                const std::function<double(double)>& f) {
  std::vector<double> coeffs(mesh.n_interior);
  for (int i = 0; i < mesh.n_interior; ++i) {
    const double v = f(mesh.nodes[i]);
    if (!std::isfinite(v))
      throw std::invalid_argument("interpolate: non-finite value at node " +
                                  std::to_string(mesh.nodes[i]));
    coeffs[i] = v;
  }
  return coeffs;
}

}  // namespace lyapfun
