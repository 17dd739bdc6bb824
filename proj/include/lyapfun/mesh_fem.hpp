#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "lyapfun/banded_linalg.hpp"

namespace lyapfun {

/// Uniform partition of (0,1) with zero Dirichlet boundary; only the
/// interior nodes carry degrees of freedom.
struct Mesh1D {
  int n_interior = 0;               // N_h
  double h = 0.0;                   // 1/(n_interior+1)
  std::vector<double> nodes;        // x_i = (i+1)*h, i = 0..n_interior-1
};

/// Throws std::invalid_argument for n_interior < 1.
Mesh1D build_mesh(int n_interior);

enum class FunctionalKind { Zero, Identity };

/// Galerkin matrices of the piecewise linear discretization:
/// mass M, stiffness A (including the scalar rescaling of the elliptic
/// operator), and the dense Gram matrices of the terminal functional G
/// and the running functional R.
struct FemMatrices {
  TriDiag mass;
  TriDiag stiffness;
  DenseMatrix g_mat;
  DenseMatrix r_mat;
  FunctionalKind g_kind = FunctionalKind::Identity;
  FunctionalKind r_kind = FunctionalKind::Zero;
};

FemMatrices assemble(const Mesh1D& mesh, double a_scale, FunctionalKind r_kind,
                     FunctionalKind g_kind);

/// Integrals of products of four hat functions. Only quadruples whose
/// basis functions pairwise share support are nonzero; for P1 on a line
/// this means all four indices lie in {m, m+1} for some m, so the table
/// has O(n) entries. Keys are index-sorted, which makes the table
/// symmetric under any permutation by construction.
class QuarticTable {
 public:
  QuarticTable() = default;
  QuarticTable(int n_interior, double h);

  /// The integral of phi_i phi_j phi_k phi_l over (0,1); 0 when absent.
  double value(int i, int j, int k, int l) const;
  bool contains(int i, int j, int k, int l) const;
  std::size_t size() const { return values_.size(); }
  int n() const { return n_; }
  double h() const { return h_; }

 private:
  static std::uint64_t key(int i, int j, int k, int l);
  int n_ = 0;
  double h_ = 0.0;
  std::unordered_map<std::uint64_t, double> values_;
};

QuarticTable quartic_overlaps(const Mesh1D& mesh);

/// Nodal interpolation onto the interior hat functions. Throws
/// std::invalid_argument if f is non-finite at some node.
std::vector<double> interpolate(const Mesh1D& mesh,
                                const std::function<double(double)>& f);

}  // namespace lyapfun
