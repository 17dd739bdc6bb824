#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lyapfun/mesh_fem.hpp"
#include "oracles.hpp"

using namespace lyapfun;

TEST_CASE("uniform meshes") {
  const Mesh1D m1 = build_mesh(1);
  CHECK(m1.h == doctest::Approx(0.5));
  CHECK(m1.nodes == std::vector<double>{0.5});

  const Mesh1D m3 = build_mesh(3);
  CHECK(m3.h == doctest::Approx(0.25));
  CHECK(m3.nodes[0] == doctest::Approx(0.25));
  CHECK(m3.nodes[1] == doctest::Approx(0.5));
  CHECK(m3.nodes[2] == doctest::Approx(0.75));

  const Mesh1D fine = build_mesh(255);
  CHECK(fine.h == 0x1p-8);

  CHECK_THROWS_AS(build_mesh(0), std::invalid_argument);
}

TEST_CASE("mesh width times cell count reproduces the unit interval") {
  for (int n : {1, 2, 3, 7, 100, 255}) {
    const Mesh1D m = build_mesh(n);
    CHECK(std::abs(m.h * (m.n_interior + 1) - 1.0) <= 1e-14);
    for (int i = 0; i + 1 < n; ++i) CHECK(m.nodes[i] < m.nodes[i + 1]);
    CHECK(m.nodes.front() > 0.0);
    CHECK(m.nodes.back() < 1.0);
  }
}

TEST_CASE("assembly matches exact element integrals") {
  const FemMatrices f1 = assemble(build_mesh(1), 1.0, FunctionalKind::Zero,
                                  FunctionalKind::Identity);
  CHECK(f1.mass.diag[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(f1.stiffness.diag[0] == doctest::Approx(4.0).epsilon(1e-15));

  const FemMatrices f3 = assemble(build_mesh(3), 1.0, FunctionalKind::Zero,
                                  FunctionalKind::Identity);
  for (double v : f3.mass.diag) CHECK(v == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  for (double v : f3.mass.off) CHECK(v == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
  for (double v : f3.stiffness.diag) CHECK(v == doctest::Approx(8.0).epsilon(1e-15));
  for (double v : f3.stiffness.off) CHECK(v == doctest::Approx(-4.0).epsilon(1e-15));
}

TEST_CASE("operator rescaling multiplies the stiffness only") {
  const FemMatrices f = assemble(build_mesh(3), 0.05, FunctionalKind::Zero,
                                 FunctionalKind::Identity);
  CHECK(f.stiffness.diag[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(f.stiffness.off[0] == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(f.mass.diag[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("functional matrices follow their kinds") {
  const Mesh1D mesh = build_mesh(4);
  const FemMatrices f = assemble(mesh, 1.0, FunctionalKind::Zero,
                                 FunctionalKind::Identity);
  CHECK(f.r_mat.max_abs() == 0.0);
  CHECK(f.g_mat == to_dense(f.mass));
}

TEST_CASE("mass and stiffness are positive definite") {
  for (int n : {1, 3, 8}) {
    const FemMatrices f = assemble(build_mesh(n), 0.05, FunctionalKind::Identity,
                                   FunctionalKind::Identity);
    CHECK(sym_eigenvalues(to_dense(f.mass)).front() > 0.0);
    CHECK(sym_eigenvalues(to_dense(f.stiffness)).front() > 0.0);
    CHECK(sym_eigenvalues(f.g_mat).front() > 0.0);
  }
}

TEST_CASE("mass row sums match exact quadrature") {
  for (int n : {1, 2, 5, 9}) {
    const Mesh1D mesh = build_mesh(n);
    const FemMatrices f = assemble(mesh, 1.0, FunctionalKind::Zero,
                                   FunctionalKind::Identity);
    const double h = mesh.h;
    for (int i = 0; i < n; ++i) {
      double row = f.mass.diag[i];
      if (i > 0) row += f.mass.off[i - 1];
      if (i + 1 < n) row += f.mass.off[i];
      const bool interior = i > 0 && i + 1 < n;
      const double expect = interior ? h : (n == 1 ? 2 * h / 3 : 2 * h / 3 + h / 6);
      CHECK(row == doctest::Approx(expect).epsilon(1e-14));

      // Independent route: the row sum is the integral of phi_i times
      // the sum of all interior hats, integrated element by element so
      // the quadrature cannot miss the narrow support.
      double by_quadrature = 0.0;
      for (int e = 0; e <= n; ++e)
        by_quadrature += oracles::integrate(
            [&mesh, i, n](double x) {
              double s = 0.0;
              for (int j = 0; j < n; ++j) s += oracles::hat_value(j, mesh.h, x);
              return oracles::hat_value(i, mesh.h, x) * s;
            },
            e * mesh.h, (e + 1) * mesh.h);
      CHECK(row == doctest::Approx(by_quadrature).epsilon(1e-12));
    }
  }
}

TEST_CASE("stiffness entries match adaptive quadrature of the derivatives") {
  for (int n : {1, 4, 8}) {
    const Mesh1D mesh = build_mesh(n);
    const FemMatrices f = assemble(mesh, 1.0, FunctionalKind::Zero,
                                   FunctionalKind::Identity);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double entry = 0.0;
        if (i == j) entry = f.stiffness.diag[i];
        else if (std::abs(i - j) == 1) entry = f.stiffness.off[std::min(i, j)];
        // Piecewise-constant integrand; integrate element by element.
        double quad = 0.0;
        for (int e = 0; e <= n; ++e)
          quad += oracles::integrate(
              [&mesh, i, j](double x) {
                return oracles::hat_derivative(i, mesh.h, x) *
                       oracles::hat_derivative(j, mesh.h, x);
              },
              e * mesh.h, (e + 1) * mesh.h);
        CHECK(std::abs(entry - quad) <= 1e-12 * std::max(1.0, std::abs(entry)));
      }
  }
}

TEST_CASE("quartic overlaps: canonical values") {
  const Mesh1D mesh = build_mesh(3);  // h = 0.25
  const QuarticTable table = quartic_overlaps(mesh);
  CHECK(table.value(1, 1, 1, 1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(table.value(1, 1, 1, 2) == doctest::Approx(0.0125).epsilon(1e-15));
  CHECK(table.value(1, 1, 2, 2) == doctest::Approx(0.25 / 30.0).epsilon(1e-15));
  CHECK(table.value(0, 0, 2, 2) == 0.0);
  CHECK_FALSE(table.contains(0, 0, 2, 2));
}

TEST_CASE("quartic overlaps match the beta-function identity") {
  const Mesh1D mesh = build_mesh(5);
  const QuarticTable table = quartic_overlaps(mesh);
  const double h = mesh.h;
  // Two full elements for the pure fourth power.
  CHECK(table.value(2, 2, 2, 2) ==
        doctest::Approx(2.0 * oracles::beta_element_integral(4, 0, h)).epsilon(1e-14));
  // One shared element for mixed products.
  CHECK(table.value(2, 2, 2, 3) ==
        doctest::Approx(oracles::beta_element_integral(3, 1, h)).epsilon(1e-14));
  CHECK(table.value(2, 2, 3, 3) ==
        doctest::Approx(oracles::beta_element_integral(2, 2, h)).epsilon(1e-14));
}

TEST_CASE("quartic table is symmetric under all index permutations") {
  const Mesh1D mesh = build_mesh(8);
  const QuarticTable table = quartic_overlaps(mesh);
  int perm[4] = {0, 1, 2, 3};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 8; ++k)
        for (int l = 0; l < 8; ++l) {
          const int idx[4] = {i, j, k, l};
          const double base = table.value(i, j, k, l);
          CHECK(base >= 0.0);
          std::sort(perm, perm + 4);
          do {
            CHECK(table.value(idx[perm[0]], idx[perm[1]], idx[perm[2]],
                              idx[perm[3]]) == base);
          } while (std::next_permutation(perm, perm + 4));
        }
}

TEST_CASE("quartic entries are absent exactly for disjoint supports") {
  const Mesh1D mesh = build_mesh(6);
  const QuarticTable table = quartic_overlaps(mesh);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k)
        for (int l = 0; l < 6; ++l) {
          const int lo = std::min(std::min(i, j), std::min(k, l));
          const int hi = std::max(std::max(i, j), std::max(k, l));
          const bool some_pair_disjoint = hi - lo >= 2;
          CHECK(table.contains(i, j, k, l) == !some_pair_disjoint);
        }
}

TEST_CASE("nodal interpolation") {
  const Mesh1D mesh = build_mesh(3);
  const auto hat = [](double chi) { return chi < 0.5 ? chi : 1.0 - chi; };
  CHECK(interpolate(mesh, hat) == std::vector<double>{0.25, 0.5, 0.25});

  CHECK(interpolate(mesh, [](double) { return 0.0; }) ==
        std::vector<double>{0.0, 0.0, 0.0});

  const Mesh1D single = build_mesh(1);
  const std::vector<double> s =
      interpolate(single, [](double chi) { return std::sin(std::numbers::pi * chi); });
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(interpolate(mesh, [](double chi) { return 1.0 / (chi - 0.5); }),
                  std::invalid_argument);
}
