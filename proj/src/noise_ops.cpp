#include "lyapfun/noise_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lyapfun/errors.hpp"

namespace lyapfun {

double gaussian_kernel(double chi, double sigma_dist, double corr_len) {
  const double d = chi - sigma_dist;
  return std::exp(-d * d / (2.0 * corr_len * corr_len));
}

namespace {

// 4-point Gauss-Legendre rule on [-1,1].
constexpr double kGaussNode[4] = {-0.8611363115940526, -0.3399810435848563,
                                  0.3399810435848563, 0.8611363115940526};
constexpr double kGaussWeight[4] = {0.3478548451374538, 0.6521451548625461,
                                    0.6521451548625461, 0.3478548451374538};

// Hat function of interior node i (0-based, at x=(i+1)h) evaluated at x.
double hat(int i, double h, double x) {
  const double xi = (i + 1) * h;
  const double d = std::abs(x - xi);
  return d >= h ? 0.0 : 1.0 - d / h;
}

// Elements supporting the product phi_i phi_j of a neighbouring pair
// (j == i or j == i+1). Element e spans [e*h, (e+1)*h].
void pair_elements(int i, int j, int* elems, int* count) {
  *count = 0;
  if (i == j) {
    elems[(*count)++] = i;
    elems[(*count)++] = i + 1;
  } else {
    elems[(*count)++] = std::max(i, j);  // the single shared element
  }
}

// Integral of q(x,y) * (phi_a phi_b)(x) * (phi_c phi_d)(y) over one
// element pair, mapped by a tensorized Gauss rule with `split`
// subdivisions per axis.
double element_pair_integral(const std::function<double(double, double)>& q,
                             double h, int e1, int e2, int a, int b, int c,
                             int d, int split) {
  const double sub = h / split;
  double total = 0.0;
  for (int s1 = 0; s1 < split; ++s1) {
    const double x0 = e1 * h + s1 * sub;
    for (int s2 = 0; s2 < split; ++s2) {
      const double y0 = e2 * h + s2 * sub;
      double acc = 0.0;
      for (int g1 = 0; g1 < 4; ++g1) {
        const double x = x0 + 0.5 * sub * (1.0 + kGaussNode[g1]);
        const double px = hat(a, h, x) * hat(b, h, x);
        if (px == 0.0) continue;
        double inner = 0.0;
        for (int g2 = 0; g2 < 4; ++g2) {
          const double y = y0 + 0.5 * sub * (1.0 + kGaussNode[g2]);
          const double py = hat(c, h, y) * hat(d, h, y);
          if (py == 0.0) continue;
          inner += kGaussWeight[g2] * q(x, y) * py;
        }
        acc += kGaussWeight[g1] * px * inner;
      }
      total += acc * 0.25 * sub * sub;
    }
  }
  return total;
}

double kernel_cov_entry(const std::function<double(double, double)>& q, double h,
                        int a, int b, int c, int d, int split) {
  int e1[2], e2[2];
  int c1 = 0, c2 = 0;
  pair_elements(a, b, e1, &c1);
  pair_elements(c, d, e2, &c2);
  double sum = 0.0;
  for (int u = 0; u < c1; ++u)
    for (int v = 0; v < c2; ++v)
      sum += element_pair_integral(q, h, e1[u], e2[v], a, b, c, d, split);
  return sum;
}

}  // namespace

IncrementCovariance build_increment_covariance(const Mesh1D& mesh,
                                               const QuarticTable& quartic,
                                               const NoiseModel& model) {
  const int n = mesh.n_interior;
  if (quartic.n() != n)
    throw std::invalid_argument("build_increment_covariance: quartic table built on a different mesh");
  if (model.kind == NoiseModel::Kind::KernelQ && !model.kernel)
    throw std::invalid_argument("build_increment_covariance: KernelQ model without kernel");

  IncrementCovariance cov;
  cov.n_ = n;
  cov.local_ = model.kind == NoiseModel::Kind::WhiteNoise;
  const int n_pairs = 2 * n - 1;
  cov.pair_cov_ = DenseMatrix(n_pairs);
  const double b2 = model.b_scale * model.b_scale;

  auto pair_nodes = [](int p, int* a, int* b) {
    *a = p / 2;
    *b = (p % 2 == 0) ? p / 2 : p / 2 + 1;
  };

  if (model.kind == NoiseModel::Kind::WhiteNoise) {
    for (int p = 0; p < n_pairs; ++p) {
      int a, b;
      pair_nodes(p, &a, &b);
      for (int q = p; q < n_pairs; ++q) {
        int c, d;
        pair_nodes(q, &c, &d);
        const double v = b2 * quartic.value(a, b, c, d);
        cov.pair_cov_(p, q) = v;
        cov.pair_cov_(q, p) = v;
      }
    }
  } else {
    const double scale = mesh.h * mesh.h;  // entries are O(h^2 * sup|q|)
    for (int p = 0; p < n_pairs; ++p) {
      int a, b;
      pair_nodes(p, &a, &b);
      for (int q = p; q < n_pairs; ++q) {
        int c, d;
        pair_nodes(q, &c, &d);
        // Composite tensorized Gauss rule, refined until two successive
        // levels agree.
        double prev = kernel_cov_entry(model.kernel, mesh.h, a, b, c, d, 1);
        double value = prev;
        double gap = 0.0;
        bool converged = false;
        for (int split = 2; split <= 16; split *= 2) {
          value = kernel_cov_entry(model.kernel, mesh.h, a, b, c, d, split);
          gap = std::abs(value - prev);
          if (gap <= 1e-11 * std::max({std::abs(value), scale, 1e-300})) {
            converged = true;
            break;
          }
          prev = value;
        }
        if (!converged)
          throw AccuracyError(
              "build_increment_covariance: kernel quadrature did not converge "
              "(estimate " + std::to_string(gap) + ")",
              gap);
        cov.pair_cov_(p, q) = b2 * value;
        cov.pair_cov_(q, p) = b2 * value;
      }
    }
  }

  cov.factor_ = cholesky_psd(cov.pair_cov_);
  int bw = 0;
  for (int j = 0; j < n_pairs; ++j)
    for (int i = j + 1; i < n_pairs; ++i)
      if (cov.factor_(i, j) != 0.0) bw = std::max(bw, i - j);
  cov.factor_bandwidth_ = bw;
  return cov;
}

TriDiag sample_increment(const IncrementCovariance& cov, double tau,
                         RngStream& rng) {
  if (tau < 0.0) throw std::invalid_argument("sample_increment: negative tau");
  const int n = cov.n();
  const int n_pairs = cov.n_pairs();
  const int bw = cov.factor_bandwidth();
  const DenseMatrix& f = cov.factor();

  std::vector<double> z(n_pairs);
  for (int p = 0; p < n_pairs; ++p) z[p] = rng.next_normal();

  const double root_tau = std::sqrt(tau);
  TriDiag dw(n);
  for (int p = 0; p < n_pairs; ++p) {
    double s = 0.0;
    const int q0 = std::max(0, p - bw);
    for (int q = q0; q <= p; ++q) s += f(p, q) * z[q];
    s *= root_tau;
    if (p % 2 == 0)
      dw.diag[p / 2] = s;
    else
      dw.off[p / 2] = s;
  }
  return dw;
}

void noise_action_to(const IncrementCovariance& cov, const DenseMatrix& l_mat,
                     DenseMatrix& out) {
  const int n = cov.n();
  if (l_mat.n() != n || out.n() != n)
    throw std::invalid_argument("noise_action: dimension mismatch");
  out.set_zero();
  for (int i = 0; i < n; ++i) {
    const int j_lo = cov.local() ? std::max(0, i - 1) : 0;
    const int j_hi = cov.local() ? std::min(n - 1, i + 1) : n - 1;
    for (int j = j_lo; j <= j_hi; ++j) {
      double s = 0.0;
      for (int l = std::max(0, i - 1); l <= std::min(n - 1, i + 1); ++l)
        for (int k = std::max(0, j - 1); k <= std::min(n - 1, j + 1); ++k) {
          const double c = cov.entry(i, l, j, k);
          if (c != 0.0) s += l_mat(k, l) * c;
        }
      out(i, j) = s;
    }
  }
}

DenseMatrix noise_action(const IncrementCovariance& cov, const DenseMatrix& l_mat) {
  DenseMatrix out(l_mat.n());
  noise_action_to(cov, l_mat, out);
  return out;
}

std::vector<double> noise_tensor_apply(const IncrementCovariance& cov,
                                       std::span<const double> v, double tau) {
  const int n = cov.n();
  if (v.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument(
        "noise_tensor_apply: vector is not the vec of a square matrix of the "
        "covariance dimension");
  DenseMatrix c(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) c(i, j) = v[static_cast<size_t>(j) * n + i];
  const DenseMatrix w = noise_action(cov, c);
  // Column-stacking the transpose of a row-major matrix reads its
  // storage linearly.
  std::vector<double> out(v.size());
  const double* p = w.data();
  for (size_t k = 0; k < out.size(); ++k) out[k] = tau * p[k];
  return out;
}

}  // namespace lyapfun
