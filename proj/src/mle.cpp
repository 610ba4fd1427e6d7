#include <cmath>
#include <limits>

#include "cpnli/tomography.hpp"

namespace cpnli {

namespace {

// Strictly-upper entries of T: (0,1) (0,2) (1,2) (0,3) (1,3) (2,3).
constexpr int kUpper[6][2] = {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}, {2, 3}};

CholeskyParams pack(const Matrix4cd& t) {
  CholeskyParams x;
  for (int k = 0; k < 4; ++k) x(k) = t(k, k).real();
  for (int m = 0; m < 6; ++m) {
    const Complex z = t(kUpper[m][0], kUpper[m][1]);
    x(4 + 2 * m) = z.real();
    x(5 + 2 * m) = z.imag();
  }
  return x;
}

// Upper-triangular T with rho = T^dagger T, also for rank-deficient rho: with
// rho = A^dagger A, A = diag(sqrt(p)) V^dagger, the QR factor R of A works
// once each row is rotated to a real non-negative diagonal.
CholeskyParams factor_of(const DensityMatrix& rho) {
  const auto eig = hermitian_eigen(rho.matrix());
  const Matrix4cd a = eig.values.cwiseMax(0.0).cwiseSqrt().cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  Matrix4cd r = Eigen::HouseholderQR<Matrix4cd>(a).matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < 4; ++k) {
    const double m = std::abs(r(k, k));
    if (m > 0) r.row(k) *= std::conj(r(k, k)) / m;
  }
  return pack(r);
}

}  // namespace

Matrix4cd cholesky_factor(const CholeskyParams& x) {
  Matrix4cd t = Matrix4cd::Zero();
  for (int k = 0; k < 4; ++k) t(k, k) = x(k);
  for (int m = 0; m < 6; ++m) t(kUpper[m][0], kUpper[m][1]) = Complex(x(4 + 2 * m), x(5 + 2 * m));
  return t;
}

DensityMatrix cholesky_density(const CholeskyParams& x) {
  const Matrix4cd t = cholesky_factor(x);
  return DensityMatrix::from_unnormalized(t.adjoint() * t);
}

// Kullback-Leibler divergence of the normalized predictions from the observed
// frequencies: the negative per-count profile log-likelihood shifted by a
// data-only constant, so it stays small near the optimum.
double mle_objective(const CholeskyParams& x, std::span<const double, 16> counts, const ProjectorSet16& projectors,
                     CholeskyParams* gradient) {
  double n = 0;
  for (double c : counts) n += c;
  if (!(n > 0)) throw ValidationError("positive-counts", "at least one projector needs counts");

  const Matrix4cd t = cholesky_factor(x);
  const Matrix4cd a = t.adjoint() * t;
  const double tr = a.trace().real();
  if (!(tr > 0)) return std::numeric_limits<double>::infinity();

  // p_j = <k_j| rho |k_j>
  const auto& kets = projectors.kets();
  const Eigen::Matrix<Complex, 4, 16> ak = a * kets;
  Eigen::Matrix<double, 16, 1> p = (kets.conjugate().cwiseProduct(ak)).colwise().sum().real().transpose() / tr;
  const double s = p.sum();

  double f = 0;
  for (int j = 0; j < 16; ++j) {
    const double c = counts[static_cast<std::size_t>(j)];
    if (c <= 0) continue;
    if (!(p(j) > 0)) return std::numeric_limits<double>::infinity();
    const double freq = c / n;
    f += freq * (std::log(freq) - std::log(p(j) / s));
  }

  if (gradient) {
    // With l the per-count log-likelihood, dl = Tr(G drho) and through
    // rho = T^dagger T / tr: dl/dRe T_kl + i dl/dIm T_kl = (2/tr) (T G)_kl.
    Eigen::Matrix<double, 16, 1> coeff;
    for (int j = 0; j < 16; ++j) {
      const double c = counts[static_cast<std::size_t>(j)];
      coeff(j) = -1.0 / s + (c > 0 ? c / n / p(j) : 0.0);
    }
    const Matrix4cd g = kets * coeff.asDiagonal() * kets.adjoint();
    const Matrix4cd d = (2.0 / tr) * (t * g);
    CholeskyParams out;
    for (int k = 0; k < 4; ++k) out(k) = -d(k, k).real();
    for (int m = 0; m < 6; ++m) {
      const Complex z = d(kUpper[m][0], kUpper[m][1]);
      out(4 + 2 * m) = -z.real();
      out(5 + 2 * m) = -z.imag();
    }
    *gradient = out;
  }
  return f;
}

MleResult mle_reconstruct(std::span<const double, 16> counts, const ProjectorSet16& projectors,
                          const MleOptions& options) {
  double n = 0;
  for (double c : counts) {
    if (c < 0 || !std::isfinite(c)) throw ValidationError("non-negative-counts", "counts must be finite and >= 0");
    n += c;
  }
  if (!(n > 0)) throw ValidationError("positive-counts", "all-zero counts cannot be reconstructed");

  // Quasi-Newton (BFGS) ascent on the Cholesky parameters with step halving
  // until the Armijo condition holds. The start keeps a little I/4 so no row of
  // T begins at zero, where its gradient vanishes.
  using Mat16 = Eigen::Matrix<double, 16, 16>;
  CholeskyParams x = factor_of(linear_inversion(counts, projectors));
  CholeskyParams g;
  double f = mle_objective(x, counts, projectors, &g);
  Mat16 h = Mat16::Identity();
  bool fresh = true;
  int stalled = 0;  // consecutive steps that left f unchanged to rounding

  MleResult result;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (g.norm() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    CholeskyParams dir = -h * g;
    double slope = g.dot(dir);
    if (!(slope < 0)) {
      h.setIdentity();
      fresh = true;
      dir = -g;
      slope = -g.squaredNorm();
    }

    double step = 1.0;
    CholeskyParams x_new, g_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      x_new = x + step * dir;
      f_new = mle_objective(x_new, counts, projectors, &g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fresh) break;
      h.setIdentity();
      fresh = true;
      continue;
    }

    const CholeskyParams sv = x_new - x;
    const CholeskyParams yv = g_new - g;
    const double ys = yv.dot(sv);
    if (ys > 1e-300) {
      if (fresh) h *= ys / yv.squaredNorm();
      const double r = 1.0 / ys;
      const Mat16 left = Mat16::Identity() - r * sv * yv.transpose();
      h = left * h * left.transpose() + r * sv * sv.transpose();
      fresh = false;
    }
    stalled = f - f_new <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f)) ? stalled + 1 : 0;
    x = x_new;
    f = f_new;
    g = g_new;
    if (stalled >= 10) break;
  }

  // Near a rank-deficient optimum the objective is quartic in the small rows of
  // T and the ascent stalls; the unmixed clipped inversion can sit closer.
  const CholeskyParams edge = factor_of(linear_inversion(counts, projectors, 0.0));
  CholeskyParams g_edge;
  const double f_edge = mle_objective(edge, counts, projectors, &g_edge);
  if (f_edge < f) {
    x = edge;
    f = f_edge;
    g = g_edge;
  }

  const Matrix4cd t = cholesky_factor(x);
  result.rho = DensityMatrix::from_unnormalized(t.adjoint() * t);
  result.iterations = it;
  result.gradient_norm = g.norm();

  double s = 0;
  std::array<double, 16> p;
  for (std::size_t j = 0; j < 16; ++j) {
    p[j] = (projectors[j].matrix * result.rho.matrix()).trace().real();
    s += p[j];
  }
  const double total_rate = n / s;
  double ll = 0;
  for (std::size_t j = 0; j < 16; ++j) {
    const double mu = total_rate * p[j];
    if (counts[j] > 0) ll += counts[j] * std::log(mu);
    ll -= mu;
  }
  result.log_likelihood = ll;
  return result;
}

MleResult mle_reconstruct(const CountRecord& record, const ProjectorSet16& projectors, const MleOptions& options) {
  const auto obs = record.observations();
  return mle_reconstruct(std::span<const double, 16>(obs), projectors, options);
}

}  // namespace cpnli
