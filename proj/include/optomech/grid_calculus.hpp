#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace optomech {

template <typename Scalar>
using GridArray = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Fourth-order second derivative along the rows (first index) of `f`.
///
/// Interior points use the 5-point central stencil; the two outermost points
/// on each side use 6-point one-sided stencils of the same order.
template <typename Scalar>
GridArray<Scalar> second_derivative_rows(const GridArray<Scalar>& f, Scalar h) {
  const Eigen::Index n = f.rows();
  GridArray<Scalar> out(f.rows(), f.cols());
  const Scalar inv = Scalar(1) / (h * h);
  if (n < 6) {
    out.setZero();
    for (Eigen::Index i = 1; i + 1 < n; ++i) out.row(i) = (f.row(i - 1) - 2 * f.row(i) + f.row(i + 1)) * inv;
    return out;
  }
  for (Eigen::Index i = 2; i + 2 < n; ++i) {
    out.row(i) = (-f.row(i - 2) + 16 * f.row(i - 1) - 30 * f.row(i) + 16 * f.row(i + 1) - f.row(i + 2)) *
                 (inv / Scalar(12));
  }
  const auto edge0 = [&](Eigen::Index i, Eigen::Index s) {
    // s = +1 marches inward from the low edge, s = -1 from the high edge.
    return (Scalar(15) / 4 * f.row(i) - Scalar(77) / 6 * f.row(i + s) + Scalar(107) / 6 * f.row(i + 2 * s) -
            Scalar(13) * f.row(i + 3 * s) + Scalar(61) / 12 * f.row(i + 4 * s) - Scalar(5) / 6 * f.row(i + 5 * s)) *
           inv;
  };
  const auto edge1 = [&](Eigen::Index i, Eigen::Index s) {
    return (Scalar(5) / 6 * f.row(i - s) - Scalar(5) / 4 * f.row(i) - Scalar(1) / 3 * f.row(i + s) +
            Scalar(7) / 6 * f.row(i + 2 * s) - Scalar(1) / 2 * f.row(i + 3 * s) + Scalar(1) / 12 * f.row(i + 4 * s)) *
           inv;
  };
  out.row(0) = edge0(0, 1);
  out.row(1) = edge1(1, 1);
  out.row(n - 1) = edge0(n - 1, -1);
  out.row(n - 2) = edge1(n - 2, -1);
  return out;
}

/// Fourth-order Laplacian of samples f(x_i, p_j) stored as f(i, j).
template <typename Scalar>
GridArray<Scalar> laplacian(const GridArray<Scalar>& f, Scalar hx, Scalar hp) {
  GridArray<Scalar> fxx = second_derivative_rows<Scalar>(f, hx);
  GridArray<Scalar> ft = f.transpose();
  fxx += second_derivative_rows<Scalar>(ft, hp).transpose();
  return fxx;
}

/// Spectral (FFT) second derivative along the rows of `f`, treating each
/// column as periodic. Accurate when `f` has decayed at both ends.
template <typename Scalar>
GridArray<Scalar> spectral_second_derivative_rows(const GridArray<Scalar>& f, Scalar h) {
  const Eigen::Index n = f.rows();
  GridArray<Scalar> out(f.rows(), f.cols());
  Eigen::FFT<Scalar> fft;
  std::vector<Scalar> wavenumber2(n);
  const Scalar base = Scalar(2) * std::numbers::pi_v<Scalar> / (Scalar(n) * h);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index m = j <= n / 2 ? j : j - n;
    wavenumber2[j] = base * base * Scalar(m) * Scalar(m);
  }
  std::vector<Scalar> column(n);
  std::vector<std::complex<Scalar>> spectrum;
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) column[i] = f(i, c);
    fft.fwd(spectrum, column);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(spectrum.size()); ++j) spectrum[j] *= -wavenumber2[j];
    fft.inv(column, spectrum);
    for (Eigen::Index i = 0; i < n; ++i) out(i, c) = column[i];
  }
  return out;
}

template <typename Scalar>
GridArray<Scalar> spectral_laplacian(const GridArray<Scalar>& f, Scalar hx, Scalar hp) {
  GridArray<Scalar> fxx = spectral_second_derivative_rows<Scalar>(f, hx);
  GridArray<Scalar> ft = f.transpose();
  fxx += spectral_second_derivative_rows<Scalar>(ft, hp).transpose();
  return fxx;
}

/// Trigonometric interpolation from n periodic samples onto a grid `factor`
/// times finer: rows are output points k h / factor, k = 0..factor (n-1).
template <typename Scalar>
GridArray<Scalar> trig_interpolation_matrix(Eigen::Index n, int factor) {
  const Eigen::Index rows = factor * (n - 1) + 1;
  GridArray<Scalar> u(rows, n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (Eigen::Index k = 0; k < rows; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (k % factor == 0) {
        u(k, j) = k / factor == j ? Scalar(1) : Scalar(0);
        continue;
      }
      const Scalar t = Scalar(k) / Scalar(factor) - Scalar(j);
      const Scalar num = std::sin(pi * t);
      // Even n splits the Nyquist mode symmetrically.
      const Scalar den = n % 2 == 1 ? std::sin(pi * t / Scalar(n)) : std::tan(pi * t / Scalar(n));
      u(k, j) = num / (Scalar(n) * den);
    }
  }
  return u;
}

/// Composite trapezoidal rule over a uniform 2D grid.
template <typename Derived>
typename Derived::Scalar trapezoid(const Eigen::MatrixBase<Derived>& f, typename Derived::Scalar hx,
                                   typename Derived::Scalar hp) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index nx = f.rows();
  const Eigen::Index np = f.cols();
  Scalar total = f.sum();
  total -= Scalar(0.5) * (f.row(0).sum() + f.row(nx - 1).sum() + f.col(0).sum() + f.col(np - 1).sum());
  total += Scalar(0.25) * (f(0, 0) + f(0, np - 1) + f(nx - 1, 0) + f(nx - 1, np - 1));
  return total * hx * hp;
}

}  // namespace optomech

namespace optomech {

/// Trapezoid of |f| after band-limited upsampling by `factor` on both axes.
///
/// |f| has kinks on the zero set of f; integrating the interpolant on the
/// finer lattice shrinks the resulting O(h^2) error by factor^2. Rows are
/// processed in blocks to bound memory.
template <typename Scalar>
Scalar upsampled_abs_trapezoid(const GridArray<Scalar>& f, Scalar hx, Scalar hp, int factor) {
  if (factor <= 1) return trapezoid(f.cwiseAbs(), hx, hp);
  const GridArray<Scalar> ux = trig_interpolation_matrix<Scalar>(f.rows(), factor);
  const GridArray<Scalar> up_t = trig_interpolation_matrix<Scalar>(f.cols(), factor).transpose();
  const Eigen::Index rows = ux.rows();
  const Eigen::Index cols = up_t.cols();
  const Eigen::Index block = 256;
  Scalar total = 0;
  for (Eigen::Index r0 = 0; r0 < rows; r0 += block) {
    const Eigen::Index nr = std::min(block, rows - r0);
    const GridArray<Scalar> fine = (ux.middleRows(r0, nr) * f) * up_t;
    for (Eigen::Index i = 0; i < nr; ++i) {
      const Eigen::Index gi = r0 + i;
      const Scalar wx = gi == 0 || gi == rows - 1 ? Scalar(0.5) : Scalar(1);
      Scalar line = fine.row(i).cwiseAbs().sum();
      line -= Scalar(0.5) * (std::abs(fine(i, 0)) + std::abs(fine(i, cols - 1)));
      total += wx * line;
    }
  }
  return total * (hx / factor) * (hp / factor);
}

}  // namespace optomech
