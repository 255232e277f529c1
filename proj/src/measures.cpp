#include "optomech/measures.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "optomech/grid_calculus.hpp"

namespace optomech {

namespace {

constexpr double kInvPi = 1.0 / std::numbers::pi;

// Radial Wigner components F_d(r), d = 0..M-1, of
//   W = Re F_0 + 2 Re sum_{d>=1} F_d(r) e^{-i d phi}
// with F_d = sum_n rho_{n+d,n} (-1)^n / pi * sqrt(n!/(n+d)!) (sqrt2 r)^d e^{-r^2} L_n^(d)(2 r^2).
class RadialKernel {
 public:
  explicit RadialKernel(const ComplexMatrix& rho) : rho_(rho), dim_(static_cast<int>(rho.rows())) {
    lgamma_.resize(dim_ + 1);
    for (int k = 0; k <= dim_; ++k) lgamma_[k] = std::lgamma(k + 1.0);
    f_.resize(dim_);
    // next = ((2n+1+d-u) cur - back(d,n) prev) * fwd(d,n)
    back_.resize(static_cast<std::size_t>(dim_) * dim_);
    fwd_.resize(back_.size());
    for (int d = 0; d < dim_; ++d) {
      for (int n = 0; n < dim_; ++n) {
        back_[d * dim_ + n] = std::sqrt(n * (n + static_cast<double>(d)));
        fwd_[d * dim_ + n] = 1.0 / std::sqrt((n + 1.0) * (n + 1.0 + d));
      }
    }
  }

  const std::vector<Complex>& evaluate(double r2) {
    const double u = 2.0 * r2;
    const double log_r = 0.5 * std::log(r2);
    for (int d = 0; d < dim_; ++d) {
      // kernel_n = sqrt(n!/(n+d)!) (sqrt2 r)^d e^{-r^2} L_n^(d)(u), by upward recurrence in n
      double k0 = 0.0;
      if (d == 0) {
        k0 = std::exp(-r2);
      } else if (r2 > 0.0) {
        k0 = std::exp(d * (0.5 * std::numbers::ln2 + log_r) - 0.5 * lgamma_[d] - r2);
      }
      Complex acc = rho_(d, 0) * k0;
      if (k0 == 0.0) {
        f_[d] = 0.0;
        continue;
      }
      const double* back = &back_[d * dim_];
      const double* fwd = &fwd_[d * dim_];
      double prev = 0.0;
      double cur = k0;
      double sign = 1.0;
      for (int n = 0; n + d + 1 < dim_; ++n) {
        const double next = ((2.0 * n + 1.0 + d - u) * cur - back[n] * prev) * fwd[n];
        prev = cur;
        cur = next;
        sign = -sign;
        acc += rho_(n + 1 + d, n + 1) * (sign * cur);
      }
      f_[d] = acc * kInvPi;
    }
    return f_;
  }

  double imaginary_residue() const { return std::abs(f_[0].imag()); }

 private:
  const ComplexMatrix& rho_;
  int dim_;
  std::vector<double> lgamma_;
  std::vector<double> back_;
  std::vector<double> fwd_;
  std::vector<Complex> f_;
};

double angular_sum(const std::vector<Complex>& f, double x, double p) {
  const double r = std::hypot(x, p);
  if (r == 0.0 || f.size() == 1) return f[0].real();
  const Complex z(x / r, -p / r);
  Complex s = 0.0;
  for (std::size_t d = f.size() - 1; d >= 1; --d) s = (s + f[d]) * z;
  return f[0].real() + 2.0 * s.real();
}

// Smallest cutoff keeping every population above the noise floor.
int effective_dim(const DensityMatrix& rho) {
  int dim = rho.dim();
  while (dim > 1 && rho.population(dim - 1) < 1e-20) --dim;
  return dim;
}

bool is_symmetric_square(const GridSpec& s) {
  return s.nx == s.np && s.x_min == -s.x_max && s.p_min == -s.p_max && s.x_max == s.p_max;
}

void check_grid_spec(const GridSpec& s) {
  if (s.nx < 3 || s.np < 3) throw GridError("grid needs at least 3 points per axis");
  if (!(s.x_max > s.x_min) || !(s.p_max > s.p_min)) throw GridError("grid bounds are empty");
}

}  // namespace

double GridSpec::x(int i) const { return i == nx - 1 ? x_max : x_min + i * dx(); }
double GridSpec::p(int j) const { return j == np - 1 ? p_max : p_min + j * dp(); }

GridSpec GridSpec::refined() const {
  GridSpec out = *this;
  out.nx = 2 * nx - 1;
  out.np = 2 * np - 1;
  return out;
}

GridSpec GridSpec::square(double half_width, int points) {
  return GridSpec{-half_width, half_width, -half_width, half_width, points, points};
}

WignerGrid::WignerGrid(GridSpec spec, RealMatrix values) : spec_(spec), values_(std::move(values)) {
  check_grid_spec(spec_);
  if (values_.rows() != spec_.nx || values_.cols() != spec_.np) {
    throw DimensionError("WignerGrid: values do not match the grid shape");
  }
}

double WignerGrid::integral() const { return trapezoid(values_, spec_.dx(), spec_.dp()); }

double WignerGrid::boundary_max() const {
  const Eigen::Index nx = values_.rows();
  const Eigen::Index np = values_.cols();
  return std::max({values_.row(0).cwiseAbs().maxCoeff(), values_.row(nx - 1).cwiseAbs().maxCoeff(),
                   values_.col(0).cwiseAbs().maxCoeff(), values_.col(np - 1).cwiseAbs().maxCoeff()});
}

WignerGrid wigner(const DensityMatrix& rho, const GridSpec& spec) {
  check_grid_spec(spec);
  const int dim = effective_dim(rho);
  const ComplexMatrix block = rho.matrix().topLeftCorner(dim, dim);
  RadialKernel kernel(block);
  RealMatrix w(spec.nx, spec.np);
  double residue = 0.0;

  if (is_symmetric_square(spec)) {
    // Mirror-symmetric coordinates: every radius is shared by up to 8 points.
    const int n = spec.nx;
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = spec.x(i);
    for (int i = 0; i < n / 2; ++i) c[n - 1 - i] = -c[i];
    if (n % 2 == 1) c[n / 2] = 0.0;
    const int half = (n + 1) / 2;
    for (int a = 0; a < half; ++a) {
      for (int b = a; b < half; ++b) {
        const auto& f = kernel.evaluate(c[a] * c[a] + c[b] * c[b]);
        residue = std::max(residue, kernel.imaginary_residue());
        const int ia[2] = {a, n - 1 - a};
        const int ib[2] = {b, n - 1 - b};
        for (int s = 0; s < 2; ++s) {
          for (int t = 0; t < 2; ++t) {
            w(ia[s], ib[t]) = angular_sum(f, c[ia[s]], c[ib[t]]);
            w(ib[t], ia[s]) = angular_sum(f, c[ib[t]], c[ia[s]]);
          }
        }
      }
    }
  } else {
    for (int i = 0; i < spec.nx; ++i) {
      const double x = spec.x(i);
      for (int j = 0; j < spec.np; ++j) {
        const double p = spec.p(j);
        const auto& f = kernel.evaluate(x * x + p * p);
        residue = std::max(residue, kernel.imaginary_residue());
        w(i, j) = angular_sum(f, x, p);
      }
    }
  }

  if (residue > kTol.wigner_imaginary) {
    throw InvalidArgument("wigner: imaginary residue " + std::to_string(residue));
  }
  WignerGrid grid(spec, std::move(w));
  if (grid.boundary_max() > kTol.wigner_boundary) {
    throw GridError("wigner: |W| = " + std::to_string(grid.boundary_max()) +
                    " on the grid boundary; enlarge the window");
  }
  const double norm = grid.integral();
  if (std::abs(norm - 1.0) > kTol.wigner_normalization) {
    throw GridError("wigner: grid integral " + std::to_string(norm) + " != 1; refine the grid");
  }
  if (grid.max_abs() > kInvPi + kTol.wigner_bound_slack) {
    throw GridError("wigner: |W| exceeds 1/pi");
  }
  return grid;
}

double macroscopicity(const WignerGrid& grid, LaplacianScheme scheme) {
  const GridSpec& s = grid.spec();
  const RealMatrix& w = grid.values();
  const RealMatrix lap = scheme == LaplacianScheme::kSpectral ? spectral_laplacian<double>(w, s.dx(), s.dp())
                                                             : laplacian<double>(w, s.dx(), s.dp());
  const RealMatrix integrand = w.cwiseProduct(lap + 2.0 * w);
  return -0.5 * std::numbers::pi * trapezoid(integrand, s.dx(), s.dp());
}

double negativity_raw(const WignerGrid& grid, int subsample) {
  const GridSpec& s = grid.spec();
  if (subsample < 1) throw InvalidArgument("negativity: subsample factor must be at least 1");
  return 0.5 * (upsampled_abs_trapezoid<double>(grid.values(), s.dx(), s.dp(), subsample) - 1.0);
}

double negativity(const WignerGrid& grid, int subsample) {
  const double raw = negativity_raw(grid, subsample);
  if (raw < kTol.negativity_floor) {
    throw ConvergenceError("negativity: raw value " + std::to_string(raw) + " below -1e-4");
  }
  return std::max(raw, 0.0);
}

GridSpec auto_grid(const DensityMatrix& rho, int points) {
  const int dim = rho.dim();
  const double n = mean_number(rho);
  const FockOperator x = quadrature_x(dim);
  const FockOperator p = quadrature_p(dim);
  const double mx = expectation(rho, x).real();
  const double mp = expectation(rho, p).real();
  Eigen::Matrix2d cov;
  cov(0, 0) = expectation(rho, x * x).real() - mx * mx;
  cov(1, 1) = expectation(rho, p * p).real() - mp * mp;
  cov(0, 1) = cov(1, 0) = 0.5 * (expectation(rho, x * p) + expectation(rho, p * x)).real() - mx * mp;
  const double sigma = std::sqrt(std::max(cov.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff(), 0.0));
  const double half = std::max(5.0 * std::sqrt(n + 1.0), 6.0 * sigma) + std::max(std::abs(mx), std::abs(mp));
  return GridSpec::square(half, points);
}

NonclassicalityReport report(const DensityMatrix& rho, const ReportOptions& options) {
  GridSpec spec = auto_grid(rho, options.points);
  WignerGrid base = [&] {
    for (int attempt = 0;; ++attempt) {
      try {
        return wigner(rho, spec);
      } catch (const GridError&) {
        if (attempt >= 5) throw;
        spec = GridSpec::square(1.25 * spec.x_max, spec.nx);
      }
    }
  }();

  NonclassicalityReport out;
  out.mean_n = mean_number(rho);
  out.grid = spec;
  out.macroscopicity = macroscopicity(base, options.scheme);
  out.negativity = negativity(base);
  if (options.refine) {
    const WignerGrid fine = wigner(rho, spec.refined());
    const double fine_i = macroscopicity(fine, options.scheme);
    const double fine_n = negativity(fine);
    out.macroscopicity_delta = std::abs(fine_i - out.macroscopicity);
    out.negativity_delta = std::abs(fine_n - out.negativity);
    out.macroscopicity = fine_i;
    out.negativity = fine_n;
    out.grid = spec.refined();
    const auto moved = [&](double delta, double value) {
      return delta > kTol.refinement_relative * std::abs(value) + 1e-4;
    };
    if (moved(out.macroscopicity_delta, fine_i) || moved(out.negativity_delta, fine_n)) {
      throw ConvergenceError("report: grid refinement changed I by " +
                             std::to_string(out.macroscopicity_delta) + " and N by " +
                             std::to_string(out.negativity_delta));
    }
  }
  if (out.macroscopicity > out.mean_n + 0.02) {
    throw ConvergenceError("report: macroscopicity exceeds <n> + 0.02");
  }
  return out;
}

}  // namespace optomech
