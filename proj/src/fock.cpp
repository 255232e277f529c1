#include "optomech/fock.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>

namespace optomech {

namespace {

void validate_state(const ComplexMatrix& rho, const char* what) {
  if (rho.rows() != rho.cols() || rho.rows() < 1) {
    throw DimensionError(std::string(what) + ": matrix must be square and non-empty");
  }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kTol.hermiticity) {
    throw InvalidArgument(std::string(what) + ": not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kTol.trace) {
    throw InvalidArgument(std::string(what) + ": trace " + std::to_string(tr) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -kTol.psd) {
    throw InvalidArgument(std::string(what) + ": negative eigenvalue " +
                          std::to_string(es.eigenvalues()(0)));
  }
}

ComplexMatrix hermitize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

// sqrt(binomial(n, k)) without overflow.
double sqrt_binomial(int n, int k) {
  return std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

void require_dim(int dim) {
  if (dim < 1) throw DimensionError("Fock cutoff must be positive");
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix elements) : rho_(std::move(elements)) {
  validate_state(rho_, "DensityMatrix");
}

DensityMatrix DensityMatrix::normalized(const ComplexMatrix& elements) {
  ComplexMatrix h = hermitize(elements);
  const double tr = h.trace().real();
  if (!(tr > 0.0)) throw InvalidArgument("DensityMatrix: non-positive trace");
  return DensityMatrix(h / tr);
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double DensityMatrix::tail_population(int levels) const {
  double tail = 0.0;
  for (int n = std::max(0, dim() - levels); n < dim(); ++n) tail += population(n);
  return tail;
}

DensityMatrix DensityMatrix::padded(int new_dim) const {
  if (new_dim < dim()) throw DimensionError("padded: new cutoff smaller than current");
  ComplexMatrix out = ComplexMatrix::Zero(new_dim, new_dim);
  out.topLeftCorner(dim(), dim()) = rho_;
  return DensityMatrix(std::move(out));
}

DensityMatrix DensityMatrix::truncated(int new_dim) const {
  require_dim(new_dim);
  if (new_dim >= dim()) return padded(new_dim);
  return normalized(rho_.topLeftCorner(new_dim, new_dim));
}

FockOperator::FockOperator(ComplexMatrix elements) : op_(std::move(elements)) {
  if (op_.rows() != op_.cols() || op_.rows() < 1) {
    throw DimensionError("FockOperator: matrix must be square and non-empty");
  }
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  if (a.dim() != b.dim()) throw DimensionError("FockOperator product: dimension mismatch");
  return FockOperator(a.op_ * b.op_);
}

FockOperator annihilation(int dim) {
  require_dim(dim);
  ComplexMatrix b = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
  return FockOperator(std::move(b));
}

FockOperator creation(int dim) { return annihilation(dim).adjoint(); }

FockOperator number_operator(int dim) {
  require_dim(dim);
  ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return FockOperator(std::move(n));
}

FockOperator quadrature_x(int dim) {
  const ComplexMatrix b = annihilation(dim).matrix();
  return FockOperator((b + b.adjoint()) / std::sqrt(2.0));
}

FockOperator quadrature_p(int dim) {
  const ComplexMatrix b = annihilation(dim).matrix();
  return FockOperator(Complex(0.0, 1.0) * (b.adjoint() - b) / std::sqrt(2.0));
}

FockOperator phase_rotation(double phi, int dim) {
  require_dim(dim);
  ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) u(k, k) = std::polar(1.0, -phi * k);
  return FockOperator(std::move(u));
}

FockOperator squeeze_operator(double r, int dim) {
  if (dim < 2) throw InvalidArgument("squeeze_operator: cutoff must be at least 2");
  if (std::abs(r) > kTol.max_squeezing) {
    throw InvalidArgument("squeeze_operator: |r| > 3 exceeds the supported squeezing range");
  }
  if (r == 0.0) return FockOperator(ComplexMatrix::Identity(dim, dim));

  // exp(G) with G = r(b^2 - b^dag^2)/2 anti-Hermitian; diagonalize H = iG.
  const ComplexMatrix b = annihilation(dim).matrix();
  const ComplexMatrix generator = 0.5 * r * (b * b - b.adjoint() * b.adjoint());
  const ComplexMatrix h = Complex(0.0, 1.0) * generator;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(h));
  const Eigen::VectorXcd phases =
      es.eigenvalues().unaryExpr([](double lambda) { return std::polar(1.0, -lambda); });
  ComplexMatrix s = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

  const int half = dim / 2;
  const ComplexMatrix defect = s.adjoint() * s - ComplexMatrix::Identity(dim, dim);
  const double unitarity = defect.topLeftCorner(half, half).cwiseAbs().maxCoeff();
  if (unitarity > kTol.unitarity_defect) {
    throw CutoffError("squeeze_operator: unitarity defect " + std::to_string(unitarity));
  }
  const int levels = std::min(kTol.tail_levels, dim - 1);
  const double leak = s.col(0).tail(levels).squaredNorm();
  if (leak > kTol.tail_population) {
    throw CutoffError("squeeze_operator: cutoff " + std::to_string(dim) + " too small for r=" +
                      std::to_string(r) + " (squeezed vacuum tail " + std::to_string(leak) + ")");
  }
  return FockOperator(std::move(s));
}

DensityMatrix fock_state(int n, int dim) {
  require_dim(dim);
  if (n < 0 || n >= dim) throw DimensionError("fock_state: level outside cutoff");
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(n, n) = 1.0;
  return DensityMatrix(std::move(rho));
}

DensityMatrix vacuum_state(int dim) { return fock_state(0, dim); }

DensityMatrix thermal_state(double n_eff, int dim) {
  require_dim(dim);
  if (!(n_eff >= 0.0)) throw InvalidArgument("thermal_state: n_eff must be non-negative");
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  const double ratio = n_eff / (1.0 + n_eff);
  double p = 1.0 / (1.0 + n_eff);
  double total = 0.0;
  for (int k = 0; k < dim; ++k) {
    rho(k, k) = p;
    total += p;
    p *= ratio;
  }
  if (1.0 - total > kTol.thermal_trace_deficit) {
    throw CutoffError("thermal_state: cutoff " + std::to_string(dim) + " misses population " +
                      std::to_string(1.0 - total));
  }
  return DensityMatrix(rho / total);
}

DensityMatrix squeezed_thermal_state(double r, double n_eff, int dim) {
  require_dim(dim);
  // Squeeze on a doubled cutoff so wrap-around at the top of the truncated
  // generator never reaches the retained levels.
  const int ext = 2 * std::max(dim, 2);
  const DensityMatrix thermal = thermal_state(n_eff, ext);
  const ComplexMatrix s = squeeze_operator(r, ext).matrix();
  const ComplexMatrix full = s * thermal.matrix() * s.adjoint();
  const ComplexMatrix block = hermitize(full.topLeftCorner(dim, dim));
  const double deficit = 1.0 - block.trace().real();
  if (deficit > kTol.tail_population) {
    throw CutoffError("squeezed_thermal_state: cutoff " + std::to_string(dim) +
                      " misses population " + std::to_string(deficit));
  }
  DensityMatrix rho = DensityMatrix::normalized(block);
  if (!rho.converged()) {
    throw CutoffError("squeezed_thermal_state: tail population " +
                      std::to_string(rho.tail_population()) + " at cutoff " + std::to_string(dim));
  }
  return rho;
}

DensityMatrix loss_channel(const DensityMatrix& rho, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("loss_channel: eta outside [0, 1]");
  if (eta == 1.0) return rho;
  const int dim = rho.dim();
  const ComplexMatrix& in = rho.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  // out_kl = sum_j sqrt(C(k+j,j) C(l+j,j)) eta^((k+l)/2) (1-eta)^j rho_{k+j,l+j}
  for (int k = 0; k < dim; ++k) {
    for (int l = 0; l < dim; ++l) {
      Complex acc = 0.0;
      const double survive = std::pow(eta, 0.5 * (k + l));
      double lost = 1.0;
      for (int j = 0; k + j < dim && l + j < dim; ++j) {
        acc += sqrt_binomial(k + j, j) * sqrt_binomial(l + j, j) * lost * in(k + j, l + j);
        lost *= 1.0 - eta;
      }
      out(k, l) = survive * acc;
    }
  }
  return DensityMatrix(hermitize(out));
}

DensityMatrix transform(const DensityMatrix& rho, const FockOperator& unitary) {
  if (unitary.dim() != rho.dim()) throw DimensionError("transform: dimension mismatch");
  return DensityMatrix::normalized(unitary.matrix() * rho.matrix() * unitary.matrix().adjoint());
}

DensityMatrix rotate(const DensityMatrix& rho, double phi) {
  return transform(rho, phase_rotation(phi, rho.dim()));
}

Complex expectation(const DensityMatrix& rho, const FockOperator& op) {
  if (rho.dim() != op.dim()) throw DimensionError("expectation: dimension mismatch");
  return (rho.matrix() * op.matrix()).trace();
}

double mean_number(const DensityMatrix& rho) {
  double n = 0.0;
  for (int k = 0; k < rho.dim(); ++k) n += k * rho.population(k);
  return n;
}

std::pair<double, double> quadrature_variances(const DensityMatrix& rho) {
  const FockOperator x = quadrature_x(rho.dim());
  const FockOperator p = quadrature_p(rho.dim());
  const double mx = expectation(rho, x).real();
  const double mp = expectation(rho, p).real();
  return {expectation(rho, x * x).real() - mx * mx, expectation(rho, p * p).real() - mp * mp};
}

TwoModeState::TwoModeState(int dim_m, int dim_o, ComplexMatrix elements)
    : dim_m_(dim_m), dim_o_(dim_o), rho_(std::move(elements)) {
  if (dim_m < 1 || dim_o < 1 || rho_.rows() != static_cast<Eigen::Index>(dim_m) * dim_o) {
    throw DimensionError("TwoModeState: matrix size does not match dim_m * dim_o");
  }
  validate_state(rho_, "TwoModeState");
}

TwoModeState TwoModeState::product(const DensityMatrix& mech, const DensityMatrix& opt) {
  return TwoModeState(mech.dim(), opt.dim(), Eigen::kroneckerProduct(mech.matrix(), opt.matrix()));
}

DensityMatrix TwoModeState::mechanics() const {
  ComplexMatrix out = ComplexMatrix::Zero(dim_m_, dim_m_);
  for (int i = 0; i < dim_m_; ++i)
    for (int j = 0; j < dim_m_; ++j)
      for (int o = 0; o < dim_o_; ++o) out(i, j) += rho_(index(i, o), index(j, o));
  return DensityMatrix::normalized(out);
}

DensityMatrix TwoModeState::optics() const {
  ComplexMatrix out = ComplexMatrix::Zero(dim_o_, dim_o_);
  for (int i = 0; i < dim_o_; ++i)
    for (int j = 0; j < dim_o_; ++j)
      for (int m = 0; m < dim_m_; ++m) out(i, j) += rho_(index(m, i), index(m, j));
  return DensityMatrix::normalized(out);
}

double TwoModeState::tail_population(int levels) const {
  double tail = 0.0;
  for (int m = 0; m < dim_m_; ++m) {
    for (int o = 0; o < dim_o_; ++o) {
      if (m >= dim_m_ - levels || o >= dim_o_ - levels) tail += rho_(index(m, o), index(m, o)).real();
    }
  }
  return tail;
}

TwoModeState optical_loss(const TwoModeState& state, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("optical_loss: eta outside [0, 1]");
  const int dm = state.dim_m();
  const int dop = state.dim_o();
  const ComplexMatrix& in = state.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(in.rows(), in.cols());
  for (int k = 0; k < dop; ++k) {
    for (int l = 0; l < dop; ++l) {
      const double survive = std::pow(eta, 0.5 * (k + l));
      double lost = 1.0;
      for (int j = 0; k + j < dop && l + j < dop; ++j) {
        const double w = survive * lost * sqrt_binomial(k + j, j) * sqrt_binomial(l + j, j);
        for (int a = 0; a < dm; ++a)
          for (int b = 0; b < dm; ++b)
            out(state.index(a, k), state.index(b, l)) += w * in(state.index(a, k + j), state.index(b, l + j));
        lost *= 1.0 - eta;
      }
    }
  }
  return TwoModeState(dm, dop, hermitize(out));
}

TwoModeState optical_dephasing(const TwoModeState& state) {
  ComplexMatrix out = state.matrix();
  for (int a = 0; a < state.dim_m(); ++a)
    for (int k = 0; k < state.dim_o(); ++k)
      for (int b = 0; b < state.dim_m(); ++b)
        for (int l = 0; l < state.dim_o(); ++l)
          if (k != l) out(state.index(a, k), state.index(b, l)) = 0.0;
  return TwoModeState(state.dim_m(), state.dim_o(), std::move(out));
}

ComplexMatrix optical_projection(const TwoModeState& state, int m) {
  if (m < 0 || m >= state.dim_o()) throw DimensionError("optical_projection: level outside cutoff");
  ComplexMatrix out(state.dim_m(), state.dim_m());
  for (int a = 0; a < state.dim_m(); ++a)
    for (int b = 0; b < state.dim_m(); ++b) out(a, b) = state.matrix()(state.index(a, m), state.index(b, m));
  return out;
}

}  // namespace optomech
