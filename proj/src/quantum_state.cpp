#include "krauslab/quantum_state.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace krauslab {

namespace {

void require_qubit(const DensityMatrix& rho, const char* op) {
  if (rho.dim() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected a qubit state, got dimension " +
                                std::to_string(rho.dim()));
  }
}

// Multiplies v by the phase that makes it overlap w with a real, nonnegative
// inner product.
std::vector<Complex> align_phase(std::vector<Complex> v, const std::vector<Complex>& w) {
  Complex overlap = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) overlap += std::conj(v[i]) * w[i];
  if (std::abs(overlap) == 0.0) return v;
  const Complex phase = overlap / std::abs(overlap);
  for (auto& z : v) z *= phase;
  return v;
}

}  // namespace

std::string DensityValidation::describe() const {
  if (ok()) return "valid density matrix";
  std::ostringstream os;
  os.precision(3);
  os << "invalid density matrix:";
  for (const auto& v : violations) os << ' ' << v.check << " (residual " << v.residual << ')';
  return os.str();
}

DensityValidation validate_density(const ComplexMatrix& m, double tol) {
  DensityValidation out;
  if (!m.is_square() || m.empty()) {
    out.violations.push_back({"shape", 0.0});
    return out;
  }
  const double herm = hermiticity_residual(m);
  if (herm > tol) out.violations.push_back({"hermitian", herm});

  const double trace = std::abs(m.trace() - 1.0);
  if (trace > tol) out.violations.push_back({"trace", trace});

  out.eigenvalues = eigvalsh(hermitian_part(m), tol);
  const double lowest = out.eigenvalues.back();
  if (lowest < -tol) out.violations.push_back({"positive", -lowest});

  if (out.ok()) out.state = DensityMatrix(m);
  return out;
}

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m, double tol) {
  auto v = validate_density(m, tol);
  if (!v.ok()) throw std::domain_error(v.describe());
  return std::move(*v.state);
}

DensityMatrix bloch_to_density(const BlochVector& b, double tol) {
  if (!std::isfinite(b.r) || !std::isfinite(b.theta) || !std::isfinite(b.phi)) {
    throw std::domain_error("bloch_to_density: non-finite Bloch coordinates");
  }
  if (b.r < -tol || b.r > 1.0 + tol) {
    throw std::domain_error("bloch_to_density: radius " + std::to_string(b.r) +
                            " outside the Bloch ball");
  }
  const double z = b.r * std::cos(b.theta);
  const Complex lower = b.r * std::sin(b.theta) * std::exp(kI * b.phi);
  const ComplexMatrix m{{0.5 * (1.0 + z), 0.5 * std::conj(lower)},
                        {0.5 * lower, 0.5 * (1.0 - z)}};
  return DensityMatrix::from_matrix(m, tol);
}

BlochVector density_to_bloch(const DensityMatrix& rho, double tol) {
  require_qubit(rho, "density_to_bloch");
  const auto& m = rho.mat();
  const Complex lower = 0.5 * (m(1, 0) + std::conj(m(0, 1)));
  const double x = 2.0 * lower.real();
  const double y = 2.0 * lower.imag();
  const double z = m(0, 0).real() - m(1, 1).real();
  const double r = std::hypot(x, y, z);
  if (r < tol) return {};

  const double transverse = std::hypot(x, y);
  BlochVector b{r, std::atan2(transverse, z), 0.0};
  if (transverse / r >= tol) {
    b.phi = std::atan2(y, x);
    if (b.phi < 0.0) b.phi += 2.0 * std::numbers::pi;
  }
  return b;
}

ComplexMatrix DiagonalizedState::diagonal() const {
  return ordering == EigenOrdering::plus_first ? ComplexMatrix::diagonal({lambda_plus, lambda_minus})
                                               : ComplexMatrix::diagonal({lambda_minus, lambda_plus});
}

DiagonalizedState diagonalize_state(const DensityMatrix& rho, EigenOrdering ordering, double tol) {
  require_qubit(rho, "diagonalize_state");
  const auto eig = eigh(rho.mat(), tol);
  DiagonalizedState out{eig.values[0], eig.values[1], ComplexMatrix::identity(2), ordering};
  if (out.radius() < tol) return out;

  const auto b = density_to_bloch(rho, tol);
  const double c = std::cos(0.5 * b.theta);
  const double s = std::sin(0.5 * b.theta);
  const Complex up = std::exp(kI * b.phi);
  const Complex down = std::exp(-kI * b.phi);

  const auto plus = eig.vectors.column(0);
  const auto minus = eig.vectors.column(1);
  if (ordering == EigenOrdering::minus_first) {
    out.basis.set_column(0, align_phase(minus, {-s, c * up}));
    out.basis.set_column(1, align_phase(plus, {c * down, s}));
  } else {
    out.basis.set_column(0, align_phase(plus, {c, s * up}));
    out.basis.set_column(1, align_phase(minus, {-s * down, c}));
  }
  return out;
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto diff = hermitian_part(a - b);
  double sum = 0.0;
  for (double v : eigvalsh(diff, std::numeric_limits<double>::infinity())) sum += std::abs(v);
  return 0.5 * sum;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  return trace_distance(a.mat(), b.mat());
}

}  // namespace krauslab
