#include "krauslab/open_dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace krauslab {

namespace {

constexpr double kKroneckerGap = 1e-8;

void require_generator(const ComplexMatrix& h, const CompositeState& s) {
  const auto n = s.dims().joint();
  if (h.rows() != n || h.cols() != n) {
    throw std::invalid_argument("Hamiltonian is " + std::to_string(h.rows()) + "x" +
                                std::to_string(h.cols()) + " but the joint space has dimension " +
                                std::to_string(n));
  }
}

}  // namespace

CompositeState::CompositeState(DensityMatrix state, SubsystemDims dims)
    : state_(std::move(state)), dims_(dims) {
  if (dims_.system == 0 || dims_.environment == 0 || state_.dim() != dims_.joint()) {
    throw std::invalid_argument("CompositeState: state dimension " + std::to_string(state_.dim()) +
                                " does not equal " + std::to_string(dims_.system) + " * " +
                                std::to_string(dims_.environment));
  }
}

CompositeState evolve_joint(const ComplexMatrix& h, const CompositeState& s, double t, double tol) {
  require_generator(h, s);
  const auto u = expm_hermitian_generator(h, t, tol);
  return {DensityMatrix::from_matrix(sandwich(u, s.mat()), 10.0 * tol), s.dims()};
}

DensityMatrix reduced_state(const CompositeState& s, double tol) {
  return DensityMatrix::from_matrix(partial_trace(s.mat(), s.dims(), Keep::system), 10.0 * tol);
}

DensityMatrix environment_state(const CompositeState& s, double tol) {
  return DensityMatrix::from_matrix(partial_trace(s.mat(), s.dims(), Keep::environment), 10.0 * tol);
}

ComplexMatrix correlation_operator(const CompositeState& s) {
  const auto rho_i = partial_trace(s.mat(), s.dims(), Keep::system);
  const auto rho_e = partial_trace(s.mat(), s.dims(), Keep::environment);
  return s.mat() - kron(rho_i, rho_e);
}

ComplexMatrix delta_rho(const ComplexMatrix& h, const CompositeState& s, double t, double tol) {
  require_generator(h, s);
  const auto u = expm_hermitian_generator(h, t, tol);
  return partial_trace(sandwich(u, correlation_operator(s)), s.dims(), Keep::system);
}

DynamicsDecomposition decompose_dynamics(const ComplexMatrix& h, const CompositeState& s, double t,
                                         double tol) {
  require_generator(h, s);
  const auto u = expm_hermitian_generator(h, t, tol);
  const auto rho_i0 = reduced_state(s, tol);
  const auto rho_e0 = environment_state(s, tol);
  const auto correlation = s.mat() - kron(rho_i0.mat(), rho_e0.mat());

  const auto reduced = DensityMatrix::from_matrix(
      partial_trace(sandwich(u, s.mat()), s.dims(), Keep::system), 10.0 * tol);
  auto factorable = apply_kraus(factorable_kraus(u, rho_e0, tol), rho_i0.mat());
  auto delta = partial_trace(sandwich(u, correlation), s.dims(), Keep::system);
  const double residual = norm_max(reduced.mat() - factorable - delta);
  return {reduced, std::move(factorable), std::move(delta), correlation, residual};
}

ComplexMatrix cnot_hamiltonian() {
  const auto id = pauli::identity();
  const auto z = pauli::z();
  return kron(pauli::x(), 0.5 * (id - z)) + kron(id, 0.5 * (id + z));
}

CnotScenario::CnotScenario(double r0) : r0_(r0) {
  if (!std::isfinite(r0) || r0 < 0.0 || r0 > 1.0) {
    throw std::domain_error("CnotScenario: r0 = " + std::to_string(r0) + " outside [0, 1]");
  }
}

double CnotScenario::r_t(double t) const {
  const double s = std::sin(t), c = std::cos(t);
  return std::sqrt(s * s + r0_ * r0_ * c * c);
}

CompositeState CnotScenario::initial_state() const {
  const auto m = ComplexMatrix::diagonal({0.5 * (1.0 - r0_), 0.0, 0.0, 0.5 * (1.0 + r0_)});
  return {DensityMatrix::from_matrix(m), {2, 2}};
}

DensityMatrix CnotScenario::initial_reduced_state() const {
  return DensityMatrix::from_matrix(0.5 * (pauli::identity() - r0_ * pauli::z()));
}

DensityMatrix cnot_analytic_rho(const CnotScenario& sc, double t, double tol) {
  const double s = std::sin(t), c = std::cos(t), r0 = sc.r0();
  const Complex coherence = -kI * (1.0 + r0) * s * c;
  const ComplexMatrix m{{1.0 + s * s - r0 * c * c, coherence},
                        {std::conj(coherence), (1.0 + r0) * c * c}};
  return DensityMatrix::from_matrix(0.5 * m, tol);
}

KrausSet cnot_analytic_kraus(const CnotScenario& sc, double t, double tol) {
  const double r0 = sc.r0();
  const double rt = sc.r_t(t);
  if (rt <= tol) {
    throw std::domain_error("cnot_analytic_kraus: r_t vanishes at t = " + std::to_string(t));
  }
  const double s2 = std::sin(t) * std::sin(t);
  const double c2 = std::cos(t) * std::cos(t);
  const double sign = std::sin(2.0 * t) < 0.0 ? -1.0 : 1.0;

  auto root = [tol](double radicand) {
    if (radicand < -tol) {
      throw std::domain_error("cnot_analytic_kraus: negative radicand " + std::to_string(radicand));
    }
    return radicand <= 0.0 ? 0.0 : std::sqrt(radicand);
  };
  const double along = root(rt + s2 - r0 * c2);
  const double across = sign * root(rt - s2 + r0 * c2);
  const double lift = std::sqrt(1.0 + r0);
  const double shrink = root(1.0 - rt);
  const double norm = 1.0 / std::sqrt(2.0 * rt * (1.0 + r0));

  const ComplexMatrix m0 = norm * ComplexMatrix{{-lift * along, kI * shrink * across},
                                                {-kI * lift * across, shrink * along}};
  const ComplexMatrix m1 =
      (norm * std::sqrt(rt + r0)) * ComplexMatrix{{0.0, along}, {0.0, kI * across}};
  return KrausSet({m0, m1});
}

std::optional<LocalFactors> factor_local_unitary(const ComplexMatrix& u, SubsystemDims dims,
                                                 double tol) {
  const std::size_t di = dims.system, de = dims.environment;
  if (di == 0 || de == 0 || u.rows() != dims.joint() || u.cols() != dims.joint()) {
    throw std::invalid_argument("factor_local_unitary: matrix does not match dims");
  }

  // Rearrangement: u = A (x) B  <=>  R = vec(A) vec(B)^T, both vec row-major.
  ComplexMatrix rearranged(di * di, de * de);
  for (std::size_t i1 = 0; i1 < di; ++i1)
    for (std::size_t i2 = 0; i2 < di; ++i2)
      for (std::size_t e1 = 0; e1 < de; ++e1)
        for (std::size_t e2 = 0; e2 < de; ++e2)
          rearranged(i1 * di + i2, e1 * de + e2) = u(i1 * de + e1, i2 * de + e2);

  const double scale = norm_fro(rearranged);
  if (scale == 0.0) return std::nullopt;

  const auto gram = rearranged * rearranged.adjoint();
  const auto leading = eigh(hermitian_part(gram)).vectors.column(0);
  ComplexMatrix left(di * di, 1, leading);
  const auto right = left.adjoint() * rearranged;  // 1 x de^2
  const auto remainder = rearranged - left * right;
  if (norm_fro(remainder) > kKroneckerGap * scale) return std::nullopt;

  const double split = std::sqrt(static_cast<double>(di));
  LocalFactors factors{ComplexMatrix(di, di), ComplexMatrix(de, de), 0.0};
  for (std::size_t i = 0; i < di * di; ++i) factors.system(i / di, i % di) = leading[i] * split;
  for (std::size_t e = 0; e < de * de; ++e) factors.environment(e / de, e % de) = right(0, e) / split;
  factors.residual = norm_max(u - kron(factors.system, factors.environment));
  if (factors.residual > tol) return std::nullopt;
  return factors;
}

}  // namespace krauslab
