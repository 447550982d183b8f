#pragma once

#include <optional>

#include "krauslab/kraus.hpp"
#include "krauslab/linalg.hpp"
#include "krauslab/quantum_state.hpp"

namespace krauslab {

/// Joint system (x) environment state. The joint basis is |s>|e> with the
/// system index major.
class CompositeState {
 public:
  /// Throws std::invalid_argument if the matrix size is not d_i * d_e.
  CompositeState(DensityMatrix state, SubsystemDims dims);

  const DensityMatrix& state() const { return state_; }
  const ComplexMatrix& mat() const { return state_.mat(); }
  SubsystemDims dims() const { return dims_; }

 private:
  DensityMatrix state_;
  SubsystemDims dims_;
};

/// U(t) rho U(t)^dagger with U(t) = exp(-i h t).
CompositeState evolve_joint(const ComplexMatrix& h, const CompositeState& s, double t,
                            double tol = kDefaultTol);

/// Partial trace over the environment.
DensityMatrix reduced_state(const CompositeState& s, double tol = kDefaultTol);

/// Partial trace over the system.
DensityMatrix environment_state(const CompositeState& s, double tol = kDefaultTol);

/// rho_ie - rho_i (x) rho_e. Traceless and Hermitian, with vanishing partial
/// traces.
ComplexMatrix correlation_operator(const CompositeState& s);

/// tr_e{U(t) rho_cor U(t)^dagger}: the part of the reduced dynamics not
/// captured by the uncorrelated Kraus operators.
ComplexMatrix delta_rho(const ComplexMatrix& h, const CompositeState& s, double t,
                        double tol = kDefaultTol);

/// Terms of reduced(t) = factorable part + delta_rho.
struct DynamicsDecomposition {
  DensityMatrix reduced;
  ComplexMatrix factorable_part;
  ComplexMatrix delta;
  ComplexMatrix correlation;
  double residual = 0.0;  // ||reduced - factorable_part - delta||_max
};

DynamicsDecomposition decompose_dynamics(const ComplexMatrix& h, const CompositeState& s, double t,
                                         double tol = kDefaultTol);

/// Two-qubit model where the environment conditionally flips the system:
/// H = X (x) (I - Z)/2 + I (x) (I + Z)/2.
ComplexMatrix cnot_hamiltonian();

/// Correlated initial state diag((1-r0)/2, 0, 0, (1+r0)/2) of the CNOT
/// model. Both marginals equal (I - r0 Z)/2.
class CnotScenario {
 public:
  /// Throws std::domain_error outside [0, 1]. The endpoints are accepted even
  /// though the initial state is then a product state.
  explicit CnotScenario(double r0);

  double r0() const { return r0_; }
  bool is_endpoint() const { return r0_ == 0.0 || r0_ == 1.0; }

  /// sqrt(sin^2 t + r0^2 cos^2 t), the Bloch radius of the reduced state.
  double r_t(double t) const;

  CompositeState initial_state() const;
  DensityMatrix initial_reduced_state() const;

 private:
  double r0_;
};

/// Closed-form reduced state of the CNOT model at time t.
DensityMatrix cnot_analytic_rho(const CnotScenario& sc, double t, double tol = kDefaultTol);

/// Closed-form Kraus pair taking the initial reduced state of the CNOT model
/// to cnot_analytic_rho(sc, t). The sqrt(r_t - sin^2 t + r0 cos^2 t) factors
/// carry the sign of sin 2t so the pair stays valid on the whole time axis.
/// Throws std::domain_error if r_t <= tol.
KrausSet cnot_analytic_kraus(const CnotScenario& sc, double t, double tol = kDefaultTol);

struct LocalFactors {
  ComplexMatrix system;
  ComplexMatrix environment;
  double residual = 0.0;  // ||u - system (x) environment||_max
};

/// Nearest Kronecker factorization of a joint unitary. Returns the factors
/// when u is a product U_i (x) U_e within tol, nullopt otherwise. Factors are
/// determined up to reciprocal phases; the system factor is scaled to be
/// unitary.
std::optional<LocalFactors> factor_local_unitary(const ComplexMatrix& u, SubsystemDims dims,
                                                 double tol = kDefaultTol);

}  // namespace krauslab
