#pragma once

#include <optional>
#include <string>
#include <vector>

#include "krauslab/linalg.hpp"

namespace krauslab {

struct DensityValidation;

/// A matrix that has passed the density-operator checks: Hermitian, unit
/// trace, positive semidefinite. Obtain one through validate_density or
/// DensityMatrix::from_matrix.
class DensityMatrix {
 public:
  /// Validates and throws std::domain_error listing every violated check.
  static DensityMatrix from_matrix(const ComplexMatrix& m, double tol = kDefaultTol);

  const ComplexMatrix& mat() const { return mat_; }
  std::size_t dim() const { return mat_.rows(); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {}
  friend DensityValidation validate_density(const ComplexMatrix& m, double tol);

  ComplexMatrix mat_;
};

struct Violation {
  std::string check;  // "shape", "hermitian", "trace", "positive"
  double residual = 0.0;
};

/// Outcome of validate_density. Exactly one of `state` / non-empty
/// `violations` is meaningful.
struct DensityValidation {
  std::vector<Violation> violations;
  std::vector<double> eigenvalues;  // empty if the input was not square
  std::optional<DensityMatrix> state;

  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

DensityValidation validate_density(const ComplexMatrix& m, double tol = kDefaultTol);

/// Qubit state as a point in the Bloch ball: rho = (I + r n.sigma) / 2 with
/// n = (sin theta cos phi, sin theta sin phi, cos theta).
struct BlochVector {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

DensityMatrix bloch_to_density(const BlochVector& b, double tol = kDefaultTol);

/// Inverse of bloch_to_density for qubits. Singular points use fixed
/// conventions: r < tol gives (0, 0, 0); sin(theta) < tol gives phi = 0.
BlochVector density_to_bloch(const DensityMatrix& rho, double tol = kDefaultTol);

enum class EigenOrdering { plus_first, minus_first };

/// Qubit state written as basis * diag(...) * basis^dagger, with the diagonal
/// order chosen by `ordering`. For non-degenerate input the basis follows the
/// rotation that aligns the Bloch vector with z:
///
///   minus_first: [[-sin(theta/2),          cos(theta/2) e^{-i phi}],
///                 [ cos(theta/2) e^{i phi}, sin(theta/2)          ]]
///   plus_first:  [[ cos(theta/2),          -sin(theta/2) e^{-i phi}],
///                 [ sin(theta/2) e^{i phi},  cos(theta/2)          ]]
///
/// A maximally mixed input yields basis = I.
struct DiagonalizedState {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  ComplexMatrix basis;
  EigenOrdering ordering = EigenOrdering::plus_first;

  /// diag(lambda_plus, lambda_minus) or diag(lambda_minus, lambda_plus).
  ComplexMatrix diagonal() const;
  /// lambda_plus - lambda_minus, the Bloch radius.
  double radius() const { return lambda_plus - lambda_minus; }
};

DiagonalizedState diagonalize_state(const DensityMatrix& rho, EigenOrdering ordering,
                                    double tol = kDefaultTol);

/// Half the trace norm of a - b.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace krauslab
