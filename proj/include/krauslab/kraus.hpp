#pragma once

#include <vector>

#include "krauslab/linalg.hpp"
#include "krauslab/quantum_state.hpp"

namespace krauslab {

/// Ordered operators of an operator-sum map rho -> sum_k M_k rho M_k^dagger.
/// All operators share the shape d_out x d_in. Completeness is not enforced
/// at construction so that broken sets can still be inspected; see
/// completeness_residual and verify_channel.
class KrausSet {
 public:
  /// Throws std::invalid_argument if `ops` is empty or shapes differ.
  explicit KrausSet(std::vector<ComplexMatrix> ops);

  const std::vector<ComplexMatrix>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  std::size_t d_in() const { return ops_.front().cols(); }
  std::size_t d_out() const { return ops_.front().rows(); }
  const ComplexMatrix& operator[](std::size_t i) const { return ops_[i]; }

 private:
  std::vector<ComplexMatrix> ops_;
};

/// ||sum_k M_k^dagger M_k - I||_max
double completeness_residual(const KrausSet& k);

/// sum_k M_k rho M_k^dagger without any validation of either side.
ComplexMatrix apply_kraus(const KrausSet& k, const ComplexMatrix& rho);

/// Applies a complete Kraus set to a state. Throws std::invalid_argument on a
/// dimension mismatch and std::domain_error when the completeness residual
/// exceeds tol.
DensityMatrix apply_channel(const KrausSet& k, const DensityMatrix& rho, double tol = kDefaultTol);

/// Choi matrix sum_k vec(M_k) vec(M_k)^dagger with column-stacking vec.
ComplexMatrix choi_matrix(const KrausSet& k);

/// Two operators taking diag((1-r0)/2, (1+r0)/2) to diag((1+r)/2, (1-r)/2):
///
///   M0 = diag(1, sqrt((1-r)/(1+r0)))
///   M1 = [[0, sqrt((r+r0)/(1+r0))], [0, 0]]
///
/// Both radii must lie in [0, 1] up to tol.
KrausSet diagonal_pair_kraus(double r0, double r, double tol = kDefaultTol);

/// Replaces every M by u_out M u_in^dagger.
KrausSet conjugate_kraus(const KrausSet& k, const ComplexMatrix& u_out, const ComplexMatrix& u_in,
                         double tol = kDefaultTol);

/// Rank-two Kraus pair connecting two arbitrary qubit states. Both states
/// are rotated onto the z axis, joined by diagonal_pair_kraus and rotated
/// back.
KrausSet general_qubit_kraus(const DensityMatrix& rho0, const DensityMatrix& rhot,
                             double tol = kDefaultTol);

/// Entrywise closed form of general_qubit_kraus in terms of the Bloch
/// coordinates of both states.
KrausSet closed_form_qubit_kraus(const BlochVector& b0, const BlochVector& bt,
                                 double tol = kDefaultTol);

/// Kraus operators <mu|sqrt(p_nu) U|nu> of the reduced dynamics for an
/// uncorrelated initial state rho_i (x) rho_e0. Environment eigenpairs
/// (p_nu, |nu>) come from eigh(rho_e0) and |mu> runs over the computational
/// basis. Operators are ordered mu-major and there are always d_e^2 of them.
KrausSet factorable_kraus(const ComplexMatrix& u_ie, const DensityMatrix& rho_e0,
                          double tol = kDefaultTol);

/// Constant channel onto rhot, for any dimension: M_jk = sqrt(q_j)|v_j><w_k|
/// where (q_j, v_j) diagonalize rhot and w_k diagonalize rho0. Not rank
/// minimal; always d^2 operators.
KrausSet measure_prepare_kraus(const DensityMatrix& rho0, const DensityMatrix& rhot,
                               double tol = kDefaultTol);

/// M~_mu = sum_nu M_nu V_{mu nu}. A unitary larger than the set pads it with
/// zero operators first.
KrausSet unitary_remix(const KrausSet& k, const ComplexMatrix& v, double tol = kDefaultTol);

struct ChannelReport {
  double completeness_residual = 0.0;
  double reconstruction_residual = 0.0;
  double choi_min_eigenvalue = 0.0;
  double output_trace_residual = 0.0;
  double output_min_eigenvalue = 0.0;

  /// True when every residual is within tol and both eigenvalue fields are
  /// at least -tol.
  bool passes(double tol = kDefaultTol) const;
};

/// Never throws on numeric failure; shape mismatches still raise
/// std::invalid_argument.
ChannelReport verify_channel(const KrausSet& k, const DensityMatrix& rho0, const DensityMatrix& rhot);

}  // namespace krauslab
