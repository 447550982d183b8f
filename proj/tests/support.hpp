#pragma once

// Random generators, independent oracles and closed-form reference values
// shared by the test binaries. Nothing here calls into the eigensolver or the
// Kraus constructors, so the checks stay independent of the code under test.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "krauslab/kraus.hpp"
#include "krauslab/linalg.hpp"
#include "krauslab/quantum_state.hpp"

namespace krauslab::testing {

using std::numbers::pi;

inline double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return norm_max(a - b); }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double gauss() { return normal_(engine_); }
  Complex cgauss() { return {gauss(), gauss()}; }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

inline ComplexMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.cgauss();
  return m;
}

inline ComplexMatrix random_hermitian(Rng& rng, std::size_t n) {
  const auto g = random_matrix(rng, n, n);
  return 0.5 * (g + g.adjoint());
}

/// Modified Gram-Schmidt on a Gaussian matrix.
inline ComplexMatrix random_unitary(Rng& rng, std::size_t n) {
  auto m = random_matrix(rng, n, n);
  for (std::size_t j = 0; j < n; ++j) {
    auto col = m.column(j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        const auto prev = m.column(k);
        Complex overlap = 0.0;
        for (std::size_t i = 0; i < n; ++i) overlap += std::conj(prev[i]) * col[i];
        for (std::size_t i = 0; i < n; ++i) col[i] -= overlap * prev[i];
      }
    double norm = 0.0;
    for (const auto& z : col) norm += std::norm(z);
    for (auto& z : col) z /= std::sqrt(norm);
    m.set_column(j, col);
  }
  return m;
}

/// G G^dagger / tr with G of shape n x rank.
inline ComplexMatrix random_density_matrix(Rng& rng, std::size_t n, std::size_t rank) {
  const auto g = random_matrix(rng, n, rank);
  auto rho = g * g.adjoint();
  rho *= 1.0 / rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline DensityMatrix random_state(Rng& rng, std::size_t n) {
  return DensityMatrix::from_matrix(random_density_matrix(rng, n, 1 + rng.index(n)));
}

inline BlochVector random_bloch(Rng& rng, double r_lo = 0.0, double r_hi = 1.0) {
  return {rng.uniform(r_lo, r_hi), std::acos(rng.uniform(-1.0, 1.0)), rng.uniform(0.0, 2.0 * pi)};
}

/// Qubit states drawn from a mix of mixed, pure, maximally mixed and
/// pole-aligned cases.
inline DensityMatrix random_qubit_state(Rng& rng) {
  switch (rng.index(6)) {
    case 0:
      return bloch_to_density({1.0, std::acos(rng.uniform(-1.0, 1.0)), rng.uniform(0.0, 2.0 * pi)});
    case 1:
      return DensityMatrix::from_matrix(0.5 * ComplexMatrix::identity(2));
    case 2:
      return bloch_to_density({rng.uniform(), rng.uniform() < 0.5 ? 0.0 : pi, 0.0});
    case 3:
      return DensityMatrix::from_matrix(random_density_matrix(rng, 2, 1));
    default:
      return bloch_to_density(random_bloch(rng));
  }
}

// ---------------------------------------------------------------------------
// Independent oracles

/// Roots of the characteristic polynomial of a Hermitian 2x2, descending.
inline std::vector<double> qubit_eigenvalues_quadratic(const ComplexMatrix& m) {
  const double a = m(0, 0).real(), d = m(1, 1).real();
  const double off = std::norm(m(0, 1));
  const double mean = 0.5 * (a + d);
  const double disc = std::sqrt(0.25 * (a - d) * (a - d) + off);
  return {mean + disc, mean - disc};
}

/// exp(-i h t) by scaling and squaring of a truncated Taylor series.
inline ComplexMatrix taylor_expm(const ComplexMatrix& h, double t) {
  auto a = (-kI * t) * h;
  int squarings = 0;
  double scale = norm_fro(a);
  while (scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  a *= std::pow(0.5, squarings);
  auto term = ComplexMatrix::identity(h.rows());
  auto sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * a;
    term *= 1.0 / k;
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// tr_e(m) = sum_e (I (x) <e|) m (I (x) |e>), assembled from Kronecker
/// products rather than index arithmetic.
inline ComplexMatrix partial_trace_by_projection(const ComplexMatrix& m, SubsystemDims dims, Keep keep) {
  const std::size_t kept = keep == Keep::system ? dims.system : dims.environment;
  const std::size_t traced = keep == Keep::system ? dims.environment : dims.system;
  ComplexMatrix out(kept, kept);
  for (std::size_t e = 0; e < traced; ++e) {
    ComplexMatrix ket(traced, 1);
    ket(e, 0) = 1.0;
    const auto id = ComplexMatrix::identity(kept);
    const auto lift = keep == Keep::system ? kron(id, ket) : kron(ket, id);
    out += lift.adjoint() * m * lift;
  }
  return out;
}

/// Choi matrix from its definition sum_ij |i><j| (x) Phi(|i><j|), with the
/// input index major.
inline ComplexMatrix choi_by_definition(const KrausSet& k) {
  const std::size_t d_in = k.d_in(), d_out = k.d_out();
  ComplexMatrix choi(d_in * d_out, d_in * d_out);
  for (std::size_t i = 0; i < d_in; ++i)
    for (std::size_t j = 0; j < d_in; ++j) {
      ComplexMatrix unit(d_in, d_in);
      unit(i, j) = 1.0;
      ComplexMatrix image(d_out, d_out);
      for (const auto& m : k.ops()) image += m * unit * m.adjoint();
      ComplexMatrix outer(d_in, d_in);
      outer(i, j) = 1.0;
      choi += kron(outer, image);
    }
  return choi;
}

// ---------------------------------------------------------------------------
// Closed forms of the two-qubit CNOT model (joint basis |00>,|01>,|10>,|11>)

inline ComplexMatrix cnot_unitary_reference(double t) {
  const Complex e = std::exp(-kI * t);
  const double c = std::cos(t), s = std::sin(t);
  return {{e, 0, 0, 0}, {0, c, 0, -kI * s}, {0, 0, e, 0}, {0, -kI * s, 0, c}};
}

inline ComplexMatrix cnot_initial_reference(double r0) {
  return ComplexMatrix::diagonal({0.5 * (1 - r0), 0.0, 0.0, 0.5 * (1 + r0)});
}

inline ComplexMatrix cnot_marginal_reference(double r0) {
  return ComplexMatrix::diagonal({0.5 * (1 - r0), 0.5 * (1 + r0)});
}

inline ComplexMatrix cnot_correlation_reference(double r0) {
  return (0.25 * (1 - r0 * r0)) * kron(pauli::z(), pauli::z());
}

inline ComplexMatrix cnot_rho_reference(double r0, double t) {
  const double c = std::cos(t), s = std::sin(t);
  return 0.5 * ComplexMatrix{{1 + s * s - r0 * c * c, -kI * (1 + r0) * s * c},
                             {kI * (1 + r0) * s * c, (1 + r0) * c * c}};
}

inline ComplexMatrix cnot_delta_reference(double r0, double t) {
  const double s = std::sin(t), s2t = std::sin(2 * t);
  return (0.25 * (1 - r0 * r0)) * ComplexMatrix{{2 * s * s, -kI * s2t}, {kI * s2t, -2 * s * s}};
}

/// The analytic CNOT Kraus pair with every square root
/// taken nonnegative. Valid only where sin 2t >= 0.
inline std::vector<ComplexMatrix> cnot_kraus_unsigned(double r0, double t) {
  const double s2 = std::sin(t) * std::sin(t), c2 = std::cos(t) * std::cos(t);
  const double rt = std::sqrt(s2 + r0 * r0 * c2);
  const double a = rt + s2 - r0 * c2, b = rt - s2 + r0 * c2;
  const double pre = 1.0 / std::sqrt(2 * rt * (1 + r0));
  const ComplexMatrix m0 =
      pre * ComplexMatrix{{-std::sqrt((1 + r0) * a), kI * std::sqrt((1 - rt) * b)},
                          {-kI * std::sqrt((1 + r0) * b), std::sqrt((1 - rt) * a)}};
  const ComplexMatrix m1 =
      (pre * std::sqrt(rt + r0)) * ComplexMatrix{{0, std::sqrt(a)}, {0, kI * std::sqrt(b)}};
  return {m0, m1};
}

/// Rotation taking the initial state to diag((1-r0)/2, (1+r0)/2).
inline ComplexMatrix reference_initial_basis(const BlochVector& b) {
  const double c = std::cos(b.theta / 2), s = std::sin(b.theta / 2);
  return {{-s, c * std::exp(-kI * b.phi)}, {c * std::exp(kI * b.phi), s}};
}

/// Rotation taking the final state to diag((1+r)/2, (1-r)/2).
inline ComplexMatrix reference_final_basis(const BlochVector& b) {
  const double c = std::cos(b.theta / 2), s = std::sin(b.theta / 2);
  return {{c, -s * std::exp(-kI * b.phi)}, {s * std::exp(kI * b.phi), c}};
}

}  // namespace krauslab::testing
