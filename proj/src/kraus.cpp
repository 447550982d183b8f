#include "krauslab/kraus.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace krauslab {

namespace {

void require_unitary(const ComplexMatrix& u, double tol, const char* op) {
  if (!u.is_square() || u.empty()) {
    throw std::invalid_argument(std::string(op) + ": unitary must be square");
  }
  const double residual = unitarity_residual(u);
  if (residual > tol) {
    throw std::domain_error(std::string(op) + ": matrix is not unitary (residual " +
                            std::to_string(residual) + ")");
  }
}

// Square root of an analytically nonnegative quantity. Rounding may push it
// slightly below zero; anything below -tol means the inputs were invalid.
double checked_sqrt(double radicand, double tol, const char* what) {
  if (radicand < -tol) {
    throw std::domain_error(std::string("negative radicand in ") + what + ": " +
                            std::to_string(radicand));
  }
  return radicand <= 0.0 ? 0.0 : std::sqrt(radicand);
}

void require_radius(double r, double tol, const char* name) {
  if (!std::isfinite(r) || r < -tol || r > 1.0 + tol) {
    throw std::domain_error(std::string("diagonal_pair_kraus: ") + name + " = " + std::to_string(r) +
                            " outside [0, 1]");
  }
}

}  // namespace

KrausSet::KrausSet(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw std::invalid_argument("KrausSet: no operators");
  const auto rows = ops_.front().rows(), cols = ops_.front().cols();
  if (rows == 0 || cols == 0) throw std::invalid_argument("KrausSet: empty operator");
  for (const auto& op : ops_) {
    if (op.rows() != rows || op.cols() != cols) {
      throw std::invalid_argument("KrausSet: operators differ in shape");
    }
  }
}

double completeness_residual(const KrausSet& k) {
  ComplexMatrix sum(k.d_in(), k.d_in());
  for (const auto& m : k.ops()) sum += m.adjoint() * m;
  return norm_max(sum - ComplexMatrix::identity(k.d_in()));
}

ComplexMatrix apply_kraus(const KrausSet& k, const ComplexMatrix& rho) {
  if (rho.rows() != k.d_in() || rho.cols() != k.d_in()) {
    throw std::invalid_argument("apply_channel: state dimension " + std::to_string(rho.rows()) +
                                " does not match Kraus input dimension " +
                                std::to_string(k.d_in()));
  }
  ComplexMatrix out(k.d_out(), k.d_out());
  for (const auto& m : k.ops()) out += sandwich(m, rho);
  return out;
}

DensityMatrix apply_channel(const KrausSet& k, const DensityMatrix& rho, double tol) {
  const double residual = completeness_residual(k);
  if (residual > tol) {
    throw std::domain_error("apply_channel: completeness violated (residual " +
                            std::to_string(residual) + ")");
  }
  return DensityMatrix::from_matrix(apply_kraus(k, rho.mat()), 10.0 * tol);
}

ComplexMatrix choi_matrix(const KrausSet& k) {
  const std::size_t n = k.d_in() * k.d_out();
  ComplexMatrix choi(n, n);
  std::vector<Complex> vec(n);
  for (const auto& m : k.ops()) {
    for (std::size_t j = 0; j < m.cols(); ++j)
      for (std::size_t i = 0; i < m.rows(); ++i) vec[j * m.rows() + i] = m(i, j);
    choi += ComplexMatrix::outer(vec, vec);
  }
  return choi;
}

KrausSet diagonal_pair_kraus(double r0, double r, double tol) {
  require_radius(r0, tol, "r0");
  require_radius(r, tol, "r");
  const double keep = checked_sqrt((1.0 - r) / (1.0 + r0), tol, "diagonal_pair_kraus");
  const double flip = checked_sqrt((r + r0) / (1.0 + r0), tol, "diagonal_pair_kraus");
  return KrausSet({ComplexMatrix{{1.0, 0.0}, {0.0, keep}}, ComplexMatrix{{0.0, flip}, {0.0, 0.0}}});
}

KrausSet conjugate_kraus(const KrausSet& k, const ComplexMatrix& u_out, const ComplexMatrix& u_in,
                         double tol) {
  require_unitary(u_out, tol, "conjugate_kraus");
  require_unitary(u_in, tol, "conjugate_kraus");
  if (u_out.rows() != k.d_out() || u_in.rows() != k.d_in()) {
    throw std::invalid_argument("conjugate_kraus: unitary dimensions do not match the Kraus set");
  }
  const auto u_in_dag = u_in.adjoint();
  std::vector<ComplexMatrix> ops;
  ops.reserve(k.size());
  for (const auto& m : k.ops()) ops.push_back(u_out * m * u_in_dag);
  return KrausSet(std::move(ops));
}

KrausSet general_qubit_kraus(const DensityMatrix& rho0, const DensityMatrix& rhot, double tol) {
  const auto initial = diagonalize_state(rho0, EigenOrdering::minus_first, tol);
  const auto target = diagonalize_state(rhot, EigenOrdering::plus_first, tol);
  const auto diagonal =
      diagonal_pair_kraus(std::min(initial.radius(), 1.0), std::min(target.radius(), 1.0), tol);
  return conjugate_kraus(diagonal, target.basis, initial.basis, tol);
}

KrausSet closed_form_qubit_kraus(const BlochVector& b0, const BlochVector& bt, double tol) {
  for (const auto* b : {&b0, &bt}) {
    if (!std::isfinite(b->r) || !std::isfinite(b->theta) || !std::isfinite(b->phi) ||
        b->r < -tol || b->r > 1.0 + tol) {
      throw std::domain_error("closed_form_qubit_kraus: invalid Bloch vector");
    }
  }
  const double c = std::cos(0.5 * bt.theta), s = std::sin(0.5 * bt.theta);
  const double c0 = std::cos(0.5 * b0.theta), s0 = std::sin(0.5 * b0.theta);
  const double keep = checked_sqrt((1.0 - bt.r) / (1.0 + b0.r), tol, "closed_form_qubit_kraus");
  const double flip = checked_sqrt((bt.r + b0.r) / (1.0 + b0.r), tol, "closed_form_qubit_kraus");
  auto e = [](double angle) { return std::exp(kI * angle); };
  const double phi = bt.phi, phi0 = b0.phi;

  const ComplexMatrix m0{
      {-c * s0 - keep * s * c0 * e(phi0 - phi), c * c0 * e(-phi0) - keep * s * s0 * e(-phi)},
      {-s * s0 * e(phi) + keep * c * c0 * e(phi0), s * c0 * e(phi - phi0) + keep * c * s0}};
  const ComplexMatrix m1 = flip * ComplexMatrix{{c * c0 * e(phi0), c * s0},
                                                {s * c0 * e(phi + phi0), s * s0 * e(phi)}};
  return KrausSet({m0, m1});
}

KrausSet factorable_kraus(const ComplexMatrix& u_ie, const DensityMatrix& rho_e0, double tol) {
  const std::size_t de = rho_e0.dim();
  if (!u_ie.is_square() || u_ie.empty() || u_ie.rows() % de != 0) {
    throw std::invalid_argument("factorable_kraus: joint unitary of size " +
                                std::to_string(u_ie.rows()) +
                                " is incompatible with environment dimension " + std::to_string(de));
  }
  require_unitary(u_ie, tol, "factorable_kraus");
  const std::size_t di = u_ie.rows() / de;
  const auto env = eigh(rho_e0.mat(), tol);

  std::vector<ComplexMatrix> ops;
  ops.reserve(de * de);
  for (std::size_t mu = 0; mu < de; ++mu) {
    for (std::size_t nu = 0; nu < de; ++nu) {
      const double weight = std::sqrt(std::max(env.values[nu], 0.0));
      ComplexMatrix m(di, di);
      for (std::size_t i = 0; i < di; ++i)
        for (std::size_t j = 0; j < di; ++j) {
          Complex sum = 0.0;
          for (std::size_t e = 0; e < de; ++e) sum += u_ie(i * de + mu, j * de + e) * env.vectors(e, nu);
          m(i, j) = weight * sum;
        }
      ops.push_back(std::move(m));
    }
  }
  return KrausSet(std::move(ops));
}

KrausSet measure_prepare_kraus(const DensityMatrix& rho0, const DensityMatrix& rhot, double tol) {
  if (rho0.dim() != rhot.dim()) {
    throw std::invalid_argument("measure_prepare_kraus: dimension mismatch");
  }
  const std::size_t d = rho0.dim();
  const auto source = eigh(rho0.mat(), tol);
  const auto target = eigh(rhot.mat(), tol);

  std::vector<ComplexMatrix> ops;
  ops.reserve(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    const double weight = std::sqrt(std::max(target.values[j], 0.0));
    const auto v = target.vectors.column(j);
    for (std::size_t k = 0; k < d; ++k) {
      ops.push_back(weight * ComplexMatrix::outer(v, source.vectors.column(k)));
    }
  }
  return KrausSet(std::move(ops));
}

KrausSet unitary_remix(const KrausSet& k, const ComplexMatrix& v, double tol) {
  require_unitary(v, tol, "unitary_remix");
  const std::size_t n = v.rows();
  if (n < k.size()) {
    throw std::invalid_argument("unitary_remix: unitary is " + std::to_string(n) + "x" +
                                std::to_string(n) + " but the set has " + std::to_string(k.size()) +
                                " operators");
  }
  std::vector<ComplexMatrix> ops(n, ComplexMatrix(k.d_out(), k.d_in()));
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t nu = 0; nu < k.size(); ++nu) ops[mu] += v(mu, nu) * k[nu];
  return KrausSet(std::move(ops));
}

bool ChannelReport::passes(double tol) const {
  return completeness_residual <= tol && reconstruction_residual <= tol &&
         output_trace_residual <= tol && choi_min_eigenvalue >= -tol &&
         output_min_eigenvalue >= -tol;
}

ChannelReport verify_channel(const KrausSet& k, const DensityMatrix& rho0, const DensityMatrix& rhot) {
  if (rhot.dim() != k.d_out()) {
    throw std::invalid_argument("verify_channel: target dimension does not match Kraus output");
  }
  constexpr double kAnyHermitian = std::numeric_limits<double>::infinity();
  const auto out = apply_kraus(k, rho0.mat());

  ChannelReport report;
  report.completeness_residual = completeness_residual(k);
  report.reconstruction_residual = norm_max(out - rhot.mat());
  report.choi_min_eigenvalue = eigvalsh(choi_matrix(k), kAnyHermitian).back();
  report.output_trace_residual = std::abs(out.trace() - 1.0);
  report.output_min_eigenvalue = eigvalsh(hermitian_part(out), kAnyHermitian).back();
  return report;
}

}  // namespace krauslab
