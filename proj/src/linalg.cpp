#include "krauslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace krauslab {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiOffDiagonal = 1e-13;

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()) + ")");
  }
}

void require_square(const ComplexMatrix& m, const char* op) {
  if (!m.is_square() || m.empty()) {
    throw std::invalid_argument(std::string(op) + ": matrix must be square and non-empty");
  }
}

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Rescales v so that its first entry of (numerically) largest modulus is real
// and nonnegative.
void fix_phase(std::vector<Complex>& v) {
  double largest = 0.0;
  for (const auto& z : v) largest = std::max(largest, std::abs(z));
  if (largest == 0.0) return;
  for (const auto& z : v) {
    if (std::abs(z) >= largest - 1e-12) {
      const Complex phase = std::conj(z) / std::abs(z);
      for (auto& w : v) w *= phase;
      return;
    }
  }
}

void normalize(std::vector<Complex>& v) {
  double n = 0.0;
  for (const auto& z : v) n += std::norm(z);
  n = std::sqrt(n);
  for (auto& z : v) z /= n;
}

EigenDecomposition eigh_2x2(const ComplexMatrix& m) {
  // m = a0 I + ax X + ay Y + az Z
  const double a0 = 0.5 * (m(0, 0).real() + m(1, 1).real());
  const double az = 0.5 * (m(0, 0).real() - m(1, 1).real());
  const Complex lower = 0.5 * (m(1, 0) + std::conj(m(0, 1)));
  const double ax = lower.real();
  const double ay = lower.imag();
  const double n = std::hypot(ax, ay, az);

  EigenDecomposition out{{a0 + n, a0 - n}, ComplexMatrix::identity(2)};
  if (n == 0.0) return out;

  const double nx = ax / n, ny = ay / n, nz = az / n;
  std::vector<Complex> plus, minus;
  if (nz >= 0.0) {
    plus = {1.0 + nz, Complex(nx, ny)};
    minus = {-Complex(nx, -ny), 1.0 + nz};
  } else {
    plus = {Complex(nx, -ny), 1.0 - nz};
    minus = {-(1.0 - nz), Complex(nx, ny)};
  }
  normalize(plus);
  normalize(minus);
  fix_phase(plus);
  fix_phase(minus);
  out.vectors.set_column(0, plus);
  out.vectors.set_column(1, minus);
  return out;
}

// Cyclic Jacobi on a Hermitian matrix. Each rotation removes the phase of the
// pivot and then applies the real symmetric Jacobi rotation.
EigenDecomposition eigh_jacobi(ComplexMatrix a) {
  const std::size_t n = a.rows();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double threshold = kJacobiOffDiagonal * std::max(1.0, norm_max(a));

  auto off_diagonal = [&] {
    double worst = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) worst = std::max(worst, std::abs(a(p, q)));
    return worst;
  };

  int sweep = 0;
  while (off_diagonal() > threshold) {
    if (++sweep > kMaxJacobiSweeps) {
      throw std::runtime_error("eigh: Jacobi iteration did not converge within " +
                               std::to_string(kMaxJacobiSweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex b = a(p, q);
        const double beta = std::abs(b);
        if (beta == 0.0) continue;
        const Complex phase = b / beta;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * beta);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const Complex g00 = c, g01 = s;
        const Complex g10 = -s * std::conj(phase), g11 = c * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const Complex kp = a(k, p), kq = a(k, q);
          a(k, p) = kp * g00 + kq * g10;
          a(k, q) = kp * g01 + kq * g11;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex pk = a(p, k), qk = a(q, k);
          a(p, k) = std::conj(g00) * pk + std::conj(g10) * qk;
          a(q, k) = std::conj(g01) * pk + std::conj(g11) * qk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (std::size_t k = 0; k < n; ++k) {
          const Complex kp = v(k, p), kq = v(k, q);
          v(k, p) = kp * g00 + kq * g10;
          v(k, q) = kp * g01 + kq * g11;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    auto col = v.column(order[j]);
    fix_phase(col);
    out.vectors.set_column(j, col);
  }
  return out;
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("ComplexMatrix: data length " + std::to_string(data_.size()) +
                                " does not match shape " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
  }
  if (!std::all_of(data_.begin(), data_.end(), is_finite)) {
    throw std::invalid_argument("ComplexMatrix: non-finite entry");
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw std::invalid_argument("ComplexMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  if (!std::all_of(data_.begin(), data_.end(), is_finite)) {
    throw std::invalid_argument("ComplexMatrix: non-finite entry");
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<double> values) {
  return diagonal(std::span<const double>(values.begin(), values.size()));
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> a, std::span<const Complex> b) {
  ComplexMatrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

std::vector<Complex> ComplexMatrix::column(std::size_t c) const {
  std::vector<Complex> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void ComplexMatrix::set_column(std::size_t c, std::span<const Complex> values) {
  if (values.size() != rows_) throw std::invalid_argument("set_column: length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

Complex ComplexMatrix::trace() const {
  require_square(*this, "trace");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) sum += (*this)(i, i);
  return sum;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "sub");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("mul: inner dimensions differ (" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + ")");
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

ComplexMatrix sandwich(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b * a.adjoint(); }

double norm_max(const ComplexMatrix& m) {
  double out = 0.0;
  for (const auto& z : m.data()) out = std::max(out, std::abs(z));
  return out;
}

double norm_fro(const ComplexMatrix& m) {
  double sum = 0.0;
  for (const auto& z : m.data()) sum += std::norm(z);
  return std::sqrt(sum);
}

double hermiticity_residual(const ComplexMatrix& m) {
  require_square(m, "hermiticity_residual");
  return norm_max(m - m.adjoint());
}

double unitarity_residual(const ComplexMatrix& m) {
  require_square(m, "unitarity_residual");
  return norm_max(m.adjoint() * m - ComplexMatrix::identity(m.rows()));
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, SubsystemDims dims, Keep keep) {
  const std::size_t n = dims.joint();
  if (n == 0 || m.rows() != n || m.cols() != n) {
    throw std::invalid_argument("partial_trace: matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " but dims give " + std::to_string(n));
  }
  const std::size_t ds = dims.system, de = dims.environment;
  if (keep == Keep::system) {
    ComplexMatrix out(ds, ds);
    for (std::size_t i = 0; i < ds; ++i)
      for (std::size_t j = 0; j < ds; ++j)
        for (std::size_t e = 0; e < de; ++e) out(i, j) += m(i * de + e, j * de + e);
    return out;
  }
  ComplexMatrix out(de, de);
  for (std::size_t a = 0; a < de; ++a)
    for (std::size_t b = 0; b < de; ++b)
      for (std::size_t s = 0; s < ds; ++s) out(a, b) += m(s * de + a, s * de + b);
  return out;
}

EigenDecomposition eigh(const ComplexMatrix& m, double tol) {
  require_square(m, "eigh");
  const double residual = hermiticity_residual(m);
  if (residual > tol) {
    throw std::domain_error("eigh: matrix is not Hermitian (residual " + std::to_string(residual) +
                            ")");
  }
  if (m.rows() == 1) return {{m(0, 0).real()}, ComplexMatrix::identity(1)};
  if (m.rows() == 2) return eigh_2x2(m);
  return eigh_jacobi(hermitian_part(m));
}

std::vector<double> eigvalsh(const ComplexMatrix& m, double tol) { return eigh(m, tol).values; }

ComplexMatrix expm_hermitian_generator(const ComplexMatrix& h, double t, double tol) {
  const auto eig = eigh(h, tol);
  const std::size_t n = h.rows();
  ComplexMatrix phases(n, n);
  for (std::size_t j = 0; j < n; ++j) phases(j, j) = std::exp(-kI * (eig.values[j] * t));
  return eig.vectors * phases * eig.vectors.adjoint();
}

namespace pauli {
ComplexMatrix identity() { return ComplexMatrix::identity(2); }
ComplexMatrix x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix y() { return {{0.0, -kI}, {kI, 0.0}}; }
ComplexMatrix z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

}  // namespace krauslab
