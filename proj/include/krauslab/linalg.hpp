#pragma once

// Dense complex linear algebra for small matrices: arithmetic, Hermitian
// eigendecomposition, unitary propagators, Kronecker products and partial
// traces. Everything here is a pure function over value types.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace krauslab {

using Complex = std::complex<double>;

/// Absolute max-norm tolerance used wherever a caller does not supply one.
inline constexpr double kDefaultTol = 1e-10;

inline constexpr Complex kI{0.0, 1.0};

/// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  /// Zero matrix of the given shape.
  ComplexMatrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of row-major data. Throws std::invalid_argument if
  /// the length does not match the shape or any entry is not finite.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);

  /// Nested-list literal, e.g. {{1, 0}, {0, 1}}. Rows must be equal length.
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols);
  static ComplexMatrix diagonal(std::span<const double> values);
  static ComplexMatrix diagonal(std::initializer_list<double> values);
  /// Outer product |a><b|.
  static ComplexMatrix outer(std::span<const Complex> a, std::span<const Complex> b);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Complex> data() const { return data_; }

  std::vector<Complex> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const Complex> values);

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conj() const;
  Complex trace() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, Complex s);

/// a * b * a^dagger
ComplexMatrix sandwich(const ComplexMatrix& a, const ComplexMatrix& b);

double norm_max(const ComplexMatrix& m);
double norm_fro(const ComplexMatrix& m);

/// ||m - m^dagger||_max
double hermiticity_residual(const ComplexMatrix& m);
/// ||m^dagger m - I||_max
double unitarity_residual(const ComplexMatrix& m);

ComplexMatrix hermitian_part(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Bipartite dimensions of a joint space, system index major.
struct SubsystemDims {
  std::size_t system = 0;
  std::size_t environment = 0;

  std::size_t joint() const { return system * environment; }
};

enum class Keep { system, environment };

/// Reduces an operator on the joint space to one factor. Trace preserving.
ComplexMatrix partial_trace(const ComplexMatrix& m, SubsystemDims dims, Keep keep);

struct EigenDecomposition {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // column j pairs with values[j]
};

/// Eigendecomposition of a Hermitian matrix.
///
/// Uses the Pauli-decomposition closed form for 2x2 input and cyclic complex
/// Jacobi otherwise. Eigenvalues come back in descending order; every
/// eigenvector is rescaled by a phase so that its first component of largest
/// modulus is real and nonnegative.
///
/// Throws std::domain_error when ||m - m^dagger||_max > tol and
/// std::runtime_error if Jacobi does not converge within 100 sweeps.
EigenDecomposition eigh(const ComplexMatrix& m, double tol = kDefaultTol);

/// Eigenvalues only, descending.
std::vector<double> eigvalsh(const ComplexMatrix& m, double tol = kDefaultTol);

/// exp(-i h t) for Hermitian h, built from eigh(h).
ComplexMatrix expm_hermitian_generator(const ComplexMatrix& h, double t, double tol = kDefaultTol);

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

}  // namespace krauslab
