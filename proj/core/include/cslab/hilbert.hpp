#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cslab {

using Complex = std::complex<double>;

/// Largest composite dimension any vector or operator may have.
inline constexpr std::size_t kMaxDimension = 4096;

/// Dense list of complex amplitudes, dim >= 1.
class ComplexStateVector {
 public:
  explicit ComplexStateVector(std::vector<Complex> amplitudes);
  ComplexStateVector(std::initializer_list<Complex> amplitudes);

  /// |index> in a dim-dimensional space.
  static ComplexStateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const noexcept;
  double norm() const noexcept;
  ComplexStateVector normalized() const;

  friend bool operator==(const ComplexStateVector&, const ComplexStateVector&) = default;

 private:
  std::vector<Complex> amps_;
};

/// Square complex matrix stored row-major. Hermiticity is detected once at
/// construction (tolerance 1e-12) and cached in `is_hermitian()`.
class DenseOperator {
 public:
  DenseOperator(std::size_t dim, std::vector<Complex> row_major);

  static DenseOperator identity(std::size_t dim);
  static DenseOperator zero(std::size_t dim);
  static DenseOperator diagonal(std::span<const double> values);
  static DenseOperator diagonal(std::initializer_list<double> values);
  static DenseOperator from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

  std::size_t dim() const noexcept { return dim_; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }
  std::span<const Complex> entries() const noexcept { return m_; }
  bool is_hermitian() const noexcept { return hermitian_; }
  bool is_diagonal() const noexcept { return diagonal_; }
  bool is_zero() const noexcept;

  /// Diagonal entries (real parts); only meaningful for Hermitian operators.
  std::vector<double> real_diagonal() const;

  DenseOperator operator*(const DenseOperator& rhs) const;
  DenseOperator operator+(const DenseOperator& rhs) const;
  DenseOperator operator-(const DenseOperator& rhs) const;
  DenseOperator scaled(Complex s) const;

 private:
  std::size_t dim_;
  std::vector<Complex> m_;
  bool hermitian_ = false;
  bool diagonal_ = false;
};

/// <a|b>, conjugate-linear in `a`.
Complex inner_product(const ComplexStateVector& a, const ComplexStateVector& b);

/// <psi|op|psi> for a Hermitian operator and a normalized state. The
/// imaginary residue must be below 1e-10 and is then dropped.
double expectation(const DenseOperator& op, const ComplexStateVector& psi);

/// a (x) b with a's index varying slowest: out[i*b.dim()+j] = a[i]*b[j].
ComplexStateVector tensor(const ComplexStateVector& a, const ComplexStateVector& b,
                          std::size_t max_dim = kMaxDimension);
DenseOperator tensor(const DenseOperator& a, const DenseOperator& b,
                     std::size_t max_dim = kMaxDimension);

ComplexStateVector apply(const DenseOperator& op, const ComplexStateVector& psi);

/// max |[a,b]_ij|.
double commutator_norm(const DenseOperator& a, const DenseOperator& b);

}  // namespace cslab
