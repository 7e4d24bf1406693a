#include "cslab/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cslab/errors.hpp"

namespace cslab {
namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kImagResidueTol = 1e-10;
constexpr double kNormalizedTol = 1e-9;

void check_dim(std::size_t dim, std::size_t max_dim) {
  if (dim == 0) throw InvalidInput("dimension must be at least 1");
  if (dim > max_dim) {
    throw CapacityError("dimension " + std::to_string(dim) + " exceeds maximum " +
                        std::to_string(max_dim));
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                       " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

ComplexStateVector::ComplexStateVector(std::vector<Complex> amplitudes)
    : amps_(std::move(amplitudes)) {
  check_dim(amps_.size(), kMaxDimension);
}

ComplexStateVector::ComplexStateVector(std::initializer_list<Complex> amplitudes)
    : ComplexStateVector(std::vector<Complex>(amplitudes)) {}

ComplexStateVector ComplexStateVector::basis(std::size_t dim, std::size_t index) {
  check_dim(dim, kMaxDimension);
  if (index >= dim) throw InvalidInput("basis index out of range");
  std::vector<Complex> v(dim);
  v[index] = 1.0;
  return ComplexStateVector(std::move(v));
}

double ComplexStateVector::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

double ComplexStateVector::norm() const noexcept { return std::sqrt(norm_squared()); }

ComplexStateVector ComplexStateVector::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("cannot normalize a zero or non-finite vector");
  std::vector<Complex> v(amps_);
  for (auto& a : v) a /= n;
  return ComplexStateVector(std::move(v));
}

DenseOperator::DenseOperator(std::size_t dim, std::vector<Complex> row_major)
    : dim_(dim), m_(std::move(row_major)) {
  check_dim(dim_, kMaxDimension);
  if (m_.size() != dim_ * dim_) throw InvalidInput("operator entry count does not match dim*dim");
  hermitian_ = true;
  diagonal_ = true;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      const Complex& a = m_[i * dim_ + j];
      const Complex& b = m_[j * dim_ + i];
      if (std::abs(a - std::conj(b)) >= kHermitianTol) hermitian_ = false;
      if (i != j && (a != 0.0 || b != 0.0)) diagonal_ = false;
    }
  }
}

DenseOperator DenseOperator::identity(std::size_t dim) {
  check_dim(dim, kMaxDimension);
  std::vector<Complex> m(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = 1.0;
  return DenseOperator(dim, std::move(m));
}

DenseOperator DenseOperator::zero(std::size_t dim) {
  check_dim(dim, kMaxDimension);
  return DenseOperator(dim, std::vector<Complex>(dim * dim));
}

DenseOperator DenseOperator::diagonal(std::span<const double> values) {
  const std::size_t dim = values.size();
  check_dim(dim, kMaxDimension);
  std::vector<Complex> m(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = values[i];
  return DenseOperator(dim, std::move(m));
}

DenseOperator DenseOperator::diagonal(std::initializer_list<double> values) {
  return diagonal(std::span<const double>(values.begin(), values.size()));
}

DenseOperator DenseOperator::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t dim = rows.size();
  std::vector<Complex> m;
  m.reserve(dim * dim);
  for (const auto& row : rows) {
    if (row.size() != dim) throw InvalidInput("from_rows: matrix must be square");
    m.insert(m.end(), row.begin(), row.end());
  }
  return DenseOperator(dim, std::move(m));
}

bool DenseOperator::is_zero() const noexcept {
  return std::all_of(m_.begin(), m_.end(), [](const Complex& z) { return z == 0.0; });
}

std::vector<double> DenseOperator::real_diagonal() const {
  std::vector<double> d(dim_);
  for (std::size_t i = 0; i < dim_; ++i) d[i] = m_[i * dim_ + i].real();
  return d;
}

DenseOperator DenseOperator::operator*(const DenseOperator& rhs) const {
  require_same_dim(dim_, rhs.dim_, "operator product");
  std::vector<Complex> out(dim_ * dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) {
      const Complex a = m_[i * dim_ + k];
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < dim_; ++j) out[i * dim_ + j] += a * rhs.m_[k * dim_ + j];
    }
  }
  return DenseOperator(dim_, std::move(out));
}

DenseOperator DenseOperator::operator+(const DenseOperator& rhs) const {
  require_same_dim(dim_, rhs.dim_, "operator sum");
  std::vector<Complex> out(m_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += rhs.m_[i];
  return DenseOperator(dim_, std::move(out));
}

DenseOperator DenseOperator::operator-(const DenseOperator& rhs) const {
  return *this + rhs.scaled(-1.0);
}

DenseOperator DenseOperator::scaled(Complex s) const {
  std::vector<Complex> out(m_);
  for (auto& z : out) z *= s;
  return DenseOperator(dim_, std::move(out));
}

Complex inner_product(const ComplexStateVector& a, const ComplexStateVector& b) {
  require_same_dim(a.dim(), b.dim(), "inner_product");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double expectation(const DenseOperator& op, const ComplexStateVector& psi) {
  require_same_dim(op.dim(), psi.dim(), "expectation");
  if (!op.is_hermitian()) throw ContractViolation("expectation requires a Hermitian operator");
  if (std::abs(psi.norm_squared() - 1.0) > kNormalizedTol) {
    throw InvalidInput("expectation requires a normalized state");
  }
  const Complex v = inner_product(psi, apply(op, psi));
  if (std::abs(v.imag()) >= kImagResidueTol) {
    throw NumericalError("expectation has imaginary residue " + std::to_string(v.imag()));
  }
  return v.real();
}

ComplexStateVector tensor(const ComplexStateVector& a, const ComplexStateVector& b,
                          std::size_t max_dim) {
  if (a.dim() > max_dim / b.dim()) {
    throw CapacityError("tensor product dimension " + std::to_string(a.dim()) + "x" +
                        std::to_string(b.dim()) + " exceeds maximum " + std::to_string(max_dim));
  }
  std::vector<Complex> out;
  out.reserve(a.dim() * b.dim());
  for (const auto& x : a.amplitudes()) {
    for (const auto& y : b.amplitudes()) out.push_back(x * y);
  }
  return ComplexStateVector(std::move(out));
}

DenseOperator tensor(const DenseOperator& a, const DenseOperator& b, std::size_t max_dim) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  if (na > max_dim / nb) throw CapacityError("operator tensor product exceeds maximum dimension");
  const std::size_t n = na * nb;
  std::vector<Complex> out(n * n);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      const Complex aij = a(i, j);
      if (aij == 0.0) continue;
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) out[(i * nb + k) * n + (j * nb + l)] = aij * b(k, l);
    }
  return DenseOperator(n, std::move(out));
}

ComplexStateVector apply(const DenseOperator& op, const ComplexStateVector& psi) {
  require_same_dim(op.dim(), psi.dim(), "apply");
  const std::size_t n = op.dim();
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += op(i, j) * psi[j];
    out[i] = s;
  }
  return ComplexStateVector(std::move(out));
}

double commutator_norm(const DenseOperator& a, const DenseOperator& b) {
  const DenseOperator c = a * b - b * a;
  double m = 0.0;
  for (const auto& z : c.entries()) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace cslab
