#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cslab/errors.hpp"
#include "cslab/hilbert.hpp"

using namespace cslab;

namespace {

ComplexStateVector random_state(std::mt19937_64& gen, std::size_t dim) {
  std::normal_distribution<double> n;
  std::vector<Complex> a(dim);
  for (auto& z : a) z = Complex(n(gen), n(gen));
  return ComplexStateVector(std::move(a));
}

const double kS = 1.0 / std::sqrt(2.0);

}  // namespace

TEST(Hilbert, InnerProductExamples) {
  EXPECT_EQ(inner_product({1, 0}, {1, 0}), Complex(1));
  EXPECT_EQ(inner_product({1, 0}, {0, 1}), Complex(0));
  const ComplexStateVector v{Complex(kS), Complex(0, kS)};
  EXPECT_NEAR(std::abs(inner_product(v, v) - Complex(1)), 0.0, 1e-15);
  EXPECT_THROW(inner_product({1, 0}, {1, 0, 0}), InvalidInput);
}

TEST(Hilbert, InnerProductConjugateSymmetric) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_state(gen, 7), b = random_state(gen, 7);
    EXPECT_LT(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))), 1e-12);
    EXPECT_GE(inner_product(a, a).real(), 0.0);
    EXPECT_EQ(inner_product(a, a).imag(), 0.0);
  }
}

TEST(Hilbert, ExpectationExamples) {
  const auto z = DenseOperator::diagonal({1, -1});
  EXPECT_DOUBLE_EQ(expectation(z, {1, 0}), 1.0);
  EXPECT_NEAR(expectation(z, {kS, kS}), 0.0, 1e-15);
  EXPECT_NEAR(expectation(z, {std::sqrt(0.3), std::sqrt(0.7)}), -0.4, 1e-15);
}

TEST(Hilbert, ExpectationContracts) {
  const auto raising = DenseOperator::from_rows({{0, 1}, {0, 0}});
  EXPECT_FALSE(raising.is_hermitian());
  EXPECT_THROW(expectation(raising, {1, 0}), ContractViolation);
  EXPECT_THROW(expectation(DenseOperator::diagonal({1, -1}), {2, 0}), InvalidInput);
  EXPECT_THROW(expectation(DenseOperator::diagonal({1, -1, 0}), {1, 0}), InvalidInput);
}

TEST(Hilbert, ExpectationRealForHermitian) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n;
  for (int t = 0; t < 20; ++t) {
    std::vector<Complex> m(16);
    for (std::size_t i = 0; i < 4; ++i) {
      m[i * 4 + i] = n(gen);
      for (std::size_t j = i + 1; j < 4; ++j) {
        m[i * 4 + j] = Complex(n(gen), n(gen));
        m[j * 4 + i] = std::conj(m[i * 4 + j]);
      }
    }
    const DenseOperator h(4, m);
    ASSERT_TRUE(h.is_hermitian());
    EXPECT_NO_THROW(expectation(h, random_state(gen, 4).normalized()));
  }
}

TEST(Hilbert, TensorExamples) {
  EXPECT_EQ(tensor(ComplexStateVector{1, 0}, ComplexStateVector{0, 1}), (ComplexStateVector{0, 1, 0, 0}));
  const ComplexStateVector up{1, 0}, down{0, 1};
  const auto a = tensor(up, down), b = tensor(down, up);
  std::vector<Complex> s(4);
  for (std::size_t i = 0; i < 4; ++i) s[i] = kS * (a[i] - b[i]);
  const ComplexStateVector singlet(s);
  EXPECT_EQ(singlet, (ComplexStateVector{0, kS, -kS, 0}));
}

TEST(Hilbert, TensorNormAndAssociativity) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_state(gen, 2), b = random_state(gen, 3), c = random_state(gen, 4);
    EXPECT_NEAR(tensor(a, b).norm(), a.norm() * b.norm(), 1e-12 * a.norm() * b.norm());
    const auto l = tensor(tensor(a, b), c), r = tensor(a, tensor(b, c));
    ASSERT_EQ(l.dim(), r.dim());
    for (std::size_t i = 0; i < l.dim(); ++i) EXPECT_LE(std::abs(l[i] - r[i]), 1e-14 * std::max(1.0, std::abs(l[i])));
  }
}

TEST(Hilbert, TensorCapacity) {
  const auto a = ComplexStateVector::basis(64, 0);
  EXPECT_EQ(tensor(a, a).dim(), 4096u);
  EXPECT_THROW(tensor(a, ComplexStateVector::basis(65, 0)), CapacityError);
  EXPECT_THROW(tensor(DenseOperator::identity(64), DenseOperator::identity(65)), CapacityError);
}

TEST(Hilbert, ApplyExamples) {
  const ComplexStateVector psi{Complex(0.3, 0.1), Complex(-0.2, 0.5)};
  EXPECT_EQ(apply(DenseOperator::identity(2), psi), psi);
  EXPECT_EQ(apply(DenseOperator::diagonal({1, -1}), {0, 1}), (ComplexStateVector{0, -1}));
  const auto sx = DenseOperator::from_rows({{0, 1}, {1, 0}});
  EXPECT_EQ(apply(sx, {1, 0}), (ComplexStateVector{0, 1}));
  EXPECT_THROW(apply(sx, {1, 0, 0}), InvalidInput);
}

TEST(Hilbert, Normalization) {
  std::mt19937_64 gen(4);
  const auto v = random_state(gen, 9).normalized();
  EXPECT_NEAR(v.norm_squared(), 1.0, 1e-12);
  EXPECT_THROW(ComplexStateVector({0, 0}).normalized(), InvalidInput);
  EXPECT_THROW(ComplexStateVector(std::vector<Complex>{}), InvalidInput);
}

TEST(Hilbert, Commutator) {
  const auto sx = DenseOperator::from_rows({{0, 1}, {1, 0}});
  const auto sz = DenseOperator::diagonal({1, -1});
  EXPECT_DOUBLE_EQ(commutator_norm(sx, sz), 2.0);
  EXPECT_EQ(commutator_norm(sz, DenseOperator::diagonal({3, 4})), 0.0);
}
