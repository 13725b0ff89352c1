#include <gtest/gtest.h>

#include <cmath>

#include "normlab/instance.hpp"
#include "normlab/spectral.hpp"
#include "oracles.hpp"

using namespace normlab;

namespace {

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const ComplexMatrix kNilpotent = mat2(0, 1, 0, 0);
const ComplexMatrix kReflection = mat2(1, 1, 1, -1);

ComplexMatrix random_matrix(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  return gaussian_matrix(n, n, rng);
}

ComplexMatrix random_normal(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  const ComplexMatrix u = random_unitary(n, seed);
  const ComplexVector d = gaussian_matrix(n, 1, rng);
  return u * d.asDiagonal() * u.adjoint();
}

}  // namespace

TEST(Algebra, AdjointOfNilpotent) {
  EXPECT_EQ(adjoint(kNilpotent), mat2(0, 0, 1, 0));
}

TEST(Algebra, IdentityTimesMatrix) {
  const ComplexMatrix m = random_matrix(5, 1);
  EXPECT_EQ(multiply(identity(5), m), m);
}

TEST(Algebra, ReflectionSquared) {
  EXPECT_EQ(multiply(kReflection, kReflection), mat2(2, 0, 0, 2));
}

TEST(Algebra, ShapeErrors) {
  const ComplexMatrix a = ComplexMatrix::Zero(2, 3);
  const ComplexMatrix b = ComplexMatrix::Zero(2, 2);
  EXPECT_THROW(add(a, b), ShapeError);
  EXPECT_THROW(subtract(a, b), ShapeError);
  EXPECT_THROW(multiply(a, b), ShapeError);
  EXPECT_NO_THROW(multiply(b, a));
}

TEST(Algebra, ScaleAndCommutator) {
  const ComplexMatrix m = random_matrix(3, 2);
  EXPECT_LT((scale(m, Complex(0, 2)) - Complex(0, 2) * m).norm(), 1e-15);
  EXPECT_LT(commutator(m, m).norm(), 1e-14);
  const ComplexMatrix s = kReflection;
  const ComplexMatrix t = mat2(0, 1, 1, 0);
  EXPECT_EQ(commutator(s, t), mat2(0, 2, -2, 0));
}

TEST(Algebra, NonFiniteRejected) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  EXPECT_TRUE(all_finite(m));
  m(0, 1) = Complex(std::nan(""), 0);
  EXPECT_FALSE(all_finite(m));
  EXPECT_THROW(require_finite(m, "M"), NumericError);
}

TEST(Cartesian, HermitianInput) {
  const auto [a, c] = cartesian_decomposition(kReflection);
  EXPECT_EQ(a, kReflection);
  EXPECT_EQ(c, ComplexMatrix::Zero(2, 2));
}

TEST(Cartesian, SkewInput) {
  const auto [a, c] = cartesian_decomposition(Complex(0, 1) * identity(3));
  EXPECT_LT(a.norm(), 1e-15);
  EXPECT_LT((c - identity(3)).norm(), 1e-15);
}

TEST(Cartesian, Nilpotent) {
  const auto [a, c] = cartesian_decomposition(kNilpotent);
  EXPECT_LT((a - mat2(0, 0.5, 0.5, 0)).norm(), 1e-15);
  EXPECT_LT((c - mat2(0, Complex(0, -0.5), Complex(0, 0.5), 0)).norm(), 1e-15);
}

TEST(Cartesian, NonSquareRejected) { EXPECT_THROW(cartesian_decomposition(ComplexMatrix::Zero(2, 3)), ShapeError); }

TEST(Cartesian, ReconstructsRandomMatrices) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ComplexMatrix s = random_matrix(1 + seed % 7, seed);
    const auto [a, c] = cartesian_decomposition(s);
    EXPECT_LE(hermitian_residual(a), 1e-12);
    EXPECT_LE(hermitian_residual(c), 1e-12);
    EXPECT_LE((a + Complex(0, 1) * c - s).norm(), 1e-12);
  }
}

TEST(HermitianEig, Diagonal) {
  const auto d = hermitian_eig(mat2(1, 0, 0, 3));
  EXPECT_EQ(d.eigenvalues, (std::vector<double>{3, 1}));
}

TEST(HermitianEig, ReflectionMatchesCharacteristicPolynomial) {
  const auto d = hermitian_eig(kReflection);
  const auto [hi, lo] = oracle::eig2_hermitian(kReflection);
  EXPECT_NEAR(d.eigenvalues[0], std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(d.eigenvalues[1], -std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(d.eigenvalues[0], hi, 1e-14);
  EXPECT_NEAR(d.eigenvalues[1], lo, 1e-14);
}

TEST(HermitianEig, Zero) {
  EXPECT_EQ(hermitian_eig(ComplexMatrix::Zero(2, 2)).eigenvalues, (std::vector<double>{0, 0}));
}

TEST(HermitianEig, NonHermitianRejected) { EXPECT_THROW(hermitian_eig(kNilpotent), HypothesisError); }

TEST(HermitianEig, RandomTwoByTwoAgreesWithOracle) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ComplexMatrix g = random_matrix(2, seed);
    const ComplexMatrix h = 0.5 * (g + g.adjoint());
    const auto ev = hermitian_eigenvalues(h);
    const auto [hi, lo] = oracle::eig2_hermitian(h);
    EXPECT_NEAR(ev[0], hi, 1e-12);
    EXPECT_NEAR(ev[1], lo, 1e-12);
  }
}

TEST(HermitianEig, DecompositionInvariants) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Eigen::Index n = 2 + seed % 15;
    const ComplexMatrix g = random_matrix(n, seed);
    const ComplexMatrix h = g + g.adjoint();
    const auto d = hermitian_eig(h);
    ASSERT_EQ(d.eigenvalues.size(), static_cast<std::size_t>(n));
    EXPECT_TRUE(std::is_sorted(d.eigenvalues.rbegin(), d.eigenvalues.rend()));
    const Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(d.eigenvalues.data(), n);
    const ComplexMatrix recon = d.eigenvectors * lambda.cast<Complex>().asDiagonal() * d.eigenvectors.adjoint();
    EXPECT_LE(op_norm(h - recon), 1e-10 * std::max(1.0, op_norm(h)));
    EXPECT_LE(op_norm(d.eigenvectors.adjoint() * d.eigenvectors - identity(n)), 1e-10);
  }
}

TEST(SingularValues, Examples) {
  EXPECT_EQ(singular_values(identity(3)).values, (std::vector<double>{1, 1, 1}));
  const auto nil = singular_values(kNilpotent);
  EXPECT_NEAR(nil.at(1), 1.0, 1e-15);
  EXPECT_NEAR(nil.at(2), 0.0, 1e-15);
  const auto refl = singular_values(kReflection);
  EXPECT_NEAR(refl.at(1), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(refl.at(2), std::sqrt(2.0), 1e-14);
}

TEST(SingularValues, IndexConvention) {
  const auto s = singular_values(ComplexMatrix::Ones(2, 3));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.at(3), 0.0);
  EXPECT_EQ(s.at(100), 0.0);
  EXPECT_EQ(s.at(0), 0.0);
}

TEST(SingularValues, Invariants) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const ComplexMatrix m = gaussian_matrix(1 + seed % 6, 1 + (seed / 6) % 5, rng);
    const auto s = singular_values(m);
    double sq = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      EXPECT_GE(s.values[j], 0.0);
      if (j > 0) {
        EXPECT_LE(s.values[j], s.values[j - 1]);
      }
      sq += s.values[j] * s.values[j];
    }
    const double hs = oracle::hs_norm_loops(m);
    EXPECT_NEAR(sq, hs * hs, 1e-10 * hs * hs);
    EXPECT_NEAR(hs_norm(m), hs, 1e-12 * hs);
    EXPECT_NEAR(op_norm(m), s.at(1), 1e-10 * s.at(1));
  }
}

TEST(OpNorm, Examples) {
  EXPECT_NEAR(op_norm(identity(4)), 1.0, 1e-15);
  EXPECT_NEAR(op_norm(mat2(0, 2, -2, 0)), 2.0, 1e-15);
  EXPECT_EQ(op_norm(ComplexMatrix::Zero(3, 3)), 0.0);
}

TEST(OpNorm, AgreesWithPowerIteration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix m = random_matrix(2 + seed % 7, seed + 100);
    EXPECT_NEAR(op_norm(m), oracle::power_opnorm(m), 1e-8 * op_norm(m));
  }
}

TEST(HsNorm, Examples) {
  EXPECT_NEAR(hs_norm(identity(2)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(hs_norm(kNilpotent), 1.0, 1e-15);
  EXPECT_NEAR(hs_norm(kReflection), 2.0, 1e-15);
}

TEST(NumericalRadius, Examples) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = -1;
  EXPECT_NEAR(numerical_radius(d), 3.0, 1e-9);
  EXPECT_NEAR(numerical_radius(kNilpotent), 0.5, 1e-9);
  EXPECT_EQ(numerical_radius(ComplexMatrix::Zero(3, 3)), 0.0);
  EXPECT_THROW(numerical_radius(ComplexMatrix::Zero(2, 3)), ShapeError);
}

TEST(NumericalRadius, NormalEqualsOpNorm) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ComplexMatrix m = random_normal(2 + seed % 10, seed);
    ASSERT_TRUE(is_normal(m, 1e-10));
    EXPECT_NEAR(numerical_radius(m), op_norm(m), 1e-6);
  }
}

TEST(NumericalRadius, HalfNormSandwich) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const ComplexMatrix m = random_matrix(1 + seed % 12, seed + 7);
    const double w = numerical_radius(m);
    const double nm = op_norm(m);
    EXPECT_GE(w, 0.5 * nm - 1e-12);
    EXPECT_LE(w, nm);
  }
}

TEST(NumericalRadius, AtLeastEverySampledRayleighQuotient) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ComplexMatrix m = random_matrix(4, seed + 20);
    const double w = numerical_radius(m);
    Rng rng(seed);
    for (int k = 0; k < 2000; ++k) {
      const ComplexVector x = random_unit_vector(4, rng);
      EXPECT_LE(oracle::rayleigh_modulus(m, x), w + 1e-9);
    }
  }
}

TEST(NumericalRadius, MatchesSamplingOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ComplexMatrix m = random_matrix(3 + seed, seed + 40);
    EXPECT_NEAR(numerical_radius(m), oracle::numerical_radius_sampling(m, seed, 40000), 1e-3);
  }
}

TEST(AbsSqrt, Examples) {
  EXPECT_LT((matrix_abs_sqrt(identity(3)) - identity(3)).norm(), 1e-14);
  EXPECT_LT((matrix_abs_sqrt(mat2(4, 0, 0, 9)) - mat2(2, 0, 0, 3)).norm(), 1e-14);
  EXPECT_LT((matrix_abs_sqrt(kNilpotent) - mat2(0, 0, 0, 1)).norm(), 1e-14);
}

TEST(AbsSqrt, FourthPowerReconstructsGram) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ComplexMatrix m = random_matrix(1 + seed % 8, seed + 300);
    const ComplexMatrix r = matrix_abs_sqrt(m);
    EXPECT_TRUE(is_positive_semidefinite(r));
    const ComplexMatrix r2 = r * r;
    const ComplexMatrix gram = m.adjoint() * m;
    EXPECT_LE(op_norm(r2 * r2 - gram), 1e-8 * std::max(1.0, op_norm(gram)));
  }
}

TEST(Classify, Diagonal) {
  const auto c = classify(mat2(1, 0, 0, 2));
  EXPECT_TRUE(c.hermitian);
  EXPECT_TRUE(c.normal);
  EXPECT_TRUE(c.positive_semidefinite);
  EXPECT_FALSE(c.unitary);
}

TEST(Classify, Nilpotent) {
  const auto c = classify(kNilpotent);
  EXPECT_FALSE(c.normal);
  EXPECT_NEAR(c.normal_residual, 1.0, 1e-15);
  EXPECT_FALSE(c.hermitian);
  EXPECT_FALSE(c.positive_semidefinite);
}

TEST(Classify, Rotation) {
  const double th = M_PI / 6;
  const auto c = classify(mat2(std::cos(th), -std::sin(th), std::sin(th), std::cos(th)));
  EXPECT_TRUE(c.normal);
  EXPECT_TRUE(c.unitary);
  EXPECT_FALSE(c.hermitian);
  EXPECT_FALSE(c.positive_semidefinite);
}

TEST(Classify, ToleranceScalesWithNorm) {
  ComplexMatrix h = 1e6 * mat2(1, 0, 0, 2);
  h(0, 1) = 1e-3;
  EXPECT_TRUE(is_hermitian(h));
  EXPECT_FALSE(is_hermitian(h, 1e-16));
  EXPECT_THROW(classify(ComplexMatrix::Zero(2, 3)), ShapeError);
}

TEST(Classify, NegativeDefiniteIsNotPsd) {
  EXPECT_FALSE(is_positive_semidefinite(-identity(3)));
  EXPECT_TRUE(is_positive_semidefinite(ComplexMatrix::Zero(3, 3)));
}

TEST(DirectSum, Examples) {
  const auto s = singular_values(direct_sum(identity(2), ComplexMatrix::Zero(2, 2)));
  EXPECT_EQ(s.values, (std::vector<double>{1, 1, 0, 0}));
  const ComplexMatrix big = direct_sum(ComplexMatrix::Ones(2, 2), ComplexMatrix::Ones(3, 3));
  EXPECT_EQ(big.rows(), 5);
  EXPECT_EQ(big.cols(), 5);
  ComplexMatrix a(1, 1), b(1, 1);
  a << 2.0;
  b << 3.0;
  EXPECT_EQ(direct_sum(a, b), mat2(2, 0, 0, 3));
}

TEST(DirectSum, SingularValuesMerge) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix x = random_matrix(2 + seed % 3, seed);
    const ComplexMatrix y = random_matrix(1 + seed % 4, seed + 1000);
    auto merged = singular_values(x).values;
    const auto sy = singular_values(y).values;
    merged.insert(merged.end(), sy.begin(), sy.end());
    std::sort(merged.rbegin(), merged.rend());
    const auto s = singular_values(direct_sum(x, y)).values;
    ASSERT_EQ(s.size(), merged.size());
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_NEAR(s[j], merged[j], 1e-12 * std::max(1.0, merged[0]));
  }
}
