#include <gtest/gtest.h>

#include "qprob/linalg.hpp"
#include "qprob/random.hpp"
#include "qprob/sampling.hpp"
#include "test_helpers.hpp"

using namespace qprob;
using qprob::testing::max_diff;
using qprob::testing::to_dense;

TEST(Kron, IdentityTimesIdentity) { EXPECT_EQ(max_abs_diff(kron(Matrix::identity(2), Matrix::identity(2)), Matrix::identity(4)), 0.0); }

TEST(Kron, DiagonalArithmetic) {
  const auto k = kron(Matrix::diagonal({1, 2}), Matrix::diagonal({3, 4}));
  EXPECT_EQ(max_abs_diff(k, Matrix::diagonal({3, 4, 6, 8})), 0.0);
}

TEST(Kron, MatchesEntrywiseOracleAndTraceFactorizes) {
  CounterEngine rng(1, 0);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_matrix(rng, 3, 3);
    const auto b = random_matrix(rng, 3, 3);
    const auto k = kron(a, b);
    EXPECT_LT(max_diff(k, oracle::kron(to_dense(a), to_dense(b))), 1e-15);
    EXPECT_LT(std::abs(trace(k) - trace(a) * trace(b)), 1e-12);
  }
}

TEST(Kron, NonSquareShapesAndIndexing) {
  const auto a = Matrix(2, 3, std::vector<cplx>{1, 2, 3, 4, 5, 6});
  const auto b = Matrix(3, 1, std::vector<cplx>{1, {0, 1}, -1});
  const auto k = kron(a, b);
  ASSERT_EQ(k.rows(), 6u);
  ASSERT_EQ(k.cols(), 3u);
  // entry ((i*b.rows + k), (j*b.cols + l)) = a(i,j) b(k,l)
  EXPECT_EQ(k(1 * 3 + 1, 2 * 1 + 0), a(1, 2) * b(1, 0));
}

TEST(Kron, IsAssociative) {
  CounterEngine rng(2, 0);
  for (int i = 0; i < 10; ++i) {
    const auto a = random_matrix(rng, 2, 2), b = random_matrix(rng, 2, 2), c = random_matrix(rng, 2, 2);
    EXPECT_LT(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))), 1e-14);
  }
}

TEST(Kron, RejectsOversizedResult) {
  EXPECT_THROW(kron(Matrix(1024, 1024), Matrix(2, 1)), InvalidArgument);
  EXPECT_NO_THROW(kron(Matrix(1024, 1), Matrix(1, 1024)));
  EXPECT_THROW(Matrix(1025, 1024), InvalidArgument);
}

TEST(Adjoint, IdentityAndInvolution) {
  EXPECT_EQ(max_abs_diff(adjoint(Matrix::identity(3)), Matrix::identity(3)), 0.0);
  CounterEngine rng(3, 0);
  const auto a = random_matrix(rng, 3, 4);
  EXPECT_EQ(max_abs_diff(adjoint(adjoint(a)), a), 0.0);
}

TEST(Adjoint, OfOuterProductSwapsFactors) {
  CounterEngine rng(4, 0);
  const auto u = random_unit_vector(rng, 4);
  const auto v = random_unit_vector(rng, 4);
  const auto lhs = adjoint(outer(u, v));
  // Entrywise: (|u><v|)^dagger (i,j) = conj(u_j conj(v_i)) = v_i conj(u_j).
  oracle::Dense expect = oracle::zeros(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) expect[i][j] = v[i] * std::conj(u[j]);
  EXPECT_LT(max_diff(lhs, expect), 1e-15);
}

TEST(Trace, Basics) {
  EXPECT_EQ(trace(Matrix::identity(4)), cplx(4.0));
  EXPECT_THROW(trace(Matrix(2, 3)), DimensionMismatch);
  CounterEngine rng(5, 0);
  const auto u = random_unit_vector(rng, 3);
  const auto v = random_unit_vector(rng, 3);
  EXPECT_LT(std::abs(trace(outer(u, v)) - inner(v, u)), 1e-15);
  const auto rho = random_mixed_state(rng, 4);
  EXPECT_NEAR(trace(rho.matrix()).real(), 1.0, 1e-12);
}

TEST(Trace, LinearAndAdjointInvariantForHermitian) {
  CounterEngine rng(6, 0);
  const auto a = random_hermitian(rng, 4);
  const auto b = random_hermitian(rng, 4);
  const cplx s{0.3, -1.2};
  EXPECT_LT(std::abs(trace(a + s * b) - (trace(a) + s * trace(b))), 1e-12);
  EXPECT_LT(std::abs(trace(adjoint(a)) - trace(a)), 1e-14);
  EXPECT_LT(std::abs(trace(a).imag()), 1e-14);
}

TEST(Outer, BasisProjector) {
  EXPECT_EQ(max_abs_diff(outer(Vector::basis(3, 0), Vector::basis(3, 0)), Matrix::diagonal({1, 0, 0})), 0.0);
}

TEST(Outer, SelfOuterIsHermitianRankOneAndScales) {
  CounterEngine rng(7, 0);
  for (int i = 0; i < 10; ++i) {
    Vector u = random_unit_vector(rng, 4);
    u *= cplx{1.7, 0.0};
    const auto p = outer(u, u);
    EXPECT_LT(hermiticity_defect(p), 1e-15);
    // Rank <= 1: every 2x2 minor vanishes.
    for (std::size_t i1 = 0; i1 < 4; ++i1)
      for (std::size_t i2 = i1 + 1; i2 < 4; ++i2)
        for (std::size_t j1 = 0; j1 < 4; ++j1)
          for (std::size_t j2 = j1 + 1; j2 < 4; ++j2)
            EXPECT_LT(std::abs(p(i1, j1) * p(i2, j2) - p(i1, j2) * p(i2, j1)), 1e-12);
    EXPECT_LT(max_abs_diff(p * p, cplx{u.norm2(), 0.0} * p), 1e-12);
  }
}

TEST(HermitianEigen, Identity) {
  const auto s = hermitian_eigen(Matrix::identity(3));
  for (double e : s.eigenvalues) EXPECT_EQ(e, 1.0);
}

TEST(HermitianEigen, PauliX) {
  const auto s = hermitian_eigen(Matrix{{0, 1}, {1, 0}});
  EXPECT_NEAR(s.eigenvalues[0], -1.0, 1e-15);
  EXPECT_NEAR(s.eigenvalues[1], 1.0, 1e-15);
}

TEST(HermitianEigen, ComplexPhasesPauliY) {
  const auto s = hermitian_eigen(Matrix{{0, cplx{0, -1}}, {cplx{0, 1}, 0}});
  EXPECT_NEAR(s.eigenvalues[0], -1.0, 1e-15);
  EXPECT_NEAR(s.eigenvalues[1], 1.0, 1e-15);
  EXPECT_LT(max_abs_diff(s.recompose(), Matrix{{0, cplx{0, -1}}, {cplx{0, 1}, 0}}), 1e-14);
}

TEST(HermitianEigen, RandomReconstructionOrthonormalityCompleteness) {
  CounterEngine rng(8, 0);
  for (std::size_t d : {2u, 5u, 8u, 16u, 33u}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = random_hermitian(rng, d);
      const auto s = hermitian_eigen(a);
      EXPECT_LT(max_abs_diff(s.recompose(), a), 1e-10) << "d=" << d;
      EXPECT_TRUE(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
      const auto u = s.basis_matrix();
      EXPECT_LT(max_abs_diff(adjoint(u) * u, Matrix::identity(d)), 1e-10);
      Matrix sum(d, d);
      for (std::size_t n = 0; n < d; ++n) sum += outer(s.eigenvectors[n], s.eigenvectors[n]);
      EXPECT_LT(max_abs_diff(sum, Matrix::identity(d)), 1e-10);
    }
  }
}

TEST(HermitianEigen, DegenerateSpectrumStillOrthonormal) {
  // diag(2, 2, 5) rotated by a random unitary.
  CounterEngine rng(9, 0);
  const auto u = hermitian_eigen(random_hermitian(rng, 3)).basis_matrix();
  const auto a = u * Matrix::diagonal({2, 2, 5}) * adjoint(u);
  Matrix ah = a + adjoint(a);
  ah *= 0.5;
  const auto s = hermitian_eigen(ah);
  EXPECT_NEAR(s.eigenvalues[0], 2.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[1], 2.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[2], 5.0, 1e-12);
  EXPECT_LT(max_abs_diff(s.recompose(), ah), 1e-10);
}

TEST(HermitianEigen, Errors) {
  EXPECT_THROW(hermitian_eigen(Matrix{{0, 1}, {0, 0}}), NotHermitian);
  EXPECT_THROW(hermitian_eigen(Matrix(2, 3)), DimensionMismatch);
  EXPECT_THROW(hermitian_eigen(Matrix::identity(65)), InvalidArgument);
}

TEST(Matrix, RejectsNonFiniteEntries) {
  EXPECT_THROW((Matrix{{std::nan(""), 0}, {0, 1}}), InvalidArgument);
  EXPECT_THROW((Vector{1.0, std::numeric_limits<double>::infinity()}), InvalidArgument);
}

TEST(PartialTrace, MatchesOracle) {
  CounterEngine rng(10, 0);
  const auto rho = random_mixed_state(rng, 6);
  EXPECT_LT(max_diff(partial_trace_b(rho.matrix(), 2, 3), oracle::trace_out_b(to_dense(rho.matrix()), 2, 3)), 1e-15);
  EXPECT_LT(max_diff(partial_trace_a(rho.matrix(), 2, 3), oracle::trace_out_a(to_dense(rho.matrix()), 2, 3)), 1e-15);
}
