#include <cmath>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "relunmd/core/least_squares.hpp"
#include "relunmd/core/matrix.hpp"
#include "relunmd/core/rng.hpp"
#include "relunmd/core/svd.hpp"

using namespace relunmd;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix a(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) a(i, j++) = v;
    ++i;
  }
  return a;
}

}  // namespace

TEST(Relu, ClipsNegatives) {
  EXPECT_EQ(relu(from_rows({{1, -1}, {0, 2}})), from_rows({{1, 0}, {0, 2}}));
}

TEST(Relu, IdempotentAndIdentityOnNonnegative) {
  Rng rng(3, Stream::data);
  const Matrix a = rng.normal_matrix(7, 5);
  EXPECT_EQ(relu(relu(a)), relu(a));
  const Matrix p = a.cwiseAbs();
  EXPECT_EQ(relu(p), p);
}

TEST(Frobenius, InnerAndNorm) {
  EXPECT_DOUBLE_EQ(frobenius_inner(Matrix::Identity(2, 2), Matrix::Identity(2, 2)), 2.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(Matrix::Zero(3, 4)), 0.0);
  EXPECT_THROW(frobenius_inner(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), ShapeError);
}

TEST(Frobenius, CauchySchwarz) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed, Stream::data);
    const Matrix a = rng.normal_matrix(4, 6);
    const Matrix b = rng.normal_matrix(4, 6);
    EXPECT_LE(std::abs(frobenius_inner(a, b)), frobenius_norm(a) * frobenius_norm(b) * (1 + 1e-15));
  }
}

TEST(RelativeError, TrivialCases) {
  Rng rng(5, Stream::data);
  const Matrix x = rng.normal_matrix(5, 5).cwiseAbs();
  EXPECT_EQ(relative_error(x, x), 0.0);
  const Matrix pos = x.array() + 0.1;
  EXPECT_DOUBLE_EQ(relative_error(pos, -pos), 1.0);
  EXPECT_THROW(relative_error(Matrix::Zero(2, 2), Matrix::Ones(2, 2)), ParameterError);
}

TEST(RelativeError, MatchesScalarLoop) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed, Stream::data);
    const Matrix x = relu(rng.normal_matrix(9, 7));
    const Matrix theta = rng.normal_matrix(9, 7);
    EXPECT_NEAR(relative_error(x, theta), oracle::relative_error_loop(x, theta), 1e-12);
  }
}

TEST(RelativeError, ScaleCovariant) {
  Rng rng(8, Stream::data);
  const Matrix x = relu(rng.normal_matrix(6, 6));
  const Matrix theta = rng.normal_matrix(6, 6);
  for (double c : {0.1, 3.0, 1e4}) EXPECT_NEAR(relative_error(c * x, c * theta), relative_error(x, theta), 1e-14);
}

TEST(RelativeError, RejectsNonFinite) {
  Matrix x = Matrix::Ones(2, 2);
  x(0, 1) = std::nan("");
  EXPECT_THROW(relative_error(x, Matrix::Ones(2, 2)), ParameterError);
}

TEST(Rng, SameSeedSameStream) {
  EXPECT_EQ(Rng(11, Stream::data).normal_matrix(4, 3), Rng(11, Stream::data).normal_matrix(4, 3));
  EXPECT_NE(Rng(11, Stream::data).normal_matrix(4, 3), Rng(11, Stream::init).normal_matrix(4, 3));
  EXPECT_NE(Rng(11, Stream::data).normal_matrix(4, 3), Rng(12, Stream::data).normal_matrix(4, 3));
}

TEST(Rng, NormalMoments) {
  Rng rng(2024, Stream::data);
  const Matrix s = rng.normal_matrix(200, 200);
  const double mean = s.mean();
  const double var = (s.array() - mean).square().mean();
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.02);
}

// ---------------------------------------------------------------------------

TEST(Tsvd, Diagonal) {
  const Matrix a = Eigen::Vector3d(3, 2, 1).asDiagonal().toDenseMatrix();
  const TsvdResult t = tsvd(a, 2);
  ASSERT_EQ(t.rank(), 2);
  EXPECT_NEAR(t.singular_values(0), 3.0, 1e-14);
  EXPECT_NEAR(t.singular_values(1), 2.0, 1e-14);
  EXPECT_NEAR((a - t.reconstruct()).norm(), 1.0, 1e-13);
}

TEST(Tsvd, RankOne) {
  Rng rng(4, Stream::data);
  const Vector u = rng.normal_matrix(7, 1).col(0);
  const Vector v = rng.normal_matrix(5, 1).col(0);
  const Matrix a = u * v.transpose();
  const TsvdResult t = tsvd(a, 1);
  EXPECT_NEAR(t.singular_values(0), u.norm() * v.norm(), 1e-12);
  EXPECT_NEAR((a - t.reconstruct()).norm(), 0.0, 1e-12);
}

// Reference values from the Gram-eigendecomposition oracle, frozen.
TEST(Tsvd, SeededSixByFiveMatchesOracle) {
  const Matrix a = Rng(42, Stream::data).normal_matrix(6, 5);
  const oracle::Vector s = oracle::gram_singular_values(a);
  const double frozen[5] = {3.1999703866572196, 2.3497594241871202, 1.7837060539147154,
                           1.3109607621960371, 0.36220715235238138};
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(s(k), frozen[k], 1e-9);

  const TsvdResult t = tsvd(a, 3);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(t.singular_values(k), frozen[k], 1e-9);
  const double residual = (a - t.reconstruct()).squaredNorm();
  EXPECT_NEAR(residual, frozen[3] * frozen[3] + frozen[4] * frozen[4], 1e-8);
}

TEST(Tsvd, OrthonormalFactorsAndOrder) {
  Rng rng(9, Stream::data);
  const Matrix a = rng.normal_matrix(15, 11);
  const TsvdResult t = tsvd(a, 6);
  const Matrix eye = Matrix::Identity(6, 6);
  EXPECT_LE((t.u.transpose() * t.u - eye).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((t.v.transpose() * t.v - eye).cwiseAbs().maxCoeff(), 1e-10);
  for (Index k = 1; k < 6; ++k) EXPECT_GE(t.singular_values(k - 1), t.singular_values(k));
  EXPECT_GE(t.singular_values(5), 0.0);
}

TEST(Tsvd, WideAndRankDeficientInputs) {
  Rng rng(10, Stream::data);
  const Matrix low = rng.normal_matrix(6, 2) * rng.normal_matrix(2, 14);
  const TsvdResult t = tsvd(low, 4);
  const Matrix eye = Matrix::Identity(4, 4);
  EXPECT_LE((t.u.transpose() * t.u - eye).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((t.v.transpose() * t.v - eye).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR((low - t.reconstruct()).norm(), 0.0, 1e-10 * low.norm());
  EXPECT_LE(t.singular_values(2), 1e-10 * t.singular_values(0));
}

TEST(Tsvd, LargePathEckartYoung) {
  Rng rng(12, Stream::data);
  // Decaying spectrum plus noise, big enough to take the subspace-iteration path.
  const Matrix a = rng.normal_matrix(150, 10) * rng.normal_matrix(10, 120) + 0.05 * rng.normal_matrix(150, 120);
  for (Index r : {1, 5, 10, 20}) {
    const TsvdResult t = tsvd(a, r);
    const double residual = (a - t.reconstruct()).squaredNorm();
    EXPECT_NEAR(residual, oracle::discarded_energy(a, r), 1e-8 * a.squaredNorm()) << "r=" << r;
    const Matrix eye = Matrix::Identity(r, r);
    EXPECT_LE((t.u.transpose() * t.u - eye).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((t.v.transpose() * t.v - eye).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Tsvd, Deterministic) {
  Rng rng(13, Stream::data);
  const Matrix a = rng.normal_matrix(100, 90);
  EXPECT_EQ(tsvd(a, 7).reconstruct(), tsvd(a, 7).reconstruct());
}

TEST(Tsvd, RankOutOfRange) {
  const Matrix a = Matrix::Ones(4, 3);
  EXPECT_THROW(tsvd(a, 0), ParameterError);
  EXPECT_THROW(tsvd(a, 4), ParameterError);
}

TEST(Tsvd, BudgetExhaustedCarriesBestIterate) {
  Rng rng(14, Stream::data);
  const Matrix a = rng.normal_matrix(120, 100);
  TsvdOptions opts;
  opts.max_iter = 1;
  opts.power_iters = 0;
  opts.tol = 1e-15;
  try {
    tsvd(a, 10, opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.best().rank(), 10);
  }
}

// ---------------------------------------------------------------------------

TEST(LeastSquares, ConsistentSystemsRecoverFactors) {
  Rng rng(20, Stream::data);
  const Matrix w0 = rng.normal_matrix(6, 3);
  const Matrix h0 = rng.normal_matrix(3, 8);
  const Matrix z = w0 * h0;
  EXPECT_LE((solve_ls_left(z, h0).solution - w0).norm(), 1e-10);
  EXPECT_LE((solve_ls_right(z, w0).solution - h0).norm(), 1e-10);
}

TEST(LeastSquares, IdentityAndOrthonormal) {
  Rng rng(21, Stream::data);
  const Matrix z = rng.normal_matrix(5, 3);
  EXPECT_LE((solve_ls_left(z, Matrix::Identity(3, 3)).solution - z).norm(), 1e-14);
  const Matrix q = Eigen::HouseholderQR<Matrix>(rng.normal_matrix(5, 2)).householderQ() * Matrix::Identity(5, 2);
  EXPECT_LE((solve_ls_right(z, q).solution - q.transpose() * z).norm(), 1e-13);
}

TEST(LeastSquares, MatchesNormalEquations) {
  Rng rng(22, Stream::data);
  const Matrix z1 = rng.normal_matrix(5, 4);
  const Matrix h = rng.normal_matrix(2, 4);
  EXPECT_LE((solve_ls_left(z1, h).solution - oracle::ls_left_normal(z1, h)).norm(), 1e-10);
  const Matrix z2 = rng.normal_matrix(4, 3);
  const Matrix w = rng.normal_matrix(4, 2);
  EXPECT_LE((solve_ls_right(z2, w).solution - oracle::ls_right_normal(z2, w)).norm(), 1e-10);
}

TEST(LeastSquares, ResidualOrthogonality) {
  Rng rng(23, Stream::data);
  const Matrix z = rng.normal_matrix(9, 7);
  const Matrix h = rng.normal_matrix(3, 7);
  const Matrix w = solve_ls_left(z, h).solution;
  EXPECT_LE(((z - w * h) * h.transpose()).norm(), 1e-8 * z.norm() * h.norm());
  const Matrix w2 = rng.normal_matrix(9, 3);
  const Matrix h2 = solve_ls_right(z, w2).solution;
  EXPECT_LE((w2.transpose() * (z - w2 * h2)).norm(), 1e-8 * z.norm() * w2.norm());
}

TEST(LeastSquares, FirstOrderOptimality) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed, Stream::data);
    const Matrix z = rng.normal_matrix(6, 5);
    const Matrix h = rng.normal_matrix(2, 5);
    const Matrix w = solve_ls_left(z, h).solution;
    Matrix dw = rng.normal_matrix(6, 2);
    dw *= 1e-3 / dw.norm();
    const double base = (z - w * h).norm();
    EXPECT_GE((z - (w + dw) * h).norm(), base - 1e-12);
    EXPECT_GE((z - (w - dw) * h).norm(), base - 1e-12);
  }
}

TEST(LeastSquares, RankDeficientGivesMinNormAndFlag) {
  Rng rng(24, Stream::data);
  Matrix h = rng.normal_matrix(3, 6);
  h.row(2) = 2.0 * h.row(0);
  const Matrix z = rng.normal_matrix(4, 6);
  const LsSolution sol = solve_ls_left(z, h);
  EXPECT_TRUE(sol.rank_deficient);
  EXPECT_EQ(sol.rank, 2);
  const Matrix pinv = h.completeOrthogonalDecomposition().pseudoInverse();
  EXPECT_LE((sol.solution - z * pinv).norm(), 1e-9);
  EXPECT_FALSE(solve_ls_left(z, rng.normal_matrix(3, 6)).rank_deficient);
}
