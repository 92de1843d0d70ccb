#include <gtest/gtest.h>

#include "momentmap/linalg.hpp"
#include "oracles.hpp"

using namespace momentmap;
using oracle::Mat;
using oracle::Vec;

namespace {

Mat mat(std::initializer_list<std::initializer_list<double>> rows) {
  Mat m(Eigen::Index(rows.size()), Eigen::Index(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / b.norm(); }

bool is_lower_canonical(const Mat& s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    if (s(i, i) < 0.0) return false;
    for (Eigen::Index j = i + 1; j < s.cols(); ++j)
      if (s(i, j) != 0.0) return false;
  }
  return true;
}

}  // namespace

TEST(LowerTriangular, RejectsUpperEntriesAndNegativeDiagonal) {
  EXPECT_THROW(LowerTriangular<double>(mat({{1, 1e-300}, {0, 1}})), FailedInvariant);
  EXPECT_THROW(LowerTriangular<double>(mat({{-1, 0}, {0, 1}})), FailedInvariant);
  EXPECT_THROW(LowerTriangular<double>(Mat::Zero(2, 3)), DimensionMismatch);
  Mat bad = Mat::Identity(2, 2);
  bad(1, 0) = std::nan("");
  EXPECT_THROW(LowerTriangular<double>{bad}, NonFiniteInput);
}

TEST(Cholesky, KnownValues) {
  EXPECT_EQ(cholesky<double>(Mat::Identity(3, 3)).matrix(), Mat::Identity(3, 3));
  EXPECT_EQ(cholesky<double>(mat({{4, 2}, {2, 5}})).matrix(), mat({{2, 0}, {1, 2}}));
  EXPECT_EQ(cholesky<double>(mat({{1e6, 0}, {0, 6.25e4}})).matrix(), mat({{1000, 0}, {0, 250}}));
  EXPECT_EQ(cholesky<float>(mat({{4, 2}, {2, 5}}).cast<float>()).matrix(),
            mat({{2, 0}, {1, 2}}).cast<float>());
}

TEST(Cholesky, ResidualBoundAndAgreementWithEigen) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 6);
    const double cond = std::pow(10.0, rng.uniform(0.0, 6.0));
    const Mat a = rng.uniform(0.1, 100.0) * rng.spd(n, cond);
    const Mat s = cholesky<double>(a).matrix();
    const double bound = 50.0 * n * unit_roundoff<double>() * a.norm();
    EXPECT_LE((s * s.transpose() - a).cwiseAbs().maxCoeff(), bound) << "trial " << trial;
    EXPECT_LE(rel(s, oracle::llt_factor(a)), 1e-15 * cond * n) << "trial " << trial;
    EXPECT_TRUE(is_lower_canonical(s));
  }
}

TEST(Cholesky, ResidualBoundBinary32) {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 6);
    const Mat a = rng.spd(n, std::pow(10.0, rng.uniform(0.0, 3.0)));
    const Eigen::MatrixXf af = a.cast<float>();
    const Eigen::MatrixXf s = cholesky<float>(af).matrix();
    const double bound = 50.0 * n * unit_roundoff<float>() * af.norm();
    EXPECT_LE((s * s.transpose() - af).cwiseAbs().maxCoeff(), bound) << "trial " << trial;
  }
}

TEST(Cholesky, Errors) {
  EXPECT_THROW(cholesky<double>(mat({{1, 2}, {2, 1}})), NotPositiveDefinite);
  EXPECT_THROW(cholesky<double>(mat({{0, 0}, {0, 1}})), NotPositiveDefinite);
  EXPECT_THROW(cholesky<double>(mat({{2, 1}, {0.5, 2}})), AsymmetricInput);
  EXPECT_THROW(cholesky<double>(Mat::Zero(2, 3)), DimensionMismatch);
  EXPECT_THROW(cholesky<double>(mat({{1, 0}, {0, INFINITY}})), NonFiniteInput);
}

TEST(Cholesky, SmallAsymmetryIsAveraged) {
  Mat a = mat({{4, 2}, {2, 5}});
  a(0, 1) += 4.0 * unit_roundoff<double>() * 5.0;
  const Mat s = cholesky<double>(a).matrix();
  const Mat sym = 0.5 * (a + a.transpose());
  EXPECT_LE((s * s.transpose() - sym).norm(), 1e-15 * sym.norm());
}

TEST(CholDowndate, KnownValues) {
  const auto id = LowerTriangular<double>::identity(2);
  Vec v(2);
  v << 0.6, 0.0;
  const Mat b = chol_downdate<double>(id, v).matrix();
  EXPECT_NEAR(b(0, 0), 0.8, 2e-16);
  EXPECT_EQ(b(1, 0), 0.0);
  EXPECT_EQ(b(1, 1), 1.0);

  const auto s = cholesky<double>(mat({{4, 2}, {2, 5}}));
  EXPECT_EQ(chol_downdate<double>(s, Vec::Zero(2)).matrix(), s.matrix());
}

TEST(CholDowndate, PropertyAgainstDenseRefactorization) {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = rng.integer(1, 6);
    const Mat p = rng.uniform(0.1, 10.0) * rng.spd(n, std::pow(10.0, rng.uniform(0.0, 4.0)));
    const Mat l = oracle::llt_factor(p);
    // v = L z with |z| < 1 keeps P - v v^T positive definite.
    const Vec z = rng.uniform(0.0, 0.95) * rng.unit_vector(n);
    const Vec v = l * z;
    const Mat b = chol_downdate<double>(LowerTriangular<double>(l), v).matrix();
    const Mat target = p - v * v.transpose();
    EXPECT_LE((b * b.transpose() - target).norm(), 50.0 * n * unit_roundoff<double>() * p.norm())
        << "trial " << trial;
    EXPECT_TRUE(is_lower_canonical(b));
  }
}

TEST(CholDowndate, InfeasibleVectorsAlwaysThrow) {
  oracle::Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 5);
    const Mat l = oracle::llt_factor(rng.spd(n, 100.0));
    const Vec z = rng.uniform(1.0, 3.0) * rng.unit_vector(n);
    EXPECT_THROW(chol_downdate<double>(LowerTriangular<double>(l), Vec(l * z)),
                 DowndateBreaksDefiniteness);
  }
  // Exactly on the boundary: S S^T - v v^T is singular.
  Vec v(2);
  v << 1.0, 0.0;
  try {
    chol_downdate<double>(LowerTriangular<double>::identity(2), v);
    ADD_FAILURE() << "expected DowndateBreaksDefiniteness";
  } catch (const DowndateBreaksDefiniteness& e) {
    EXPECT_DOUBLE_EQ(e.whitened_norm_sq(), 1.0);
  }
}

TEST(CholDowndate, ComponentOutsideRangeThrows) {
  Vec d(2);
  d << 1.0, 0.0;
  Vec v(2);
  v << 0.0, 0.1;
  EXPECT_THROW(chol_downdate<double>(LowerTriangular<double>::diagonal(d), v),
               DowndateBreaksDefiniteness);
  EXPECT_THROW(chol_downdate<double>(LowerTriangular<double>::identity(3), v), DimensionMismatch);
}

TEST(CholDowndate, SingularFactorAcceptsVectorsInItsRange) {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    // Rank-2 lower factor of a 4x4 PSD matrix, as triangularization of a 4x2 block yields.
    const Mat block = rng.gaussian(4, 2);
    const auto a = triangularize_sqrt<double>(block);
    const Vec w = 0.9 * rng.unit_vector(2);
    const Vec v = block * w;
    const auto b = chol_downdate<double>(a, v);
    const Mat expected = block * block.transpose() - v * v.transpose();
    EXPECT_LE((b.product() - expected).norm(), 1e-13 * (block * block.transpose()).norm());
  }
}

TEST(QrR, KnownValues) {
  EXPECT_EQ(qr_r<double>(Mat::Identity(3, 3)), Mat::Identity(3, 3));
  EXPECT_EQ(qr_r<double>(mat({{0, 0}, {3, 0}, {0, 4}})), mat({{3, 0}, {0, 4}}));
}

TEST(QrR, GramMatrixAndSignConvention) {
  oracle::Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int cols = rng.integer(1, 5);
    const int rows = rng.integer(cols, 9);
    const Mat b = rng.gaussian(rows, cols);
    const Mat r = qr_r<double>(b);
    ASSERT_EQ(r.rows(), cols);
    EXPECT_LE(rel(r.transpose() * r, b.transpose() * b), 1e-14) << "trial " << trial;
    for (int i = 0; i < cols; ++i) {
      EXPECT_GE(r(i, i), 0.0);
      for (int j = 0; j < i; ++j) EXPECT_EQ(r(i, j), 0.0);
    }
    // Unique R for full column rank: agrees with Eigen after its own sign fix.
    Eigen::HouseholderQR<Mat> qr(b);
    Mat ref = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    for (int i = 0; i < cols; ++i)
      if (ref(i, i) < 0) ref.row(i) *= -1.0;
    EXPECT_LE(rel(r, ref), 1e-13) << "trial " << trial;
  }
}

TEST(QrR, RandomSevenByThree) {
  oracle::Rng rng(32);
  const Mat b = rng.gaussian(7, 3);
  const Mat r = qr_r<double>(b);
  EXPECT_LE(rel(r.transpose() * r, b.transpose() * b), 1e-15);
}

TEST(QrR, RankDeficientGivesZeroDiagonal) {
  const Mat b = mat({{1, 2, 0}, {1, 2, 0}, {0, 0, 0}, {1, 2, 0}});
  const Mat r = qr_r<double>(b);
  EXPECT_NEAR(r(1, 1), 0.0, 1e-14);
  EXPECT_EQ(r(2, 2), 0.0);
  EXPECT_LE((r.transpose() * r - b.transpose() * b).norm(), 1e-14);
}

TEST(QrR, RejectsNonFinite) {
  Mat b = Mat::Identity(3, 2);
  b(2, 1) = std::nan("");
  EXPECT_THROW(qr_r<double>(b), NonFiniteInput);
}

TEST(TriangularizeSqrt, KnownValues) {
  const Mat s = mat({{2, 0, 0}, {1, 3, 0}, {-1, 0.5, 4}});
  EXPECT_LE((triangularize_sqrt<double>(s).matrix() - s).norm(), 1e-15);
  Mat padded = Mat::Zero(3, 5);
  padded.leftCols(3) = s;
  EXPECT_LE((triangularize_sqrt<double>(padded).matrix() - s).norm(), 1e-15);

  oracle::Rng rng(41);
  const Mat w = rng.gaussian(4, 9);
  const Mat l = triangularize_sqrt<double>(w).matrix();
  EXPECT_LE(rel(l * l.transpose(), w * w.transpose()), 1e-15);
}

TEST(TriangularizeSqrt, InvariantUnderOrthogonalRightFactor) {
  oracle::Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 5);
    const int k = rng.integer(n, 10);
    const Mat w = rng.gaussian(n, k);
    const Mat q = rng.orthogonal(k);
    const Mat a = triangularize_sqrt<double>(w).matrix();
    const Mat b = triangularize_sqrt<double>(Mat(w * q)).matrix();
    EXPECT_LE(rel(b, a), 1e-13) << "trial " << trial;
  }
}

TEST(MixedPrecision, Binary32AgreesWithBinary64OnRoundedInputs) {
  oracle::Rng rng(51);
  const double eps32 = std::numeric_limits<float>::epsilon();
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 4);
    const double cond = std::pow(10.0, rng.uniform(0.0, 2.9));
    const Eigen::MatrixXf a32 = rng.spd(n, cond).cast<float>();
    const Eigen::MatrixXd a64 = a32.cast<double>();

    const Mat c64 = cholesky<double>(a64).matrix();
    const Mat c32 = cholesky<float>(a32).matrix().cast<double>();
    EXPECT_LE((c32 - c64).norm(), 10.0 * eps32 * c64.norm()) << "cholesky trial " << trial;

    const Eigen::MatrixXf w32 = rng.gaussian(n, n + 3).cast<float>();
    const Mat t64 = triangularize_sqrt<double>(w32.cast<double>()).matrix();
    const Mat t32 = triangularize_sqrt<float>(w32).matrix().cast<double>();
    EXPECT_LE((t32 - t64).norm(), 10.0 * eps32 * t64.norm()) << "triangularize trial " << trial;

    const Eigen::VectorXf v32 = (0.5 * rng.unit_vector(n)).cast<float>();
    const LowerTriangular<float> s32 = cholesky<float>(a32);
    const Eigen::VectorXf sv32 = s32.matrix() * v32;
    const Mat d64 = chol_downdate<double>(s32.cast<double>(), sv32.cast<double>()).matrix();
    const Mat d32 = chol_downdate<float>(s32, sv32).matrix().cast<double>();
    EXPECT_LE((d32 - d64).norm(), 10.0 * eps32 * d64.norm()) << "downdate trial " << trial;
  }
}
