#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pinncert/bounds.hpp"
#include "pinncert/heat1d.hpp"
#include "test_helpers.hpp"

using namespace pinncert;
using namespace pinncert::bounds;

namespace {

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::Io;
}

}  // namespace

TEST(GrowthBound, ScalarSymmetric) {
  const auto gb = growth_bound(DenseMatrix{{-8.0}}, Strategy::symmetric);
  EXPECT_EQ(gb.M, 1.0);
  EXPECT_EQ(gb.omega, -8.0);
  EXPECT_EQ(gb.epsilon_shift, 0.0);
}

TEST(GrowthBound, LogNormOfNilpotent) {
  const auto gb = growth_bound(DenseMatrix{{0, 1}, {0, 0}}, Strategy::log_norm);
  EXPECT_EQ(gb.M, 1.0);
  EXPECT_NEAR(gb.omega, 0.5, 1e-15);
}

TEST(GrowthBound, HeatMatrixAgreesWithClosedForm) {
  const auto disc = heat1d::assemble(50, 1.0);
  const auto gb = growth_bound(disc.A, Strategy::symmetric);
  const double w = heat1d::omega_n(50, 1.0);
  EXPECT_NEAR(gb.omega, w, 1e-10 * std::abs(w));
  // same code path as the eigensolver
  EXPECT_EQ(gb.omega, eig_symmetric(disc.A).eigenvalues[49]);
}

TEST(GrowthBound, ErrorPaths) {
  EXPECT_EQ(code_of([] { growth_bound(DenseMatrix{{0, 1}, {0, 0}}, Strategy::symmetric); }), Errc::NotSymmetric);
  EXPECT_EQ(code_of([] { growth_bound(DenseMatrix{{0, 1}, {0, 0}}, Strategy::schur_defective, 0.0); }),
            Errc::BadEpsilon);
  EXPECT_EQ(code_of([] { growth_bound(DenseMatrix(2, 3), Strategy::log_norm); }), Errc::NonSquare);
}

TEST(GrowthBound, SchurOnDiagonalGivesUnitM) {
  const DenseMatrix d{{-1.0, 0.0, 0.0}, {0.0, 0.3, 0.0}, {0.0, 0.0, -2.0}};
  for (double eps : {1e-2, 1e-5, 1e-8}) {
    const auto gb = growth_bound(d, Strategy::schur_defective, eps);
    EXPECT_EQ(gb.rho, 0u);
    EXPECT_NEAR(gb.M, 1.0, 1e-6);
    EXPECT_NEAR(gb.omega, 0.3 + eps, 1e-12);
  }
}

TEST(GrowthBound, SchurOnJordanBlock) {
  const DenseMatrix j{{-1.0, 1.0}, {0.0, -1.0}};
  const auto gb = growth_bound(j, Strategy::schur_defective, 0.1);
  EXPECT_EQ(gb.rho, 1u);
  EXPECT_NEAR(gb.norm_N, 1.0, 1e-12);
  // C = sup (1 + t) e^{-0.1 t} = 10 e^{-0.9} at t = 9
  EXPECT_NEAR(gb.C_eps, 10.0 * std::exp(-0.9), 1e-8);
  EXPECT_GE(gb.C_eps, 10.0 * std::exp(-0.9));
  EXPECT_NEAR(gb.M, 2.0 * gb.C_eps, 1e-12);
  verify_growth_bound(j, gb, log_spaced(1e-3, 10.0, 100));
}

TEST(PolynomialExponentialSup, MatchesStationaryPoint) {
  // (1 + t + t^2) e^{-t/2}: stationary at t^2 - 3t - 1 = 0
  const double ts = 0.5 * (3.0 + std::sqrt(13.0));
  const double exact = (1 + ts + ts * ts) * std::exp(-0.5 * ts);
  const double c = polynomial_exponential_sup(2, 0.5);
  EXPECT_GE(c, exact);
  EXPECT_NEAR(c, exact, 1e-8 * exact);
  // brute force over a dense grid never exceeds the returned value
  for (std::size_t rho : {1u, 3u, 5u})
    for (double eps : {0.05, 0.1, 1.0}) {
      const double cv = polynomial_exponential_sup(rho, eps);
      for (int i = 0; i <= 20000; ++i) {
        const double t = (rho / eps + 5.0) * i / 20000.0;
        double p = 0.0, tk = 1.0;
        for (std::size_t k = 0; k <= rho; ++k, tk *= t) p += tk;
        EXPECT_LE(p * std::exp(-eps * t), cv);
      }
    }
  EXPECT_EQ(polynomial_exponential_sup(0, 0.3), 1.0);
}

TEST(Verify, HeatMatrixOnUniformGrid) {
  const auto disc = heat1d::assemble(20, 1.0);
  const auto gb = growth_bound(disc.A, Strategy::symmetric);
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.01 * i);
  const auto rep = verify_growth_bound(disc.A, gb, grid);
  EXPECT_EQ(rep.checked, 101u);
  EXPECT_LE(rep.worst_ratio, 1.0 + 1e-12);
}

TEST(Verify, ZeroMatrixRatioIsOne) {
  GrowthBound gb;
  const auto rep = verify_growth_bound(DenseMatrix(4, 4), gb, {0.0, 0.5, 3.0});
  EXPECT_EQ(rep.worst_ratio, 1.0);
}

TEST(Verify, DetectsViolation) {
  const auto disc = heat1d::assemble(5, 1.0);
  auto gb = growth_bound(disc.A, Strategy::symmetric);
  gb.omega -= 1.0;
  EXPECT_EQ(code_of([&] { verify_growth_bound(disc.A, gb, {0.0, 0.5}); }), Errc::ViolationFound);
}

TEST(Verify, RandomMatricesAllStrategies) {
  std::mt19937_64 rng(99);
  const auto grid = log_spaced(1e-3, 10.0, 100);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix s = testing_helpers::random_symmetric(6, rng);
    verify_growth_bound(s, growth_bound(s, Strategy::symmetric), grid);
    const DenseMatrix a = testing_helpers::random_matrix(6, 6, rng);
    verify_growth_bound(a, growth_bound(a, Strategy::log_norm), grid);
  }
  for (int trial = 0; trial < 4; ++trial) {
    const DenseMatrix j = testing_helpers::jordan_matrix({3, 2, 1}, rng);
    const auto gb = growth_bound(j, Strategy::schur_defective, 0.1);
    EXPECT_GE(gb.M, 1.0);
    verify_growth_bound(j, gb, grid);
  }
}

TEST(SequenceLimit, HeatOmegaSequence) {
  BoundSequence s;
  for (std::size_t n = 50; n <= 1600; n *= 2) {
    s.indices.push_back(n);
    s.M_values.push_back(1.0);
    s.omega_values.push_back(heat1d::omega_n(n, 1.0));
  }
  const auto lim = sequence_limit(s, 4, 1e-3);
  EXPECT_TRUE(lim.omega_star.converged);
  EXPECT_NEAR(lim.omega_star.value, -9.8696, 1e-3);
  EXPECT_TRUE(lim.M_star.converged);
  EXPECT_EQ(lim.M_star.value, 1.0);
  EXPECT_EQ(lim.M_star.cauchy_defect, 0.0);
}

TEST(SequenceLimit, OscillatingDoesNotConverge) {
  BoundSequence s{{1, 2, 3, 4}, {1, 1, 1, 1}, {1, -1, 1, -1}, 1.0, 1.0};
  const auto lim = sequence_limit(s, 3, 1e-3);
  EXPECT_FALSE(lim.omega_star.converged);
  EXPECT_EQ(lim.omega_star.cauchy_defect, 2.0);
}

TEST(SequenceLimit, ScaleConsistent) {
  BoundSequence s{{1, 2, 4, 8}, {1.5, 1.2, 1.1, 1.05}, {-1, -1.1, -1.15, -1.17}, 1.0, 1.0};
  const auto base = sequence_limit(s, 3, 1e-1);
  for (double c : {0.5, 2.0, 7.0}) {
    BoundSequence t = s;
    for (double& m : t.M_values) m *= c;
    const auto scaled = sequence_limit(t, 3, 1e-1);
    EXPECT_NEAR(scaled.M_star.value, c * base.M_star.value, 1e-14);
  }
  s.mu_p = 2.0;
  s.mu_e = 3.0;
  EXPECT_NEAR(sequence_limit(s, 3, 1e-1).M_star.value, 6.0 * 1.05, 1e-14);
  EXPECT_NEAR(base.omega_star.bound(true), -1.17 + 0.05, 1e-14);
}

TEST(SequenceLimit, Errors) {
  BoundSequence s{{1, 2}, {1, 1}, {0, 0}, 1.0, 1.0};
  EXPECT_EQ(code_of([&] { sequence_limit(s, 3, 1e-3); }), Errc::TooShort);
  EXPECT_EQ(code_of([&] { sequence_limit(s, 1, 1e-3); }), Errc::TooShort);
}

TEST(OperatorNormLimit, IdenticalMatrices) {
  const DenseMatrix m{{1, 2}, {3, 4}, {5, 6}};
  const auto lim = operator_norm_limit({m, m, m}, 1.0, 3, 1e-12);
  EXPECT_EQ(lim.cauchy_defect, 0.0);
  EXPECT_TRUE(lim.converged);
}

TEST(OperatorNormLimit, PerturbedSweepConverges) {
  std::mt19937_64 rng(4);
  const DenseMatrix fixed = testing_helpers::random_matrix(10, 2, rng);
  const DenseMatrix pert = testing_helpers::random_matrix(10, 2, rng);
  std::vector<DenseMatrix> sweep;
  for (int n = 1000; n <= 16000; n *= 2) sweep.push_back(fixed + (1.0 / n) * pert);
  const double tol = 1e-3;
  const auto lim = operator_norm_limit(sweep, 1.0, 4, tol);
  EXPECT_TRUE(lim.converged);
  EXPECT_NEAR(lim.value, spectral_norm(fixed), tol);
  EXPECT_NEAR(lim.value, testing_helpers::svd_max_singular_value(sweep.back()), 1e-9 * lim.value);
}

TEST(OperatorNormLimit, ShapeMismatch) {
  EXPECT_EQ(code_of([] { operator_norm_limit({DenseMatrix(3, 2), DenseMatrix(3, 3)}, 1.0, 2, 1e-3); }),
            Errc::ShapeMismatch);
}
