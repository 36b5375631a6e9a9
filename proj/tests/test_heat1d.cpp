#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pinncert/heat1d.hpp"
#include "test_helpers.hpp"

using namespace pinncert;
using namespace pinncert::heat1d;
using std::numbers::pi;

TEST(Assemble, OneNode) {
  const auto d = assemble(1, 1.0);
  EXPECT_EQ(d.A, (DenseMatrix{{-8.0}}));
  EXPECT_EQ(d.D, (DenseMatrix{{4.0, 4.0}}));
}

TEST(Assemble, TwoNodes) {
  const auto d = assemble(2, 1.0);
  EXPECT_EQ(d.A, (DenseMatrix{{-18.0, 9.0}, {9.0, -18.0}}));
  EXPECT_EQ(d.D, (DenseMatrix{{9.0, 0.0}, {0.0, 9.0}}));
}

TEST(Assemble, StructureInvariants) {
  for (std::size_t n : {3u, 10u, 37u}) {
    const double alpha = 0.2;
    const auto d = assemble(n, alpha);
    const double c = alpha * (n + 1.0) * (n + 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double expected = i == j ? -2.0 * c : (i + 1 == j || j + 1 == i) ? c : 0.0;
        EXPECT_DOUBLE_EQ(d.A(i, j), expected);
      }
    int nonzero = 0;
    for (double v : d.D.values()) nonzero += v != 0.0;
    EXPECT_EQ(nonzero, 2);
    EXPECT_DOUBLE_EQ(d.D(0, 0), c);
    EXPECT_DOUBLE_EQ(d.D(n - 1, 1), c);
  }
}

TEST(Assemble, RejectsZeroNodes) {
  try {
    assemble(0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadSize);
  }
}

TEST(Assemble, ThreeNodeSpectrumMatchesClosedForm) {
  const auto d = assemble(3, 0.2);
  const auto e = eig_symmetric(d.A);
  const double delta = 0.25;
  for (int j = 1; j <= 3; ++j) {
    const double s = std::sin(pi * j / 8.0);
    const double lam = -4.0 * 0.2 / (delta * delta) * s * s;
    EXPECT_NEAR(e.eigenvalues[3 - j], lam, 1e-12 * std::abs(lam));
  }
}

TEST(ClosedForm, AgreesWithJacobiUpTo200) {
  for (std::size_t n : {1u, 2u, 5u, 16u, 50u, 101u, 200u}) {
    const auto d = assemble(n, 1.0);
    const auto e = eig_symmetric(d.A);
    auto lam = closed_form_eigenvalues(n, 1.0);
    std::sort(lam.begin(), lam.end());
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(e.eigenvalues[j], lam[j], 1e-10 * std::abs(lam[j])) << n;
    EXPECT_NEAR(omega_n(n, 1.0), e.eigenvalues[n - 1], 1e-10 * std::abs(e.eigenvalues[n - 1]));
  }
}

TEST(OmegaN, KnownValues) {
  EXPECT_NEAR(omega_n(1, 1.0), -8.0, 1e-14);
  EXPECT_NEAR(omega_limit(1.0), -9.8696, 5e-5);
  // Taylor: omega_n = -alpha pi^2 (1 - pi^2 / (12 (n+1)^2) + ...)
  const double alpha = 0.2;
  const double gap = std::abs(omega_n(200, alpha) - omega_limit(alpha));
  EXPECT_LE(gap, alpha * std::pow(pi, 4) / (12.0 * 201.0 * 201.0) * 1.1);
  EXPECT_GE(gap, alpha * std::pow(pi, 4) / (12.0 * 201.0 * 201.0) * 0.9);
}

TEST(OmegaN, MonotoneAndAboveLimit) {
  for (double alpha : {0.2, 1.0}) {
    double prev = omega_n(1, alpha);
    for (std::size_t n = 2; n <= 500; ++n) {
      const double w = omega_n(n, alpha);
      EXPECT_LT(w, prev) << n;
      EXPECT_GE(w, omega_limit(alpha)) << n;
      prev = w;
    }
  }
}

TEST(Project, ConstantIsExact) {
  const auto z = project([](double) { return 1.0; }, 7);
  for (double v : z.values()) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(Project, SineMatchesAnalyticCellAverage) {
  const std::size_t n = 50;
  const auto z = project([](double x) { return std::sin(pi * x); }, n);
  const double h = grid_spacing(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double x = grid_node(n, k);
    const double avg = (std::cos(pi * (x - h / 2)) - std::cos(pi * (x + h / 2))) / (pi * h);
    EXPECT_NEAR(z.at(k), avg, 1e-11);
  }
}

TEST(ProjectEmbed, ProjectionOfEmbeddingIsIdentity) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 4u, 33u}) {
    const GridFunction1D z(testing_helpers::random_vector(n, rng));
    const GridFunction1D back = project(embed(z), n);
    for (std::size_t k = 1; k <= n; ++k) EXPECT_NEAR(back.at(k), z.at(k), 1e-12);
    EXPECT_DOUBLE_EQ(embedded_l2_norm(z), z.norm());
    EXPECT_NEAR(l2_norm(embed(z)), z.norm(), 1e-10);
  }
}

TEST(ProjectEmbed, ProjectionIsContractive) {
  const std::vector<ScalarField> fs = {[](double x) { return std::sin(pi * x); },
                                       [](double x) { return std::exp(3 * x) - x * x; },
                                       [](double x) { return x < 0.3 ? 1.0 : -2.0; }};
  for (const auto& f : fs)
    for (std::size_t n : {1u, 3u, 20u, 64u}) EXPECT_LE(project(f, n).norm(), l2_norm(f) + 1e-12);
}

TEST(Lift, ZeroAndUnitData) {
  const auto zero = lift_D0({0.0, 0.0});
  EXPECT_EQ(zero(0.3), 0.0);
  EXPECT_NEAR(l2_norm(zero), 0.0, 1e-15);
  const auto one = lift_D0({1.0, 0.0});
  EXPECT_DOUBLE_EQ(one(0.25), 0.75);
  EXPECT_NEAR(l2_norm(one), 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(Lift, OperatorNormsMatchUnitSphereSampling) {
  // ||D0 b||^2 = (b1^2 + b1 b2 + b2^2) / 3; sample each unit sphere densely
  auto lifted = [](double b1, double b2) { return std::sqrt((b1 * b1 + b1 * b2 + b2 * b2) / 3.0); };
  double best_e = 0.0, best_m = 0.0, best_1 = 0.0;
  const int samples = 200000;
  for (int i = 0; i < samples; ++i) {
    const double th = 2.0 * pi * i / samples;
    const double c = std::cos(th), s = std::sin(th);
    best_e = std::max(best_e, lifted(c, s));
    const double mx = std::max(std::abs(c), std::abs(s));
    best_m = std::max(best_m, lifted(c / mx, s / mx));
    const double l1 = std::abs(c) + std::abs(s);
    best_1 = std::max(best_1, lifted(c / l1, s / l1));
  }
  EXPECT_NEAR(lift_norms(UNorm::euclidean).normD0, best_e, 1e-9);
  EXPECT_GE(lift_norms(UNorm::euclidean).normD0, best_e);
  EXPECT_NEAR(lift_norms(UNorm::euclidean).normD0, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(lift_norms(UNorm::max).normD0, best_m, 1e-9);
  EXPECT_GE(lift_norms(UNorm::max).normD0, best_m);
  EXPECT_NEAR(lift_norms(UNorm::one).normD0, best_1, 1e-9);
  EXPECT_GE(lift_norms(UNorm::one).normD0, best_1);
  // the quoted 2/3 only bounds the 1-norm variant
  EXPECT_GT(lift_norms(UNorm::euclidean).normD0, kCompatNormD0);
  EXPECT_LT(lift_norms(UNorm::one).normD0, kCompatNormD0);
  for (UNorm k : {UNorm::euclidean, UNorm::max, UNorm::one}) EXPECT_EQ(lift_norms(k).normAD0, 0.0);
}

TEST(Reference, AnalyticSineDecay) {
  const auto p = default_problem();
  const auto u = reference_solution(p, AnalyticSine{{1.0}});
  for (double x : {0.1, 0.5, 0.77}) {
    EXPECT_NEAR(u(0.5, x), std::exp(-0.2 * pi * pi * 0.5) * std::sin(pi * x), 1e-15);
    EXPECT_DOUBLE_EQ(u(0.0, x), std::sin(pi * x));
  }
}

TEST(Reference, AnalyticRejectsNonzeroBoundary) {
  auto p = default_problem();
  p.boundary = [](double t) { return std::pair<double, double>{t, 0.0}; };
  try {
    reference_solution(p, AnalyticSine{{1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ModeMismatch);
  }
}

namespace {
// max over the time grid of the spatial L2 difference
double cn_error(std::size_t n_ref, double dt) {
  const auto p = default_problem();
  const auto cn = reference_solution(p, CrankNicolson{n_ref, dt});
  const auto exact = reference_solution(p, AnalyticSine{{1.0}});
  double worst = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double t = p.t_end * i / 50.0;
    const double e = testing_helpers::gauss_legendre(
        [&](double x) { const double d = cn(t, x) - exact(t, x); return d * d; }, 0.0, 1.0, n_ref + 1);
    worst = std::max(worst, std::sqrt(e));
  }
  return worst;
}
}  // namespace

TEST(Reference, CrankNicolsonAgainstAnalytic) {
  EXPECT_LE(cn_error(400, 1e-3), 5e-5);
}

TEST(Reference, CrankNicolsonSecondOrder) {
  const double e1 = cn_error(39, 0.02);
  const double e2 = cn_error(79, 0.01);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(Reference, CrankNicolsonInitialAndBoundary) {
  auto p = default_problem();
  p.boundary = [](double t) { return std::pair<double, double>{t, 2.0 * t}; };
  const auto cn = reference_solution(p, CrankNicolson{19, 0.01});
  EXPECT_DOUBLE_EQ(cn(0.0, 0.5), std::sin(pi * 0.5));
  EXPECT_NEAR(cn(0.3, 0.0), 0.3, 1e-12);
  EXPECT_NEAR(cn(0.3, 1.0), 0.6, 1e-12);
  try {
    reference_solution(p, CrankNicolson{2, 0.01});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadSize);
  }
}

TEST(TrotterKato, ErrorDecreasesWithRefinement) {
  const auto exact = analytic_sine_solution(0.2, {1.0});
  auto x0 = [](double x) { return std::sin(pi * x); };
  double prev = discrete_semigroup_l2_error(8, 0.2, 0.1, x0, exact);
  for (std::size_t n : {16u, 32u, 64u}) {
    const double e = discrete_semigroup_l2_error(n, 0.2, 0.1, x0, exact);
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(TrotterKato, ProjectedErrorIsSecondOrder) {
  const auto exact = analytic_sine_solution(0.2, {1.0});
  auto x0 = [](double x) { return std::sin(pi * x); };
  for (std::size_t n : {32u, 64u}) {
    const double e1 = discrete_semigroup_projected_error(n, 0.2, 0.1, x0, exact);
    const double e2 = discrete_semigroup_projected_error(2 * n, 0.2, 0.1, x0, exact);
    EXPECT_LE(e2 / e1, 0.3);
  }
}
