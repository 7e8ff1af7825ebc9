#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "periwave/criterion.hpp"

using namespace periwave;
using criterion::CriterionReport;
using elliptic::EllipticModulus;
using lame::OperatorKind;
using waves::WaveFamily;

namespace {

constexpr double kPi = std::numbers::pi;

waves::WaveProfile make(WaveFamily f, double kappa, double alpha = 1.0) {
  return waves::build(f, EllipticModulus(kappa), alpha, 1.0);
}

// Adaptive Simpson (tol 1e-14) of the sampled closed-form eigenfunctions
// over one period at kappa = 0.5, alpha = 1, frozen:
// {int psi0, int psi2, |psi0|^2, |psi2|^2}, then h and the lhs of the
// inequality built from them.
struct Frozen {
  double int0, int2, norm0, norm2, h, lhs;
};
constexpr Frozen kKdvHalf = {2.3561944901923448, -0.78539816339744872, 1.781985762740701,
                             2.4091466303441411, 0.1005459376325567, -0.22729569214687528};
constexpr Frozen kMkdvHalf = {2.7627174575524087, -0.38547894776540298, 2.3150450526570454,
                              1.9934244799750926, 0.22513345582709832, -0.36959395404372497};

std::vector<double> figure_grid() {
  std::vector<double> ks;
  for (int i = 1; i <= 97; ++i)
    ks.push_back(i / 100.0);
  ks.push_back(0.985);
  ks.push_back(0.99);
  return ks;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Quadrature, TrivialIntegrands) {
  const hill::PeriodicGrid g(64, 2.5);
  EXPECT_NEAR(criterion::periodic_quadrature(hill::Vector::Ones(64), 2.5), 2.5, 1e-15);
  const auto s = g.sample([](double x) { return std::sin(2.0 * kPi * x / 2.5); });
  EXPECT_NEAR(criterion::periodic_quadrature(s, 2.5), 0.0, 1e-14);
}

TEST(Quadrature, EllipticBuildingBlocks) {
  for (double k : {0.5, 0.7, 1e-3}) {
    const EllipticModulus m(k);
    const double K = elliptic::complete_K(m), E = elliptic::complete_E(m);
    const double k2 = m.kappa2();
    // Integrate over [0, 4K] (a full period of every block) and divide by 4.
    const hill::PeriodicGrid g(256, 4.0 * K);
    auto quad = [&](auto f) { return criterion::periodic_quadrature(g.sample(f), 4.0 * K) / 4.0; };
    auto jac = [m](double y) { return elliptic::jacobi(y, m); };
    EXPECT_NEAR(quad([&](double y) { return jac(y).dn; }), kPi / 2.0, 1e-13);
    EXPECT_NEAR(quad([&](double y) { return std::pow(jac(y).dn, 3); }),
                kPi * (2.0 - k2) / 4.0, 1e-13);
    EXPECT_NEAR(quad([&](double y) { return std::pow(jac(y).dn, 2); }), E, 1e-13);
    if (k > 0.1) {
      EXPECT_NEAR(quad([&](double y) { return std::pow(jac(y).sn, 2); }), (K - E) / k2, 1e-13);
    }
    // sn^4 reduction; at small kappa the closed form cancels badly, so the
    // comparison is relative to the magnitude of its terms.
    const double sn4 = ((2.0 + k2) * K - 2.0 * (1.0 + k2) * E) / (3.0 * k2 * k2);
    const double scale = k > 0.1 ? 1e-12 : 1e-13 * (2.0 + k2) * K / (3.0 * k2 * k2);
    EXPECT_NEAR(quad([&](double y) { return std::pow(jac(y).sn, 4); }), sn4, scale);
  }
}

TEST(ClosedIntegrals, KdvAtHalfMatchesFrozenOracle) {
  const auto c = criterion::closed_integrals_kdv(EllipticModulus(0.5));
  EXPECT_NEAR(c.int_psi0, kKdvHalf.int0, 1e-12);
  EXPECT_NEAR(c.int_psi2, kKdvHalf.int2, 1e-12);
  EXPECT_NEAR(c.norm2_psi0, kKdvHalf.norm0, 1e-12);
  EXPECT_NEAR(c.norm2_psi2, kKdvHalf.norm2, 1e-12);
}

TEST(ClosedIntegrals, MkdvAtHalfMatchesFrozenOracle) {
  const auto c = criterion::closed_integrals_mkdv(EllipticModulus(0.5));
  EXPECT_NEAR(c.int_psi0, kMkdvHalf.int0, 1e-12);
  EXPECT_NEAR(c.int_psi2, kMkdvHalf.int2, 1e-12);
  EXPECT_NEAR(c.norm2_psi0, kMkdvHalf.norm0, 1e-12);
  EXPECT_NEAR(c.norm2_psi2, kMkdvHalf.norm2, 1e-12);
}

TEST(ClosedIntegrals, AgreeWithQuadratureAcrossKappa) {
  for (int i = 1; i <= 9; ++i) {
    const double k = i / 10.0;
    for (double a : {1.0, 1.7}) {
      const EllipticModulus m(k);
      const auto ck = criterion::closed_integrals_kdv(m, a);
      const auto rk = criterion::evaluate(make(WaveFamily::CnoidalKdV, k, a), OperatorKind::Single);
      const auto cm = criterion::closed_integrals_mkdv(m, a);
      const auto rm =
          criterion::evaluate(make(WaveFamily::DnoidalMKdV, k, a), OperatorKind::Single);
      const auto cd = criterion::closed_integrals_dmkdv(m, a);
      const auto rd = criterion::evaluate(make(WaveFamily::SnoidalDefocusingMKdV, k, a),
                                          OperatorKind::Single);
      for (auto [c, r] : {std::pair{ck, rk}, {cm, rm}}) {
        EXPECT_LE(rel(r.int_psi0, c.int_psi0), 1e-8) << "k=" << k;
        EXPECT_LE(rel(r.int_psi2, c.int_psi2), 1e-8) << "k=" << k;
        EXPECT_LE(rel(r.norm2_psi0, c.norm2_psi0), 1e-8) << "k=" << k;
        EXPECT_LE(rel(r.norm2_psi2, c.norm2_psi2), 1e-8) << "k=" << k;
      }
      // The snoidal pair (psi_0, psi_4) uses the same Lame functions on [0, 4K].
      EXPECT_LE(rel(rd.int_psi0, cd.int_psi0), 1e-8) << "k=" << k;
      EXPECT_LE(rel(rd.int_psi2, cd.int_psi2), 1e-8) << "k=" << k;
      EXPECT_LE(rel(rd.norm2_psi0, cd.norm2_psi0), 1e-8) << "k=" << k;
      EXPECT_LE(rel(rd.norm2_psi2, cd.norm2_psi2), 1e-8) << "k=" << k;
    }
  }
}

TEST(Evaluate, FrozenCurveValuesAtHalf) {
  const auto rk = criterion::h_curve(WaveFamily::CnoidalKdV, {0.5}).front();
  EXPECT_NEAR(rk.h_value, kKdvHalf.h, 1e-12);
  EXPECT_NEAR(rk.lhs_a10, kKdvHalf.lhs, 1e-12);
  const auto rm = criterion::h_curve(WaveFamily::DnoidalMKdV, {0.5}).front();
  EXPECT_NEAR(rm.h_value, kMkdvHalf.h, 1e-12);
  EXPECT_NEAR(rm.lhs_a10, kMkdvHalf.lhs, 1e-12);
}

TEST(Evaluate, HCurvesPositiveOnFigureGrid) {
  const auto ks = figure_grid();
  ASSERT_EQ(ks.size(), 99u);
  for (auto f : {WaveFamily::CnoidalKdV, WaveFamily::DnoidalMKdV})
    for (const auto& r : criterion::h_curve(f, ks)) {
      EXPECT_GT(r.h_value, 0.0) << waves::short_name(f) << " k=" << r.kappa;
      EXPECT_TRUE(r.unstable);
      EXPECT_LT(r.lambda0, 0.0);
      EXPECT_GT(r.lambda2, 0.0);
    }
  EXPECT_THROW(criterion::h_curve(WaveFamily::CnoidalQuadraticNLS, {0.5}), std::invalid_argument);
}

TEST(Evaluate, HAndLhsHaveOppositeSigns) {
  for (double k : {0.05, 0.5, 0.95})
    for (auto f : {WaveFamily::CnoidalKdV, WaveFamily::DnoidalMKdV,
                   WaveFamily::SnoidalDefocusingMKdV}) {
      const auto r = criterion::evaluate(make(f, k), OperatorKind::Single);
      EXPECT_EQ(r.h_value > 0.0, r.lhs_a10 < 0.0) << waves::short_name(f) << " k=" << k;
      EXPECT_EQ(r.unstable, r.lhs_a10 < 0.0);
      // Recompute h from the report fields.
      const double h = std::abs(r.int_psi2) / std::sqrt(r.lambda2 * r.norm2_psi2) -
                       std::abs(r.int_psi0) / std::sqrt(-r.lambda0 * r.norm2_psi0);
      EXPECT_NEAR(h, r.h_value, 1e-14 * std::max(1.0, std::abs(h)));
    }
}

TEST(Evaluate, VerdictInvariantUnderAlpha) {
  for (double k : {0.2, 0.6, 0.9})
    for (auto f : {WaveFamily::CnoidalKdV, WaveFamily::DnoidalMKdV,
                   WaveFamily::SnoidalDefocusingMKdV}) {
      const bool ref = criterion::evaluate(make(f, k, 1.0), OperatorKind::Single).lhs_a10 < 0.0;
      for (double a : {0.5, 2.0}) {
        const auto r = criterion::evaluate(make(f, k, a), OperatorKind::Single);
        EXPECT_EQ(r.lhs_a10 < 0.0, ref) << waves::short_name(f) << " k=" << k << " a=" << a;
      }
    }
}

TEST(Evaluate, NlsPlusIsInapplicable) {
  for (auto f : {WaveFamily::CnoidalQuadraticNLS, WaveFamily::DnoidalCubicNLS})
    EXPECT_THROW(criterion::evaluate(make(f, 0.5), OperatorKind::Plus),
                 CriterionInapplicable);
}

TEST(Evaluate, NlsMinusBehavesLikeTheKdvTypeOperators) {
  const auto r = criterion::evaluate(make(WaveFamily::DnoidalCubicNLS, 0.5), OperatorKind::Minus);
  EXPECT_LT(r.lambda0, 0.0);
  EXPECT_TRUE(r.unstable);
}

TEST(Rayleigh, SignsForTheThreeScalarFamilies) {
  EXPECT_LT(criterion::rayleigh_test(make(WaveFamily::CnoidalKdV, 0.5), OperatorKind::Single)
                .rayleigh,
            0.0);
  EXPECT_LT(criterion::rayleigh_test(make(WaveFamily::DnoidalMKdV, 0.3), OperatorKind::Single)
                .rayleigh,
            0.0);
  EXPECT_GE(criterion::rayleigh_test(make(WaveFamily::SnoidalDefocusingMKdV, 0.5),
                                     OperatorKind::Single)
                .rayleigh,
            0.0);
}

TEST(Rayleigh, MeanZeroTestVector) {
  for (double k : {0.1, 0.4, 0.7, 0.95})
    for (auto f : {WaveFamily::CnoidalKdV, WaveFamily::DnoidalMKdV,
                   WaveFamily::SnoidalDefocusingMKdV}) {
      const auto d = criterion::rayleigh_detail(make(f, k), OperatorKind::Single);
      EXPECT_LE(std::abs(d.mean), 1e-10 * d.l1_norm) << waves::short_name(f) << " k=" << k;
    }
}

TEST(Rayleigh, QuotientMatchesEigenExpansion) {
  // <L u, u> = t0^2 lambda0 |psi0|^2 + lambda2 |psi2|^2 since the
  // eigenfunctions are orthogonal.
  for (double k : {0.3, 0.8}) {
    const auto r = criterion::rayleigh_test(make(WaveFamily::CnoidalKdV, k), OperatorKind::Single);
    const double t0 = r.int_psi2 / r.int_psi0;
    const double want = t0 * t0 * r.lambda0 * r.norm2_psi0 + r.lambda2 * r.norm2_psi2;
    EXPECT_NEAR(r.rayleigh, want, 1e-9 * std::abs(want) + 1e-12);
  }
}

TEST(Rayleigh, SignEquivalenceAcrossConfigurations) {
  for (double k : {0.02, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97})
    for (auto f : {WaveFamily::CnoidalKdV, WaveFamily::DnoidalMKdV,
                   WaveFamily::SnoidalDefocusingMKdV})
      for (double a : {0.6, 1.0}) {
        const auto r = criterion::rayleigh_test(make(f, k, a), OperatorKind::Single);
        ASSERT_LT(r.lambda0, 0.0);
        ASSERT_GT(r.lambda2, 0.0);
        const bool lhs_neg = r.lhs_a10 < 0.0;
        EXPECT_EQ(lhs_neg, r.h_value > 0.0) << waves::short_name(f) << " k=" << k;
        EXPECT_EQ(lhs_neg, r.rayleigh < 0.0) << waves::short_name(f) << " k=" << k;
      }
}

TEST(Defocusing, CriterionNeverHolds) {
  const auto ks = figure_grid();
  for (const auto& r : criterion::defocusing_check(ks)) {
    EXPECT_FALSE(r.unstable) << "k=" << r.kappa;
    EXPECT_LT(r.norm_free_difference, 0.0) << "k=" << r.kappa;
    EXPECT_GT(r.lhs_a10, 0.0) << "k=" << r.kappa;
  }
}

TEST(Defocusing, NormFreeFormAgreesWithQuadrature) {
  // The closed norm-free difference is |int psi4|/sqrt(lambda4) -
  // |int psi0|/sqrt|lambda0| times kappa^2/4; rebuild it from the quadrature
  // integrals and the closed-form eigenvalues.
  for (double k : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto r = criterion::defocusing_check({k}).front();
    const double direct = std::abs(r.int_psi2) / std::sqrt(r.lambda2) -
                          std::abs(r.int_psi0) / std::sqrt(-r.lambda0);
    EXPECT_NEAR(r.norm_free_difference, 0.25 * k * k * direct,
                1e-10 * std::abs(r.norm_free_difference))
        << "k=" << k;
    EXPECT_EQ(r.norm_free_difference > 0.0, r.unstable) << "k=" << k;
  }
}
