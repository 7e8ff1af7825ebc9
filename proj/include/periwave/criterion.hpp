#pragma once

// Sufficient condition for transverse instability built from the two
// eigenfunctions psi_0 (negative eigenvalue) and psi_2 (positive eigenvalue,
// nonzero mean) of the linearized operator:
//
//   lhs = |psi_0|^2 lambda_0 / (int psi_0)^2 + |psi_2|^2 lambda_2 / (int psi_2)^2 < 0,
//
// equivalently h > 0 with
//
//   h = |int psi_2| / (sqrt(lambda_2) |psi_2|) - |int psi_0| / (sqrt|lambda_0| |psi_0|).
//
// Integrals are over one period of the profile.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "periwave/elliptic.hpp"
#include "periwave/errors.hpp"
#include "periwave/hill.hpp"
#include "periwave/lame.hpp"
#include "periwave/waves.hpp"

namespace periwave::criterion {

using elliptic::EllipticModulus;
using lame::OperatorKind;
using waves::WaveFamily;
using waves::WaveProfile;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CriterionReport {
  WaveFamily family;
  double kappa = kNaN;
  double alpha = kNaN;
  double lambda0 = kNaN;
  double lambda2 = kNaN;
  double int_psi0 = kNaN;
  double int_psi2 = kNaN;
  double norm2_psi0 = kNaN;
  double norm2_psi2 = kNaN;
  double lhs_a10 = kNaN;
  double h_value = kNaN;
  double rayleigh = kNaN;
  // Defocusing family only: the norm-free comparison
  // |int psi_4| / sqrt(lambda_4) - |int psi_0| / sqrt|lambda_0|.
  double norm_free_difference = kNaN;
  bool unstable = false;
};

/// Periodic trapezoid rule: (T/n) sum_j v_j.
inline double periodic_quadrature(const hill::Vector& values, double period) {
  return values.sum() * period / static_cast<double>(values.size());
}

struct ClosedIntegrals {
  double int_psi0;
  double int_psi2;
  double norm2_psi0;
  double norm2_psi2;
};

/// Cnoidal KdV, T = 2K/alpha, psi_j(alpha x) with
/// psi_0 = dn [1 - b0 sn^2], psi_2 = dn [1 - b2 sn^2],
/// b0,2 = 1 + 2k^2 -+ r, r = sqrt(1 - k^2 + 4k^4).
///
/// The mean integrals follow from int_0^K dn = pi/2 and
/// int_0^K dn sn^2 = pi/4, giving pi (2 - b)/(2 alpha).
inline ClosedIntegrals closed_integrals_kdv(const EllipticModulus& m, double alpha = 1.0) {
  const double k2 = m.kappa2();
  const double k4 = k2 * k2;
  const double r = std::sqrt(1.0 - k2 + 4.0 * k4);
  const double K = elliptic::complete_K(m);
  const double E = elliptic::complete_E(m);
  const double pi = std::numbers::pi;
  const double b0 = 1.0 + 2.0 * k2 - r;
  const double b2 = 1.0 + 2.0 * k2 + r;
  const double j4 = (-2.0 - 3.0 * k2 + 8.0 * k4) * E + 2.0 * (1.0 + k2 - 2.0 * k4) * K;

  ClosedIntegrals out{};
  out.int_psi0 = pi / alpha * (1.0 - 2.0 * k2 + r) / 2.0;
  out.int_psi2 = pi / alpha * (1.0 - 2.0 * k2 - r) / 2.0;
  out.norm2_psi0 = 2.0 / alpha *
                   (E + 2.0 * (-b0) * ((-1.0 + 2.0 * k2) * E - (-1.0 + k2) * K) / (3.0 * k2) +
                    b0 * b0 * j4 / (15.0 * k4));
  out.norm2_psi2 = 2.0 / alpha *
                   (E + 2.0 * b2 * ((1.0 - 2.0 * k2) * E + (-1.0 + k2) * K) / (3.0 * k2) +
                    b2 * b2 * j4 / (15.0 * k4));
  return out;
}

/// Dnoidal mKdV, T = 2K/alpha, psi_0 = 1 - a0 sn^2, psi_2 = 1 - a4 sn^2
/// (the nu_0 and nu_4 Lame eigenfunctions), a0,4 = 1 + k^2 -+ s,
/// s = sqrt(1 - k^2 + k^4).
inline ClosedIntegrals closed_integrals_mkdv(const EllipticModulus& m, double alpha = 1.0) {
  const double k2 = m.kappa2();
  const double k4 = k2 * k2;
  const double s = std::sqrt(1.0 - k2 + k4);
  const double K = elliptic::complete_K(m);
  const double E = elliptic::complete_E(m);
  const double a0 = 1.0 + k2 - s;
  const double a4 = 1.0 + k2 + s;
  const double sn4 = ((2.0 + k2) * K - 2.0 * (1.0 + k2) * E) / (3.0 * k4);

  ClosedIntegrals out{};
  out.int_psi0 = 2.0 / (alpha * k2) * ((s - 1.0) * K + a0 * E);
  out.int_psi2 = 2.0 / (alpha * k2) * (a4 * E - (1.0 + s) * K);
  out.norm2_psi0 = 2.0 / alpha * (K - 2.0 * a0 * (K - E) / k2 + a0 * a0 * sn4);
  out.norm2_psi2 = 2.0 / alpha * (K - 2.0 * a4 * (K - E) / k2 + a4 * a4 * sn4);
  return out;
}

/// Snoidal defocusing mKdV on T = 4K/alpha with psi_0 and psi_4: twice the
/// dnoidal values, since the eigenfunctions are 2K-periodic.
inline ClosedIntegrals closed_integrals_dmkdv(const EllipticModulus& m, double alpha = 1.0) {
  auto c = closed_integrals_mkdv(m, alpha);
  return {2.0 * c.int_psi0, 2.0 * c.int_psi2, 2.0 * c.norm2_psi0, 2.0 * c.norm2_psi2};
}

/// Indices into lame::physical_spectrum of the negative eigenpair and of the
/// positive eigenpair used by the test vector.
inline std::pair<int, int> test_pair(WaveFamily f) {
  return f == WaveFamily::SnoidalDefocusingMKdV ? std::pair{0, 4} : std::pair{0, 2};
}

namespace detail {

inline void finish(CriterionReport& r) {
  r.lhs_a10 = r.norm2_psi0 * r.lambda0 / (r.int_psi0 * r.int_psi0) +
              r.norm2_psi2 * r.lambda2 / (r.int_psi2 * r.int_psi2);
  r.h_value = std::abs(r.int_psi2) / (std::sqrt(r.lambda2) * std::sqrt(r.norm2_psi2)) -
              std::abs(r.int_psi0) / (std::sqrt(std::abs(r.lambda0)) * std::sqrt(r.norm2_psi0));
  r.unstable = r.lhs_a10 < 0.0;
}

inline const lame::EigenPair& check_shape(const std::vector<lame::EigenPair>& spec, int i0,
                                          int i2) {
  if (static_cast<int>(spec.size()) <= i2 || !(spec[i0].eigenvalue < 0.0) ||
      !(spec[i2].eigenvalue > 0.0))
    throw CriterionInapplicable(
        "criterion needs a low spectrum with lambda0 < 0 < lambda2");
  return spec[i2];
}

} // namespace detail

/// Criterion report for one operator of a profile. Eigenvalues come from
/// the closed forms; integrals and norms are periodic quadratures of the
/// sampled closed-form eigenfunctions on n points (spectrally accurate).
inline CriterionReport evaluate(const WaveProfile& p, OperatorKind which, int n = 512) {
  const auto op = lame::make_operator(p, which);
  const auto spec = lame::physical_spectrum(op);
  const auto [i0, i2] = test_pair(p.family);
  detail::check_shape(spec, i0, i2);
  hill::PeriodicGrid grid(n, op.period);
  const hill::Vector v0 = grid.sample(spec[i0].eigenfunction);
  const hill::Vector v2 = grid.sample(spec[i2].eigenfunction);

  CriterionReport r{p.family};
  r.kappa = p.kappa.kappa();
  r.alpha = p.alpha;
  r.lambda0 = spec[i0].eigenvalue;
  r.lambda2 = spec[i2].eigenvalue;
  r.int_psi0 = periodic_quadrature(v0, op.period);
  r.int_psi2 = periodic_quadrature(v2, op.period);
  r.norm2_psi0 = periodic_quadrature(v0.cwiseProduct(v0), op.period);
  r.norm2_psi2 = periodic_quadrature(v2.cwiseProduct(v2), op.period);
  detail::finish(r);
  return r;
}

inline WaveProfile canonical_profile(WaveFamily f, double kappa) {
  return waves::build(f, EllipticModulus(kappa), 1.0, 1.0);
}

/// h(kappa) for the cnoidal KdV or dnoidal mKdV family at alpha = 1
/// (and c = 1 for KdV).
inline std::vector<CriterionReport> h_curve(WaveFamily f, const std::vector<double>& kappas) {
  if (f != WaveFamily::CnoidalKdV && f != WaveFamily::DnoidalMKdV)
    throw std::invalid_argument("h_curve is defined for the kdv and mkdv families");
  std::vector<CriterionReport> out;
  out.reserve(kappas.size());
  for (double k : kappas)
    out.push_back(evaluate(canonical_profile(f, k), OperatorKind::Single));
  return out;
}

/// Norm-free comparison for the snoidal family, in closed form:
///   |(s+1+k^2)E - (1+s)K| / sqrt(1+k^2+2s) - |(s-1)K + (1+k^2-s)E| / sqrt|1+k^2-2s|.
/// A positive value would indicate instability.
inline double norm_free_difference(const EllipticModulus& m) {
  const double k2 = m.kappa2();
  const double s = std::sqrt(1.0 - k2 + k2 * k2);
  const double K = elliptic::complete_K(m);
  const double E = elliptic::complete_E(m);
  const double lhs = std::abs((s - 1.0) * K + (1.0 + k2 - s) * E) /
                     std::sqrt(std::abs(1.0 + k2 - 2.0 * s));
  const double rhs =
      std::abs((s + 1.0 + k2) * E - (1.0 + s) * K) / std::sqrt(1.0 + k2 + 2.0 * s);
  return rhs - lhs;
}

/// Criterion for the snoidal defocusing family over a kappa grid.
inline std::vector<CriterionReport> defocusing_check(const std::vector<double>& kappas) {
  std::vector<CriterionReport> out;
  out.reserve(kappas.size());
  for (double k : kappas) {
    auto r = evaluate(canonical_profile(WaveFamily::SnoidalDefocusingMKdV, k),
                      OperatorKind::Single);
    r.norm_free_difference = norm_free_difference(EllipticModulus(k));
    out.push_back(r);
  }
  return out;
}

struct RayleighDetail {
  CriterionReport report;
  hill::Vector test_vector; // u' on the grid
  double mean;              // int u'
  double l1_norm;           // int |u'|
};

/// Builds u' = t0 psi_0 - t2 psi_2 on an n-point grid with t2 = 1 and
/// t0 = int psi_2 / int psi_0, so that int u' = 0, and evaluates <L u', u'>
/// with the collocation Hill matrix.
inline RayleighDetail rayleigh_detail(const WaveProfile& p, OperatorKind which, int n = 256) {
  const auto op = lame::make_operator(p, which);
  const auto spec = lame::physical_spectrum(op);
  const auto [i0, i2] = test_pair(p.family);
  detail::check_shape(spec, i0, i2);

  CriterionReport r = evaluate(p, which);
  hill::PeriodicGrid grid(n, op.period);
  const hill::Vector v0 = grid.sample(spec[i0].eigenfunction);
  const hill::Vector v2 = grid.sample(spec[i2].eigenfunction);
  const double t0 = periodic_quadrature(v2, op.period) / periodic_quadrature(v0, op.period);
  const hill::Vector u = t0 * v0 - v2;
  const auto H = hill::assemble_hill(op.potential, grid);
  r.rayleigh = u.dot(H.matrix * u) * grid.weight();
  return {r, u, periodic_quadrature(u, op.period),
          periodic_quadrature(u.cwiseAbs(), op.period)};
}

inline CriterionReport rayleigh_test(const WaveProfile& p, OperatorKind which, int n = 256) {
  return rayleigh_detail(p, which, n).report;
}

} // namespace periwave::criterion
