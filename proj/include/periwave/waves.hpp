#pragma once

// The five explicit periodic wave families, parameterized by the elliptic
// modulus kappa and the scaling alpha > 0. The translation offset is fixed
// at zero.
//
//   CnoidalKdV             phi = phi0 + (phi1 - phi0) cn^2(alpha x)
//   DnoidalMKdV            phi = sign * phi1 dn(alpha x)
//   SnoidalDefocusingMKdV  phi = eta2 sn(alpha x)          (period 4K/alpha)
//   CnoidalQuadraticNLS    |phi| = phi1 + (phi0 - phi1) cn^2(alpha x)
//   DnoidalCubicNLS        phi = sign * phi0 dn(alpha x)
//
// `phi0` and `phi1` keep the per-family meaning of the formulas above; for
// the snoidal family phi0 = eta2 (the amplitude) and phi1 = eta1.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "periwave/elliptic.hpp"

namespace periwave::waves {

using elliptic::EllipticModulus;

enum class WaveFamily {
  CnoidalKdV,
  DnoidalMKdV,
  SnoidalDefocusingMKdV,
  CnoidalQuadraticNLS,
  DnoidalCubicNLS,
};

inline constexpr std::array<WaveFamily, 5> kAllFamilies = {
    WaveFamily::CnoidalKdV, WaveFamily::DnoidalMKdV, WaveFamily::SnoidalDefocusingMKdV,
    WaveFamily::CnoidalQuadraticNLS, WaveFamily::DnoidalCubicNLS};

/// Short names used on the command line.
inline std::string_view short_name(WaveFamily f) {
  switch (f) {
  case WaveFamily::CnoidalKdV: return "kdv";
  case WaveFamily::DnoidalMKdV: return "mkdv";
  case WaveFamily::SnoidalDefocusingMKdV: return "dmkdv";
  case WaveFamily::CnoidalQuadraticNLS: return "nls2";
  case WaveFamily::DnoidalCubicNLS: return "nls3";
  }
  return "?";
}

inline std::optional<WaveFamily> parse_family(std::string_view s) {
  for (auto f : kAllFamilies)
    if (short_name(f) == s)
      return f;
  return std::nullopt;
}

inline bool is_nls(WaveFamily f) {
  return f == WaveFamily::CnoidalQuadraticNLS || f == WaveFamily::DnoidalCubicNLS;
}

struct WaveProfile {
  WaveFamily family;
  EllipticModulus kappa;
  double alpha;
  double speed; // c for KdV-type, omega for NLS-type
  double phi0;
  double phi1;
  double period;
  int sign; // +-1, only meaningful for DnoidalMKdV and DnoidalCubicNLS
  double K; // K(kappa), cached
};

/// Construct a profile. `speed_hint` is the free wave speed c of the
/// CnoidalKdV family and is ignored for the others. `sign` selects the
/// branch of the dnoidal families.
inline WaveProfile build(WaveFamily family, const EllipticModulus& m, double alpha,
                         std::optional<double> speed_hint = std::nullopt, int sign = -1) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be positive and finite");
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("sign must be +1 or -1");
  const double k2 = m.kappa2();
  const double a2 = alpha * alpha;
  const double K = elliptic::complete_K(m);
  WaveProfile p{family, m, alpha, 0.0, 0.0, 0.0, 2.0 * K / alpha, sign, K};

  switch (family) {
  case WaveFamily::CnoidalKdV: {
    if (!speed_hint || !std::isfinite(*speed_hint))
      throw std::invalid_argument("CnoidalKdV requires a finite wave speed c");
    p.speed = *speed_hint;
    p.phi0 = p.speed + 4.0 * a2 * (1.0 - 2.0 * k2);
    p.phi1 = p.phi0 + 12.0 * k2 * a2;
    break;
  }
  case WaveFamily::DnoidalMKdV:
    p.phi1 = std::sqrt(2.0) * alpha;
    p.speed = a2 * (2.0 - k2);
    break;
  case WaveFamily::SnoidalDefocusingMKdV:
    p.phi1 = std::sqrt(2.0) * alpha;
    p.phi0 = m.kappa() * p.phi1;
    p.speed = -a2 * (1.0 + k2);
    p.period = 4.0 * K / alpha;
    break;
  case WaveFamily::CnoidalQuadraticNLS: {
    p.speed = 4.0 * a2 * std::sqrt(1.0 - k2 + k2 * k2);
    p.phi0 = 2.0 * a2 * (1.0 + k2) + 0.5 * p.speed;
    p.phi1 = 2.0 * a2 * (1.0 - 2.0 * k2) + 0.5 * p.speed;
    break;
  }
  case WaveFamily::DnoidalCubicNLS:
    p.phi0 = std::sqrt(2.0) * alpha;
    p.speed = a2 * (2.0 - k2);
    break;
  }

  if (family == WaveFamily::CnoidalKdV && !(p.phi1 > p.phi0))
    throw std::invalid_argument("CnoidalKdV requires phi1 > phi0");
  if (family == WaveFamily::CnoidalQuadraticNLS && !(p.phi0 > p.phi1 && p.phi1 > 0.0))
    throw std::invalid_argument("CnoidalQuadraticNLS requires phi0 > phi1 > 0");
  return p;
}

/// phi(x).
inline double value(const WaveProfile& p, double x) {
  const auto t = elliptic::jacobi(p.alpha * x, p.kappa);
  switch (p.family) {
  case WaveFamily::CnoidalKdV: return p.phi0 + (p.phi1 - p.phi0) * t.cn * t.cn;
  case WaveFamily::DnoidalMKdV: return p.sign * p.phi1 * t.dn;
  case WaveFamily::SnoidalDefocusingMKdV: return p.phi0 * t.sn;
  case WaveFamily::CnoidalQuadraticNLS: return p.phi1 + (p.phi0 - p.phi1) * t.cn * t.cn;
  case WaveFamily::DnoidalCubicNLS: return p.sign * p.phi0 * t.dn;
  }
  return 0.0;
}

/// Analytic phi'(x) (order 1) or phi''(x) (order 2).
inline double derivative(const WaveProfile& p, double x, int order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("derivative: order must be 1 or 2");
  const auto t = elliptic::jacobi(p.alpha * x, p.kappa);
  const double k2 = p.kappa.kappa2();
  const double a = p.alpha;
  const double s = t.sn, c = t.cn, d = t.dn;

  // d/du of the elliptic building blocks.
  //   (cn^2)'  = -2 sn cn dn
  //   (cn^2)'' = -2 (cn^2 dn^2 - sn^2 dn^2 - k^2 sn^2 cn^2)
  //   dn'  = -k^2 sn cn,     dn''  = -k^2 dn (cn^2 - sn^2)
  //   sn'  = cn dn,          sn''  = -sn (dn^2 + k^2 cn^2)
  double amp = 0.0, d1 = 0.0, d2 = 0.0;
  switch (p.family) {
  case WaveFamily::CnoidalKdV:
  case WaveFamily::CnoidalQuadraticNLS:
    amp = p.family == WaveFamily::CnoidalKdV ? p.phi1 - p.phi0 : p.phi0 - p.phi1;
    d1 = -2.0 * s * c * d;
    d2 = -2.0 * (c * c * d * d - s * s * d * d - k2 * s * s * c * c);
    break;
  case WaveFamily::DnoidalMKdV:
  case WaveFamily::DnoidalCubicNLS:
    amp = p.sign * (p.family == WaveFamily::DnoidalMKdV ? p.phi1 : p.phi0);
    d1 = -k2 * s * c;
    d2 = -k2 * d * (c * c - s * s);
    break;
  case WaveFamily::SnoidalDefocusingMKdV:
    amp = p.phi0;
    d1 = c * d;
    d2 = -s * (d * d + k2 * c * c);
    break;
  }
  return order == 1 ? amp * a * d1 : amp * a * a * d2;
}

/// Maximum over 256 equispaced points of one period of the stationary ODE
/// residual, divided by max(1, largest term magnitude). For CnoidalKdV the
/// integration constant a is the mean of -c phi + phi^2/2 + phi''.
inline double ode_residual(const WaveProfile& p) {
  constexpr int n = 256;
  std::array<double, n> r{};
  double scale = 1.0;
  for (int j = 0; j < n; ++j) {
    const double x = j * p.period / n;
    const double f = value(p, x);
    const double f2 = derivative(p, x, 2);
    const double c = p.speed;
    double t1 = 0.0, t2 = 0.0, t3 = 0.0;
    switch (p.family) {
    case WaveFamily::CnoidalKdV:
      t1 = -c * f, t2 = 0.5 * f * f, t3 = f2;
      break;
    case WaveFamily::DnoidalMKdV:
      t1 = f2, t2 = -c * f, t3 = f * f * f;
      break;
    case WaveFamily::SnoidalDefocusingMKdV:
      t1 = f2, t2 = -c * f, t3 = -f * f * f;
      break;
    case WaveFamily::CnoidalQuadraticNLS:
      t1 = c * f, t2 = -f2, t3 = -std::abs(f) * f;
      break;
    case WaveFamily::DnoidalCubicNLS:
      t1 = c * f, t2 = -f2, t3 = -f * f * f;
      break;
    }
    r[j] = t1 + t2 + t3;
    scale = std::max({scale, std::abs(t1), std::abs(t2), std::abs(t3)});
  }
  double shift = 0.0;
  if (p.family == WaveFamily::CnoidalKdV) {
    for (double v : r)
      shift += v;
    shift /= n;
  }
  double worst = 0.0;
  for (double v : r)
    worst = std::max(worst, std::abs(v - shift));
  return worst / scale;
}

/// phi(x) = a[0] + sum_{j>=1} a[j] cos(2 pi j x / T) + b[j] sin(2 pi j x / T).
struct FourierSeries {
  std::vector<double> a;
  std::vector<double> b;
};

/// Exact Fourier coefficients up to `modes` from the nome expansions of dn,
/// dn^2 and sn. Free of the sampling noise that differentiation amplifies.
inline FourierSeries fourier_series(const WaveProfile& p, int modes) {
  if (modes < 1)
    throw std::invalid_argument("modes must be positive");
  FourierSeries s{std::vector<double>(modes + 1, 0.0), std::vector<double>(modes + 1, 0.0)};
  const EllipticModulus& m = p.kappa;
  const double q = elliptic::nome(m);
  const double K = p.K;
  const double pi = std::numbers::pi;
  const double k2 = m.kappa2();

  // dn^2 = E/K + (2 pi^2/K^2) sum j q^j / (1 - q^{2j}) cos(j pi u / K)
  auto dn2 = [&](double scale, double offset) {
    s.a[0] = offset + scale * elliptic::complete_E(m) / K;
    for (int j = 1; j <= modes; ++j)
      s.a[j] = scale * 2.0 * pi * pi / (K * K) * j * std::pow(q, j) / (1.0 - std::pow(q, 2 * j));
  };
  // dn = pi/(2K) + (2 pi/K) sum q^j / (1 + q^{2j}) cos(j pi u / K)
  auto dn1 = [&](double scale) {
    s.a[0] = scale * pi / (2.0 * K);
    for (int j = 1; j <= modes; ++j)
      s.a[j] = scale * 2.0 * pi / K * std::pow(q, j) / (1.0 + std::pow(q, 2 * j));
  };

  switch (p.family) {
  case WaveFamily::CnoidalKdV: {
    // cn^2 = (dn^2 - k'^2) / k^2
    const double amp = (p.phi1 - p.phi0) / k2;
    dn2(amp, p.phi0 - amp * (1.0 - k2));
    break;
  }
  case WaveFamily::CnoidalQuadraticNLS: {
    const double amp = (p.phi0 - p.phi1) / k2;
    dn2(amp, p.phi1 - amp * (1.0 - k2));
    break;
  }
  case WaveFamily::DnoidalMKdV: dn1(p.sign * p.phi1); break;
  case WaveFamily::DnoidalCubicNLS: dn1(p.sign * p.phi0); break;
  case WaveFamily::SnoidalDefocusingMKdV:
    // sn = (2 pi/(k K)) sum q^{i+1/2} / (1 - q^{2i+1}) sin((2i+1) pi u / (2K))
    for (int j = 1; j <= modes; j += 2)
      s.b[j] = p.phi0 * 2.0 * pi / (m.kappa() * K) * std::pow(q, 0.5 * j) /
               (1.0 - std::pow(q, j));
    break;
  }
  return s;
}

} // namespace periwave::waves
