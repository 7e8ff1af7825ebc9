#pragma once

// Closed-form low periodic eigenpairs of the Lame operators
//   -d^2/dy^2 + 12 k^2 sn^2 - 4k^2 - 4   on [0, 2K]
//   -d^2/dy^2 +  6 k^2 sn^2              on [0, 4K]
//   -d^2/dy^2 +  2 k^2 sn^2              on [0, 4K]
// and their rescaling to the linearized operators of each wave family.
// Eigenfunctions are unnormalized.

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "periwave/elliptic.hpp"
#include "periwave/waves.hpp"

namespace periwave::lame {

using elliptic::EllipticModulus;
using waves::WaveFamily;
using waves::WaveProfile;

enum class Multiplicity { Simple, Double };

struct EigenPair {
  double eigenvalue;
  std::function<double(double)> eigenfunction;
  int index;
  Multiplicity multiplicity = Multiplicity::Simple;
  double period; // interval on which the eigenfunction is periodic
};

namespace detail {
// sqrt(1 - k^2 + 4k^4) and sqrt(1 - k^2 + k^4).
inline double r12(double k2) { return std::sqrt(1.0 - k2 + 4.0 * k2 * k2); }
inline double r6(double k2) { return std::sqrt(1.0 - k2 + k2 * k2); }
} // namespace detail

/// mu_0 = k^2 - 2 - 2 r,  mu_2 = k^2 - 2 + 2 r  with r = sqrt(1 - k^2 + 4k^4).
/// mu_2 is evaluated as 15 k^4 / (2r + 2 - k^2) to avoid cancellation.
inline double lame12_mu0(const EllipticModulus& m) {
  const double k2 = m.kappa2();
  return k2 - 2.0 - 2.0 * detail::r12(k2);
}
inline double lame12_mu2(const EllipticModulus& m) {
  const double k2 = m.kappa2();
  return 15.0 * k2 * k2 / (2.0 * detail::r12(k2) + 2.0 - k2);
}

/// nu_0 .. nu_4. nu_0 is evaluated as 6k^2 / (1 + k^2 + r).
inline std::array<double, 5> lame6_nu(const EllipticModulus& m) {
  const double k2 = m.kappa2();
  const double r = detail::r6(k2);
  return {6.0 * k2 / (1.0 + k2 + r), 1.0 + k2, 1.0 + 4.0 * k2, 4.0 + k2,
          2.0 + 2.0 * k2 + 2.0 * r};
}

/// nu_4 - nu_3 = k^2 - 2 + 2r, evaluated as 3k^4 / (2r + 2 - k^2).
inline double lame6_gap43(const EllipticModulus& m) {
  const double k2 = m.kappa2();
  return 3.0 * k2 * k2 / (2.0 * detail::r6(k2) + 2.0 - k2);
}

/// -d^2/dy^2 + 12 k^2 sn^2 - 4k^2 - 4 on [0, 2K]: three lowest eigenpairs.
inline std::vector<EigenPair> lame12_eigs(const EllipticModulus& m) {
  const double k2 = m.kappa2();
  const double r = detail::r12(k2);
  const double T = 2.0 * elliptic::complete_K(m);
  const double b0 = 1.0 + 2.0 * k2 - r;
  const double b2 = 1.0 + 2.0 * k2 + r;
  auto shape = [m](double b) {
    return [m, b](double y) {
      const auto t = elliptic::jacobi(y, m);
      return t.dn * (1.0 - b * t.sn * t.sn);
    };
  };
  return {
      {lame12_mu0(m), shape(b0), 0, Multiplicity::Simple, T},
      {0.0,
       [m](double y) {
         const auto t = elliptic::jacobi(y, m);
         return t.dn * t.sn * t.cn;
       },
       1, Multiplicity::Simple, T},
      {lame12_mu2(m), shape(b2), 2, Multiplicity::Simple, T},
  };
}

/// -d^2/dy^2 + 6 k^2 sn^2 on [0, 4K]: five lowest eigenpairs.
inline std::vector<EigenPair> lame6_eigs(const EllipticModulus& m) {
  const double k2 = m.kappa2();
  const double r = detail::r6(k2);
  const double T = 4.0 * elliptic::complete_K(m);
  const auto nu = lame6_nu(m);
  auto quad = [m](double b) {
    return [m, b](double y) {
      const double s = elliptic::sn(y, m);
      return 1.0 - b * s * s;
    };
  };
  auto prod = [m](int which) {
    return [m, which](double y) {
      const auto t = elliptic::jacobi(y, m);
      switch (which) {
      case 1: return t.cn * t.dn;
      case 2: return t.sn * t.dn;
      default: return t.sn * t.cn;
      }
    };
  };
  return {
      {nu[0], quad(1.0 + k2 - r), 0, Multiplicity::Simple, T},
      {nu[1], prod(1), 1, Multiplicity::Simple, T},
      {nu[2], prod(2), 2, Multiplicity::Simple, T},
      {nu[3], prod(3), 3, Multiplicity::Simple, T},
      {nu[4], quad(1.0 + k2 + r), 4, Multiplicity::Simple, T},
  };
}

/// -d^2/dy^2 + 2 k^2 sn^2 on [0, 4K]: three lowest eigenpairs.
inline std::vector<EigenPair> lame2_eigs(const EllipticModulus& m) {
  const double k2 = m.kappa2();
  const double T = 4.0 * elliptic::complete_K(m);
  return {
      {k2, [m](double y) { return elliptic::dn(y, m); }, 0, Multiplicity::Simple, T},
      {1.0, [m](double y) { return elliptic::cn(y, m); }, 1, Multiplicity::Simple, T},
      {1.0 + k2, [m](double y) { return elliptic::sn(y, m); }, 2, Multiplicity::Simple, T},
  };
}

enum class OperatorKind { Single, Minus, Plus };

inline std::string_view operator_name(OperatorKind w) {
  switch (w) {
  case OperatorKind::Single: return "single";
  case OperatorKind::Minus: return "minus";
  case OperatorKind::Plus: return "plus";
  }
  return "?";
}

/// Operators defined for a family: {Single} for the KdV-type families,
/// {Minus, Plus} for NLS.
inline std::vector<OperatorKind> valid_operators(WaveFamily f) {
  if (waves::is_nls(f))
    return {OperatorKind::Minus, OperatorKind::Plus};
  return {OperatorKind::Single};
}

/// -d^2/dx^2 + q(x) on one period of the profile.
struct PhysicalOperator {
  WaveProfile profile;
  OperatorKind which;
  std::function<double(double)> potential;
  double period;
};

/// Linearized operator potentials:
///   KdV c - phi,  mKdV c - 3 phi^2,  defocusing mKdV c + 3 phi^2,
///   quadratic NLS  omega - 2|phi| (minus), omega - |phi| (plus),
///   cubic NLS      omega - 3 phi^2 (minus), omega - phi^2 (plus).
inline PhysicalOperator make_operator(const WaveProfile& p, OperatorKind which) {
  bool ok = false;
  for (auto w : valid_operators(p.family))
    ok = ok || w == which;
  if (!ok)
    throw std::invalid_argument(std::string("operator '") + std::string(operator_name(which)) +
                                "' is not defined for family " +
                                std::string(waves::short_name(p.family)));
  const double c = p.speed;
  std::function<double(double)> q;
  switch (p.family) {
  case WaveFamily::CnoidalKdV:
    q = [p, c](double x) { return c - waves::value(p, x); };
    break;
  case WaveFamily::DnoidalMKdV:
    q = [p, c](double x) {
      const double f = waves::value(p, x);
      return c - 3.0 * f * f;
    };
    break;
  case WaveFamily::SnoidalDefocusingMKdV:
    q = [p, c](double x) {
      const double f = waves::value(p, x);
      return c + 3.0 * f * f;
    };
    break;
  case WaveFamily::CnoidalQuadraticNLS: {
    const double g = which == OperatorKind::Minus ? 2.0 : 1.0;
    q = [p, c, g](double x) { return c - g * std::abs(waves::value(p, x)); };
    break;
  }
  case WaveFamily::DnoidalCubicNLS: {
    const double g = which == OperatorKind::Minus ? 3.0 : 1.0;
    q = [p, c, g](double x) {
      const double f = waves::value(p, x);
      return c - g * f * f;
    };
    break;
  }
  }
  return {p, which, std::move(q), p.period};
}

/// Closed-form low eigenpairs of a physical operator on its period, in
/// ascending order. Eigenvalues are alpha^2 times a shifted Lame eigenvalue;
/// eigenfunctions are psi(alpha x).
inline std::vector<EigenPair> physical_spectrum(const PhysicalOperator& op) {
  const WaveProfile& p = op.profile;
  const double a = p.alpha;
  const double a2 = a * a;
  const auto& m = p.kappa;

  auto lift = [&](const EigenPair& e, double lambda, int index) {
    auto f = e.eigenfunction;
    return EigenPair{lambda, [f, a](double x) { return f(a * x); }, index,
                     Multiplicity::Simple, op.period};
  };

  std::vector<EigenPair> out;
  const auto nu = lame6_nu(m);
  switch (p.family) {
  case WaveFamily::CnoidalKdV: {
    const auto L = lame12_eigs(m);
    for (int i = 0; i < 3; ++i)
      out.push_back(lift(L[i], a2 * L[i].eigenvalue, i));
    break;
  }
  case WaveFamily::DnoidalMKdV: {
    const auto L = lame6_eigs(m);
    out.push_back(lift(L[0], -a2 * (nu[3] - nu[0]), 0));
    out.push_back(lift(L[3], 0.0, 1));
    out.push_back(lift(L[4], a2 * lame6_gap43(m), 2));
    break;
  }
  case WaveFamily::SnoidalDefocusingMKdV: {
    const auto L = lame6_eigs(m);
    for (int i = 0; i < 5; ++i)
      out.push_back(lift(L[i], a2 * (nu[i] - nu[1]), i));
    break;
  }
  case WaveFamily::CnoidalQuadraticNLS: {
    if (op.which == OperatorKind::Minus) {
      const auto L = lame12_eigs(m);
      for (int i = 0; i < 3; ++i)
        out.push_back(lift(L[i], a2 * L[i].eigenvalue, i));
    } else {
      const auto L = lame6_eigs(m);
      out.push_back(lift(L[0], 0.0, 0));
      out.push_back(lift(L[3], a2 * (nu[3] - nu[0]), 1));
      out.push_back(lift(L[4], a2 * (nu[4] - nu[0]), 2));
    }
    break;
  }
  case WaveFamily::DnoidalCubicNLS: {
    if (op.which == OperatorKind::Minus) {
      const auto L = lame6_eigs(m);
      out.push_back(lift(L[0], -a2 * (nu[3] - nu[0]), 0));
      out.push_back(lift(L[3], 0.0, 1));
      out.push_back(lift(L[4], a2 * lame6_gap43(m), 2));
    } else {
      // cn and sn are antiperiodic on [0, 2K]; only dn survives.
      const auto L = lame2_eigs(m);
      out.push_back(lift(L[0], 0.0, 0));
    }
    break;
  }
  }
  return out;
}

} // namespace periwave::lame
