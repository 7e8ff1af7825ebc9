#pragma once

// Independent reference computations used only by the test suites. Nothing
// here calls into the library's numerical paths.

#include <cmath>
#include <functional>
#include <numbers>

namespace periwave::oracle {

namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol)
    return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

/// Adaptive Simpson quadrature with Richardson correction.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-13, int max_depth = 50) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// K(kappa) from the Legendre integral.
inline double legendre_K(double kappa) {
  const double k2 = kappa * kappa;
  return adaptive_simpson(
      [k2](double t) { return 1.0 / std::sqrt(1.0 - k2 * std::sin(t) * std::sin(t)); }, 0.0,
      std::numbers::pi / 2.0, 1e-14);
}

/// E(kappa) from the Legendre integral.
inline double legendre_E(double kappa) {
  const double k2 = kappa * kappa;
  return adaptive_simpson(
      [k2](double t) { return std::sqrt(1.0 - k2 * std::sin(t) * std::sin(t)); }, 0.0,
      std::numbers::pi / 2.0, 1e-14);
}

struct SnCnDn {
  double sn, cn, dn;
};

/// Classical RK4 on sn' = cn dn, cn' = -sn dn, dn' = -kappa^2 sn cn from
/// (0, 1, 1). The final partial step lands exactly on u.
inline SnCnDn rk4_jacobi(double u, double kappa, double h = 1e-4) {
  const double k2 = kappa * kappa;
  auto rhs = [k2](const SnCnDn& y) {
    return SnCnDn{y.cn * y.dn, -y.sn * y.dn, -k2 * y.sn * y.cn};
  };
  auto axpy = [](const SnCnDn& y, double a, const SnCnDn& d) {
    return SnCnDn{y.sn + a * d.sn, y.cn + a * d.cn, y.dn + a * d.dn};
  };
  SnCnDn y{0.0, 1.0, 1.0};
  const int steps = static_cast<int>(std::ceil(std::abs(u) / h));
  const double dt = steps > 0 ? u / steps : 0.0;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = rhs(y);
    const auto k2v = rhs(axpy(y, 0.5 * dt, k1));
    const auto k3 = rhs(axpy(y, 0.5 * dt, k2v));
    const auto k4 = rhs(axpy(y, dt, k3));
    y.sn += dt / 6.0 * (k1.sn + 2 * k2v.sn + 2 * k3.sn + k4.sn);
    y.cn += dt / 6.0 * (k1.cn + 2 * k2v.cn + 2 * k3.cn + k4.cn);
    y.dn += dt / 6.0 * (k1.dn + 2 * k2v.dn + 2 * k3.dn + k4.dn);
  }
  return y;
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double central_second_difference(const std::function<double(double)>& f, double x,
                                        double h = 1e-4) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// Integral of h(s) / sqrt((s-a)(b-s)) over [a, b]. The substitution
/// s = a + (b-a) sin^2(theta) removes both endpoint singularities:
/// the integral becomes 2 * int_0^{pi/2} h(s(theta)) dtheta.
inline double endpoint_sqrt_integral(const std::function<double(double)>& h, double a,
                                     double b, double tol = 1e-13) {
  return adaptive_simpson(
      [&](double th) {
        const double s = std::sin(th);
        return 2.0 * h(a + (b - a) * s * s);
      },
      0.0, std::numbers::pi / 2.0, tol);
}

} // namespace periwave::oracle
