#pragma once

// Complete elliptic integrals K, E and the Jacobi elliptic functions sn, cn,
// dn for a real modulus kappa in (0, 1).
//
// Convention: everything is parameterized by the modulus kappa (sometimes
// written k), never by the parameter m = kappa^2. K(kappa) is the quarter
// period of sn.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "periwave/errors.hpp"

namespace periwave::elliptic {

/// A validated elliptic modulus 0 < kappa < 1 together with its complement
/// kappa' = sqrt(1 - kappa^2).
class EllipticModulus {
public:
  explicit EllipticModulus(double kappa) : kappa_(kappa) {
    if (!(kappa > 0.0 && kappa < 1.0))
      throw std::invalid_argument("elliptic modulus must lie in (0,1), got " +
                                  std::to_string(kappa));
    // (1-k)(1+k) keeps the complement accurate as kappa -> 1.
    kappa_prime_ = std::sqrt((1.0 - kappa) * (1.0 + kappa));
  }

  double kappa() const noexcept { return kappa_; }
  double kappa_prime() const noexcept { return kappa_prime_; }
  double kappa2() const noexcept { return kappa_ * kappa_; }

  /// The complementary modulus as a modulus in its own right.
  EllipticModulus complement() const { return EllipticModulus(kappa_prime_); }

private:
  double kappa_;
  double kappa_prime_;
};

struct JacobiTriple {
  double sn;
  double cn;
  double dn;
};

namespace detail {

inline constexpr int kMaxLandenDepth = 32;
inline constexpr double kLandenTol = 1e-15;

// Arithmetic-geometric mean ladder a_n, c_n starting from (1, kappa').
struct AgmLadder {
  std::array<double, kMaxLandenDepth + 1> a{};
  std::array<double, kMaxLandenDepth + 1> c{};
  int depth = 0;
};

inline AgmLadder agm_ladder(const EllipticModulus& m) {
  AgmLadder L;
  double a = 1.0;
  double b = m.kappa_prime();
  L.a[0] = a;
  L.c[0] = m.kappa();
  for (int n = 1; n <= kMaxLandenDepth; ++n) {
    const double an = 0.5 * (a + b);
    const double cn = 0.5 * (a - b);
    b = std::sqrt(a * b);
    a = an;
    L.a[n] = a;
    L.c[n] = cn;
    L.depth = n;
    if (std::abs(cn) <= kLandenTol * a)
      return L;
  }
  throw NotConverged("AGM/Landen recursion exceeded depth cap");
}

} // namespace detail

/// Complete elliptic integral of the first kind,
/// K = int_0^{pi/2} dtheta / sqrt(1 - kappa^2 sin^2 theta), via the AGM.
inline double complete_K(const EllipticModulus& m) {
  const auto L = detail::agm_ladder(m);
  return std::numbers::pi / (2.0 * L.a[L.depth]);
}

/// Complete elliptic integral of the second kind via the AGM with the
/// c-sum: E = K (1 - sum_n 2^{n-1} c_n^2), c_0 = kappa.
inline double complete_E(const EllipticModulus& m) {
  const auto L = detail::agm_ladder(m);
  double sum = 0.5 * L.c[0] * L.c[0];
  double w = 0.5;
  for (int n = 1; n <= L.depth; ++n) {
    w *= 2.0;
    sum += w * L.c[n] * L.c[n];
  }
  const double K = std::numbers::pi / (2.0 * L.a[L.depth]);
  return K * (1.0 - sum);
}

/// sn, cn, dn by descending Landen (AGM) transformation. The argument is
/// first reduced modulo the real period 4K, so accuracy does not degrade
/// with |u|.
inline JacobiTriple jacobi(double u, const EllipticModulus& m) {
  if (!std::isfinite(u))
    throw std::invalid_argument("jacobi: argument must be finite");
  const auto L = detail::agm_ladder(m);
  const int N = L.depth;
  const double K = std::numbers::pi / (2.0 * L.a[N]);

  // Reduce to [-2K, 2K).
  const double period = 4.0 * K;
  double r = std::fmod(u + 2.0 * K, period);
  if (r < 0.0)
    r += period;
  r -= 2.0 * K;

  std::array<double, detail::kMaxLandenDepth + 1> phi{};
  phi[N] = std::ldexp(L.a[N] * r, N);
  for (int n = N; n >= 1; --n)
    phi[n - 1] = 0.5 * (phi[n] + std::asin(L.c[n] / L.a[n] * std::sin(phi[n])));

  JacobiTriple t;
  t.sn = std::sin(phi[0]);
  t.cn = std::cos(phi[0]);
  // dn^2 = kappa'^2 + kappa^2 cn^2: both terms non-negative, no cancellation.
  const double kp = m.kappa_prime();
  t.dn = std::sqrt(kp * kp + m.kappa2() * t.cn * t.cn);
  return t;
}

inline double sn(double u, const EllipticModulus& m) { return jacobi(u, m).sn; }
inline double cn(double u, const EllipticModulus& m) { return jacobi(u, m).cn; }
inline double dn(double u, const EllipticModulus& m) { return jacobi(u, m).dn; }

/// Jacobi nome q = exp(-pi K'/K).
inline double nome(const EllipticModulus& m) {
  return std::exp(-std::numbers::pi * complete_K(m.complement()) / complete_K(m));
}

} // namespace periwave::elliptic
