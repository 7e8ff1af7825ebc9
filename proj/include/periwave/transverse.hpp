#pragma once

// Transverse linearized pencils  sigma A U = L(k) U.
//
//   KP:  L(k) = -D1 M D1 + k^2 on mean-zero grid functions, A = -D1,
//        M = -D2 + q (the linearized operator of the wave).
//   NLS: L(k) = J^{-1} diag(M_-, M_+) J + k^2 = diag(M_+, M_-) + k^2 on
//        (u, v) pairs, A = J = [[0, I], [-I, 0]].
//
// Everything is stored in real Fourier coordinates (orthonormal, so norms
// and inner products match the grid ones up to the constant weight T/n).
// For KP the constant and Nyquist modes are dropped: the constant is not
// mean-zero and the Nyquist mode lies in the kernel of D1, so keeping it
// would add a spurious zero eigenvalue. In these coordinates D1 is the
// block-diagonal matrix S with blocks [[0, w], [-w, 0]], w = 2 pi m / T.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "periwave/errors.hpp"
#include "periwave/hill.hpp"
#include "periwave/lame.hpp"
#include "periwave/waves.hpp"

namespace periwave::transverse {

using hill::Matrix;
using hill::PeriodicGrid;
using hill::Vector;
using waves::WaveFamily;
using waves::WaveProfile;

enum class PencilKind { KP, NLS };

struct TransversePencil {
  PencilKind kind;
  WaveProfile profile;
  PeriodicGrid grid;
  Matrix L0;    // L(0), symmetric
  Matrix A;     // antisymmetric
  Matrix basis; // coordinates -> grid values (KP: n x (n-2); NLS: 2n x 2n)
  // NLS only: the diagonal blocks of L(0) in coordinate order (M_+, M_-).
  Matrix block_plus;
  Matrix block_minus;

  Eigen::Index dim() const { return L0.rows(); }
  Matrix L(double k) const {
    Matrix m = L0;
    m.diagonal().array() += k * k;
    return m;
  }
};

inline PencilKind default_kind(WaveFamily f) {
  return waves::is_nls(f) ? PencilKind::NLS : PencilKind::KP;
}

namespace detail {

inline Matrix potential_block(const std::function<double(double)>& q, const PeriodicGrid& grid,
                              const Matrix& F) {
  const Vector qv = grid.sample(q);
  Matrix G = F.transpose() * qv.asDiagonal() * F;
  return 0.5 * (G + G.transpose());
}

} // namespace detail

/// D1 in the reduced KP coordinates.
inline Matrix kp_derivative(const PeriodicGrid& grid) {
  const int n = grid.n();
  const double w0 = 2.0 * std::numbers::pi / grid.period();
  Matrix S = Matrix::Zero(n - 2, n - 2);
  for (int m = 1; m < n / 2; ++m) {
    const int c = 2 * (m - 1), s = c + 1;
    S(c, s) = m * w0;
    S(s, c) = -m * w0;
  }
  return S;
}

/// The J matrix on (u, v) coordinates of size 2n.
inline Matrix symplectic_J(int n) {
  Matrix J = Matrix::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return J;
}

inline TransversePencil build_pencil(PencilKind kind, const WaveProfile& p,
                                     const PeriodicGrid& grid) {
  if (std::abs(grid.period() - p.period) > 1e-12 * p.period)
    throw std::invalid_argument("grid period does not match the wave period");
  const int n = grid.n();
  TransversePencil P{kind, p, grid, {}, {}, {}, {}, {}};

  if (kind == PencilKind::KP) {
    if (waves::is_nls(p.family))
      throw std::invalid_argument("KP pencil needs a KdV-type wave family");
    const auto op = lame::make_operator(p, lame::OperatorKind::Single);
    const Matrix Q = hill::fourier_basis(n);
    const Matrix S = kp_derivative(grid);
    const Matrix G = detail::potential_block(op.potential, grid, Q);
    // S^T (diag(w^2) + G) S = diag(w^4) + S^T G S.
    Matrix L0 = S.transpose() * G * S;
    L0 = (0.5 * (L0 + L0.transpose())).eval();
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
      const double w = std::abs(S(i ^ 1, i)); // partner entry holds w
      L0(i, i) += w * w * w * w;
    }
    P.L0 = std::move(L0);
    P.A = -S;
    P.basis = Q;
    return P;
  }

  if (!waves::is_nls(p.family))
    throw std::invalid_argument("NLS pencil needs an NLS wave family");
  const auto opm = lame::make_operator(p, lame::OperatorKind::Minus);
  const auto opp = lame::make_operator(p, lame::OperatorKind::Plus);
  const Matrix F = hill::fourier_matrix(n);
  const Vector sym = hill::fourier_symbol2(grid);
  Matrix Mm = detail::potential_block(opm.potential, grid, F);
  Matrix Mp = detail::potential_block(opp.potential, grid, F);
  Mm.diagonal() += sym;
  Mp.diagonal() += sym;
  // J^{-1} diag(M_-, M_+) J = diag(M_+, M_-).
  P.L0 = Matrix::Zero(2 * n, 2 * n);
  P.L0.topLeftCorner(n, n) = Mp;
  P.L0.bottomRightCorner(n, n) = Mm;
  P.A = symplectic_J(n);
  P.basis = Matrix::Zero(2 * n, 2 * n);
  P.basis.topLeftCorner(n, n) = F;
  P.basis.bottomRightCorner(n, n) = F;
  P.block_plus = std::move(Mp);
  P.block_minus = std::move(Mm);
  return P;
}

inline TransversePencil build_pencil(const WaveProfile& p, int n) {
  return build_pencil(default_kind(p.family), p, PeriodicGrid(n, p.period));
}

/// Lowest `count` eigenpairs of L(0) + shift I. NLS pencils are solved
/// block by block and merged.
struct LowSpectrum {
  std::vector<double> values;
  std::vector<Vector> vectors; // pencil coordinates
};

inline LowSpectrum low_spectrum(const TransversePencil& P, int count, double k = 0.0) {
  LowSpectrum out;
  const double k2 = k * k;
  if (P.kind == PencilKind::KP) {
    const auto jr = hill::jacobi_eigen(P.L(k), true);
    for (int i = 0; i < count && i < jr.values.size(); ++i) {
      out.values.push_back(jr.values[i]);
      out.vectors.push_back(jr.vectors.col(i));
    }
    return out;
  }
  const Eigen::Index n = P.block_plus.rows();
  const auto jp = hill::jacobi_eigen(P.block_plus, true);
  const auto jm = hill::jacobi_eigen(P.block_minus, true);
  Eigen::Index ip = 0, im = 0;
  while (static_cast<int>(out.values.size()) < count && (ip < n || im < n)) {
    const bool take_plus = im >= n || (ip < n && jp.values[ip] <= jm.values[im]);
    Vector v = Vector::Zero(2 * n);
    if (take_plus) {
      v.head(n) = jp.vectors.col(ip);
      out.values.push_back(jp.values[ip++] + k2);
    } else {
      v.tail(n) = jm.vectors.col(im);
      out.values.push_back(jm.values[im++] + k2);
    }
    out.vectors.push_back(std::move(v));
  }
  return out;
}

/// The wave in pencil coordinates, from its exact Fourier series: KP uses
/// the mean-free part; NLS uses (phi, 0).
inline Vector wave_coordinates(const TransversePencil& P) {
  const int n = P.grid.n();
  const auto fs = waves::fourier_series(P.profile, n / 2);
  const double sc = std::sqrt(0.5 * n);
  Vector f(n);
  f[0] = fs.a[0] * std::sqrt(static_cast<double>(n));
  for (int m = 1; m < n / 2; ++m) {
    f[2 * m - 1] = fs.a[m] * sc;
    f[2 * m] = fs.b[m] * sc;
  }
  f[n - 1] = fs.a[n / 2] * std::sqrt(static_cast<double>(n));
  if (P.kind == PencilKind::KP)
    return f.segment(1, n - 2);
  Vector g = Vector::Zero(P.dim());
  g.head(n) = f;
  return g;
}

struct K0Result {
  double k0;
  double lambda0;
  double lambda1;
  Vector phi;          // unit eigenvector of lambda0 (pencil coordinates)
  double wave_cosine;  // |cos| between the lambda1-eigenvector and the wave
  std::vector<double> low; // lowest eigenvalues of L(0)
};

/// k0 = sqrt(-lambda0(L(0))). Throws CriterionNotMet if lambda0 >= -1e-10.
inline K0Result find_k0(const TransversePencil& P) {
  const auto ls = low_spectrum(P, 4);
  K0Result r{};
  r.lambda0 = ls.values[0];
  r.lambda1 = ls.values[1];
  r.low = ls.values;
  if (!(r.lambda0 < -1e-10))
    throw CriterionNotMet("lowest eigenvalue of L(0) is not negative (" +
                          std::to_string(r.lambda0) + ")");
  r.k0 = std::sqrt(-r.lambda0);
  r.phi = ls.vectors[0].normalized();

  // The zero mode tied to the wave: for KP it is the (mean-free) wave
  // itself; for NLS it is (phi, 0) in the M_+ block.
  const Vector w = wave_coordinates(P);
  double best = 0.0;
  for (std::size_t i = 1; i < ls.values.size(); ++i)
    if (std::abs(ls.values[i]) <= 1e-6)
      best = std::max(best, std::abs(ls.vectors[i].dot(w)) / (ls.vectors[i].norm() * w.norm()));
  r.wave_cosine = best;
  return r;
}

struct Theorem1Report {
  int kernel_dim;
  double near_zero;   // eigenvalue of L(k0) closest to 0
  double gap;         // distance from the kernel to the next eigenvalue
  double lprime_ratio; // |L'(k0) phi| / |phi|
  Vector kernel_vector;
};

/// Counts eigenvalues of L(k0) within 1e-8 max(1, |lambda0|) of zero and
/// measures the gap; L'(k0) is evaluated by a symmetric difference of L(k),
/// which is exact up to roundoff since L(k) - L(0) = k^2 I.
inline Theorem1Report verify_theorem1(const TransversePencil& P, const K0Result& r) {
  const auto ls = low_spectrum(P, 4, r.k0);
  const double tol = 1e-8 * std::max(1.0, std::abs(r.lambda0));
  Theorem1Report t{};
  int idx = 0;
  for (std::size_t i = 0; i < ls.values.size(); ++i) {
    if (std::abs(ls.values[i]) <= tol)
      ++t.kernel_dim;
    if (std::abs(ls.values[i]) < std::abs(ls.values[idx]))
      idx = static_cast<int>(i);
  }
  t.near_zero = ls.values[idx];
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ls.values.size(); ++i)
    if (static_cast<int>(i) != idx)
      gap = std::min(gap, std::abs(ls.values[i] - t.near_zero));
  t.gap = gap;
  t.kernel_vector = ls.vectors[idx].normalized();
  const double h = 1e-3 * std::max(r.k0, 1e-3);
  const Vector d = (P.L(r.k0 + h) - P.L(r.k0 - h)) * t.kernel_vector / (2.0 * h);
  t.lprime_ratio = d.norm();
  return t;
}

struct BranchPoint {
  double sigma;
  double k;
  Vector U;
  double residual; // |L(k) U - sigma A U| / |U|
  int newton_steps;
};

struct PencilResult {
  double k0;
  int kernel_dim;
  Vector kernel_vector;
  std::vector<BranchPoint> branch;
  std::vector<double> failed_sigmas; // first sigma at which Newton failed, if any
};

inline const std::vector<double>& default_sigma_ladder() {
  static const std::vector<double> s = {1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2};
  return s;
}

struct NewtonOptions {
  int max_steps = 50;
  double tolerance = 1e-9;
};

/// Continuation of the branch sigma -> (k(sigma), U(sigma)) from (0, k0, phi)
/// with U = phi + V, <V, phi> = 0, solving the bordered Newton system
///   [ L(k) - sigma A   2k U ] [dV]   [ -(L(k) U - sigma A U) ]
///   [ phi^T            0    ] [dk] = [ -<phi, V>             ]
/// warm-started along the ascending sigma list. Stops at the first sigma
/// whose Newton solve fails.
inline PencilResult continue_branch(const TransversePencil& P, const K0Result& r,
                                    const std::vector<double>& sigmas,
                                    const NewtonOptions& opt = {}) {
  const auto t1 = verify_theorem1(P, r);
  PencilResult out{r.k0, t1.kernel_dim, t1.kernel_vector, {}, {}};
  const Eigen::Index N = P.dim();
  const Vector& phi = t1.kernel_vector;
  Vector V = Vector::Zero(N);
  double k = r.k0;
  double prev = 0.0;

  for (double sigma : sigmas) {
    if (!(sigma > prev))
      throw std::invalid_argument("sigma list must be positive and ascending");
    prev = sigma;
    bool ok = false;
    int steps = 0;
    double res = std::numeric_limits<double>::infinity();
    Vector Vt = V;
    double kt = k;
    for (; steps <= opt.max_steps; ++steps) {
      const Vector U = phi + Vt;
      const Matrix Lk = P.L(kt);
      const Vector G = Lk * U - sigma * (P.A * U);
      res = G.norm() / U.norm();
      if (!std::isfinite(res))
        break;
      // Converge to roundoff, not just to the acceptance tolerance.
      if (res <= 1e-3 * opt.tolerance || (res <= opt.tolerance && steps >= 3)) {
        ok = true;
        break;
      }
      if (steps == opt.max_steps)
        break;
      Matrix Jm(N + 1, N + 1);
      Jm.topLeftCorner(N, N) = Lk - sigma * P.A;
      Jm.topRightCorner(N, 1) = 2.0 * kt * U;
      Jm.bottomLeftCorner(1, N) = phi.transpose();
      Jm(N, N) = 0.0;
      Vector rhs(N + 1);
      rhs.head(N) = -G;
      rhs[N] = -phi.dot(Vt);
      const Vector d = Eigen::PartialPivLU<Matrix>(Jm).solve(rhs);
      Vt += d.head(N);
      kt += d[N];
    }
    if (!ok) {
      out.failed_sigmas.push_back(sigma);
      break;
    }
    V = Vt;
    k = kt;
    out.branch.push_back({sigma, k, phi + V, res, steps});
  }
  return out;
}

/// Grid values of a pencil-coordinate vector.
inline Vector to_grid(const TransversePencil& P, const Vector& coords) {
  return P.basis * coords;
}

} // namespace periwave::transverse
