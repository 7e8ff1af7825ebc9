#pragma once

// Fourier collocation on a uniform periodic grid, Hill operators
// -d^2/dx^2 + q(x), a cyclic Jacobi eigensolver for dense symmetric matrices,
// and inverse iteration for the real pencil  A U = sigma B U.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "periwave/errors.hpp"

namespace periwave::hill {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// n uniform nodes x_j = j T / n on [0, T).
class PeriodicGrid {
public:
  PeriodicGrid(int n, double period) : n_(n), period_(period) {
    if (n < 16 || n % 2 != 0)
      throw std::invalid_argument("grid size must be even and >= 16, got " + std::to_string(n));
    if (!(period > 0.0) || !std::isfinite(period))
      throw std::invalid_argument("grid period must be positive and finite");
  }

  int n() const noexcept { return n_; }
  double period() const noexcept { return period_; }
  double spacing() const noexcept { return period_ / n_; }
  /// Quadrature weight of the periodic trapezoid rule.
  double weight() const noexcept { return period_ / n_; }
  double node(int j) const noexcept { return j * period_ / n_; }

  Vector nodes() const {
    Vector x(n_);
    for (int j = 0; j < n_; ++j)
      x[j] = node(j);
    return x;
  }

  Vector sample(const std::function<double(double)>& f) const {
    Vector v(n_);
    for (int j = 0; j < n_; ++j)
      v[j] = f(node(j));
    return v;
  }

private:
  int n_;
  double period_;
};

struct DenseOperator {
  Matrix matrix;
  PeriodicGrid grid;
  bool symmetric = false;
};

/// Fourier collocation differentiation matrix of order 1 or 2. The order-1
/// matrix annihilates the Nyquist mode; the order-2 matrix does not, so
/// D2 != D1 * D1.
inline DenseOperator diff_matrix(const PeriodicGrid& grid, int order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("diff_matrix: order must be 1 or 2");
  const int n = grid.n();
  const double h = 2.0 * std::numbers::pi / n;
  const double scale = 2.0 * std::numbers::pi / grid.period();
  Matrix D = Matrix::Zero(n, n);
  for (int d = 1; d < n; ++d) {
    const double sgn = (d % 2 == 0) ? 1.0 : -1.0;
    // Evaluate at the folded offset min(d, n - d): sin and tan of angles
    // near pi lose relative accuracy, which the 1/sin^2 entries amplify.
    const int dd = std::min(d, n - d);
    const double half = 0.5 * dd * h;
    double entry;
    if (order == 1)
      entry = (d == dd ? 0.5 : -0.5) * sgn / std::tan(half) * scale;
    else
      entry = -0.5 * sgn / (std::sin(half) * std::sin(half)) * scale * scale;
    for (int j = 0; j + d < n; ++j) {
      const int i = j + d;
      D(i, j) = entry;
      D(j, i) = order == 1 ? -entry : entry;
    }
  }
  if (order == 2) {
    const double diag = (-std::numbers::pi * std::numbers::pi / (3.0 * h * h) - 1.0 / 6.0) *
                        scale * scale;
    D.diagonal().setConstant(diag);
  }
  return {std::move(D), grid, order == 2};
}

/// H = -D2 + diag(q(x_j)).
inline DenseOperator assemble_hill(const std::function<double(double)>& q,
                                   const PeriodicGrid& grid) {
  DenseOperator op = diff_matrix(grid, 2);
  op.matrix *= -1.0;
  for (int j = 0; j < grid.n(); ++j)
    op.matrix(j, j) += q(grid.node(j));
  op.symmetric = true;
  return op;
}

struct SpectrumResult {
  std::vector<double> eigenvalues;
  std::vector<Vector> eigenvectors;
  std::vector<double> residuals;
};

namespace detail {

// Make the largest-magnitude component positive.
inline void fix_sign(Vector& v) {
  Eigen::Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  if (v[i] < 0.0)
    v = -v;
}

} // namespace detail

/// Full spectrum of a symmetric matrix by cyclic Jacobi rotations.
///
/// A rotation is skipped when |a_pq| <= eps sqrt(|a_pp a_qq|) (or below an
/// absolute floor of eps^2 ||A||_F), which yields small eigenvalues with high
/// relative accuracy on graded matrices. Iteration stops after a sweep with
/// no rotations. Eigenvalues are returned ascending; vectors (columns) are
/// accumulated only if requested.
struct JacobiResult {
  Vector values;
  Matrix vectors;
  int sweeps = 0;
};

inline JacobiResult jacobi_eigen(Matrix a, bool want_vectors = true, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n)
    throw std::invalid_argument("jacobi_eigen: matrix must be square");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double floor = eps * eps * a.norm();

  Matrix v;
  if (want_vectors)
    v = Matrix::Identity(n, n);

  JacobiResult out;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    long rotations = 0;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double app = a(p, p);
        const double aqq = a(q, q);
        if (std::abs(apq) <= std::max(eps * std::sqrt(std::abs(app * aqq)), floor))
          continue;
        ++rotations;
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        double* cp = a.col(p).data();
        double* cq = a.col(q).data();
        for (Eigen::Index r = 0; r < n; ++r) {
          const double xp = cp[r];
          const double xq = cq[r];
          cp[r] = c * xp - s * xq;
          cq[r] = s * xp + c * xq;
        }
        // Restore symmetry: row p/q mirror column p/q.
        for (Eigen::Index r = 0; r < n; ++r) {
          a(p, r) = cp[r];
          a(q, r) = cq[r];
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        if (want_vectors) {
          double* vp = v.col(p).data();
          double* vq = v.col(q).data();
          for (Eigen::Index r = 0; r < n; ++r) {
            const double xp = vp[r];
            const double xq = vq[r];
            vp[r] = c * xp - s * xq;
            vq[r] = s * xp + c * xq;
          }
        }
      }
    }
    out.sweeps = sweep;
    if (rotations == 0) {
      std::vector<Eigen::Index> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
      out.values.resize(n);
      if (want_vectors)
        out.vectors.resize(n, n);
      for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        if (want_vectors) {
          Vector col = v.col(order[k]);
          detail::fix_sign(col);
          out.vectors.col(k) = col;
        }
      }
      return out;
    }
  }
  throw NotConverged("Jacobi eigensolver did not converge in " + std::to_string(max_sweeps) +
                     " sweeps");
}

/// Lowest m eigenpairs of a symmetric matrix, with residuals
/// ||A v - lambda v|| / ||v||.
inline SpectrumResult eigs_symmetric(const Matrix& A, int m) {
  const auto n = static_cast<int>(A.rows());
  m = std::clamp(m, 0, n);
  const auto jr = jacobi_eigen(A, true);
  SpectrumResult out;
  for (int k = 0; k < m; ++k) {
    Vector vk = jr.vectors.col(k);
    out.eigenvalues.push_back(jr.values[k]);
    out.residuals.push_back((A * vk - jr.values[k] * vk).norm() / vk.norm());
    out.eigenvectors.push_back(std::move(vk));
  }
  return out;
}

inline SpectrumResult eigs_symmetric(const DenseOperator& A, int m) {
  return eigs_symmetric(A.matrix, m);
}

/// Eigenvalues only, ascending.
inline Vector eigenvalues_symmetric(const Matrix& A) { return jacobi_eigen(A, false).values; }

struct PencilOptions {
  int max_iterations = 500;
  double tolerance = 1e-9;
  unsigned seed = 12345;
};

/// One eigenpair of  A U = sigma B U  near `shift` by inverse iteration on
/// (A - shift B) with the least-squares Rayleigh quotient
/// sigma = <BU, AU> / <BU, BU>. Iterates until sigma stagnates; throws
/// NotConverged if the residual never reaches the tolerance.
inline SpectrumResult eigs_pencil(const Matrix& A, const Matrix& B, double shift,
                                  const PencilOptions& opt = {}) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n)
    throw std::invalid_argument("eigs_pencil: dimension mismatch");
  // An exactly singular A - shift B means the shift is itself an eigenvalue;
  // nudge it so the factorization stays usable.
  Eigen::PartialPivLU<Matrix> lu(A - shift * B);
  if (!(lu.rcond() > 0.0))
    lu.compute(A - (shift + 1e-10 * std::max(1.0, std::abs(shift))) * B);

  // Deterministic pseudo-random start (LCG) so results are reproducible.
  Vector u(n);
  unsigned state = opt.seed;
  for (Eigen::Index i = 0; i < n; ++i) {
    state = state * 1664525u + 1013904223u;
    u[i] = static_cast<double>(state) / 4294967296.0 - 0.5;
  }
  u.normalize();

  double sigma = shift;
  double best_res = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Vector rhs = B * u;
    if (rhs.norm() == 0.0)
      rhs = u;
    u = lu.solve(rhs);
    const double nrm = u.norm();
    if (!std::isfinite(nrm) || nrm == 0.0)
      break;
    u /= nrm;
    const Vector Bu = B * u;
    const Vector Au = A * u;
    const double bb = Bu.squaredNorm();
    const double next = bb > 0.0 ? Bu.dot(Au) / bb : shift;
    const double res = (Au - next * Bu).norm();
    const bool moved = std::abs(next - sigma) > 1e-15 * std::max(1.0, std::abs(next));
    sigma = next;
    if (res < best_res * 0.999) {
      best_res = res;
      stagnant = 0;
    } else {
      ++stagnant;
    }
    if (res <= opt.tolerance && (!moved || stagnant >= 3)) {
      detail::fix_sign(u);
      SpectrumResult out;
      out.eigenvalues.push_back(sigma);
      out.residuals.push_back(res);
      out.eigenvectors.push_back(u);
      return out;
    }
  }
  throw NotConverged("inverse iteration did not converge near shift " + std::to_string(shift));
}

/// Pairs (i, i+1) with |lambda_{i+1} - lambda_i| <= gap.
inline std::vector<bool> multiplicity_flags(const std::vector<double>& sorted, double gap = 1e-8) {
  std::vector<bool> dbl(sorted.size(), false);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (std::abs(sorted[i + 1] - sorted[i]) <= gap)
      dbl[i] = dbl[i + 1] = true;
  return dbl;
}

/// Real orthonormal Fourier basis on the grid, columns
/// [c_1, s_1, c_2, s_2, ..., c_{n/2-1}, s_{n/2-1}] with
/// c_m = sqrt(2/n) cos(2 pi m j / n). The constant and Nyquist modes are
/// omitted.
inline Matrix fourier_basis(int n) {
  Matrix Q(n, n - 2);
  const double s = std::sqrt(2.0 / n);
  for (int m = 1; m < n / 2; ++m) {
    for (int j = 0; j < n; ++j) {
      // Reduce m*j mod n so the angle stays in [0, 2 pi).
      const double ang = 2.0 * std::numbers::pi * ((m * j) % n) / n;
      Q(j, 2 * (m - 1)) = s * std::cos(ang);
      Q(j, 2 * (m - 1) + 1) = s * std::sin(ang);
    }
  }
  return Q;
}

/// Full orthonormal real Fourier basis: constant, [c_m, s_m] for
/// 1 <= m < n/2, Nyquist. Diagonalizes diff_matrix(grid, 2) exactly.
inline Matrix fourier_matrix(int n) {
  Matrix F(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  F.col(0).setConstant(s);
  F.block(0, 1, n, n - 2) = fourier_basis(n);
  for (int j = 0; j < n; ++j)
    F(j, n - 1) = (j % 2 == 0 ? 1.0 : -1.0) * s;
  return F;
}

/// Eigenvalues of -D2 matching the columns of fourier_matrix.
inline Vector fourier_symbol2(const PeriodicGrid& grid) {
  const int n = grid.n();
  const double w = 2.0 * std::numbers::pi / grid.period();
  Vector d(n);
  d[0] = 0.0;
  for (int m = 1; m < n / 2; ++m)
    d[2 * m - 1] = d[2 * m] = (m * w) * (m * w);
  d[n - 1] = (0.5 * n * w) * (0.5 * n * w);
  return d;
}

/// Lowest m eigenpairs of the Hill operator -D2 + diag(q), assembled in the
/// Fourier basis as diag(w^2) + F^T diag(q) F. This is the same matrix as
/// assemble_hill up to an orthogonal similarity, but avoids forming the
/// O(n^2/T^2) collocation entries, so small eigenvalues keep full relative
/// accuracy. Jacobi also needs few rotations because the matrix is nearly
/// diagonal for analytic potentials. Eigenvectors are returned on the grid
/// with residuals measured in the Fourier basis.
inline SpectrumResult hill_spectrum(const std::function<double(double)>& q,
                                    const PeriodicGrid& grid, int m, bool want_vectors = true) {
  const int n = grid.n();
  const Matrix F = fourier_matrix(n);
  const Vector qv = grid.sample(q);
  Matrix Hf = F.transpose() * qv.asDiagonal() * F;
  Hf = (0.5 * (Hf + Hf.transpose())).eval();
  Hf.diagonal() += fourier_symbol2(grid);
  const auto jr = jacobi_eigen(Hf, want_vectors);
  m = std::clamp(m, 0, n);
  SpectrumResult out;
  for (int k = 0; k < m; ++k) {
    out.eigenvalues.push_back(jr.values[k]);
    if (want_vectors) {
      const Vector c = jr.vectors.col(k);
      out.residuals.push_back((Hf * c - jr.values[k] * c).norm());
      Vector vk = F * c;
      detail::fix_sign(vk);
      out.eigenvectors.push_back(std::move(vk));
    }
  }
  return out;
}

} // namespace periwave::hill
