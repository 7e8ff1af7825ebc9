#pragma once

// Command implementations behind tools/periwave. Each command writes CSV to
// `out`, diagnostics to `err`, and returns a process exit code.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "periwave/criterion.hpp"
#include "periwave/elliptic.hpp"
#include "periwave/errors.hpp"
#include "periwave/hill.hpp"
#include "periwave/lame.hpp"
#include "periwave/transverse.hpp"
#include "periwave/waves.hpp"

namespace periwave::cli {

using lame::OperatorKind;
using waves::WaveFamily;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kNotConverged = 3,
  kSelftestFailed = 4,
};

struct RunConfig {
  std::optional<WaveFamily> family;
  std::optional<double> kappa;
  double kappa_min = 0.05;
  double kappa_max = 0.95;
  int steps = 19;
  double alpha = 1.0;
  double speed = 1.0;
  int grid_n = 256;
  double tolerance = 1e-8;
  std::string output_path; // empty: standard output
  std::string operator_name; // spectrum only; empty: family default
};

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// %.17g, with nan/inf spelled as such.
inline std::string fmt(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void validate(const RunConfig& c) {
  if (c.grid_n < 16 || c.grid_n % 2 != 0)
    throw UsageError("--grid-n must be even and >= 16");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha))
    throw UsageError("--alpha must be positive");
  if (!std::isfinite(c.speed))
    throw UsageError("--speed must be finite");
  if (!(c.tolerance > 0.0))
    throw UsageError("--tol must be positive");
}

/// The kappa values of a run: the single --kappa if given, otherwise
/// `steps` equispaced values from kappa_min to kappa_max inclusive.
inline std::vector<double> kappa_sweep(const RunConfig& c) {
  auto in_range = [](double k) { return k > 0.0 && k < 1.0; };
  if (c.kappa) {
    if (!in_range(*c.kappa))
      throw UsageError("--kappa must lie in (0, 1)");
    return {*c.kappa};
  }
  if (c.steps < 1)
    throw UsageError("--steps must be >= 1");
  if (!in_range(c.kappa_min) || !in_range(c.kappa_max))
    throw UsageError("kappa range must lie in (0, 1)");
  if (c.steps == 1) {
    if (c.kappa_max < c.kappa_min)
      throw UsageError("--kappa-min must not exceed --kappa-max");
    return {c.kappa_min};
  }
  if (!(c.kappa_min < c.kappa_max))
    throw UsageError("--kappa-min must be below --kappa-max");
  std::vector<double> ks(c.steps);
  for (int i = 0; i < c.steps; ++i)
    ks[i] = (c.kappa_min * (c.steps - 1 - i) + c.kappa_max * i) / (c.steps - 1);
  ks.back() = c.kappa_max;
  return ks;
}

inline WaveFamily require_family(const RunConfig& c) {
  if (!c.family)
    throw UsageError("--family is required");
  return *c.family;
}

inline waves::WaveProfile make_profile(const RunConfig& c, WaveFamily f, double kappa) {
  return waves::build(f, elliptic::EllipticModulus(kappa), c.alpha, c.speed);
}

// ---------------------------------------------------------------- figure

inline int cmd_figure(int which, const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (which < 1 || which > 3) {
    err << "figure: expected 1, 2 or 3\n";
    return kUsage;
  }
  validate(c);
  const auto ks = kappa_sweep(c);
  out << "kappa,h,lambda0,lambda2,int_psi0,int_psi2,norm_psi0,norm_psi2,unstable\n";
  for (double k : ks) {
    criterion::CriterionReport r;
    double h;
    if (which == 3) {
      const auto p = make_profile(c, WaveFamily::SnoidalDefocusingMKdV, k);
      r = criterion::evaluate(p, OperatorKind::Single);
      h = criterion::norm_free_difference(p.kappa);
    } else {
      const auto f = which == 1 ? WaveFamily::CnoidalKdV : WaveFamily::DnoidalMKdV;
      r = criterion::evaluate(make_profile(c, f, k), OperatorKind::Single);
      h = r.h_value;
    }
    out << fmt(k) << ',' << fmt(h) << ',' << fmt(r.lambda0) << ',' << fmt(r.lambda2) << ','
        << fmt(r.int_psi0) << ',' << fmt(r.int_psi2) << ',' << fmt(std::sqrt(r.norm2_psi0))
        << ',' << fmt(std::sqrt(r.norm2_psi2)) << ',' << (r.unstable ? "true" : "false")
        << '\n';
  }
  return kOk;
}

// -------------------------------------------------------------- spectrum

inline std::optional<OperatorKind> parse_operator(const std::string& s) {
  if (s == "single")
    return OperatorKind::Single;
  if (s == "minus")
    return OperatorKind::Minus;
  if (s == "plus")
    return OperatorKind::Plus;
  return std::nullopt;
}

inline std::string valid_operator_list(WaveFamily f) {
  std::string s;
  for (auto w : lame::valid_operators(f)) {
    if (!s.empty())
      s += ", ";
    s += lame::operator_name(w);
  }
  return s;
}

inline int cmd_spectrum(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const WaveFamily f = require_family(c);
  const auto valid = lame::valid_operators(f);
  OperatorKind which = valid.front();
  if (!c.operator_name.empty()) {
    const auto w = parse_operator(c.operator_name);
    bool ok = false;
    for (auto v : valid)
      ok = ok || (w && *w == v);
    if (!ok) {
      err << "spectrum: operator '" << c.operator_name << "' is not defined for family "
          << waves::short_name(f) << "; valid operators: " << valid_operator_list(f) << '\n';
      return kUsage;
    }
    which = *w;
  }
  const double kappa = c.kappa ? *c.kappa : c.kappa_min;
  if (!(kappa > 0.0 && kappa < 1.0))
    throw UsageError("--kappa must lie in (0, 1)");

  const auto op = lame::make_operator(make_profile(c, f, kappa), which);
  const auto closed = lame::physical_spectrum(op);
  const int total = static_cast<int>(closed.size()) + 5;
  const auto num =
      hill::hill_spectrum(op.potential, hill::PeriodicGrid(c.grid_n, op.period), total + 1, false);
  const auto dbl = hill::multiplicity_flags(num.eigenvalues, 1e-8);

  out << "index,closed_form,numerical,abs_error,multiplicity\n";
  for (int i = 0; i < total && i < static_cast<int>(num.eigenvalues.size()); ++i) {
    const double v = num.eigenvalues[i];
    out << i << ',';
    if (i < static_cast<int>(closed.size()))
      out << fmt(closed[i].eigenvalue) << ',' << fmt(v) << ','
          << fmt(std::abs(v - closed[i].eigenvalue)) << ',';
    else
      out << ',' << fmt(v) << ",,";
    out << (dbl[i] ? "double" : "simple") << '\n';
  }
  return kOk;
}

// ------------------------------------------------------------ transverse

inline int cmd_transverse(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const WaveFamily f = require_family(c);
  const auto ks = kappa_sweep(c);
  out << "kappa,k0,kernel_dim,sigma,k_of_sigma,residual,K2\n";
  int converged_cases = 0, attempted = 0;
  bool any_unstable = false;
  for (double k : ks) {
    const auto p = make_profile(c, f, k);
    auto informational = [&](const std::string& why) {
      err << "kappa=" << fmt(k) << ": criterion not met (" << why << ")\n";
      out << fmt(k) << ",nan,0,nan,nan,nan,nan\n";
    };
    if (f == WaveFamily::SnoidalDefocusingMKdV) {
      const auto r = criterion::defocusing_check({k}).front();
      if (!r.unstable) {
        informational("sufficient condition fails for the snoidal defocusing wave");
        continue;
      }
    }
    const auto P = transverse::build_pencil(p, c.grid_n);
    transverse::K0Result k0;
    try {
      k0 = transverse::find_k0(P);
    } catch (const CriterionNotMet& e) {
      informational(e.what());
      continue;
    }
    ++attempted;
    const auto res = transverse::continue_branch(P, k0, transverse::default_sigma_ladder());
    if (res.kernel_dim != 1)
      err << "kappa=" << fmt(k) << ": warning: kernel dimension " << res.kernel_dim << '\n';
    if (!res.branch.empty())
      ++converged_cases;
    for (const auto& b : res.branch) {
      if (b.sigma > 0.0 && b.residual <= 1e-9)
        any_unstable = true;
      out << fmt(k) << ',' << fmt(res.k0) << ',' << res.kernel_dim << ',' << fmt(b.sigma) << ','
          << fmt(b.k) << ',' << fmt(b.residual) << ',' << fmt(2.0 * std::numbers::pi / b.k)
          << '\n';
    }
    if (!res.failed_sigmas.empty())
      err << "kappa=" << fmt(k) << ": branch truncated at sigma=" << fmt(res.failed_sigmas[0])
          << '\n';
  }
  if (attempted > 0 && converged_cases == 0) {
    err << "Newton continuation did not converge at any sigma\n";
    return kNotConverged;
  }
  err << "spectrally unstable: " << (any_unstable ? "yes" : "no") << '\n';
  return kOk;
}

// -------------------------------------------------------------- selftest

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

namespace detail {

inline double eig_rel_error(double num, double closed, double scale) {
  return std::abs(num - closed) / std::max(std::abs(closed), scale);
}

} // namespace detail

/// The invariant suite behind `selftest`. `tolerance` gates the oracle
/// comparisons; elliptic identities and ODE residuals use fixed bounds.
inline std::vector<CheckResult> run_selftest(const RunConfig& c) {
  std::vector<CheckResult> out;
  auto check = [&](const std::string& name, const std::function<std::string()>& body) {
    try {
      out.push_back({name, true, body()});
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  };
  auto require = [](bool ok, const std::string& what) {
    if (!ok)
      throw std::runtime_error(what);
  };
  const std::vector<double> ks = {0.3, 0.6, 0.9};
  const double tol = c.tolerance;
  const int n = c.grid_n;

  check("elliptic identities", [&] {
    double worst = 0.0;
    for (double k : ks) {
      elliptic::EllipticModulus m(k);
      const double K = elliptic::complete_K(m);
      for (double u = -8.0 * K; u <= 8.0 * K; u += 0.173) {
        const auto t = elliptic::jacobi(u, m);
        worst = std::max(worst, std::abs(t.sn * t.sn + t.cn * t.cn - 1.0));
        worst = std::max(worst, std::abs(t.dn * t.dn + m.kappa2() * t.sn * t.sn - 1.0));
      }
      const auto mc = m.complement();
      const double leg = elliptic::complete_E(m) * elliptic::complete_K(mc) +
                         elliptic::complete_E(mc) * K - K * elliptic::complete_K(mc);
      worst = std::max(worst, std::abs(leg - std::numbers::pi / 2.0));
    }
    require(worst <= 1e-11, "identity defect " + fmt(worst));
    return "max defect " + fmt(worst);
  });

  check("ode residuals", [&] {
    double worst = 0.0;
    for (double k : ks)
      for (auto f : waves::kAllFamilies)
        worst = std::max(worst, waves::ode_residual(make_profile(c, f, k)));
    require(worst <= 1e-9, "residual " + fmt(worst));
    return "max residual " + fmt(worst);
  });

  check("closed-form vs numerical spectra", [&] {
    double worst = 0.0;
    for (double k : ks)
      for (auto f : waves::kAllFamilies)
        for (auto w : lame::valid_operators(f)) {
          const auto op = lame::make_operator(make_profile(c, f, k), w);
          const auto cf = lame::physical_spectrum(op);
          const auto num = hill::hill_spectrum(op.potential, hill::PeriodicGrid(n, op.period),
                                               static_cast<int>(cf.size()), false);
          for (std::size_t i = 0; i < cf.size(); ++i)
            worst = std::max(worst, detail::eig_rel_error(num.eigenvalues[i], cf[i].eigenvalue,
                                                          c.alpha * c.alpha));
        }
    require(worst <= tol, "relative error " + fmt(worst));
    return "max relative error " + fmt(worst);
  });

  check("closed-form integrals vs quadrature", [&] {
    double worst = 0.0;
    for (double k : ks) {
      elliptic::EllipticModulus m(k);
      const auto ck = criterion::closed_integrals_kdv(m, c.alpha);
      const auto cm = criterion::closed_integrals_mkdv(m, c.alpha);
      const auto rk = criterion::evaluate(make_profile(c, WaveFamily::CnoidalKdV, k),
                                          OperatorKind::Single, n);
      const auto rm = criterion::evaluate(make_profile(c, WaveFamily::DnoidalMKdV, k),
                                          OperatorKind::Single, n);
      for (auto [a, b] : {std::pair{ck.int_psi0, rk.int_psi0}, {ck.int_psi2, rk.int_psi2},
                          {ck.norm2_psi0, rk.norm2_psi0}, {ck.norm2_psi2, rk.norm2_psi2},
                          {cm.int_psi0, rm.int_psi0}, {cm.int_psi2, rm.int_psi2},
                          {cm.norm2_psi0, rm.norm2_psi0}, {cm.norm2_psi2, rm.norm2_psi2}})
        worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    require(worst <= tol, "relative error " + fmt(worst));
    return "max relative error " + fmt(worst);
  });

  check("sign equivalence", [&] {
    for (double k : ks)
      for (auto f : {WaveFamily::CnoidalKdV, WaveFamily::DnoidalMKdV,
                     WaveFamily::SnoidalDefocusingMKdV}) {
        const auto r = criterion::rayleigh_test(make_profile(c, f, k), OperatorKind::Single, n);
        const bool a = r.lhs_a10 < 0.0, b = r.h_value > 0.0, d = r.rayleigh < 0.0;
        require(a == b && b == d, std::string(waves::short_name(f)) + " at kappa " + fmt(k));
        require(a == (f != WaveFamily::SnoidalDefocusingMKdV),
                std::string("unexpected verdict for ") + std::string(waves::short_name(f)));
      }
    return "lhs<0 <=> h>0 <=> rayleigh<0";
  });

  check("kernel contains phi'", [&] {
    double worst = 0.0;
    for (double k : ks)
      for (auto f : waves::kAllFamilies) {
        const auto p = make_profile(c, f, k);
        const auto w = waves::is_nls(f) ? OperatorKind::Minus : OperatorKind::Single;
        const auto op = lame::make_operator(p, w);
        const hill::PeriodicGrid g(n, op.period);
        const auto H = hill::assemble_hill(op.potential, g);
        const hill::Vector d = g.sample([&](double x) { return waves::derivative(p, x, 1); });
        worst = std::max(worst, (H.matrix * d).norm() / d.norm());
      }
    require(worst <= std::max(tol, 1e-7), "relative residual " + fmt(worst));
    return "max |L phi'|/|phi'| " + fmt(worst);
  });

  check("transverse pipeline", [&] {
    double worst = 0.0;
    for (double k : ks)
      for (auto f : {WaveFamily::CnoidalKdV, WaveFamily::DnoidalMKdV,
                     WaveFamily::CnoidalQuadraticNLS, WaveFamily::DnoidalCubicNLS}) {
        const auto P = transverse::build_pencil(make_profile(c, f, k), n);
        const auto r0 = transverse::find_k0(P);
        const auto res = transverse::continue_branch(P, r0, {1e-4, 2e-4, 5e-4, 1e-3});
        require(res.kernel_dim == 1, "kernel dimension " + std::to_string(res.kernel_dim));
        require(res.branch.size() == 4, "branch did not reach sigma = 1e-3");
        const auto& b = res.branch.back();
        require(b.residual <= 1e-9 && b.k < r0.k0, "bad branch point");
        const auto sp = hill::eigs_pencil(P.L(b.k), P.A, 1.5 * b.sigma);
        worst = std::max(worst, std::abs(sp.eigenvalues[0] - b.sigma) / b.sigma);
      }
    require(worst <= tol, "pencil mismatch " + fmt(worst));
    return "max pencil mismatch " + fmt(worst);
  });

  check("defocusing criterion fails", [&] {
    for (const auto& r : criterion::defocusing_check(ks))
      require(!r.unstable && r.norm_free_difference < 0.0, "kappa " + fmt(r.kappa));
    return "unstable = false everywhere";
  });

  return out;
}

inline int cmd_selftest(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const auto results = run_selftest(c);
  bool ok = true;
  for (const auto& r : results) {
    out << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
    if (!r.pass) {
      ok = false;
      err << "selftest: failing invariant: " << r.name << '\n';
    }
  }
  return ok ? kOk : kSelftestFailed;
}

/// Runs `body` against the configured output: standard output when the
/// path is empty, otherwise a file written only after the command finishes.
inline int with_output(const RunConfig& c, std::ostream& stdout_stream, std::ostream& err,
                       const std::function<int(std::ostream&)>& body) {
  if (c.output_path.empty())
    return body(stdout_stream);
  std::ostringstream buf;
  const int code = body(buf);
  std::ofstream f(c.output_path, std::ios::binary | std::ios::trunc);
  if (!f) {
    err << "cannot open output file '" << c.output_path << "'\n";
    return kIo;
  }
  f << buf.str();
  f.flush();
  if (!f) {
    err << "error writing output file '" << c.output_path << "'\n";
    return kIo;
  }
  return code;
}

} // namespace periwave::cli
