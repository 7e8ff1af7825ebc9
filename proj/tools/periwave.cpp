#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "periwave/cli.hpp"

namespace {

using namespace periwave;

void add_common(CLI::App* sub, cli::RunConfig& c, std::string& family, bool with_family) {
  if (with_family)
    sub->add_option("--family", family, "wave family")
        ->check(CLI::IsMember({"kdv", "mkdv", "dmkdv", "nls2", "nls3"}));
  sub->add_option("--kappa", c.kappa, "single elliptic modulus");
  sub->add_option("--kappa-min", c.kappa_min, "sweep start")->capture_default_str();
  sub->add_option("--kappa-max", c.kappa_max, "sweep end")->capture_default_str();
  sub->add_option("--steps", c.steps, "number of sweep points")->capture_default_str();
  sub->add_option("--alpha", c.alpha, "scaling parameter")->capture_default_str();
  sub->add_option("--speed", c.speed, "wave speed c of the kdv family")->capture_default_str();
  sub->add_option("--grid-n", c.grid_n, "collocation points per period")->capture_default_str();
  sub->add_option("--tol", c.tolerance, "selftest oracle tolerance")->capture_default_str();
  sub->add_option("--out", c.output_path, "output CSV path (default: stdout)");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transverse instability of periodic waves: spectra, criteria and pencils"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  std::string family;
  int which = 0;

  auto* figure = app.add_subcommand("figure", "h(kappa) curves as CSV");
  figure->add_option("which", which, "1: KdV, 2: mKdV, 3: defocusing mKdV")
      ->required()
      ->check(CLI::Range(1, 3));
  add_common(figure, cfg, family, false);

  auto* spectrum = app.add_subcommand("spectrum", "closed-form vs numerical eigenvalues");
  add_common(spectrum, cfg, family, true);
  spectrum->add_option("--operator", cfg.operator_name, "single, minus or plus");

  auto* transverse = app.add_subcommand("transverse", "transverse instability analysis");
  add_common(transverse, cfg, family, true);

  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  add_common(selftest, cfg, family, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsage;
  }
  if (!family.empty())
    cfg.family = waves::parse_family(family);

  try {
    return cli::with_output(cfg, std::cout, std::cerr, [&](std::ostream& out) {
      if (figure->parsed())
        return cli::cmd_figure(which, cfg, out, std::cerr);
      if (spectrum->parsed())
        return cli::cmd_spectrum(cfg, out, std::cerr);
      if (transverse->parsed())
        return cli::cmd_transverse(cfg, out, std::cerr);
      return cli::cmd_selftest(cfg, out, std::cerr);
    });
  } catch (const cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const NotConverged& e) {
    std::cerr << "solver did not converge: " << e.what() << '\n';
    return cli::kNotConverged;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return cli::kUsage;
  }
}
