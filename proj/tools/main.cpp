// mcqmc: command line front end for the experiment runner and bound calculators.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mcqmc/bounds.hpp"
#include "mcqmc/error.hpp"
#include "mcqmc/experiment.hpp"

namespace {

void print_bound(const char* name, const mcqmc::bounds::BoundValue& b) {
  std::printf("%-24s %s%s\n", name, mcqmc::format_number(b.value).c_str(),
              b.vacuous ? "  (vacuous)" : (b.degenerate ? "  (degenerate)" : ""));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov chain quasi-Monte Carlo laboratory"};
  app.require_subcommand(1);

  std::string run_path;
  auto* run = app.add_subcommand("run", "Run an experiment config and write CSV + manifest");
  run->add_option("config", run_path, "Config file")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", validate_path, "Config file")->required();

  double d = 1, n = 16, alpha = 0, lambda0 = 0, norm = 1, delta = 0.01, epsilon = 0.25;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the closed-form bounds");
  bounds_cmd->add_option("--d", d, "Dimension")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--n", n, "Sample size")->check(CLI::Range(1.0, 1e300));
  bounds_cmd->add_option("--alpha", alpha, "Log-Lipschitz constant")->check(CLI::NonNegativeNumber);
  bounds_cmd->add_option("--lambda0", lambda0, "max{Lambda, 0}")->check(CLI::Range(0.0, 1.0));
  bounds_cmd->add_option("--norm", norm, "||d nu / d pi||_2")->check(CLI::Range(1.0, 1e300));
  bounds_cmd->add_option("--delta", delta, "Cover resolution")->check(CLI::Range(1e-12, 1.0));
  bounds_cmd->add_option("--epsilon", epsilon, "Cover-size exponent slack")->check(CLI::Range(1e-6, 0.999999));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) return mcqmc::run_config_file(run_path, std::cerr);
  if (*validate) {
    const int code = mcqmc::validate_config_file(validate_path, std::cerr);
    if (code == 0) std::cout << validate_path << ": ok\n";
    return code;
  }

  try {
    using namespace mcqmc::bounds;
    BoundInputs in;
    in.d = d;
    in.n = n;
    in.r = n;
    in.lambda0 = lambda0;
    in.beta = lambda0;
    in.nu_norm = norm;
    in.nu_norm_centered = std::sqrt(std::max(0.0, norm * norm - 1.0));
    in.alpha = alpha;
    in.delta = delta;
    in.epsilon = epsilon;
    in.cover_size = cover_size_bound(delta, d, epsilon);
    const auto dd = static_cast<std::size_t>(d);

    print_bound("main_discrepancy_bound", main_discrepancy_bound(in));
    if (n >= 16) print_bound("corollary_main_bound", corollary_main_bound(in));
    print_bound("tv_average_bound", tv_average_bound(in));
    print_bound("beck_bound", beck_bound(n, d));
    std::printf("%-24s %s\n", "cover_size_bound", mcqmc::format_number(in.cover_size).c_str());
    const auto gap = ballwalk_gap_bound(alpha, dd);
    std::printf("%-24s %s\n", "ballwalk_gamma_star", mcqmc::format_number(gap.gamma_star).c_str());
    std::printf("%-24s %s\n", "ballwalk_gap", mcqmc::format_number(gap.gap).c_str());
    if (n >= 16) print_bound("ballwalk_error_bound", ballwalk_error_bound(alpha, dd, n));
  } catch (const mcqmc::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
