#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcqmc/chain.hpp"
#include "mcqmc/search.hpp"

namespace mcqmc {

// A config problem, with the offending line (0 when not tied to one) and key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string key, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

// Flat `key = value` document. `#` starts a comment, `[section]` prefixes the
// following keys with `section.` (`[]` ends the section). Recognized keys:
//
//   experiment      discrepancy | pullback | search | rate-study | bounds | invert
//   dimension       d >= 1
//   density.name    uniform | exp-linear          density.alpha  >= 0
//   kernel          metropolis-ballwalk | direct | lazy-direct(a)
//   gamma           positive number or gamma-star
//   initial         target | uniform              (direct kernels only)
//   n               comma-separated list, increasing
//   n0, k, seed, seeds (list), delta, epsilon, mc-replications
//   candidates      list of uniform-random | halton | scrambled-halton
//   objective       star-exact | star-bracket | pullback-mc
//   pipeline        best-of-k | inversion        (rate-study)
//   lambda0, beta, norm, c                        (bounds)
//   output          CSV path; the manifest goes to <output>.manifest.json
struct ExperimentConfig {
  std::string experiment;
  std::size_t dimension = 1;
  std::string density_name = "uniform";
  double density_alpha = 0.0;
  std::string kernel = "direct";
  double lazy_a = 0.5;
  bool gamma_star = true;
  double gamma = 0.0;  // used when gamma_star is false
  std::string initial = "target";
  std::vector<std::size_t> n{64};
  std::size_t n0 = 0;
  std::size_t k = 1;
  std::vector<std::uint64_t> seeds{0};
  double delta = 0.01;
  double epsilon = 0.25;
  std::size_t mc_replications = 100;
  std::vector<CandidateKind> candidates{CandidateKind::UniformRandom};
  std::string objective = "star-exact";
  std::string pipeline = "best-of-k";
  double lambda0 = 0.0;
  std::optional<double> beta;
  double norm = 1.0;
  double c = 0.1;
  std::string output;

  // Key/value pairs as written, in order.
  std::vector<std::pair<std::string, std::string>> entries;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Chain system described by the config (kernel, density, gamma, initial law).
ChainSystem build_system(const ExperimentConfig& config);
// gamma for the Metropolis kernel after resolving gamma-star.
double resolved_gamma(const ExperimentConfig& config);
Objective build_objective(const ExperimentConfig& config);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

// %.17g; infinities and NaN as inf, -inf, nan.
std::string format_number(double v);

struct ExperimentOutput {
  Table table;
  // Extra manifest fields (name, serialized JSON value).
  std::vector<std::pair<std::string, std::string>> manifest_fields;
};

// Pure computation: same config, same table.
ExperimentOutput compute_experiment(const ExperimentConfig& config);

// Parses, validates, runs and writes the CSV and manifest. Returns the exit
// status: 0 success, 2 config error, 3 infeasible objective, 1 other failure.
int run_config_file(const std::string& path, std::ostream& err);
// Parses and checks the config, including building the chain system.
int validate_config_file(const std::string& path, std::ostream& err);

}  // namespace mcqmc
