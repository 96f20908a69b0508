#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcqmc/bounds.hpp"
#include "mcqmc/chain.hpp"
#include "mcqmc/discrepancy.hpp"
#include "mcqmc/types.hpp"

namespace mcqmc {

enum class CandidateKind { UniformRandom, Halton, ScrambledHalton };

std::string to_string(CandidateKind kind);
// Accepts "uniform-random", "halton", "scrambled-halton".
CandidateKind parse_candidate_kind(const std::string& text);

struct Objective {
  enum class Kind { StarExact, StarBracket, PullbackMc };
  Kind kind = Kind::StarExact;
  double delta = 0.0;      // cover resolution (bracket and pull-back)
  std::size_t m = 0;       // Monte Carlo replications (pull-back)

  static Objective star_exact() { return {}; }
  static Objective star_bracket(double delta) { return {Kind::StarBracket, delta, 0}; }
  static Objective pullback_mc(std::size_t m, double delta) { return {Kind::PullbackMc, delta, m}; }
  std::string describe() const;
};

struct SearchConfig {
  std::size_t n = 64;   // retained states
  std::size_t n0 = 0;   // burn-in
  std::size_t k = 1;    // candidates
  std::uint64_t seed = 0;
  std::vector<CandidateKind> kinds{CandidateKind::UniformRandom};
  Objective objective;

  void validate() const;
};

// Candidate i uses kinds[i % kinds.size()]. Random kinds draw from the
// substream (seed, i); plain Halton candidates take consecutive segments.
DriverSequence make_candidate(const SearchConfig& config, std::size_t index, std::size_t s);

struct CandidateScore {
  Provenance provenance;
  double lower = 0.0;
  double upper = 1.0;
};

struct SearchResult {
  DriverSequence best_driver;
  DiscrepancyReport best_report;
  std::size_t best_index = 0;
  std::vector<CandidateScore> all_scores;
  bounds::BoundValue theory_bound;
};

// Objective value of one driver for the given system.
DiscrepancyReport score_driver(const ChainSystem& system, const DriverSequence& driver,
                               const SearchConfig& config, const DeltaCover* cover,
                               std::uint64_t mc_label);

// Closed-form comparison value: the corollary bound for n >= 16, otherwise the
// main bound with cover_size_bound at delta = min(1, 8 n^(-3/4)).
bounds::BoundValue search_theory_bound(const ChainSystem& system, std::size_t n);

// Evaluates k candidates in parallel and keeps the smallest upper value
// (ties go to the lower index).
SearchResult best_of_k(const ChainSystem& system, const SearchConfig& config);

// Driver whose path visits `targets` in order: u_0 reaches targets[0] through
// the generator (or is `x1_driver`), u_i = update.inverse(targets[i-1], targets[i]).
// Throws InversionError naming the first step that cannot be inverted.
DriverSequence invert_to_target(const ChainSystem& system, std::span<const Point> targets,
                                const std::optional<std::vector<double>>& x1_driver = std::nullopt);

// Largest coordinate deviation between run_chain(driver) and targets.
double replay_deviation(const ChainSystem& system, const DriverSequence& driver,
                        std::span<const Point> targets);

// d = 1: pi-quantiles at (i + 1/2) / n, increasing.
std::vector<Point> stratified_targets(const TargetMeasure& measure, std::size_t n);

struct RateRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double disc_lower = 0.0;
  double disc_upper = 0.0;
  double theory_bound = 0.0;
  double beck_bound = 0.0;
};

// One best-of-k row per (n, seed). ns must be increasing.
std::vector<RateRow> rate_study(const ChainSystem& system, std::span<const std::size_t> ns,
                                std::span<const std::uint64_t> seeds, const SearchConfig& base);

// One row per n for the inversion pipeline with stratified targets. Both bound
// columns carry the low-discrepancy rate 63 sqrt(d) (2 + log2 n)^((3d+1)/2) / n.
std::vector<RateRow> inversion_rate_study(const ChainSystem& system, std::span<const std::size_t> ns);

// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mcqmc
