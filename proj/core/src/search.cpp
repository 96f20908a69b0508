#include "mcqmc/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "mcqmc/error.hpp"
#include "mcqmc/lowdisc.hpp"
#include "mcqmc/parallel.hpp"

namespace mcqmc {

namespace {

// Label space for the pull-back replication streams, disjoint from candidate labels.
constexpr std::uint64_t kReplicationLabel = 0x5eed0000'00000000ULL;

// Provenance in terms of the search seed and candidate index.
DriverSequence relabel(const DriverSequence& driver, Provenance provenance) {
  const auto v = driver.values();
  return DriverSequence(driver.step_dimension(), std::vector<double>(v.begin(), v.end()), provenance);
}

}  // namespace

std::string to_string(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::UniformRandom: return "uniform-random";
    case CandidateKind::Halton: return "halton";
    case CandidateKind::ScrambledHalton: return "scrambled-halton";
  }
  return "unknown";
}

CandidateKind parse_candidate_kind(const std::string& text) {
  if (text == "uniform-random") return CandidateKind::UniformRandom;
  if (text == "halton") return CandidateKind::Halton;
  if (text == "scrambled-halton") return CandidateKind::ScrambledHalton;
  throw PreconditionError("unknown candidate kind '" + text + "'");
}

std::string Objective::describe() const {
  char buf[96];
  switch (kind) {
    case Kind::StarExact: return "star-exact";
    case Kind::StarBracket:
      std::snprintf(buf, sizeof buf, "star-bracket(%.17g)", delta);
      return buf;
    case Kind::PullbackMc:
      std::snprintf(buf, sizeof buf, "pullback-mc(%zu,%.17g)", m, delta);
      return buf;
  }
  return "unknown";
}

void SearchConfig::validate() const {
  if (k < 1) throw PreconditionError("search needs k >= 1");
  if (n < 1) throw PreconditionError("search needs n >= 1");
  if (kinds.empty()) throw PreconditionError("search needs at least one candidate kind");
  if (objective.kind != Objective::Kind::StarExact && !(objective.delta > 0.0 && objective.delta <= 1.0))
    throw PreconditionError("objective delta must lie in (0,1]");
  if (objective.kind == Objective::Kind::PullbackMc && objective.m < 1)
    throw PreconditionError("pull-back objective needs m >= 1");
}

DriverSequence make_candidate(const SearchConfig& config, std::size_t index, std::size_t s) {
  const std::size_t rows = config.n0 + config.n;
  switch (config.kinds[index % config.kinds.size()]) {
    case CandidateKind::UniformRandom: {
      Rng rng = Rng::substream(config.seed, index);
      const auto drawn = uniform_driver(rows, s, rng);
      return relabel(drawn, {DriverKind::UniformRandom, config.seed, index});
    }
    case CandidateKind::Halton:
      return halton_sequence(rows, s, index * rows);
    case CandidateKind::ScrambledHalton: {
      const auto drawn = scrambled_halton_sequence(rows, s, Rng::substream(config.seed, index).next_u64());
      return relabel(drawn, {DriverKind::ScrambledHalton, config.seed, index});
    }
  }
  throw PreconditionError("unknown candidate kind");
}

DiscrepancyReport score_driver(const ChainSystem& system, const DriverSequence& driver,
                               const SearchConfig& config, const DeltaCover* cover,
                               std::uint64_t mc_label) {
  switch (config.objective.kind) {
    case Objective::Kind::StarExact: {
      const auto path = run_chain(system, driver, config.n0);
      return star_discrepancy_exact(path.retained(), *system.target);
    }
    case Objective::Kind::StarBracket: {
      if (!cover) throw PreconditionError("bracket objective needs a cover");
      const auto path = run_chain(system, driver, config.n0);
      return star_discrepancy_bracket(path.retained(), *system.target, *cover);
    }
    case Objective::Kind::PullbackMc: {
      if (!cover) throw PreconditionError("pull-back objective needs a cover");
      Rng rng = Rng::substream(config.seed, kReplicationLabel + mc_label);
      return pullback_discrepancy_mc(system, driver, config.n0, *cover, config.objective.m, rng);
    }
  }
  throw PreconditionError("unknown objective");
}

bounds::BoundValue search_theory_bound(const ChainSystem& system, std::size_t n) {
  bounds::BoundInputs in;
  in.n = static_cast<double>(n);
  in.d = static_cast<double>(system.dimension());
  in.lambda0 = system.lambda0;
  in.nu_norm = system.nu_density_norm;
  if (n >= 16) return bounds::corollary_main_bound(in);
  in.delta = std::min(1.0, 8.0 / std::pow(in.n, 0.75));
  in.cover_size = bounds::cover_size_bound(in.delta, in.d, 0.25);
  return bounds::main_discrepancy_bound(in);
}

SearchResult best_of_k(const ChainSystem& system, const SearchConfig& config) {
  config.validate();
  system.validate();
  if (config.objective.kind == Objective::Kind::StarExact && system.dimension() > 3)
    throw InfeasibleError("exact star-discrepancy scan is limited to d <= 3");

  std::unique_ptr<DeltaCover> cover;
  if (config.objective.kind != Objective::Kind::StarExact)
    cover = std::make_unique<DeltaCover>(build_quantile_cover(*system.target, config.objective.delta));

  const std::size_t s = system.step_dimension();
  std::vector<std::optional<DriverSequence>> drivers(config.k);
  std::vector<DiscrepancyReport> reports(config.k);
  parallel_for(config.k, [&](std::size_t i) {
    drivers[i] = make_candidate(config, i, s);
    reports[i] = score_driver(system, *drivers[i], config, cover.get(), i);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < config.k; ++i) {
    if (reports[i].upper < reports[best].upper) best = i;
  }
  SearchResult result{*drivers[best], reports[best], best, {}, search_theory_bound(system, config.n)};
  result.all_scores.reserve(config.k);
  for (std::size_t i = 0; i < config.k; ++i)
    result.all_scores.push_back({drivers[i]->provenance(), reports[i].lower, reports[i].upper});
  return result;
}

DriverSequence invert_to_target(const ChainSystem& system, std::span<const Point> targets,
                                const std::optional<std::vector<double>>& x1_driver) {
  if (targets.empty()) throw PreconditionError("no targets to invert toward");
  const std::size_t s = system.step_dimension();
  const Domain& domain = system.target->domain();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].size() != system.dimension() || !domain.contains(targets[i]))
      throw InversionError(i, "target lies outside the state space");
  }
  if (!system.update.invertible()) throw InversionError(1, "update function has no inverse");

  std::vector<double> values;
  values.reserve(targets.size() * s);
  std::vector<double> u0;
  if (x1_driver) {
    u0 = *x1_driver;
  } else {
    if (!system.generator.inverse) throw InversionError(0, "generator has no inverse; pass x1_driver");
    u0 = system.generator.inverse(targets[0]);
  }
  if (u0.size() != s) throw InversionError(0, "first driver point has the wrong dimension");
  values.insert(values.end(), u0.begin(), u0.end());

  for (std::size_t i = 1; i < targets.size(); ++i) {
    std::vector<double> u;
    try {
      u = system.update.inverse(targets[i - 1], targets[i]);
    } catch (const std::exception& e) {
      throw InversionError(i, e.what());
    }
    if (u.size() != s) throw InversionError(i, "inverse returned the wrong dimension");
    values.insert(values.end(), u.begin(), u.end());
  }
  return DriverSequence(s, std::move(values), Provenance{DriverKind::Inverted, 0, 0});
}

double replay_deviation(const ChainSystem& system, const DriverSequence& driver,
                        std::span<const Point> targets) {
  if (driver.size() != targets.size()) throw PreconditionError("driver and target lengths differ");
  const auto path = run_chain(system, driver);
  double worst = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j = 0; j < targets[i].size(); ++j)
      worst = std::max(worst, std::abs(path.states[i][j] - targets[i][j]));
  }
  return worst;
}

std::vector<Point> stratified_targets(const TargetMeasure& measure, std::size_t n) {
  if (measure.dimension() != 1) throw PreconditionError("stratified targets are defined for d = 1");
  if (n == 0) throw PreconditionError("need at least one target");
  std::vector<Point> targets(n);
  parallel_for(n, [&](std::size_t i) {
    targets[i] = {measure.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n))};
  });
  return targets;
}

std::vector<RateRow> rate_study(const ChainSystem& system, std::span<const std::size_t> ns,
                                std::span<const std::uint64_t> seeds, const SearchConfig& base) {
  if (!std::is_sorted(ns.begin(), ns.end())) throw PreconditionError("rate study needs increasing n");
  std::vector<RateRow> rows;
  const auto d = static_cast<double>(system.dimension());
  for (std::size_t n : ns) {
    for (std::uint64_t seed : seeds) {
      SearchConfig config = base;
      config.n = n;
      config.seed = seed;
      const auto result = best_of_k(system, config);
      rows.push_back({n, seed, result.best_report.lower, result.best_report.upper,
                      result.theory_bound.value,
                      bounds::beck_bound(static_cast<double>(n), d).value});
    }
  }
  return rows;
}

std::vector<RateRow> inversion_rate_study(const ChainSystem& system, std::span<const std::size_t> ns) {
  if (!std::is_sorted(ns.begin(), ns.end())) throw PreconditionError("rate study needs increasing n");
  std::vector<RateRow> rows;
  const auto d = static_cast<double>(system.dimension());
  for (std::size_t n : ns) {
    const auto targets = stratified_targets(*system.target, n);
    const auto driver = invert_to_target(system, targets);
    const auto path = run_chain(system, driver);
    const auto report = star_discrepancy_exact(path.retained(), *system.target);
    const double beck = bounds::beck_bound(static_cast<double>(n), d).value;
    rows.push_back({n, 0, report.lower, report.upper, beck, beck});
  }
  return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("slope needs two or more pairs");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw PreconditionError("slope needs distinct x values");
  return sxy / sxx;
}

}  // namespace mcqmc
