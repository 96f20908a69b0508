#include "mcqmc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mcqmc/ballwalk.hpp"
#include "mcqmc/bounds.hpp"
#include "mcqmc/discrepancy.hpp"
#include "mcqmc/error.hpp"
#include "mcqmc/parallel.hpp"

#ifndef MCQMC_VERSION
#define MCQMC_VERSION "0.0.0"
#endif

namespace mcqmc {

namespace {

using Json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) parts.push_back(trim(item));
  return parts;
}

double parse_double(std::size_t line, const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(line, key, "expected a number, got '" + value + "'");
}

std::uint64_t parse_u64(std::size_t line, const std::string& key, const std::string& value) {
  if (!value.empty() && value.find_first_not_of("0123456789") == std::string::npos) {
    try {
      return std::stoull(value);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(line, key, "expected a nonnegative integer, got '" + value + "'");
}

std::size_t parse_size(std::size_t line, const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(parse_u64(line, key, value));
}

std::string one_of(std::size_t line, const std::string& key, const std::string& value,
                   std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return value;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ConfigError(line, key, "expected one of {" + list + "}, got '" + value + "'");
}

void assign(ExperimentConfig& cfg, std::size_t line, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    cfg.experiment = one_of(line, key, value,
                            {"discrepancy", "pullback", "search", "rate-study", "bounds", "invert"});
  } else if (key == "dimension") {
    cfg.dimension = parse_size(line, key, value);
    if (cfg.dimension < 1) throw ConfigError(line, key, "dimension must be >= 1");
  } else if (key == "density.name") {
    cfg.density_name = one_of(line, key, value, {"uniform", "exp-linear"});
  } else if (key == "density.alpha") {
    cfg.density_alpha = parse_double(line, key, value);
    if (cfg.density_alpha < 0.0) throw ConfigError(line, key, "alpha must be >= 0");
  } else if (key == "kernel") {
    if (value == "metropolis-ballwalk" || value == "direct") {
      cfg.kernel = value;
    } else if (value.rfind("lazy-direct(", 0) == 0 && value.back() == ')') {
      cfg.kernel = "lazy-direct";
      cfg.lazy_a = parse_double(line, key, trim(value.substr(12, value.size() - 13)));
      if (!(cfg.lazy_a > 0.0 && cfg.lazy_a <= 1.0))
        throw ConfigError(line, key, "lazy-direct laziness a must lie in (0,1]");
    } else {
      throw ConfigError(line, key,
                        "expected metropolis-ballwalk, direct or lazy-direct(a), got '" + value + "'");
    }
  } else if (key == "gamma") {
    if (value == "gamma-star") {
      cfg.gamma_star = true;
    } else {
      cfg.gamma_star = false;
      cfg.gamma = parse_double(line, key, value);
      if (!(cfg.gamma > 0.0)) throw ConfigError(line, key, "gamma must be positive");
    }
  } else if (key == "initial") {
    cfg.initial = one_of(line, key, value, {"target", "uniform"});
  } else if (key == "n") {
    cfg.n.clear();
    for (const auto& item : split_list(value)) cfg.n.push_back(parse_size(line, key, item));
    if (cfg.n.empty() || cfg.n.front() < 1) throw ConfigError(line, key, "n must be >= 1");
    if (!std::is_sorted(cfg.n.begin(), cfg.n.end()) ||
        std::adjacent_find(cfg.n.begin(), cfg.n.end()) != cfg.n.end())
      throw ConfigError(line, key, "n values must be strictly increasing");
  } else if (key == "n0") {
    cfg.n0 = parse_size(line, key, value);
  } else if (key == "k") {
    cfg.k = parse_size(line, key, value);
    if (cfg.k < 1) throw ConfigError(line, key, "k must be >= 1");
  } else if (key == "seed") {
    cfg.seeds = {parse_u64(line, key, value)};
  } else if (key == "seeds") {
    cfg.seeds.clear();
    for (const auto& item : split_list(value)) cfg.seeds.push_back(parse_u64(line, key, item));
    if (cfg.seeds.empty()) throw ConfigError(line, key, "seeds must not be empty");
  } else if (key == "delta") {
    cfg.delta = parse_double(line, key, value);
    if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw ConfigError(line, key, "delta must lie in (0,1]");
  } else if (key == "epsilon") {
    cfg.epsilon = parse_double(line, key, value);
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw ConfigError(line, key, "epsilon must lie in (0,1)");
  } else if (key == "mc-replications") {
    cfg.mc_replications = parse_size(line, key, value);
    if (cfg.mc_replications < 100) throw ConfigError(line, key, "mc-replications must be >= 100");
  } else if (key == "candidates") {
    cfg.candidates.clear();
    for (const auto& item : split_list(value)) {
      one_of(line, key, item, {"uniform-random", "halton", "scrambled-halton"});
      cfg.candidates.push_back(parse_candidate_kind(item));
    }
    if (cfg.candidates.empty()) throw ConfigError(line, key, "candidates must not be empty");
  } else if (key == "objective") {
    cfg.objective = one_of(line, key, value, {"star-exact", "star-bracket", "pullback-mc"});
  } else if (key == "pipeline") {
    cfg.pipeline = one_of(line, key, value, {"best-of-k", "inversion"});
  } else if (key == "lambda0") {
    cfg.lambda0 = parse_double(line, key, value);
    if (!(cfg.lambda0 >= 0.0 && cfg.lambda0 <= 1.0)) throw ConfigError(line, key, "lambda0 must lie in [0,1]");
  } else if (key == "beta") {
    cfg.beta = parse_double(line, key, value);
    if (!(*cfg.beta >= 0.0 && *cfg.beta <= 1.0)) throw ConfigError(line, key, "beta must lie in [0,1]");
  } else if (key == "norm") {
    cfg.norm = parse_double(line, key, value);
    if (!(cfg.norm >= 1.0)) throw ConfigError(line, key, "norm must be >= 1");
  } else if (key == "c") {
    cfg.c = parse_double(line, key, value);
    if (!(cfg.c > 0.0)) throw ConfigError(line, key, "c must be positive");
  } else if (key == "output") {
    if (value.empty()) throw ConfigError(line, key, "output path must not be empty");
    cfg.output = value;
  } else {
    throw ConfigError(line, key, "unknown key");
  }
}

TargetPtr make_target(const ExperimentConfig& cfg) {
  auto density = density_preset(cfg.density_name, cfg.density_alpha, cfg.dimension);
  return std::make_shared<const TargetMeasure>(Domain::unit_ball(cfg.dimension), std::move(density));
}

void check_combination(const ExperimentConfig& cfg) {
  if (cfg.experiment.empty()) throw ConfigError(0, "experiment", "missing required key");
  if (cfg.output.empty()) throw ConfigError(0, "output", "missing required key");
  if (cfg.experiment == "bounds") return;
  if (cfg.experiment == "invert" || (cfg.experiment == "rate-study" && cfg.pipeline == "inversion")) {
    if (cfg.kernel != "metropolis-ballwalk")
      throw ConfigError(0, "kernel", "inversion needs the metropolis-ballwalk kernel");
    if (cfg.dimension != 1) throw ConfigError(0, "dimension", "inversion targets are stratified in d = 1");
  }
  if (cfg.experiment == "discrepancy" && cfg.objective == "pullback-mc")
    throw ConfigError(0, "objective", "use experiment = pullback for pull-back discrepancies");
}

Table bounds_table(const ExperimentConfig& cfg) {
  Table t{{"bound", "n", "d", "value", "vacuous", "degenerate"}, {}};
  const auto d = static_cast<double>(cfg.dimension);
  for (std::size_t n : cfg.n) {
    bounds::BoundInputs in;
    in.n = static_cast<double>(n);
    in.n0 = static_cast<double>(cfg.n0);
    in.d = d;
    in.lambda0 = cfg.lambda0;
    in.beta = cfg.beta.value_or(cfg.lambda0);
    in.nu_norm = cfg.norm;
    // ||f - 1||^2 = ||f||^2 - 1 for a probability density ratio f.
    in.nu_norm_centered = std::sqrt(std::max(0.0, cfg.norm * cfg.norm - 1.0));
    in.delta = cfg.delta;
    in.epsilon = cfg.epsilon;
    in.alpha = cfg.density_alpha;
    in.c = cfg.c;
    in.r = static_cast<double>(n);
    in.cover_size = bounds::cover_size_bound(cfg.delta, d, cfg.epsilon);

    auto add = [&](const std::string& name, const bounds::BoundValue& b) {
      t.rows.push_back({name, std::to_string(n), std::to_string(cfg.dimension), format_number(b.value),
                        b.vacuous ? "1" : "0", b.degenerate ? "1" : "0"});
    };
    auto add_plain = [&](const std::string& name, double v) {
      t.rows.push_back({name, std::to_string(n), std::to_string(cfg.dimension), format_number(v), "0", "0"});
    };
    add("hoeffding_tail", bounds::hoeffding_tail(in));
    add("main_discrepancy_bound", bounds::main_discrepancy_bound(in));
    if (n >= 16) add("corollary_main_bound", bounds::corollary_main_bound(in));
    add("tv_average_bound", bounds::tv_average_bound(in));
    if (in.beta < 1.0) {
      add("spectral_tv_bound", bounds::spectral_tv_bound(in));
      const auto burn = bounds::burn_in_bound(in);
      add("burn_in_mixed", burn.mixed);
      add("burn_in_simplified", burn.simplified);
    }
    add("beck_bound", bounds::beck_bound(in.r, d));
    add_plain("cover_size_bound", in.cover_size);
    const auto gap = bounds::ballwalk_gap_bound(cfg.density_alpha, cfg.dimension);
    add_plain("ballwalk_gamma_star", gap.gamma_star);
    add_plain("ballwalk_gap", gap.gap);
    if (n >= 16) add("ballwalk_error_bound", bounds::ballwalk_error_bound(cfg.density_alpha, cfg.dimension, in.n));
  }
  return t;
}

SearchConfig search_config(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed) {
  SearchConfig sc;
  sc.n = n;
  sc.n0 = cfg.n0;
  sc.k = cfg.k;
  sc.seed = seed;
  sc.kinds = cfg.candidates;
  sc.objective = build_objective(cfg);
  return sc;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

ConfigError::ConfigError(std::size_t line, std::string key, const std::string& what)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (key.empty() ? std::string() : "key '" + key + "': ") + what),
      line_(line),
      key_(std::move(key)) {}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::map<std::string, std::size_t> seen;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      // `[]` returns to top-level keys.
      if (line.back() != ']') throw ConfigError(line_no, "", "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "", "missing key before '='");
    if (!section.empty()) key = section + "." + key;
    if (auto it = seen.find(key); it != seen.end())
      throw ConfigError(line_no, key, "duplicate key (first set on line " + std::to_string(it->second) + ")");
    seen[key] = line_no;
    assign(cfg, line_no, key, value);
    cfg.entries.emplace_back(key, value);
  }
  check_combination(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "", "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

double resolved_gamma(const ExperimentConfig& config) {
  if (!config.gamma_star) return config.gamma;
  return bounds::ballwalk_gap_bound(config.density_alpha, config.dimension).gamma_star;
}

ChainSystem build_system(const ExperimentConfig& config) {
  try {
    if (config.kernel == "metropolis-ballwalk") {
      auto density = density_preset(config.density_name, config.density_alpha, config.dimension);
      return make_metropolis_ballwalk(density, BallWalkParams{resolved_gamma(config), config.dimension});
    }
    auto target = make_target(config);
    TargetPtr initial;
    if (config.initial == "uniform")
      initial = std::make_shared<const TargetMeasure>(Domain::unit_ball(config.dimension), LogDensity::uniform());
    if (config.kernel == "direct") return make_direct_kernel(target, initial);
    return make_lazy_direct_kernel(target, config.lazy_a, initial);
  } catch (const PreconditionError& e) {
    throw ConfigError(0, "kernel", e.what());
  }
}

Objective build_objective(const ExperimentConfig& config) {
  if (config.objective == "star-bracket") return Objective::star_bracket(config.delta);
  if (config.objective == "pullback-mc") return Objective::pullback_mc(config.mc_replications, config.delta);
  return Objective::star_exact();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Table::to_csv() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += quote_csv(row[i]);
    }
    out += "\r\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

ExperimentOutput compute_experiment(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  if (cfg.experiment == "bounds") {
    out.table = bounds_table(cfg);
    return out;
  }

  const ChainSystem system = build_system(cfg);
  const std::size_t s = system.step_dimension();
  Json row_times = Json::array();

  if (cfg.experiment == "discrepancy") {
    out.table.header = {"n", "seed", "candidate", "method", "disc_lower", "disc_upper", "delta_used",
                        "quadrature_error"};
    std::unique_ptr<DeltaCover> cover;
    if (cfg.objective != "star-exact")
      cover = std::make_unique<DeltaCover>(build_quantile_cover(*system.target, cfg.delta));
    for (std::size_t n : cfg.n) {
      for (std::uint64_t seed : cfg.seeds) {
        const auto sc = search_config(cfg, n, seed);
        const auto driver = make_candidate(sc, 0, s);
        const auto r = score_driver(system, driver, sc, cover.get(), 0);
        out.table.rows.push_back({std::to_string(n), std::to_string(seed), driver.provenance().describe(),
                                  to_string(r.method), format_number(r.lower), format_number(r.upper),
                                  format_number(r.delta_used), format_number(r.quadrature_error)});
      }
    }
  } else if (cfg.experiment == "pullback") {
    out.table.header = {"n",           "seed",       "star_lower", "star_upper",    "pullback_lower",
                        "pullback_upper", "delta_used", "mc_stderr", "marginal_slack"};
    const auto cover = build_quantile_cover(*system.target, cfg.delta);
    for (std::size_t n : cfg.n) {
      for (std::uint64_t seed : cfg.seeds) {
        auto sc = search_config(cfg, n, seed);
        sc.objective = Objective::pullback_mc(cfg.mc_replications, cfg.delta);
        const auto driver = make_candidate(sc, 0, s);
        const auto path = run_chain(system, driver, cfg.n0);
        const auto star = star_discrepancy_exact(path.retained(), *system.target);
        const auto pb = score_driver(system, driver, sc, &cover, 0);
        out.table.rows.push_back({std::to_string(n), std::to_string(seed), format_number(star.lower),
                                  format_number(star.upper), format_number(pb.lower), format_number(pb.upper),
                                  format_number(pb.delta_used), format_number(pb.mc_stderr),
                                  format_number(pb.marginal_slack)});
      }
    }
  } else if (cfg.experiment == "search") {
    out.table.header = {"n", "seed", "candidate", "provenance", "disc_lower", "disc_upper", "best",
                        "theory_bound"};
    for (std::size_t n : cfg.n) {
      for (std::uint64_t seed : cfg.seeds) {
        const auto result = best_of_k(system, search_config(cfg, n, seed));
        for (std::size_t i = 0; i < result.all_scores.size(); ++i) {
          const auto& sc = result.all_scores[i];
          out.table.rows.push_back({std::to_string(n), std::to_string(seed), std::to_string(i),
                                    sc.provenance.describe(), format_number(sc.lower), format_number(sc.upper),
                                    i == result.best_index ? "1" : "0",
                                    format_number(result.theory_bound.value)});
        }
      }
    }
  } else if (cfg.experiment == "rate-study") {
    out.table.header = {"n", "seed", "disc_lower", "disc_upper", "theory_bound", "beck_bound"};
    std::vector<double> xs, ys;
    for (std::size_t n : cfg.n) {
      const std::size_t one[] = {n};
      if (cfg.pipeline == "inversion") {
        const auto start = std::chrono::steady_clock::now();
        const auto rows = inversion_rate_study(system, one);
        row_times.push_back(elapsed_ms(start));
        for (const auto& r : rows) {
          out.table.rows.push_back({std::to_string(r.n), std::to_string(r.seed), format_number(r.disc_lower),
                                    format_number(r.disc_upper), format_number(r.theory_bound),
                                    format_number(r.beck_bound)});
          xs.push_back(static_cast<double>(r.n));
          ys.push_back(r.disc_upper);
        }
        continue;
      }
      std::vector<double> uppers;
      for (std::uint64_t seed : cfg.seeds) {
        const std::uint64_t seed_one[] = {seed};
        const auto start = std::chrono::steady_clock::now();
        const auto rows = rate_study(system, one, seed_one, search_config(cfg, n, seed));
        row_times.push_back(elapsed_ms(start));
        for (const auto& r : rows) {
          out.table.rows.push_back({std::to_string(r.n), std::to_string(r.seed), format_number(r.disc_lower),
                                    format_number(r.disc_upper), format_number(r.theory_bound),
                                    format_number(r.beck_bound)});
          uppers.push_back(r.disc_upper);
        }
      }
      std::sort(uppers.begin(), uppers.end());
      const std::size_t h = uppers.size() / 2;
      xs.push_back(static_cast<double>(n));
      ys.push_back(uppers.size() % 2 ? uppers[h] : 0.5 * (uppers[h - 1] + uppers[h]));
    }
    if (xs.size() >= 2) out.manifest_fields.emplace_back("loglog_slope", Json(loglog_slope(xs, ys)).dump());
    out.manifest_fields.emplace_back("row_runtime_ms", row_times.dump());
  } else if (cfg.experiment == "invert") {
    out.table.header = {"n", "disc_lower", "disc_upper", "max_deviation", "beck_bound"};
    for (std::size_t n : cfg.n) {
      const auto targets = stratified_targets(*system.target, n);
      const auto driver = invert_to_target(system, targets);
      const double deviation = replay_deviation(system, driver, targets);
      const auto path = run_chain(system, driver);
      const auto r = star_discrepancy_exact(path.retained(), *system.target);
      out.table.rows.push_back({std::to_string(n), format_number(r.lower), format_number(r.upper),
                                format_number(deviation),
                                format_number(bounds::beck_bound(static_cast<double>(n), 1.0).value)});
    }
  }
  return out;
}

int validate_config_file(const std::string& path, std::ostream& err) {
  try {
    const auto cfg = load_config(path);
    if (cfg.experiment != "bounds") build_system(cfg).validate();
    return 0;
  } catch (const ConfigError& e) {
    err << path << ": " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    err << path << ": " << e.what() << '\n';
    return 2;
  }
}

int run_config_file(const std::string& path, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const ConfigError& e) {
    err << path << ": " << e.what() << '\n';
    return 2;
  }

  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = utc_timestamp();
  ExperimentOutput result;
  try {
    result = compute_experiment(cfg);
  } catch (const ConfigError& e) {
    err << path << ": " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const InversionError& e) {
    err << "inversion failed at " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  Json manifest;
  manifest["tool"] = "mcqmc";
  manifest["version"] = MCQMC_VERSION;
  manifest["experiment"] = cfg.experiment;
  Json echo = Json::object();
  for (const auto& [k, v] : cfg.entries) echo[k] = v;
  manifest["config"] = echo;
  manifest["seeds"] = cfg.seeds;
  if (cfg.kernel == "metropolis-ballwalk" && cfg.experiment != "bounds") {
    manifest["resolved_gamma"] = resolved_gamma(cfg);
    manifest["gamma_source"] = cfg.gamma_star ? "gamma-star" : "config";
  }
  manifest["threads"] = worker_count();
  manifest["started_at"] = started_at;
  manifest["wall_time_ms"] = elapsed_ms(started);
  for (const auto& [name, value] : result.manifest_fields) manifest[name] = Json::parse(value);

  try {
    const std::filesystem::path out_path(cfg.output);
    write_atomically(out_path, result.table.to_csv());
    auto manifest_path = out_path;
    manifest_path += ".manifest.json";
    write_atomically(manifest_path, manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mcqmc
