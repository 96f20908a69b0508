// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (0 when everything passes).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "audits.hpp"
#include "mcqmc/ballwalk.hpp"
#include "mcqmc/bounds.hpp"
#include "mcqmc/chain.hpp"
#include "mcqmc/discrepancy.hpp"
#include "mcqmc/lowdisc.hpp"
#include "mcqmc/search.hpp"
#include "oracles.hpp"

using namespace mcqmc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Appends a formatted note and folds `ok` into the outcome.
template <class... Args>
void note(Outcome& o, bool ok, const char* fmt, Args... args) {
  char buf[256];
  if constexpr (sizeof...(Args) == 0) {
    std::snprintf(buf, sizeof buf, "%s", fmt);
  } else {
    std::snprintf(buf, sizeof buf, fmt, args...);
  }
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += buf;
  if (!ok) {
    o.pass = false;
    o.detail += " [x]";
  }
}

TargetPtr ball(std::size_t d, double alpha) {
  return std::make_shared<const TargetMeasure>(
      Domain::unit_ball(d), density_preset(alpha == 0.0 ? "uniform" : "exp-linear", alpha, d));
}

double oracle_mass(std::size_t d, double alpha, const std::vector<double>& c) {
  if (d == 1) return oracle::exp_linear_cdf(c[0], alpha);
  return oracle::disc_exp_linear_mass(c[0], c[1], alpha);
}

std::vector<Point> random_points(std::size_t n, std::size_t d, Rng& rng) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(sample_uniform_ball(d, rng));
  return pts;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Outcome golden_values() {
  Outcome o;
  bounds::BoundInputs h;
  h.c = 0.1;
  h.n = 1000;
  const double ht = bounds::hoeffding_tail(h).value;
  note(o, std::abs(ht - 2 * std::exp(-10.0)) <= 1e-9 * 2 * std::exp(-10.0), "hoeffding %.6e", ht);

  bounds::BoundInputs c;
  c.n = 16;
  const double cor = bounds::corollary_main_bound(c).value;
  note(o, std::abs(cor - 1.9747) <= 1e-4, "corollary %.6f", cor);

  const double beck = bounds::beck_bound(1024, 1).value;
  note(o, beck == 8.859375, "beck %.9g", beck);

  bounds::BoundInputs t;
  t.lambda0 = 0.5;
  t.n = 4;
  t.nu_norm_centered = 1;
  const double tv = bounds::tv_average_bound(t).value;
  note(o, tv == 0.46875, "tv %.9g", tv);

  const auto gap = bounds::ballwalk_gap_bound(1.0, 1);
  note(o, std::abs(gap.gamma_star - std::min(1 / std::sqrt(2.0), 1.0)) <= 1e-12 && std::abs(gap.gap - 7.8125e-7) <= 1e-12,
       "gamma* %.12f gap %.6e", gap.gamma_star, gap.gap);
  return o;
}

Outcome exact_oracle() {
  Outcome o;
  const auto pi = ball(1, 0.0);
  for (std::size_t n : {4, 16, 64}) {
    std::vector<Point> mid;
    for (std::size_t i = 0; i < n; ++i) mid.push_back({-1.0 + (2.0 * i + 1.0) / n});
    const auto r = star_discrepancy_exact(mid, *pi);
    note(o, std::abs(r.upper - 0.5 / n) <= 1e-12 && std::abs(r.lower - 0.5 / n) <= 1e-12, "n=%zu D*=%.15f", n,
         r.upper);
  }
  Rng rng(2);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto pts = random_points(5 + rng.next_u64() % 100, 1, rng);
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back(p[0]);
    const double grid = oracle::grid_scan_1d(xs, [](double x) { return oracle::uniform_cdf(x); }, -1.0, 1.0, 100000);
    worst = std::max(worst, std::abs(grid - star_discrepancy_exact(pts, *pi).upper));
  }
  note(o, worst <= 2e-5, "grid vs exact max diff %.3e over 100 sets", worst);
  return o;
}

Outcome cover_soundness() {
  Outcome o;
  std::size_t failures = 0, boxes = 0;
  double worst_gap_excess = -1.0;
  for (std::size_t d : {1, 2}) {
    for (double alpha : {0.0, 1.0}) {
      for (double delta : {0.1, 0.01}) {
        const auto pi = ball(d, alpha);
        const auto cover = build_quantile_cover(*pi, delta);
        Rng rng(100 * d + static_cast<std::uint64_t>(alpha * 10) + static_cast<std::uint64_t>(1 / delta));
        for (int t = 0; t < 1000; ++t) {
          AnchoredBox a{Point(d)};
          for (auto& c : a.corner) c = -1.2 + 2.4 * rng.uniform();
          const auto br = cover.bracket(a);
          const auto inner = cover.member(br.inner).corner, outer = cover.member(br.outer).corner;
          bool a_empty = false;
          for (std::size_t j = 0; j < d; ++j) a_empty = a_empty || a.corner[j] <= -1.0;
          bool nested = true;
          for (std::size_t j = 0; j < d; ++j)
            nested = nested && (a_empty || inner[j] <= a.corner[j]) && a.corner[j] <= outer[j];
          const double gap = oracle_mass(d, alpha, outer) - oracle_mass(d, alpha, inner);
          worst_gap_excess = std::max(worst_gap_excess, gap - delta);
          ++boxes;
          if (!nested || gap > delta + 1e-8) ++failures;
        }
      }
    }
  }
  note(o, failures == 0, "%zu/%zu bracketing failures, worst gap - delta %.2e", failures, boxes, worst_gap_excess);

  std::size_t bad = 0, sets = 0;
  for (std::size_t d : {1, 2}) {
    std::vector<std::pair<TargetPtr, DeltaCover>> covers;
    for (double alpha : {0.0, 1.0}) {
      for (double delta : {0.1, 0.01}) {
        auto pi = ball(d, alpha);
        covers.emplace_back(pi, build_quantile_cover(*pi, delta));
      }
    }
    Rng rng(7 + d);
    for (int t = 0; t < 100; ++t) {
      const auto& [pi, cover] = covers[t % covers.size()];
      const auto pts = random_points(d == 1 ? 80 : 30, d, rng);
      const auto exact = star_discrepancy_exact(pts, *pi);
      const auto br = star_discrepancy_bracket(pts, *pi, cover);
      ++sets;
      if (br.lower > exact.upper + 1e-12 || exact.lower > br.upper + 1e-12) ++bad;
    }
  }
  note(o, bad == 0, "%zu/%zu point sets outside the bracket", bad, sets);
  return o;
}

Outcome direct_identity() {
  Outcome o;
  const auto pi = ball(1, 0.0);
  const auto sys = make_direct_kernel(pi);
  const auto cover = build_quantile_cover(*pi, 0.01);
  double worst = 0.0, worst_stderr = 0.0;
  bool inside = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto driver = uniform_driver(64, 1, rng);
    const auto pb = pullback_discrepancy_mc(sys, driver, 0, cover, 0, rng);
    const auto star = star_discrepancy_exact(run_chain(sys, driver).retained(), *pi);
    worst = std::max(worst, std::abs(pb.lower - star.upper));
    worst_stderr = std::max(worst_stderr, pb.mc_stderr);
    inside = inside && pb.lower <= star.upper + 1e-9 && star.upper <= pb.upper + 1e-9;
  }
  note(o, worst <= 0.01 + 1e-9, "max |pullback - star| %.4e", worst);
  note(o, worst_stderr == 0.0, "mc_stderr %.1g", worst_stderr);
  note(o, inside, "star inside pull-back bracket");
  return o;
}

Outcome lazy_audit() {
  Outcome o;
  const auto pi = ball(1, 1.0);
  const auto nu = ball(1, 0.0);
  const auto sys = make_lazy_direct_kernel(pi, 0.5, nu);
  const std::size_t n = 64;
  const double delta = 0.01;
  const auto cover = build_quantile_cover(*pi, delta);

  double wbar = 0.0;
  for (std::size_t i = 0; i < n; ++i) wbar += sys.exact_marginals->nu_weight(i);
  wbar /= n;
  double sup_term = 0.0;
  for (std::size_t k = 0; k < cover.size(); ++k) {
    const auto c = cover.member(k).corner;
    sup_term = std::max(sup_term, wbar * std::abs(oracle::uniform_cdf(c[0]) - oracle::exp_linear_cdf(c[0], 1.0)));
  }
  bounds::BoundInputs in;
  in.n = n;
  in.lambda0 = 0.5;
  in.nu_norm_centered = sys.nu_density_norm_centered;
  const double tv = bounds::tv_average_bound(in).value;
  const double slack = (1.0 + wbar) * delta + 1e-8;

  std::size_t sup_fail = 0, tv_fail = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(1000 + seed);
    const auto driver = uniform_driver(n, sys.step_dimension(), rng);
    const auto star = star_discrepancy_exact(run_chain(sys, driver).retained(), *pi);
    const auto pb = pullback_discrepancy_mc(sys, driver, 0, cover, 0, rng);
    const double diff = std::abs(star.upper - pb.lower);
    worst = std::max(worst, diff);
    if (diff > sup_term + slack) ++sup_fail;
    if (diff > tv + slack) ++tv_fail;
  }
  note(o, sup_fail == 0, "max diff %.4e vs sup-term %.4e + slack %.3g", worst, sup_term, slack);
  note(o, tv_fail == 0, "tv bound %.4e", tv);
  return o;
}

Outcome hoeffding_dominance() {
  Outcome o;
  const auto pi = ball(1, 0.0);
  const auto sys = make_direct_kernel(pi);
  const AnchoredBox box{{-0.4}};
  const double p = pi->box_mass(box).mass;
  note(o, std::abs(p - 0.3) < 1e-12, "pi(A) = %.12f", p);
  const std::size_t n = 256, drivers = 2000;
  std::vector<double> means(drivers);
  for (std::size_t r = 0; r < drivers; ++r) {
    Rng rng = Rng::substream(6, r);
    const auto path = run_chain(sys, uniform_driver(n, 1, rng));
    double hits = 0.0;
    for (const auto& x : path.states) hits += box.contains(x) ? 1.0 : 0.0;
    means[r] = hits / n;
  }
  for (double c : {0.05, 0.1}) {
    double violations = 0.0;
    for (double m : means) violations += std::abs(m - p) >= c ? 1.0 : 0.0;
    bounds::BoundInputs in;
    in.c = c;
    in.n = n;
    const double tail = bounds::hoeffding_tail(in).value;
    note(o, violations / drivers <= tail, "c=%.2f freq %.4f <= %.4f", c, violations / drivers, tail);
  }
  return o;
}

Outcome existence_realized() {
  Outcome o;
  const double alpha = 1.0;
  const auto gap = bounds::ballwalk_gap_bound(alpha, 1);
  const auto sys = make_metropolis_ballwalk(density_preset("exp-linear", alpha, 1), {gap.gamma_star, 1});
  std::vector<double> ns, medians;
  bool all_below = true;
  for (std::size_t n : {64, 256, 1024}) {
    bounds::BoundInputs in;
    in.n = static_cast<double>(n);
    in.lambda0 = 1.0 - gap.gap;
    in.nu_norm = std::exp(alpha);
    const double bound = bounds::corollary_main_bound(in).value;
    std::vector<double> best;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      SearchConfig cfg;
      cfg.n = n;
      cfg.k = 32;
      cfg.seed = seed;
      const auto r = best_of_k(sys, cfg);
      best.push_back(r.best_report.upper);
      all_below = all_below && r.best_report.upper <= bound;
    }
    ns.push_back(static_cast<double>(n));
    medians.push_back(median(best));
  }
  note(o, all_below, "best-of-32 below corollary bound for 30 runs");
  const double slope = loglog_slope(ns, medians);
  note(o, slope >= -0.65 && slope <= -0.35, "medians %.4f %.4f %.4f slope %.3f", medians[0], medians[1], medians[2],
       slope);
  return o;
}

Outcome koksma_hlawka() {
  Outcome o;
  const auto gap = bounds::ballwalk_gap_bound(1.0, 1);
  const auto sys = make_metropolis_ballwalk(density_preset("exp-linear", 1.0, 1), {gap.gamma_star, 1});
  Rng rng(8);
  std::vector<std::vector<Point>> paths;
  for (int r = 0; r < 20; ++r) {
    const auto path = run_chain(sys, uniform_driver(64, 2, rng));
    paths.push_back(path.states);
  }
  std::size_t violations = 0, cases = 0;
  double tightest = 1e300;
  for (int t = 0; t < 100; ++t) {
    H1Function f{4 * rng.uniform() - 2, {}};
    const std::size_t atoms = 1 + rng.next_u64() % 8;
    for (std::size_t j = 0; j < atoms; ++j) f.atoms.push_back({{-1.1 + 2.2 * rng.uniform()}, 4 * rng.uniform() - 2});
    for (const auto& pts : paths) {
      const auto check = kh_error_bound(f, pts, *sys.target);
      ++cases;
      if (!check.holds()) ++violations;
      tightest = std::min(tightest, check.bound + check.slack - check.exact_error);
    }
  }
  note(o, violations == 0, "%zu/%zu violations, smallest margin %.3e", violations, cases, tightest);
  return o;
}

Outcome inversion_pipeline() {
  Outcome o;
  const auto sys = make_metropolis_ballwalk(density_preset("uniform", 0.0, 1), {2.0, 1});
  std::vector<double> ns, ds;
  for (std::size_t n : {16, 64, 256}) {
    const auto targets = stratified_targets(*sys.target, n);
    const auto driver = invert_to_target(sys, targets);
    const double dev = replay_deviation(sys, driver, targets);
    const auto r = star_discrepancy_exact(run_chain(sys, driver).retained(), *sys.target);
    note(o, dev <= 1e-9 && std::abs(r.upper - 0.5 / n) <= 1e-9, "n=%zu dev %.1e D* %.6e", n, dev, r.upper);
    ns.push_back(static_cast<double>(n));
    ds.push_back(r.upper);
  }
  const double slope = loglog_slope(ns, ds);
  note(o, slope <= -0.9, "slope %.4f", slope);
  return o;
}

Outcome ballwalk_statistics() {
  Outcome o;
  Rng rng(10);
  std::vector<audit::Check> checks;
  auto add = [&checks](const std::vector<audit::Check>& more) { checks.insert(checks.end(), more.begin(), more.end()); };

  const auto uniform2 = make_metropolis_ballwalk(density_preset("uniform", 0.0, 2), {0.6, 2});
  std::vector<std::pair<audit::Rect, audit::Rect>> pairs{
      {{{-1, -1}, {0, 0}}, {{0, 0}, {1, 1}}},
      {{{-0.5, -0.5}, {0, 0.5}}, {{0, -0.5}, {0.5, 0.5}}},
      {{{-1, 0.2}, {1, 1}}, {{-1, -1}, {1, -0.2}}},
      {{{-0.3, -0.3}, {0.3, 0.3}}, {{0.3, -1}, {1, 1}}},
  };
  add(audit::detailed_balance(uniform2, pairs, 100000, rng));
  const auto tilted1 = make_metropolis_ballwalk(density_preset("exp-linear", 1.0, 1), {0.7, 1});
  add(audit::detailed_balance(tilted1, {{{{-1}, {-0.3}}, {{-0.3}, {0.4}}}, {{{-0.2}, {0.2}}, {{0.5}, {1}}}}, 100000, rng));

  std::vector<std::vector<double>> corners;
  for (int k = 1; k < 10; ++k) corners.push_back({-1.0 + 0.2 * k});
  auto mass1 = [](const std::vector<double>& c) { return oracle::exp_linear_cdf(c[0], 1.0); };
  for (std::size_t steps : {1, 10}) add(audit::stationarity(tilted1, corners, mass1, steps, 20000, rng));
  const auto tilted2 = make_metropolis_ballwalk(density_preset("exp-linear", 1.0, 2), {0.5, 2});
  std::vector<std::vector<double>> corners2{{0.0, 0.0}, {-0.3, 0.5}, {0.5, -0.2}, {0.8, 0.8}};
  auto mass2 = [](const std::vector<double>& c) { return oracle::disc_exp_linear_mass(c[0], c[1], 1.0); };
  for (std::size_t steps : {1, 10}) add(audit::stationarity(tilted2, corners2, mass2, steps, 20000, rng));

  add(audit::update_law_1d(0.3, 0.7, 1.0, 10000, rng));
  add(audit::update_law_1d(-0.9, 2.0, 0.0, 10000, rng));
  add(audit::update_law_1d(0.95, 0.2, 3.0, 10000, rng));
  for (std::size_t d : {2, 3}) {
    add(audit::update_law_vs_reference(Point(d, 0.2), {0.6, d}, density_preset("exp-linear", 1.0, d), 10000, rng));
  }

  std::size_t failed = 0;
  double worst = 0.0;
  for (const auto& c : checks) {
    if (!c.pass()) ++failed;
    if (c.sigma > 0) worst = std::max(worst, std::abs(c.observed - c.expected) / c.sigma);
  }
  note(o, failed == 0, "%zu/%zu checks beyond 4 sigma, largest z %.2f", failed, checks.size(), worst);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"A1 formula golden values", golden_values},
      {"A2 exact discrepancy oracle", exact_oracle},
      {"A3 cover soundness", cover_soundness},
      {"A4 direct-simulation identity", direct_identity},
      {"A5 lazy-direct pull-back audit", lazy_audit},
      {"A6 Hoeffding empirical dominance", hoeffding_dominance},
      {"A7 existence realized by best-of-k", existence_realized},
      {"A8 Koksma-Hlawka audit", koksma_hlawka},
      {"A9 inversion pipeline", inversion_pipeline},
      {"A10 ball-walk reversibility and law suite", ballwalk_statistics},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s (%.1fs): %s\n", out.pass ? "PASS" : "FAIL", c.name, secs, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
