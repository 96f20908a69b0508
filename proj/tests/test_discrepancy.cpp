#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "mcqmc/ballwalk.hpp"
#include "mcqmc/bounds.hpp"
#include "mcqmc/chain.hpp"
#include "mcqmc/discrepancy.hpp"
#include "mcqmc/error.hpp"
#include "mcqmc/lowdisc.hpp"
#include "oracles.hpp"

using namespace mcqmc;

namespace {

TargetPtr ball(std::size_t d, double alpha) {
  return std::make_shared<const TargetMeasure>(
      Domain::unit_ball(d), density_preset(alpha == 0.0 ? "uniform" : "exp-linear", alpha, d));
}

std::vector<Point> random_points(std::size_t n, std::size_t d, Rng& rng) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(sample_uniform_ball(d, rng));
  return pts;
}

std::vector<double> column(const std::vector<Point>& pts) {
  std::vector<double> xs;
  for (const auto& p : pts) xs.push_back(p[0]);
  return xs;
}

}  // namespace

TEST_CASE("exact scan on the unit interval") {
  TargetMeasure unit(Domain::box({0.0}, {1.0}), LogDensity::uniform());
  const std::vector<Point> one{{0.5}};
  CHECK(star_discrepancy_exact(one, unit).upper == doctest::Approx(0.5).epsilon(1e-12));
  const std::vector<Point> mid{{0.125}, {0.375}, {0.625}, {0.875}};
  const auto r = star_discrepancy_exact(mid, unit);
  CHECK(std::abs(r.lower - 0.125) < 1e-12);
  CHECK(std::abs(r.upper - 0.125) < 1e-12);
  CHECK(r.method == DiscrepancyMethod::ExactScan);
}

TEST_CASE("exact scan handles clustered points") {
  for (std::size_t d : {1, 2, 3}) {
    const auto pi = ball(d, 0.0);
    std::vector<Point> pts(10, Point(d, 0.0));
    pts[0][0] = -1.0;
    for (auto& p : pts) p = pts[0];
    const auto r = star_discrepancy_exact(pts, *pi);
    CHECK(r.upper <= 1.0);
    CHECK(r.lower >= 1.0 - 1e-6 - r.quadrature_error);
  }
  std::vector<Point> far(4, Point(4, 0.0));
  CHECK_THROWS_AS(star_discrepancy_exact(far, *ball(4, 0.0)), InfeasibleError);
}

TEST_CASE("exact scan matches the sorted-CDF formula in d = 1") {
  const auto pi = ball(1, 1.0);
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto pts = random_points(1 + rng.next_u64() % 60, 1, rng);
    const double ref = oracle::star_discrepancy_1d(column(pts), [](double x) { return oracle::exp_linear_cdf(x, 1.0); });
    const auto r = star_discrepancy_exact(pts, *pi);
    REQUIRE(std::abs(r.upper - ref) < 1e-9);
    REQUIRE(r.lower <= r.upper);
  }
}

TEST_CASE("exact scan matches brute force in d = 2") {
  const auto pi = ball(2, 1.0);
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto pts = random_points(12, 2, rng);
    const double ref = oracle::star_discrepancy_2d(
        pts, [](double a, double b) { return oracle::disc_exp_linear_mass(a, b, 1.0); });
    const auto r = star_discrepancy_exact(pts, *pi);
    CHECK(std::abs(r.upper - ref) < 1e-7);
  }
}

TEST_CASE("quantile cover on the unit interval") {
  TargetMeasure unit(Domain::box({0.0}, {1.0}), LogDensity::uniform());
  const auto cover = build_quantile_cover(unit, 0.25);
  REQUIRE(cover.axis(0).size() == 5);
  CHECK(cover.axis(0)[1] == doctest::Approx(0.25));
  CHECK(cover.axis(0)[2] == doctest::Approx(0.5));
  CHECK(cover.axis(0)[3] == doctest::Approx(0.75));
  CHECK(cover.size() == 5);
  CHECK(cover.mass(cover.empty_member()).mass == 0.0);
  CHECK(cover.mass(cover.full_member()).mass == 1.0);
  CHECK(cover.achieved_delta() <= 0.25 + 1e-9);
  CHECK_THROWS_AS(build_quantile_cover(unit, 0.0), PreconditionError);
  CHECK_NOTHROW(build_quantile_cover(unit, 1.0));
}

TEST_CASE("cover brackets are valid") {
  for (std::size_t d : {1, 2}) {
    for (double alpha : {0.0, 1.0}) {
      const auto pi = ball(d, alpha);
      const auto cover = build_quantile_cover(*pi, 0.05);
      Rng rng(7 + d);
      for (int t = 0; t < 300; ++t) {
        AnchoredBox a{Point(d)};
        for (auto& c : a.corner) c = -1.2 + 2.4 * rng.uniform();
        if (t % 17 == 0) a.corner[0] = kInf;
        const auto [inner, outer] = cover.bracket(a);
        const auto c = cover.member(inner), dd = cover.member(outer);
        // A corner at or below the domain gives the empty set, contained in anything.
        bool a_empty = false;
        for (std::size_t j = 0; j < d; ++j) a_empty = a_empty || a.corner[j] <= -1.0;
        for (std::size_t j = 0; j < d; ++j) {
          if (!a_empty) REQUIRE(c.corner[j] <= a.corner[j]);
          REQUIRE(a.corner[j] <= dd.corner[j]);
        }
        double gap;
        if (d == 1) {
          gap = oracle::exp_linear_cdf(dd.corner[0], alpha) - oracle::exp_linear_cdf(c.corner[0], alpha);
        } else {
          gap = oracle::disc_exp_linear_mass(dd.corner[0], dd.corner[1], alpha) -
                oracle::disc_exp_linear_mass(c.corner[0], c.corner[1], alpha);
        }
        REQUIRE(gap <= 0.05 + 1e-8);
      }
    }
  }
}

TEST_CASE("bracket agrees with the exact scan") {
  TargetMeasure unit(Domain::box({0.0}, {1.0}), LogDensity::uniform());
  const std::vector<Point> mid{{0.125}, {0.375}, {0.625}, {0.875}};
  const auto fine = build_quantile_cover(unit, 0.01);
  const auto r = star_discrepancy_bracket(mid, unit, fine);
  CHECK(r.lower >= 0.115);
  CHECK(r.lower <= 0.125 + 1e-12);
  CHECK(r.upper <= 0.135 + 1e-9);

  const auto coarse = trivial_cover(unit);
  CHECK(coarse.size() == 2);
  const auto t = star_discrepancy_bracket(mid, unit, coarse);
  CHECK(t.lower == 0.0);
  CHECK(t.upper == 1.0);

  for (std::size_t d : {1, 2}) {
    const auto pi = ball(d, 1.0);
    const auto cover = build_quantile_cover(*pi, 0.05);
    Rng rng(11);
    for (int k = 0; k < 30; ++k) {
      const auto pts = random_points(40, d, rng);
      const auto exact = star_discrepancy_exact(pts, *pi);
      const auto br = star_discrepancy_bracket(pts, *pi, cover);
      CHECK(br.lower <= exact.upper + 1e-12);
      CHECK(exact.lower <= br.upper + 1e-12);
    }
  }
}

TEST_CASE("pull-back of the direct kernel with nu = pi is the star discrepancy") {
  const auto pi = ball(1, 0.0);
  const auto sys = make_direct_kernel(pi);
  const auto cover = build_quantile_cover(*pi, 0.01);
  Rng rng(13);
  for (int t = 0; t < 5; ++t) {
    const auto driver = uniform_driver(64, 1, rng);
    const auto pb = pullback_discrepancy_mc(sys, driver, 0, cover, 0, rng);
    CHECK(pb.mc_stderr == 0.0);
    CHECK(pb.marginal_slack == 0.0);
    const auto star = star_discrepancy_exact(run_chain(sys, driver).retained(), *pi);
    CHECK(std::abs(pb.lower - star.upper) <= 0.01 + 1e-9);
    CHECK(pb.lower <= star.upper + 1e-9);
    CHECK(star.upper <= pb.upper + 1e-9);
  }
}

TEST_CASE("Monte Carlo pull-back tracks the exact-marginal route") {
  auto pi = ball(1, 1.0);
  auto nu = ball(1, 0.0);
  auto sys = make_lazy_direct_kernel(pi, 0.5, nu);
  auto mc_sys = sys;
  mc_sys.exact_marginals.reset();
  const auto cover = build_quantile_cover(*pi, 0.05);
  Rng rng(17);
  const auto driver = uniform_driver(64, sys.step_dimension(), rng);
  const auto exact = pullback_discrepancy_mc(sys, driver, 0, cover, 0, rng);
  const auto mc = pullback_discrepancy_mc(mc_sys, driver, 0, cover, 2000, rng);
  CHECK(mc.mc_stderr > 0.0);
  CHECK(std::abs(mc.lower - exact.lower) <= 5.0 * mc.mc_stderr);
  CHECK_THROWS_AS(pullback_discrepancy_mc(mc_sys, driver, 0, cover, 10, rng), PreconditionError);
}

TEST_CASE("burn-in pull-back approaches the retained star discrepancy") {
  auto pi = ball(1, 1.0);
  auto nu = ball(1, 0.0);
  const auto sys = make_lazy_direct_kernel(pi, 0.5, nu);
  const auto cover = build_quantile_cover(*pi, 0.01);
  Rng rng(19);
  const std::size_t n0 = 30, n = 64;
  const auto driver = uniform_driver(n0 + n, sys.step_dimension(), rng);
  const auto pb = pullback_discrepancy_mc(sys, driver, n0, cover, 0, rng);
  const auto star = star_discrepancy_exact(run_chain(sys, driver, n0).retained(), *pi);
  bounds::BoundInputs in;
  in.n = n;
  in.lambda0 = 0.5;
  in.nu_norm_centered = std::pow(0.5, static_cast<double>(n0)) * sys.nu_density_norm_centered;
  CHECK(std::abs(pb.lower - star.upper) <= bounds::tv_average_bound(in).value + 0.01 + 1e-9);
  CHECK(pb.marginal_slack < 1e-9);
}

TEST_CASE("Koksma-Hlawka inequality") {
  const auto pi = ball(1, 1.0);
  Rng rng(23);
  const auto pts = random_points(30, 1, rng);
  H1Function constant{2.5, {}};
  const auto c = kh_error_bound(constant, pts, *pi);
  CHECK(c.exact_error < 1e-12);

  H1Function single{0.0, {{{0.3}, 1.0}}};
  const auto s = kh_error_bound(single, pts, *pi);
  CHECK(std::abs(s.exact_error - std::abs(local_discrepancy(pts, *pi, AnchoredBox{{0.3}}).mass)) < 1e-9);
  CHECK(s.holds());

  for (int t = 0; t < 100; ++t) {
    H1Function f{rng.uniform() - 0.5, {}};
    const std::size_t atoms = 1 + rng.next_u64() % 6;
    for (std::size_t j = 0; j < atoms; ++j) f.atoms.push_back({{-1.2 + 2.4 * rng.uniform()}, 4 * rng.uniform() - 2});
    const auto sample = random_points(5 + rng.next_u64() % 50, 1, rng);
    REQUIRE(kh_error_bound(f, sample, *pi).holds());
  }
}

TEST_CASE("weighted discrepancy and H_q norms") {
  const auto pi = ball(1, 0.0);
  const std::vector<Point> pts{{-0.5}, {0.5}};
  const std::vector<WeightAtom> atoms{{{0.0}, 0.5}, {{0.6}, 0.5}};
  // Local discrepancies: at 0: 1/2 - 1/2 = 0; at 0.6: 1 - 0.8 = 0.2.
  CHECK(weighted_star_discrepancy(pts, *pi, atoms, 1.0) == doctest::Approx(0.1));
  CHECK(weighted_star_discrepancy(pts, *pi, atoms, 2.0) == doctest::Approx(std::sqrt(0.02)));
  CHECK(weighted_star_discrepancy(pts, *pi, atoms, kInf) == doctest::Approx(0.2));

  AtomicHqFunction f{1.0, atoms, {2.0, -4.0}};
  CHECK(f.norm(1.0) == doctest::Approx(1.0 + 1.0 + 2.0));
  CHECK(f.norm(kInf) == doctest::Approx(4.0));
  const auto h1 = f.as_h1();
  CHECK(h1.norm() == doctest::Approx(f.norm(1.0)));
  CHECK(h1(std::vector<double>{-0.2}) == doctest::Approx(1.0 + 1.0 - 2.0));
}
