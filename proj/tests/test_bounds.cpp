#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "mcqmc/ballwalk.hpp"
#include "mcqmc/bounds.hpp"
#include "mcqmc/chain.hpp"
#include "mcqmc/discrepancy.hpp"
#include "mcqmc/error.hpp"
#include "mcqmc/lowdisc.hpp"

using namespace mcqmc;
using namespace mcqmc::bounds;

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

}  // namespace

TEST_CASE("Hoeffding tail") {
  BoundInputs in;
  in.c = 0.1;
  in.n = 1000;
  CHECK(rel_close(hoeffding_tail(in).value, 2.0 * std::exp(-10.0), 1e-9));
  in.lambda0 = 0.5;
  CHECK(rel_close(hoeffding_tail(in).value, 2.0 * std::exp(-10.0 / 3.0), 1e-9));
  in.lambda0 = 0.0;
  in.c = 50.0;
  CHECK(hoeffding_tail(in).value < 1e-300);
}

TEST_CASE("main discrepancy bound") {
  BoundInputs in;
  in.cover_size = 2;
  in.n = 100;
  in.delta = 0.01;
  const double direct = std::sqrt(2.0 * std::log(4.0)) / 10.0 + 0.01;
  CHECK(rel_close(main_discrepancy_bound(in).value, direct, 1e-12));
  CHECK(std::abs(main_discrepancy_bound(in).value - 0.17652) < 1e-4);

  BoundInputs base = in;
  base.delta = 0.0;
  BoundInputs gapped = base;
  gapped.lambda0 = 0.6;
  CHECK(rel_close(main_discrepancy_bound(gapped).value, 2.0 * main_discrepancy_bound(base).value, 1e-12));

  in.n = 1e12;
  CHECK(main_discrepancy_bound(in).value - 0.01 < 1e-5);
}

TEST_CASE("corollary bound") {
  BoundInputs in;
  in.n = 16;
  const double golden = std::sqrt(2.0) * std::sqrt(std::log(16.0) + 3.0 * std::log(5.0)) / 4.0 + 1.0;
  CHECK(rel_close(corollary_main_bound(in).value, golden, 1e-12));
  CHECK(std::abs(corollary_main_bound(in).value - 1.9747) < 1e-4);
  CHECK(corollary_main_bound(in).vacuous);
  CHECK(corollary_main_bound(in).reported() == 1.0);

  double prev = corollary_main_bound(in).value;
  for (double n = 17; n < 5000; n *= 1.1) {
    in.n = std::floor(n);
    const double v = corollary_main_bound(in).value;
    CHECK(v < prev);
    prev = v;
  }
  in.n = 100;
  in.lambda0 = 1.0 - 1e-12;
  CHECK(corollary_main_bound(in).value > 1e5);
  in.n = 15;
  CHECK_THROWS_AS(corollary_main_bound(in), PreconditionError);
}

TEST_CASE("main bound with cover_size_bound dominates the corollary") {
  for (double d : {1.0, 2.0, 3.0}) {
    for (double n = 16; n <= 4096; n *= 2) {
      for (double lambda0 : {0.0, 0.5}) {
        for (double norm : {1.0, std::exp(1.0)}) {
          BoundInputs in;
          in.n = n;
          in.d = d;
          in.lambda0 = lambda0;
          in.nu_norm = norm;
          in.delta = std::min(1.0, 8.0 / std::pow(n, 0.75));
          in.cover_size = cover_size_bound(in.delta, d, 0.25);
          CHECK(main_discrepancy_bound(in).value >= corollary_main_bound(in).value);
        }
      }
    }
  }
}

TEST_CASE("total variation bounds") {
  BoundInputs in;
  in.lambda0 = 0.5;
  in.n = 4;
  in.nu_norm_centered = 1;
  CHECK(tv_average_bound(in).value == 0.46875);
  in.lambda0 = 0.0;
  CHECK(tv_average_bound(in).value == 0.25);
  in.nu_norm_centered = 0.0;
  CHECK(tv_average_bound(in).value == 0.0);

  BoundInputs s;
  s.beta = 0.5;
  s.n = 3;
  s.nu_norm_centered = 2;
  CHECK(spectral_tv_bound(s).value == 0.25);
  s.n = 0;
  CHECK(spectral_tv_bound(s).value == 2.0);
  s.nu_norm_centered = 0;
  CHECK(spectral_tv_bound(s).value == 0.0);
}

TEST_CASE("burn-in bounds") {
  BoundInputs in;
  in.beta = 0.5;
  in.lambda0 = 0.5;
  in.n0 = 10;
  in.nu_norm_centered = 1;
  in.cover_size = 2;
  in.n = 100;
  in.delta = 0.0;
  const auto b = burn_in_bound(in);
  const double b10 = std::pow(0.5, 10.0);
  const double simplified =
      4.0 * std::sqrt(std::log(4.0 * (1.0 + b10))) / std::sqrt(50.0) + 2.0 * b10 / 50.0;
  CHECK(rel_close(b.simplified.value, simplified, 1e-12));
  CHECK(b.mixed.value <= b.simplified.value);

  in.n0 = 1e6;
  CHECK(rel_close(burn_in_bound(in).simplified.value, 4.0 * std::sqrt(std::log(4.0)) / std::sqrt(50.0), 1e-12));
  in.beta = 1.0;
  CHECK_THROWS_AS(burn_in_bound(in), PreconditionError);
}

TEST_CASE("Beck bound") {
  CHECK(beck_bound(1024, 1).value == 8.859375);
  CHECK(beck_bound(1, 1).value == 252.0);
  CHECK(beck_bound(7, 3).value > 0.0);
}

TEST_CASE("ball walk gap and error bound") {
  const auto g1 = ballwalk_gap_bound(1.0, 1);
  CHECK(std::abs(g1.gamma_star - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(g1.gap - 7.8125e-7) < 1e-12);
  CHECK(ballwalk_gap_bound(1.0, 3).gamma_star == 0.5);
  const auto big = ballwalk_gap_bound(1e9, 2);
  CHECK(big.gamma_star <= 1e-9);
  CHECK(big.gap < 1e-14);
  CHECK(big.gap < ballwalk_gap_bound(1e3, 2).gap);

  const double golden = 5000.0 * std::sqrt(2.0) * std::sqrt(1.0 + std::log(16.0) + 3.0 * std::log(5.0)) / 4.0 + 1.0;
  CHECK(rel_close(ballwalk_error_bound(1.0, 1, 16).value, golden, 1e-12));
  CHECK(ballwalk_error_bound(1.0, 1, 1e6).value < ballwalk_error_bound(1.0, 1, 1e4).value);
  for (std::size_t d : {1, 2, 4}) {
    // Doubling d multiplies the bound by at most (2d)^3 at fixed n.
    const double ratio = ballwalk_error_bound(1.0, 2 * d, 1e8).value / ballwalk_error_bound(1.0, d, 1e8).value;
    CHECK(ratio < std::pow(2.0 * d, 3.0));
  }
}

TEST_CASE("cover constants") {
  // C_{1/4,d} = sqrt(2) ((6d + 2) / (e log 2))^((3d + 1) / 2).
  for (double d : {1.0, 2.0, 3.0}) {
    const double alt = std::sqrt(2.0) * std::pow((6 * d + 2) / (std::numbers::e * std::log(2.0)), (3 * d + 1) / 2);
    CHECK(rel_close(cover_constant(0.25, d), alt, 1e-12));
  }
  CHECK(std::abs(cover_constant(0.25, 1) - 25.496) < 1e-3);
  CHECK(cover_size_bound(1.0, 1.0, 0.25) == 192.0);
  for (double delta = 1.0; delta > 1e-4; delta /= 2) CHECK(cover_size_bound(delta / 2, 2, 0.25) >= cover_size_bound(delta, 2, 0.25));
}

TEST_CASE("main bound holds for lazy-direct drivers in at least 99% of trials") {
  auto pi = std::make_shared<const TargetMeasure>(Domain::unit_ball(1), density_preset("exp-linear", 1.0, 1));
  const auto sys = make_lazy_direct_kernel(pi, 0.5);
  const std::size_t n = 128;
  const auto cover = build_quantile_cover(*pi, 0.05);
  BoundInputs in;
  in.n = n;
  in.lambda0 = sys.lambda0;
  in.nu_norm = sys.nu_density_norm;
  in.cover_size = static_cast<double>(cover.size());
  in.delta = cover.achieved_delta();
  const double bound = main_discrepancy_bound(in).value;
  Rng rng(31);
  int below = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto path = run_chain(sys, uniform_driver(n, sys.step_dimension(), rng));
    if (star_discrepancy_exact(path.retained(), *pi).upper <= bound) ++below;
  }
  CHECK(below >= 990);
}
