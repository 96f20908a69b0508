#include "mcqmc/chain.hpp"

#include <algorithm>
#include <cmath>

#include "mcqmc/ballwalk.hpp"
#include "mcqmc/error.hpp"
#include "mcqmc/lowdisc.hpp"

namespace mcqmc {

MassEstimate MixtureMarginals::marginal(std::size_t i, const AnchoredBox& box,
                                        const TargetMeasure& pi) const {
  const double w = nu_weight(i);
  const auto p = pi.box_mass(box);
  if (w == 0.0) return p;
  const auto q = initial->box_mass(box);
  return {w * q.mass + (1.0 - w) * p.mass, w * q.error + (1.0 - w) * p.error};
}

void ChainSystem::validate() const {
  if (!target) throw PreconditionError("chain system has no target");
  if (!update.map || !generator.map) throw PreconditionError("chain system lacks update or generator");
  if (update.s != generator.s_init)
    throw PreconditionError("generator and update must consume the same driver dimension");
  if (!(lambda0 >= 0.0 && lambda0 <= 1.0)) throw PreconditionError("lambda0 must lie in [0,1]");
  if (beta && !(*beta >= lambda0 && *beta <= 1.0))
    throw PreconditionError("beta must satisfy lambda0 <= beta <= 1");
}

ChainPath run_chain(const ChainSystem& system, const DriverSequence& driver, std::size_t burn_in) {
  if (driver.step_dimension() != system.update.s)
    throw PreconditionError("driver dimension " + std::to_string(driver.step_dimension()) +
                            " does not match update dimension " + std::to_string(system.update.s));
  if (driver.size() < burn_in + 1) throw PreconditionError("driver shorter than burn-in + 1");
  const Domain& domain = system.target->domain();

  ChainPath path{{}, burn_in, driver};
  path.states.reserve(driver.size());
  path.states.push_back(system.generator.map(driver[0]));
  if (!domain.contains(path.states.back())) throw ChainError("generator produced a state outside G");
  for (std::size_t i = 1; i < driver.size(); ++i) {
    path.states.push_back(system.update.map(path.states.back(), driver[i]));
    if (!domain.contains(path.states.back()))
      throw ChainError("update left G at step " + std::to_string(i));
  }
  return path;
}

GeneratorFunction target_generator(const TargetPtr& target) {
  const std::size_t d = target->dimension();
  GeneratorFunction g;
  if (d == 1) {
    g.s_init = 1;
    g.map = [target](std::span<const double> u) { return Point{target->quantile(u[0])}; };
    g.inverse = [target](const Point& x) { return std::vector<double>{target->cdf(x[0]).mass}; };
    return g;
  }
  if (!target->density().constant)
    throw PreconditionError("no generator for non-uniform targets in d >= 2");
  g.s_init = d;
  if (target->domain().kind() == DomainKind::Ball) {
    g.map = [d](std::span<const double> u) { return ball_generator(u.first(d), 1.0); };
    if (d <= 3) g.inverse = [](const Point& x) { return ball_generator_inverse(x, 1.0); };
  } else {
    g.map = [target, d](std::span<const double> u) {
      Point x(d);
      const Domain& dom = target->domain();
      for (std::size_t j = 0; j < d; ++j) x[j] = dom.lower(j) + (dom.upper(j) - dom.lower(j)) * u[j];
      return x;
    };
    g.inverse = [target, d](const Point& x) {
      std::vector<double> u(d);
      const Domain& dom = target->domain();
      for (std::size_t j = 0; j < d; ++j)
        u[j] = std::clamp((x[j] - dom.lower(j)) / (dom.upper(j) - dom.lower(j)), 0.0, 1.0);
      return u;
    };
  }
  return g;
}

Point rejection_sample(const TargetMeasure& target, Rng& rng) {
  const Domain& dom = target.domain();
  const std::size_t d = dom.dimension();
  const double log_cap = target.log_density_bound();
  Point x(d);
  for (;;) {
    for (std::size_t j = 0; j < d; ++j) x[j] = dom.lower(j) + (dom.upper(j) - dom.lower(j)) * rng.uniform();
    if (!dom.contains(x)) continue;
    const double log_ratio = target.density().log_rho(x) - target.log_offset() - log_cap;
    if (std::log(1.0 - rng.uniform()) <= log_ratio) return x;
  }
}

DensityNorms density_ratio_norms(const TargetMeasure& nu, const TargetMeasure& pi) {
  if (nu.dimension() != pi.dimension()) throw PreconditionError("measures differ in dimension");
  // ||dnu/dpi||_2^2 = int p_nu^2 / p_pi, written as the normalizer of a
  // third measure with log density 2 log rho_nu - log rho_pi.
  const auto& lnu = nu.density().log_rho;
  const auto& lpi = pi.density().log_rho;
  LogDensity ratio{"ratio",
                   [lnu, lpi](std::span<const double> x) { return 2.0 * lnu(x) - lpi(x); },
                   2.0 * nu.density().alpha + pi.density().alpha, ConcavityWitness::Asserted,
                   nu.density().constant && pi.density().constant};
  const TargetMeasure squared(nu.domain(), ratio);
  const double log_sq = std::log(squared.normalizer().value) + squared.log_offset() -
                        2.0 * (std::log(nu.normalizer().value) + nu.log_offset()) +
                        std::log(pi.normalizer().value) + pi.log_offset();
  const double sq = std::exp(log_sq);
  return {std::sqrt(sq), std::sqrt(std::max(0.0, sq - 1.0))};
}

namespace {

void attach_initial(ChainSystem& sys, const TargetPtr& target, const TargetPtr& initial,
                    std::size_t s, std::size_t s_pi) {
  const TargetPtr nu = initial ? initial : target;
  if (nu->dimension() != target->dimension())
    throw PreconditionError("initial distribution dimension does not match target");
  const auto nu_gen = target_generator(nu);
  sys.generator.s_init = s;
  sys.generator.map = [map = nu_gen.map, s_pi](std::span<const double> u) { return map(u.first(s_pi)); };
  if (nu_gen.inverse) {
    sys.generator.inverse = [inv = nu_gen.inverse, s](const Point& x) {
      auto u = inv(x);
      u.resize(s, 0.0);
      return u;
    };
  }
  if (nu == target) {
    sys.nu_density_norm = 1.0;
    sys.nu_density_norm_centered = 0.0;
  } else {
    const auto norms = density_ratio_norms(*nu, *target);
    sys.nu_density_norm = norms.norm;
    sys.nu_density_norm_centered = norms.centered;
  }
  sys.reference.initial = [nu](Rng& rng) { return rejection_sample(*nu, rng); };
}

}  // namespace

ChainSystem make_direct_kernel(TargetPtr target, TargetPtr initial) {
  if (!target) throw PreconditionError("direct kernel needs a target");
  const auto pi_gen = target_generator(target);
  const std::size_t s = pi_gen.s_init;

  ChainSystem sys;
  sys.name = "direct";
  sys.target = target;
  sys.update.s = s;
  sys.update.map = [map = pi_gen.map](const Point&, std::span<const double> u) { return map(u); };
  if (pi_gen.inverse) {
    sys.update.inverse = [inv = pi_gen.inverse](const Point&, const Point& y) { return inv(y); };
  }
  attach_initial(sys, target, initial, s, s);
  sys.lambda0 = 0.0;
  sys.beta = 0.0;
  sys.exact_marginals = MixtureMarginals{initial ? initial : target,
                                         [](std::size_t i) { return i == 0 ? 1.0 : 0.0; }};
  sys.reference.step = [target](const Point&, Rng& rng) { return rejection_sample(*target, rng); };
  return sys;
}

ChainSystem make_lazy_direct_kernel(TargetPtr target, double a, TargetPtr initial) {
  if (!target) throw PreconditionError("lazy direct kernel needs a target");
  if (!(a > 0.0 && a <= 1.0)) throw PreconditionError("lazy direct kernel needs a in (0,1]");
  const auto pi_gen = target_generator(target);
  const std::size_t s_pi = pi_gen.s_init;
  const std::size_t s = s_pi + 1;

  ChainSystem sys;
  sys.name = "lazy-direct";
  sys.target = target;
  sys.update.s = s;
  sys.update.map = [map = pi_gen.map, a, s_pi](const Point& x, std::span<const double> u) {
    return u[s_pi] < a ? map(u.first(s_pi)) : x;
  };
  if (pi_gen.inverse) {
    sys.update.inverse = [inv = pi_gen.inverse, s_pi](const Point& x, const Point& y) {
      if (x == y) {
        std::vector<double> u(s_pi, 0.0);
        u.push_back(1.0);
        return u;
      }
      auto u = inv(y);
      u.push_back(0.0);
      return u;
    };
  }
  attach_initial(sys, target, initial, s, s_pi);
  sys.lambda0 = 1.0 - a;
  sys.beta = 1.0 - a;
  const double hold = 1.0 - a;
  sys.exact_marginals = MixtureMarginals{initial ? initial : target, [hold](std::size_t i) {
                                           return std::pow(hold, static_cast<double>(i));
                                         }};
  sys.reference.step = [target, a](const Point& x, Rng& rng) {
    return rng.uniform() < a ? rejection_sample(*target, rng) : x;
  };
  return sys;
}

ExpectationComparison compare_expectation(
    const ChainSystem& system, const std::function<double(std::span<const Point>)>& F,
    std::size_t horizon, std::size_t m, Rng& rng) {
  if (horizon == 0 || m < 2) throw PreconditionError("compare_expectation needs horizon >= 1, m >= 2");
  const std::size_t s = system.step_dimension();
  Rng driver_stream = rng.split(1);
  Rng kernel_stream = rng.split(2);

  double sum_a = 0.0, sq_a = 0.0, sum_b = 0.0, sq_b = 0.0;
  std::vector<Point> states;
  for (std::size_t r = 0; r < m; ++r) {
    const auto driver = uniform_driver(horizon, s, driver_stream);
    const auto path = run_chain(system, driver, 0);
    const double fa = F(path.states);
    sum_a += fa;
    sq_a += fa * fa;

    states.clear();
    states.push_back(system.reference.initial(kernel_stream));
    for (std::size_t i = 1; i < horizon; ++i) states.push_back(system.reference.step(states.back(), kernel_stream));
    const double fb = F(states);
    sum_b += fb;
    sq_b += fb * fb;
  }
  const auto md = static_cast<double>(m);
  const double mean_a = sum_a / md;
  const double mean_b = sum_b / md;
  const double var_a = std::max(0.0, (sq_a - md * mean_a * mean_a) / (md - 1.0));
  const double var_b = std::max(0.0, (sq_b - md * mean_b * mean_b) / (md - 1.0));
  return {mean_a, mean_b, std::sqrt(var_a / md + var_b / md)};
}

}  // namespace mcqmc
