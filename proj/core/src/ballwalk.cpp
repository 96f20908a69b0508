#include "mcqmc/ballwalk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mcqmc/bounds.hpp"
#include "mcqmc/error.hpp"

namespace mcqmc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Integral of sin^m over [0, theta].
double sin_power_integral(std::size_t m, double theta) {
  if (m == 0) return theta;
  if (m == 1) return 1.0 - std::cos(theta);
  const auto mm = static_cast<double>(m);
  return -std::pow(std::sin(theta), mm - 1.0) * std::cos(theta) / mm +
         (mm - 1.0) / mm * sin_power_integral(m - 2, theta);
}

// Inverse of the CDF proportional to sin^m on [0, pi], by bisection.
double sin_power_quantile(std::size_t m, double p) {
  const double total = sin_power_integral(m, std::numbers::pi);
  double lo = 0.0;
  double hi = std::numbers::pi;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (sin_power_integral(m, mid) / total < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double angle_fraction(double x, double y) {
  double v = std::atan2(y, x) / kTwoPi;
  if (v < 0.0) v += 1.0;
  return v >= 1.0 ? 0.0 : v;
}

}  // namespace

Point sphere_generator(std::span<const double> v, std::size_t d) {
  if (d == 0) throw PreconditionError("sphere dimension must be >= 1");
  if (d == 1) {
    if (v.empty()) throw PreconditionError("S^0 generator reads one coordinate");
    return {v[0] < 0.5 ? -1.0 : 1.0};
  }
  if (v.size() < d - 1) throw PreconditionError("sphere generator needs d-1 coordinates");
  if (d == 2) {
    const double phi = kTwoPi * v[0];
    return {std::cos(phi), std::sin(phi)};
  }
  if (d == 3) {
    const double z = 1.0 - 2.0 * v[0];
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = kTwoPi * v[1];
    return {r * std::cos(phi), r * std::sin(phi), z};
  }
  // theta_k has density proportional to sin^{d-1-k}, k = 1..d-2; the last angle is uniform.
  Point x(d);
  double radius = 1.0;
  for (std::size_t k = 1; k + 1 < d; ++k) {
    const double theta = sin_power_quantile(d - 1 - k, v[k - 1]);
    x[k - 1] = radius * std::cos(theta);
    radius *= std::sin(theta);
  }
  const double phi = kTwoPi * v[d - 2];
  x[d - 2] = radius * std::cos(phi);
  x[d - 1] = radius * std::sin(phi);
  return x;
}

std::vector<double> sphere_generator_inverse(std::span<const double> unit) {
  switch (unit.size()) {
    case 1:
      return {unit[0] < 0.0 ? 0.0 : 1.0};
    case 2:
      return {angle_fraction(unit[0], unit[1])};
    case 3:
      return {std::clamp(0.5 * (1.0 - unit[2]), 0.0, 1.0), angle_fraction(unit[0], unit[1])};
    default:
      throw InfeasibleError("closed-form sphere inverse is implemented for d <= 3 only");
  }
}

Point ball_generator(std::span<const double> v, double gamma) {
  const std::size_t d = v.size();
  if (d == 0) throw PreconditionError("ball generator needs d >= 1 coordinates");
  if (d == 1) return {gamma * (2.0 * v[0] - 1.0)};
  const double radius = gamma * std::pow(v[d - 1], 1.0 / static_cast<double>(d));
  Point z = sphere_generator(v.first(d - 1), d);
  for (double& c : z) c *= radius;
  return z;
}

std::vector<double> ball_generator_inverse(std::span<const double> z, double gamma) {
  const std::size_t d = z.size();
  if (d > 3) throw InfeasibleError("ball generator inverse is implemented for d <= 3 only");
  if (d == 1) return {std::clamp(0.5 * (1.0 + z[0] / gamma), 0.0, 1.0)};
  const double r = norm(z);
  std::vector<double> v;
  if (r == 0.0) {
    v.assign(d - 1, 0.0);
  } else {
    std::vector<double> unit(z.begin(), z.end());
    for (double& c : unit) c /= r;
    v = sphere_generator_inverse(unit);
  }
  v.push_back(std::clamp(std::pow(r / gamma, static_cast<double>(d)), 0.0, 1.0));
  return v;
}

Point metropolis_update(const Point& x, std::span<const double> u, const BallWalkParams& params,
                        const LogDensity& density) {
  const std::size_t d = x.size();
  if (u.size() != d + 1) throw PreconditionError("Metropolis update needs d+1 driver coordinates");
  const Point z = ball_generator(u.first(d), params.gamma);
  Point y(d);
  double r2 = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    y[j] = x[j] + z[j];
    r2 += y[j] * y[j];
  }
  if (r2 > 1.0) return x;
  const double log_ratio = density.constant ? 0.0 : density.log_rho(y) - density.log_rho(x);
  if (log_ratio >= 0.0) return y;
  // v <= exp(log_ratio), evaluated without exponentiating large ratios.
  const double v = u[d];
  return (v == 0.0 || std::log(v) <= log_ratio) ? y : x;
}

std::vector<double> invert_update(const Point& x, const Point& y, const BallWalkParams& params,
                                  const LogDensity& density) {
  const std::size_t d = x.size();
  if (d > 3) throw InfeasibleError("update inversion is implemented for d <= 3 only");
  if (y.size() != d) throw PreconditionError("states must have equal dimension");
  std::vector<double> z(d);
  for (std::size_t j = 0; j < d; ++j) z[j] = y[j] - x[j];
  const double dist = norm(z);

  if (dist == 0.0) {
    // Propose the point at distance gamma straight outward; it leaves B_d.
    const double rx = norm(x);
    if (!(rx + params.gamma > 1.0))
      throw PreconditionError("stay branch needs ||x|| + gamma > 1 to propose outside the ball");
    std::vector<double> dir(d, 0.0);
    if (rx > 0.0) {
      for (std::size_t j = 0; j < d; ++j) dir[j] = x[j] / rx * params.gamma;
    } else {
      dir[0] = params.gamma;
    }
    auto u = ball_generator_inverse(dir, params.gamma);
    u.push_back(1.0);
    if (metropolis_update(x, u, params, density) != x)
      throw PreconditionError("could not construct a rejecting driver point");
    return u;
  }

  if (dist > params.gamma * (1.0 + 1e-15))
    throw PreconditionError("target farther than the proposal radius gamma");

  auto u = ball_generator_inverse(z, params.gamma);
  u.push_back(0.0);
  // Rounding can land x + z a hair outside B_d when y sits on the sphere;
  // shrink the radius coordinate until the proposal is accepted.
  for (int attempt = 0; attempt < 16; ++attempt) {
    const Point got = metropolis_update(x, u, params, density);
    double dev = 0.0;
    for (std::size_t j = 0; j < d; ++j) dev = std::max(dev, std::abs(got[j] - y[j]));
    if (dev <= 1e-9) return u;
    u[d - 1] = std::max(0.0, u[d - 1] * (1.0 - 4e-16 * (1 << attempt)));
  }
  throw PreconditionError("update inversion did not round-trip");
}

LogDensity density_preset(std::string_view name, double alpha, std::size_t d) {
  if (d == 0) throw PreconditionError("dimension must be >= 1");
  if (name == "uniform") return LogDensity::uniform();
  if (name == "exp-linear") {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw PreconditionError("alpha must be finite and >= 0");
    return LogDensity{"exp-linear",
                      [alpha](std::span<const double> x) { return alpha * x[0]; },
                      alpha, ConcavityWitness::Affine, alpha == 0.0};
  }
  throw PreconditionError("unknown density preset '" + std::string(name) + "'");
}

Point sample_uniform_ball(std::size_t d, Rng& rng) {
  if (d == 1) return {2.0 * rng.uniform() - 1.0};
  Point x(d);
  double r = 0.0;
  do {
    r = 0.0;
    for (auto& c : x) {
      c = rng.normal();
      r += c * c;
    }
  } while (r == 0.0);
  const double scale = std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) / std::sqrt(r);
  for (auto& c : x) c *= scale;
  return x;
}

DensityAudit audit_density(const LogDensity& density, std::size_t d, std::size_t pairs, Rng& rng) {
  DensityAudit audit;
  audit.pairs = pairs;
  for (std::size_t k = 0; k < pairs; ++k) {
    const Point x = sample_uniform_ball(d, rng);
    const Point y = sample_uniform_ball(d, rng);
    Point mid(d);
    double dist = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      mid[j] = 0.5 * (x[j] + y[j]);
      dist += (x[j] - y[j]) * (x[j] - y[j]);
    }
    dist = std::sqrt(dist);
    const double lx = density.log_rho(x);
    const double ly = density.log_rho(y);
    const double lm = density.log_rho(mid);
    const double slack = 1e-12 * (1.0 + std::abs(lx) + std::abs(ly));
    const double lip_excess = std::abs(lx - ly) - density.alpha * dist;
    if (lip_excess > slack) ++audit.lipschitz_failures;
    audit.worst_lipschitz_excess = std::max(audit.worst_lipschitz_excess, lip_excess);
    const double concave_excess = 0.5 * (lx + ly) - lm;
    if (concave_excess > slack) ++audit.concavity_failures;
    audit.worst_concavity_excess = std::max(audit.worst_concavity_excess, concave_excess);
  }
  return audit;
}

Point reference_metropolis_step(const Point& x, const BallWalkParams& params,
                                const LogDensity& density, Rng& rng) {
  const std::size_t d = x.size();
  Point z = sample_uniform_ball(d, rng);
  Point y(d);
  for (std::size_t j = 0; j < d; ++j) y[j] = x[j] + params.gamma * z[j];
  double r2 = 0.0;
  for (double c : y) r2 += c * c;
  if (r2 > 1.0) return x;
  const double ratio = std::exp(density.log_rho(y) - density.log_rho(x));
  return rng.uniform() < std::min(1.0, ratio) ? y : x;
}

ChainSystem make_metropolis_ballwalk(const LogDensity& density, const BallWalkParams& params) {
  const std::size_t d = params.d;
  if (d == 0) throw PreconditionError("dimension must be >= 1");
  if (!(params.gamma > 0.0) || !std::isfinite(params.gamma))
    throw PreconditionError("ball-walk radius gamma must be positive");

  ChainSystem sys;
  sys.name = "metropolis-ballwalk";
  auto target = std::make_shared<const TargetMeasure>(Domain::unit_ball(d), density);
  sys.target = target;

  sys.generator.s_init = d + 1;
  sys.generator.map = [d](std::span<const double> u) { return ball_generator(u.first(d), 1.0); };
  if (d <= 3) {
    sys.generator.inverse = [](const Point& x) {
      auto u = ball_generator_inverse(x, 1.0);
      u.push_back(0.0);
      return u;
    };
  }

  sys.update.s = d + 1;
  sys.update.map = [params, density](const Point& x, std::span<const double> u) {
    return metropolis_update(x, u, params, density);
  };
  if (d <= 3) {
    sys.update.inverse = [params, density](const Point& x, const Point& y) {
      return invert_update(x, y, params, density);
    };
  }

  const auto gap = bounds::ballwalk_gap_bound(density.alpha, d);
  sys.lambda0 = std::abs(params.gamma - gap.gamma_star) <= 1e-12 * gap.gamma_star ? 1.0 - gap.gap : 1.0;

  if (density.constant) {
    sys.nu_density_norm = 1.0;
    sys.nu_density_norm_centered = 0.0;
  } else {
    const TargetMeasure nu(Domain::unit_ball(d), LogDensity::uniform());
    const auto norms = density_ratio_norms(nu, *target);
    sys.nu_density_norm = norms.norm;
    sys.nu_density_norm_centered = norms.centered;
  }

  sys.reference.initial = [d](Rng& rng) { return sample_uniform_ball(d, rng); };
  sys.reference.step = [params, density](const Point& x, Rng& rng) {
    return reference_metropolis_step(x, params, density, rng);
  };
  return sys;
}

}  // namespace mcqmc
