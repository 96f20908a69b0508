#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mcqmc/chain.hpp"
#include "mcqmc/measure.hpp"
#include "mcqmc/rng.hpp"

namespace mcqmc {

// Metropolis algorithm with ball-walk proposal on the Euclidean unit ball B_d.
struct BallWalkParams {
  double gamma = 1.0;  // proposal radius
  std::size_t d = 1;
};

// Uniform law on S^{d-1} from d-1 coordinates (d = 1 reads one coordinate and
// returns -1 below 1/2, +1 otherwise). Closed forms for d = 2, 3; higher d
// inverts the spherical-angle CDFs by bisection.
Point sphere_generator(std::span<const double> v, std::size_t d);

// Driver coordinates reproducing a unit vector; d <= 3 only.
std::vector<double> sphere_generator_inverse(std::span<const double> unit);

// gamma * v_d^(1/d) * sphere(v_1..v_{d-1}), uniform on the gamma-ball.
// In d = 1 the single coordinate folds sign and radius: gamma * (2 v_1 - 1).
Point ball_generator(std::span<const double> v, double gamma);

// d <= 3 only.
std::vector<double> ball_generator_inverse(std::span<const double> z, double gamma);

// One Metropolis step driven by u in [0,1]^{d+1}. Acceptance is decided in log space.
Point metropolis_update(const Point& x, std::span<const double> u, const BallWalkParams& params,
                        const LogDensity& density);

// A driver point u with metropolis_update(x, u) == y. Needs ||y - x|| <= gamma,
// and for y == x a proposal that can leave the ball (||x|| + gamma > 1).
// Throws InfeasibleError for d > 3.
std::vector<double> invert_update(const Point& x, const Point& y, const BallWalkParams& params,
                                  const LogDensity& density);

// "uniform" (log rho = 0) or "exp-linear" (log rho = alpha * x_1).
LogDensity density_preset(std::string_view name, double alpha, std::size_t d);

struct DensityAudit {
  std::size_t pairs = 0;
  std::size_t lipschitz_failures = 0;
  std::size_t concavity_failures = 0;
  double worst_lipschitz_excess = 0.0;
  double worst_concavity_excess = 0.0;

  bool passed() const noexcept { return lipschitz_failures == 0 && concavity_failures == 0; }
};

// Randomized membership audit for R_{alpha,d} on pairs drawn uniformly from B_d.
DensityAudit audit_density(const LogDensity& density, std::size_t d, std::size_t pairs, Rng& rng);

Point sample_uniform_ball(std::size_t d, Rng& rng);

// Accept/reject step drawn with an Rng: Gaussian direction, U^{1/d} radius.
Point reference_metropolis_step(const Point& x, const BallWalkParams& params,
                                const LogDensity& density, Rng& rng);

// Chain system with nu uniform on B_d via psi_1 (the last coordinate of u_0 is
// ignored). Lambda0 comes from the conductance gap bound when gamma equals
// gamma*, otherwise it is left uncertified (1).
ChainSystem make_metropolis_ballwalk(const LogDensity& density, const BallWalkParams& params);

}  // namespace mcqmc
