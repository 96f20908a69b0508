#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcqmc/measure.hpp"
#include "mcqmc/rng.hpp"
#include "mcqmc/types.hpp"

namespace mcqmc {

// psi: [0,1]^s_init -> G whose uniform pushforward is the initial law nu.
struct GeneratorFunction {
  std::size_t s_init = 1;
  std::function<Point(std::span<const double>)> map;
  // Optional right inverse: a driver point u with map(u) == x.
  std::function<std::vector<double>(const Point&)> inverse;
};

// phi: G x [0,1]^s -> G whose uniform pushforward at x is K(x, .).
struct UpdateFunction {
  std::size_t s = 1;
  std::function<Point(const Point&, std::span<const double>)> map;
  // Optional anywhere-to-anywhere witness: map(x, inverse(x, y)) == y.
  std::function<std::vector<double>(const Point&, const Point&)> inverse;

  bool invertible() const noexcept { return static_cast<bool>(inverse); }
};

// Draws (nu, K) with an Rng instead of pushing uniforms through (psi, phi).
// Used as the independent side of update-function law checks.
struct ReferenceSampler {
  std::function<Point(Rng&)> initial;
  std::function<Point(const Point&, Rng&)> step;
};

// Closed-form marginals of the form nu P^i = w_i nu + (1 - w_i) pi.
struct MixtureMarginals {
  TargetPtr initial;
  std::function<double(std::size_t)> nu_weight;

  // nu P^i(box), with the quadrature error of both masses.
  MassEstimate marginal(std::size_t i, const AnchoredBox& box, const TargetMeasure& pi) const;
};

struct ChainSystem {
  std::string name;
  UpdateFunction update;
  GeneratorFunction generator;
  TargetPtr target;
  // max{Lambda, 0}, or 1 - (certified lower bound on the gap).
  double lambda0 = 1.0;
  // ||P|| on mean-zero L2(pi), when known.
  std::optional<double> beta;
  // ||d nu / d pi||_2 and ||d nu / d pi - 1||_2 (values or upper bounds).
  double nu_density_norm = 1.0;
  double nu_density_norm_centered = 0.0;
  std::optional<MixtureMarginals> exact_marginals;
  ReferenceSampler reference;

  std::size_t step_dimension() const noexcept { return update.s; }
  std::size_t dimension() const noexcept { return target->dimension(); }
  // Throws PreconditionError when the bookkeeping invariants do not hold.
  void validate() const;
};

struct ChainPath {
  std::vector<Point> states;  // x_1, ..., x_{n0+n}
  std::size_t burn_in = 0;
  DriverSequence driver;

  std::span<const Point> retained() const noexcept {
    return std::span<const Point>(states).subspan(burn_in);
  }
};

// x_1 = psi(u_0), x_{i+1} = phi(x_i; u_i). Every state is checked against G.
ChainPath run_chain(const ChainSystem& system, const DriverSequence& driver,
                    std::size_t burn_in = 0);

// Generator for pi itself: inverse CDF in d = 1, psi_1 for the uniform ball,
// an affine map for the uniform box. Other targets have no generator.
GeneratorFunction target_generator(const TargetPtr& target);

// Independent sampler for pi by rejection from the bounding box.
Point rejection_sample(const TargetMeasure& target, Rng& rng);

struct DensityNorms {
  double norm = 1.0;      // ||d nu / d pi||_2
  double centered = 0.0;  // ||d nu / d pi - 1||_2
};

// Both measures must live on the same domain.
DensityNorms density_ratio_norms(const TargetMeasure& nu, const TargetMeasure& pi);

// K(x, A) = pi(A): the update ignores x and draws from pi. Lambda0 = beta = 0.
// `initial` defaults to pi.
ChainSystem make_direct_kernel(TargetPtr target, TargetPtr initial = nullptr);

// K = (1 - a) I + a pi. The last driver coordinate decides between a fresh
// pi draw (u_last < a) and staying put. Lambda0 = beta = 1 - a.
ChainSystem make_lazy_direct_kernel(TargetPtr target, double a, TargetPtr initial = nullptr);

struct ExpectationComparison {
  double via_driver = 0.0;
  double via_kernel = 0.0;
  double std_error = 0.0;  // pooled standard error of the difference
};

// E F(X_1..X_horizon) estimated twice with m replications each: once through
// (psi, phi) on uniform drivers and once through the reference sampler.
ExpectationComparison compare_expectation(
    const ChainSystem& system, const std::function<double(std::span<const Point>)>& F,
    std::size_t horizon, std::size_t m, Rng& rng);

}  // namespace mcqmc
