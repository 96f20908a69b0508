#include "mcqmc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mcqmc/error.hpp"

namespace mcqmc::bounds {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

BoundValue make(double value) { return BoundValue{value, !(value <= 1.0), false}; }

double gap_factor(double lambda0) {
  if (lambda0 >= 1.0) return kInfinity;
  return std::sqrt((1.0 + lambda0) / (1.0 - lambda0));
}

void require_lambda(double lambda0) {
  if (!(lambda0 >= 0.0 && lambda0 <= 1.0)) throw PreconditionError("lambda0 must lie in [0,1]");
}

// (1 - L^n) / (n (1 - L)), with the L -> 1 limit 1.
double geometric_average(double lambda0, double n) {
  if (lambda0 >= 1.0) return 1.0;
  return (1.0 - std::pow(lambda0, n)) / (n * (1.0 - lambda0));
}

}  // namespace

BoundValue hoeffding_tail(const BoundInputs& in) {
  require_lambda(in.lambda0);
  if (!(in.c > 0.0) || !(in.n >= 1.0)) throw PreconditionError("hoeffding_tail needs c > 0, n >= 1");
  if (in.lambda0 >= 1.0) return BoundValue{1.0, true, true};
  const double rate = (1.0 - in.lambda0) / (1.0 + in.lambda0);
  return make(2.0 * in.nu_norm * std::exp(-rate * in.c * in.c * in.n));
}

BoundValue main_discrepancy_bound(const BoundInputs& in) {
  require_lambda(in.lambda0);
  if (!(in.cover_size >= 1.0) || !(in.n >= 1.0))
    throw PreconditionError("main_discrepancy_bound needs |Gamma| >= 1, n >= 1");
  const double radicand = 2.0 * std::log(in.cover_size * in.cover_size * in.nu_norm);
  if (!(radicand >= 0.0)) {
    BoundValue b = make(in.delta);
    b.degenerate = true;
    return b;
  }
  return make(gap_factor(in.lambda0) * std::sqrt(radicand) / std::sqrt(in.n) + in.delta);
}

BoundValue corollary_main_bound(const BoundInputs& in) {
  require_lambda(in.lambda0);
  if (!(in.n >= 16.0)) throw PreconditionError("corollary_main_bound requires n >= 16");
  const double d = in.d;
  const double radicand = std::log(in.nu_norm) + d * std::log(in.n) + 3.0 * d * d * std::log(5.0 * d);
  BoundValue b = make(gap_factor(in.lambda0) * std::numbers::sqrt2 * std::sqrt(std::max(radicand, 0.0)) /
                          std::sqrt(in.n) +
                      8.0 / std::pow(in.n, 0.75));
  b.degenerate = radicand < 0.0;
  return b;
}

BoundValue tv_average_bound(const BoundInputs& in) {
  require_lambda(in.lambda0);
  if (!(in.n >= 1.0)) throw PreconditionError("tv_average_bound needs n >= 1");
  return make(geometric_average(in.lambda0, in.n) * in.nu_norm_centered);
}

BoundValue spectral_tv_bound(const BoundInputs& in) {
  if (!(in.beta >= 0.0 && in.beta < 1.0)) throw PreconditionError("spectral_tv_bound needs beta in [0,1)");
  return make(std::pow(in.beta, in.n) * in.nu_norm_centered);
}

BurnInBound burn_in_bound(const BoundInputs& in) {
  require_lambda(in.lambda0);
  if (!(in.beta >= 0.0 && in.beta < 1.0)) throw PreconditionError("burn_in_bound needs beta in [0,1)");
  if (!(in.cover_size >= 1.0) || !(in.n >= 1.0))
    throw PreconditionError("burn_in_bound needs |Gamma| >= 1, n >= 1");
  const double decayed = std::pow(in.beta, in.n0) * in.nu_norm_centered;
  const double log_term = std::log(in.cover_size * in.cover_size * (1.0 + decayed));

  const double mixed = gap_factor(in.lambda0) * std::sqrt(2.0 * log_term) / std::sqrt(in.n) +
                       geometric_average(in.lambda0, in.n) * decayed + in.delta;
  const double simplified = 4.0 * std::sqrt(log_term) / std::sqrt(in.n * (1.0 - in.beta)) +
                            2.0 * decayed / (in.n * (1.0 - in.beta)) + in.delta;
  return {make(mixed), make(simplified)};
}

BoundValue beck_bound(double r, double d) {
  if (!(r >= 1.0) || !(d >= 1.0)) throw PreconditionError("beck_bound needs r >= 1, d >= 1");
  return make(63.0 * std::sqrt(d) * std::pow(2.0 + std::log2(r), (3.0 * d + 1.0) / 2.0) / r);
}

GapBound ballwalk_gap_bound(double alpha, std::size_t d) {
  if (!(alpha >= 0.0) || d == 0) throw PreconditionError("ballwalk_gap_bound needs alpha >= 0, d >= 1");
  const double dp1 = static_cast<double>(d) + 1.0;
  const double inv_alpha = alpha > 0.0 ? 1.0 / alpha : kInfinity;
  return {std::min(1.0 / std::sqrt(dp1), inv_alpha), 3.125e-6 / dp1 * std::min(1.0 / dp1, inv_alpha)};
}

BoundValue ballwalk_error_bound(double alpha, std::size_t d, double n) {
  if (!(n >= 16.0)) throw PreconditionError("ballwalk_error_bound requires n >= 16");
  if (!(alpha >= 0.0) || d == 0) throw PreconditionError("ballwalk_error_bound needs alpha >= 0, d >= 1");
  const auto dd = static_cast<double>(d);
  const double lead = 5000.0 * std::sqrt(dd) * std::max(std::sqrt(2.0 * dd), std::sqrt(alpha));
  const double radicand = alpha + dd * std::log(n) + 3.0 * dd * dd * std::log(5.0 * dd);
  return make(lead * std::sqrt(radicand) / std::sqrt(n) + 8.0 / std::pow(n, 0.75));
}

double cover_constant(double epsilon, double d) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must lie in (0,1)");
  const double k = (3.0 * d + 1.0) / 2.0;
  return std::pow(4.0, epsilon) *
         std::pow((3.0 * d + 1.0) / (2.0 * std::numbers::e * epsilon * std::numbers::ln2), k);
}

double cover_size_bound(double delta, double d, double epsilon) {
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("delta must lie in (0,1]");
  const double c = cover_constant(epsilon, d);
  const double per_axis = 2.0 + std::ceil(std::pow(2.0 * c / delta, 1.0 / (1.0 - epsilon)));
  return std::pow(per_axis, d);
}

}  // namespace mcqmc::bounds
