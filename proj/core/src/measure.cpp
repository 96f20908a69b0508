#include "mcqmc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcqmc/error.hpp"
#include "mcqmc/lowdisc.hpp"

namespace mcqmc {

namespace {

constexpr std::size_t kCdfPanels = 64;
constexpr double kMassTol1d = 1e-13;
constexpr double kMassTol2d = 1e-10;
constexpr std::size_t kQmcShifts = 16;
constexpr std::size_t kQmcPoints = 2048;
constexpr std::size_t kQmcNormalizerPoints = 16384;

}  // namespace

Domain::Domain(DomainKind kind, std::vector<double> lower, std::vector<double> upper)
    : kind_(kind), lower_(std::move(lower)), upper_(std::move(upper)) {
  center_.resize(lower_.size());
  double half_diag = 0.0;
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    center_[j] = 0.5 * (lower_[j] + upper_[j]);
    half_diag += std::pow(0.5 * (upper_[j] - lower_[j]), 2);
  }
  radius_ = kind_ == DomainKind::Ball ? 1.0 : std::sqrt(half_diag);
}

Domain Domain::unit_ball(std::size_t d) {
  if (d == 0) throw PreconditionError("dimension must be >= 1");
  return Domain(DomainKind::Ball, std::vector<double>(d, -1.0), std::vector<double>(d, 1.0));
}

Domain Domain::box(std::vector<double> lower, std::vector<double> upper) {
  if (lower.empty() || lower.size() != upper.size())
    throw PreconditionError("box bounds must have equal, positive dimension");
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!(std::isfinite(lower[j]) && std::isfinite(upper[j]) && lower[j] < upper[j]))
      throw PreconditionError("box bounds must be finite with lower < upper");
  }
  return Domain(DomainKind::Box, std::move(lower), std::move(upper));
}

double Domain::volume() const noexcept {
  const auto d = static_cast<double>(dimension());
  if (kind_ == DomainKind::Ball) {
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  }
  double v = 1.0;
  for (std::size_t j = 0; j < dimension(); ++j) v *= upper_[j] - lower_[j];
  return v;
}

bool Domain::contains(std::span<const double> x) const noexcept {
  if (x.size() != dimension()) return false;
  if (kind_ == DomainKind::Ball) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return r2 <= 1.0;
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= lower_[j] && x[j] <= upper_[j])) return false;
  }
  return true;
}

std::string Domain::describe() const {
  std::ostringstream out;
  if (kind_ == DomainKind::Ball) {
    out << "ball(d=" << dimension() << ")";
  } else {
    out << "box[";
    for (std::size_t j = 0; j < dimension(); ++j) {
      out << (j ? "," : "") << lower_[j] << ":" << upper_[j];
    }
    out << "]";
  }
  return out.str();
}

std::string to_string(ConcavityWitness w) {
  switch (w) {
    case ConcavityWitness::Affine: return "affine";
    case ConcavityWitness::VerifiedNumerically: return "verified-numerically";
    case ConcavityWitness::Asserted: return "asserted";
  }
  return "unknown";
}

LogDensity LogDensity::uniform() {
  return LogDensity{"uniform", [](std::span<const double>) { return 0.0; }, 0.0,
                    ConcavityWitness::Affine, true};
}

TargetMeasure::TargetMeasure(Domain domain, LogDensity density)
    : domain_(std::move(domain)), density_(std::move(density)) {
  if (!density_.log_rho) throw PreconditionError("target density has no log_rho");
  log_offset_ = density_.log_rho(domain_.center());
  if (!std::isfinite(log_offset_)) throw PreconditionError("rho must be positive on G");

  const std::size_t d = dimension();
  if (d == 1) {
    const double a = domain_.lower(0);
    const double b = domain_.upper(0);
    nodes_.resize(kCdfPanels + 1);
    cumulative_.assign(kCdfPanels + 1, 0.0);
    cumulative_error_.assign(kCdfPanels + 1, 0.0);
    const auto f = [this](double t) { return unnormalized(std::span<const double>(&t, 1)); };
    // Scale for the absolute tolerance: a crude estimate of the total mass.
    const double scale = gk15(f, a, b).value;
    for (std::size_t k = 0; k <= kCdfPanels; ++k) {
      nodes_[k] = a + (b - a) * static_cast<double>(k) / kCdfPanels;
    }
    nodes_.back() = b;
    for (std::size_t k = 0; k < kCdfPanels; ++k) {
      const auto r = integrate_adaptive(f, nodes_[k], nodes_[k + 1],
                                        kMassTol1d * scale / kCdfPanels);
      cumulative_[k + 1] = cumulative_[k] + r.value;
      cumulative_error_[k + 1] = cumulative_error_[k] + r.error;
    }
    normalizer_ = {cumulative_.back(), cumulative_error_.back()};
  } else if (d == 2) {
    normalizer_ = integrate_2d(kInf, kInf);
  } else {
    std::vector<double> full(d, kInf);
    normalizer_ = integrate_qmc(full, kQmcNormalizerPoints);
  }
  if (!(normalizer_.value > 0.0) || !std::isfinite(normalizer_.value))
    throw PreconditionError("target normalizer must be positive and finite");
}

double TargetMeasure::unnormalized(std::span<const double> x) const {
  return std::exp(density_.log_rho(x) - log_offset_);
}

double TargetMeasure::pdf(std::span<const double> x) const {
  if (!domain_.contains(x)) return 0.0;
  return unnormalized(x) / normalizer_.value;
}

double TargetMeasure::log_density_bound() const noexcept {
  return density_.alpha * domain_.radius();
}

QuadResult TargetMeasure::integrate_1d(double upper) const {
  const double a = domain_.lower(0);
  const double b = domain_.upper(0);
  if (!(upper > a)) return {};
  if (upper >= b) return {cumulative_.back(), cumulative_error_.back()};
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), upper);
  const auto k = static_cast<std::size_t>(std::distance(nodes_.begin(), it)) - 1;
  const auto f = [this](double t) { return unnormalized(std::span<const double>(&t, 1)); };
  const auto part = integrate_adaptive(f, nodes_[k], upper,
                                       kMassTol1d * cumulative_.back() / kCdfPanels);
  return {cumulative_[k] + part.value, cumulative_error_[k] + part.error};
}

QuadResult TargetMeasure::integrate_2d(double c0, double c1) const {
  const double scale = std::exp(log_density_bound()) * domain_.volume();
  const double tol = kMassTol2d * scale;
  double inner_error = 0.0;
  double point[2];

  if (domain_.kind() == DomainKind::Box) {
    const double a0 = domain_.lower(0);
    const double b0 = std::min(c0, domain_.upper(0));
    const double a1 = domain_.lower(1);
    const double b1 = std::min(c1, domain_.upper(1));
    if (!(b0 > a0) || !(b1 > a1)) return {};
    const auto inner = [&](double x0) {
      point[0] = x0;
      const auto g = [&](double x1) {
        point[1] = x1;
        return unnormalized(point);
      };
      const auto r = integrate_adaptive(g, a1, b1, 1e-3 * tol / (b0 - a0));
      inner_error = std::max(inner_error, r.error);
      return r.value;
    };
    auto r = integrate_adaptive(inner, a0, b0, tol);
    r.error += inner_error * (b0 - a0);
    return r;
  }

  // Unit disc: x0 = sin t, half-width cos t, so the integrand stays smooth
  // apart from kinks where the inner upper limit switches from cos t to c1.
  if (!(c0 > -1.0) || !(c1 > -1.0)) return {};
  const double t_hi = c0 >= 1.0 ? std::numbers::pi / 2 : std::asin(c0);
  const double t_lo = -std::numbers::pi / 2;
  std::vector<double> kinks;
  if (std::abs(c1) < 1.0) {
    const double t = std::acos(std::abs(c1));
    kinks = {-t, t};
  }
  const double span_t = t_hi - t_lo;
  const auto outer = [&](double t) {
    const double w = std::cos(t);
    const double lo = -w;
    const double hi = std::min(c1, w);
    if (!(hi > lo)) return 0.0;
    point[0] = std::sin(t);
    const auto g = [&](double x1) {
      point[1] = x1;
      return unnormalized(point);
    };
    const auto r = integrate_adaptive(g, lo, hi, 1e-3 * tol / span_t);
    inner_error = std::max(inner_error, r.error);
    return w * r.value;
  };
  auto r = integrate_adaptive(outer, t_lo, t_hi, tol, kinks);
  r.error += inner_error * span_t;
  return r;
}

QuadResult TargetMeasure::integrate_qmc(std::span<const double> corner,
                                        std::size_t points) const {
  const std::size_t d = dimension();
  std::vector<double> lo(d);
  std::vector<double> hi(d);
  double box_volume = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    lo[j] = domain_.lower(j);
    hi[j] = std::min(corner[j], domain_.upper(j));
    if (!(hi[j] > lo[j])) return {};
    box_volume *= hi[j] - lo[j];
  }
  std::vector<double> estimates(kQmcShifts);
  std::vector<double> x(d);
  for (std::size_t r = 0; r < kQmcShifts; ++r) {
    // Fixed seeds keep repeated queries of the same box bit-identical.
    const auto seq = scrambled_halton_sequence(points, d, 0x5eed0000ULL + r);
    double sum = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      const auto u = seq[i];
      for (std::size_t j = 0; j < d; ++j) x[j] = lo[j] + (hi[j] - lo[j]) * u[j];
      if (domain_.contains(x)) sum += unnormalized(x);
    }
    estimates[r] = box_volume * sum / static_cast<double>(points);
  }
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= kQmcShifts;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= static_cast<double>(kQmcShifts - 1);
  return {mean, 3.0 * std::sqrt(var / kQmcShifts)};
}

MassEstimate TargetMeasure::box_mass(const AnchoredBox& box) const {
  const std::size_t d = dimension();
  if (box.dimension() != d) throw PreconditionError("box dimension does not match target");
  bool whole = true;
  for (double c : box.corner) {
    if (std::isnan(c)) throw PreconditionError("box corner is NaN");
    if (c < kInf) whole = false;
  }
  if (whole) return {1.0, 0.0};

  QuadResult part;
  if (d == 1) {
    part = integrate_1d(box.corner[0]);
  } else if (d == 2) {
    part = integrate_2d(box.corner[0], box.corner[1]);
  } else {
    part = integrate_qmc(box.corner, kQmcPoints);
  }
  const double z = normalizer_.value;
  const double mass = std::clamp(part.value / z, 0.0, 1.0);
  const double error = part.error / z + mass * normalizer_.error / z;
  return {mass, error};
}

MassEstimate TargetMeasure::cdf(double t) const {
  if (dimension() != 1) throw PreconditionError("cdf is defined for d = 1 targets only");
  return box_mass(AnchoredBox{{t}});
}

double TargetMeasure::quantile(double p) const {
  if (dimension() != 1) throw PreconditionError("quantile is defined for d = 1 targets only");
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("quantile level outside [0,1]");
  const double a = domain_.lower(0);
  const double b = domain_.upper(0);
  if (p <= 0.0) return a;
  if (p >= 1.0) return b;

  const double target = p * normalizer_.value;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t k = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  k = std::clamp<std::size_t>(k, 1, kCdfPanels) - 1;

  // Bracketed Newton on the monotone CDF; falls back to bisection whenever a
  // step leaves the bracket.
  double lo = nodes_[k];
  double hi = nodes_[k + 1];
  const double panel_mass = cumulative_[k + 1] - cumulative_[k];
  double t = panel_mass > 0.0 ? lo + (hi - lo) * (target - cumulative_[k]) / panel_mass
                              : 0.5 * (lo + hi);
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double f = integrate_1d(t).value - target;
    if (f < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    if (f == 0.0) return t;
    const double slope = unnormalized(std::span<const double>(&t, 1));
    double next = slope > 0.0 ? t - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-12) {
      t = next;
      break;
    }
    t = next;
  }
  return std::clamp(t, a, b);
}

}  // namespace mcqmc
