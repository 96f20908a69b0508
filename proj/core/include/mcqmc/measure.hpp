#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mcqmc/quadrature.hpp"
#include "mcqmc/types.hpp"

namespace mcqmc {

enum class DomainKind { Ball, Box };

// Bounded state space G: the closed Euclidean unit ball or an axis-aligned box.
class Domain {
 public:
  static Domain unit_ball(std::size_t d);
  static Domain box(std::vector<double> lower, std::vector<double> upper);

  DomainKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return lower_.size(); }
  // Bounding box of G.
  double lower(std::size_t j) const noexcept { return lower_[j]; }
  double upper(std::size_t j) const noexcept { return upper_[j]; }
  std::span<const double> center() const noexcept { return center_; }
  // Largest distance from center() to a point of G.
  double radius() const noexcept { return radius_; }
  double volume() const noexcept;
  bool contains(std::span<const double> x) const noexcept;
  std::string describe() const;

 private:
  Domain(DomainKind kind, std::vector<double> lower, std::vector<double> upper);

  DomainKind kind_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> center_;
  double radius_ = 0.0;
};

enum class ConcavityWitness { Affine, VerifiedNumerically, Asserted };

std::string to_string(ConcavityWitness w);

// log rho on G, up to an additive constant. `alpha` is a certified
// log-Lipschitz constant: |log rho(x) - log rho(y)| <= alpha ||x - y||.
struct LogDensity {
  std::string name = "uniform";
  std::function<double(std::span<const double>)> log_rho;
  double alpha = 0.0;
  ConcavityWitness witness = ConcavityWitness::Asserted;
  bool constant = false;  // log_rho is identically constant

  static LogDensity uniform();
};

struct MassEstimate {
  double mass = 0.0;
  double error = 0.0;  // |mass - pi(box)| <= error
};

// Target distribution pi with density proportional to rho on G.
//
// Box masses come from quadrature: d = 1 uses an adaptive Gauss-Kronrod CDF
// table (tolerance 1e-10 on masses, in practice far tighter), d = 2 a tensorized
// adaptive rule (1e-8), and d >= 3 a randomly shifted Halton estimate whose
// error is a 3-sigma bound over the shifts.
class TargetMeasure {
 public:
  TargetMeasure(Domain domain, LogDensity density);

  const Domain& domain() const noexcept { return domain_; }
  const LogDensity& density() const noexcept { return density_; }
  std::size_t dimension() const noexcept { return domain_.dimension(); }

  // Integral of exp(log_rho - log_offset()) over G.
  const QuadResult& normalizer() const noexcept { return normalizer_; }
  double log_offset() const noexcept { return log_offset_; }

  // Normalized density of pi at x (0 outside G).
  double pdf(std::span<const double> x) const;
  // Upper bound on log rho(x) - log_offset() over G.
  double log_density_bound() const noexcept;

  MassEstimate box_mass(const AnchoredBox& box) const;

  // d = 1 only: CDF t -> pi((-inf, t)) and its inverse.
  MassEstimate cdf(double t) const;
  double quantile(double p) const;

 private:
  double unnormalized(std::span<const double> x) const;
  QuadResult integrate_1d(double upper) const;
  QuadResult integrate_2d(double c0, double c1) const;
  QuadResult integrate_qmc(std::span<const double> corner, std::size_t points) const;

  Domain domain_;
  LogDensity density_;
  double log_offset_ = 0.0;
  QuadResult normalizer_;
  // d = 1 cumulative table over equal-width panels.
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
  std::vector<double> cumulative_error_;
};

using TargetPtr = std::shared_ptr<const TargetMeasure>;

}  // namespace mcqmc
