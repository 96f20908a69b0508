#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mcqmc/bounds.hpp"
#include "mcqmc/chain.hpp"
#include "mcqmc/measure.hpp"
#include "mcqmc/rng.hpp"
#include "mcqmc/types.hpp"

namespace mcqmc {

enum class DiscrepancyMethod { ExactScan, CoverBracket, PullbackMc };

std::string to_string(DiscrepancyMethod m);

// lower <= true discrepancy <= upper (up to the stated estimator error).
struct DiscrepancyReport {
  double lower = 0.0;
  double upper = 1.0;
  DiscrepancyMethod method = DiscrepancyMethod::ExactScan;
  double delta_used = 0.0;
  double mc_stderr = 0.0;
  double quadrature_error = 0.0;
  // Extra width from nu P^i differing from pi on bracket slabs (pull-back only).
  double marginal_slack = 0.0;
};

// Finite family of anchored boxes on a product grid. Axis j holds
// [lower_j, cut_1, ..., cut_{M-1}, +inf]; a member is one index per axis and
// any index 0 gives the empty box. Masses of all members are precomputed.
class DeltaCover {
 public:
  struct Bracket {
    std::size_t inner;  // C subset of A
    std::size_t outer;  // A subset of D
  };

  DeltaCover(double delta, double achieved_delta, std::vector<std::vector<double>> axes,
             std::vector<MassEstimate> masses);

  double delta() const noexcept { return delta_; }
  // d times the largest single-slab mass; pi(D \ C) never exceeds it.
  double achieved_delta() const noexcept { return achieved_delta_; }
  std::size_t dimension() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return masses_.size(); }
  std::span<const double> axis(std::size_t j) const noexcept { return axes_[j]; }

  AnchoredBox member(std::size_t flat) const;
  const MassEstimate& mass(std::size_t flat) const noexcept { return masses_[flat]; }
  std::size_t empty_member() const noexcept { return 0; }
  std::size_t full_member() const noexcept { return size() - 1; }

  Bracket bracket(const AnchoredBox& box) const;

  // Number of points in every member, indexed like mass().
  std::vector<double> counts(std::span<const Point> points) const;

 private:
  double delta_;
  double achieved_delta_;
  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> strides_;
  std::vector<MassEstimate> masses_;
};

// {empty, whole domain}; a 1-cover.
DeltaCover trivial_cover(const TargetMeasure& measure);

// Cuts every coordinate at marginal quantiles k/M with M = ceil(d/delta), so
// each slab carries mass <= delta/d and every bracket gap is <= delta.
DeltaCover build_quantile_cover(const TargetMeasure& measure, double delta);

// Exact supremum over the critical grid (sorted point coordinates plus +inf),
// counting each grid coordinate both included and excluded. d <= 3.
DiscrepancyReport star_discrepancy_exact(std::span<const Point> points, const TargetMeasure& measure);

DiscrepancyReport star_discrepancy_bracket(std::span<const Point> points,
                                           const TargetMeasure& measure, const DeltaCover& cover);

// Signed local discrepancy (1/n) #{x_i in box} - pi(box).
MassEstimate local_discrepancy(std::span<const Point> points, const TargetMeasure& measure,
                               const AnchoredBox& box);

// Pull-back discrepancy of the driver over the cover. The indicator part is
// replayed exactly; the volume part nu P^i(A) comes from the system's exact
// marginals when available, otherwise from m independent random chains.
DiscrepancyReport pullback_discrepancy_mc(const ChainSystem& system, const DriverSequence& driver,
                                          std::size_t burn_in, const DeltaCover& cover,
                                          std::size_t m, Rng& rng);

// f(x) = f0 + sum_j w_j 1{x in (-inf, z_j)}.
struct H1Function {
  struct Atom {
    std::vector<double> corner;
    double weight = 0.0;
  };
  double f0 = 0.0;
  std::vector<Atom> atoms;

  double norm() const noexcept;
  double operator()(std::span<const double> x) const noexcept;
  MassEstimate expectation(const TargetMeasure& measure) const;
};

struct KhCheck {
  double exact_error = 0.0;  // |E_pi f - sample mean|
  double bound = 0.0;        // ||f||_H1 * upper star-discrepancy
  double slack = 0.0;        // quadrature uncertainty in exact_error
  DiscrepancyReport discrepancy;

  bool holds() const noexcept { return exact_error <= bound + slack; }
};

KhCheck kh_error_bound(const H1Function& f, std::span<const Point> points, const TargetMeasure& measure);

// Atomic weight measure for the H_q spaces: point masses `weight` at corners.
struct WeightAtom {
  std::vector<double> corner;
  double weight = 0.0;
};

// (sum_j weight_j |local discrepancy at z_j|^p)^(1/p); p = inf gives the max
// over atoms with positive weight.
double weighted_star_discrepancy(std::span<const Point> points, const TargetMeasure& measure,
                                 std::span<const WeightAtom> atoms, double p);

// f(x) = f0 + sum_j g_j weight_j 1{x in box_j}; ||f||_Hq = (|f0|^q + sum_j |g_j|^q weight_j)^(1/q).
struct AtomicHqFunction {
  double f0 = 0.0;
  std::vector<WeightAtom> atoms;
  std::vector<double> values;  // g_j

  double norm(double q) const;
  H1Function as_h1() const;
};

using bounds::cover_size_bound;

}  // namespace mcqmc
