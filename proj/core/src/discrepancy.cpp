#include "mcqmc/discrepancy.hpp"

#include <algorithm>
#include <cmath>

#include "mcqmc/error.hpp"
#include "mcqmc/lowdisc.hpp"
#include "mcqmc/parallel.hpp"

namespace mcqmc {

namespace {

std::vector<std::size_t> make_strides(const std::vector<std::vector<double>>& axes) {
  std::vector<std::size_t> strides(axes.size());
  std::size_t stride = 1;
  for (std::size_t j = 0; j < axes.size(); ++j) {
    strides[j] = stride;
    stride *= axes[j].size();
  }
  return strides;
}

std::size_t grid_size(const std::vector<std::vector<double>>& axes) {
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  return total;
}

AnchoredBox grid_corner(const std::vector<std::vector<double>>& axes,
                        const std::vector<std::size_t>& strides, std::size_t flat) {
  AnchoredBox box;
  box.corner.resize(axes.size());
  for (std::size_t j = 0; j < axes.size(); ++j) {
    box.corner[j] = axes[j][(flat / strides[j]) % axes[j].size()];
  }
  return box;
}

// In-place cumulative sum along every axis: a[k] becomes sum over h <= k.
void prefix_sum(std::vector<double>& a, const std::vector<std::vector<double>>& axes,
                const std::vector<std::size_t>& strides) {
  for (std::size_t j = 0; j < axes.size(); ++j) {
    const std::size_t len = axes[j].size();
    for (std::size_t flat = 0; flat < a.size(); ++flat) {
      if ((flat / strides[j]) % len != 0) a[flat] += a[flat - strides[j]];
    }
  }
}

// Index of the first axis entry strictly greater than x.
std::size_t cell_index(std::span<const double> axis, double x) {
  return static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), x) - axis.begin());
}

std::vector<MassEstimate> grid_masses(const TargetMeasure& measure,
                                      const std::vector<std::vector<double>>& axes,
                                      const std::vector<std::size_t>& strides, bool zero_axis_empty) {
  std::vector<MassEstimate> masses(grid_size(axes));
  parallel_for(masses.size(), [&](std::size_t flat) {
    if (zero_axis_empty) {
      for (std::size_t j = 0; j < axes.size(); ++j) {
        if ((flat / strides[j]) % axes[j].size() == 0) {
          masses[flat] = {0.0, 0.0};
          return;
        }
      }
    }
    masses[flat] = measure.box_mass(grid_corner(axes, strides, flat));
  });
  return masses;
}

MassEstimate marginal_cdf(const TargetMeasure& measure, std::size_t axis, double t) {
  if (measure.dimension() == 1) return measure.cdf(t);
  AnchoredBox box = AnchoredBox::full(measure.dimension());
  box.corner[axis] = t;
  return measure.box_mass(box);
}

double marginal_quantile(const TargetMeasure& measure, std::size_t axis, double p) {
  if (measure.dimension() == 1) return measure.quantile(p);
  double lo = measure.domain().lower(axis);
  double hi = measure.domain().upper(axis);
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (marginal_cdf(measure, axis, mid).mass < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::string to_string(DiscrepancyMethod m) {
  switch (m) {
    case DiscrepancyMethod::ExactScan: return "exact-scan";
    case DiscrepancyMethod::CoverBracket: return "cover-bracket";
    case DiscrepancyMethod::PullbackMc: return "pullback-mc";
  }
  return "unknown";
}

DeltaCover::DeltaCover(double delta, double achieved_delta, std::vector<std::vector<double>> axes,
                       std::vector<MassEstimate> masses)
    : delta_(delta), achieved_delta_(achieved_delta), axes_(std::move(axes)), masses_(std::move(masses)) {
  strides_ = make_strides(axes_);
  if (masses_.size() != grid_size(axes_)) throw PreconditionError("cover masses do not match grid");
}

AnchoredBox DeltaCover::member(std::size_t flat) const { return grid_corner(axes_, strides_, flat); }

DeltaCover::Bracket DeltaCover::bracket(const AnchoredBox& box) const {
  if (box.dimension() != dimension()) throw PreconditionError("box dimension does not match cover");
  std::size_t inner = 0;
  std::size_t outer = 0;
  for (std::size_t j = 0; j < dimension(); ++j) {
    const auto& axis = axes_[j];
    const double c = box.corner[j];
    // Largest entry <= c (index 0 when c is below the domain: both boxes are empty).
    std::size_t down = cell_index(axis, c);
    down = down == 0 ? 0 : down - 1;
    // Smallest entry >= c; the last entry is +inf.
    const auto up = static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), c) - axis.begin());
    inner += down * strides_[j];
    outer += std::min(up, axis.size() - 1) * strides_[j];
  }
  return {inner, outer};
}

std::vector<double> DeltaCover::counts(std::span<const Point> points) const {
  std::vector<double> hist(size(), 0.0);
  for (const auto& x : points) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < dimension(); ++j) flat += cell_index(axes_[j], x[j]) * strides_[j];
    hist[flat] += 1.0;
  }
  prefix_sum(hist, axes_, strides_);
  return hist;
}

DeltaCover trivial_cover(const TargetMeasure& measure) {
  const std::size_t d = measure.dimension();
  std::vector<std::vector<double>> axes(d);
  for (std::size_t j = 0; j < d; ++j) axes[j] = {measure.domain().lower(j), kInf};
  const auto strides = make_strides(axes);
  return DeltaCover(1.0, 1.0, axes, grid_masses(measure, axes, strides, true));
}

DeltaCover build_quantile_cover(const TargetMeasure& measure, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("cover delta must lie in (0,1]");
  const std::size_t d = measure.dimension();
  const auto slabs = static_cast<std::size_t>(std::ceil(static_cast<double>(d) / delta - 1e-9));

  std::vector<std::vector<double>> axes(d);
  double worst_slab = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> cuts(slabs > 0 ? slabs - 1 : 0);
    parallel_for(cuts.size(), [&](std::size_t k) {
      cuts[k] = marginal_quantile(measure, j, static_cast<double>(k + 1) / static_cast<double>(slabs));
    });
    auto& axis = axes[j];
    axis.push_back(measure.domain().lower(j));
    for (double c : cuts) {
      if (c > axis.back()) axis.push_back(c);
    }
    axis.push_back(kInf);

    // Verify every slab, including the end slabs.
    double prev = 0.0;
    for (std::size_t k = 1; k < axis.size(); ++k) {
      const auto m = k + 1 == axis.size() ? MassEstimate{1.0, 0.0} : marginal_cdf(measure, j, axis[k]);
      worst_slab = std::max(worst_slab, m.mass - prev + m.error);
      prev = m.mass;
    }
  }
  const double achieved = std::min(1.0, static_cast<double>(d) * worst_slab);
  if (achieved > delta + 1e-8)
    throw InfeasibleError("quantile cover reached only delta = " + std::to_string(achieved));
  const auto strides = make_strides(axes);
  return DeltaCover(delta, achieved, axes, grid_masses(measure, axes, strides, true));
}

DiscrepancyReport star_discrepancy_exact(std::span<const Point> points, const TargetMeasure& measure) {
  const std::size_t d = measure.dimension();
  if (d > 3) throw InfeasibleError("exact star-discrepancy scan is limited to d <= 3; use a cover bracket");
  if (points.empty()) throw PreconditionError("point set is empty");
  const auto n = static_cast<double>(points.size());

  std::vector<std::vector<double>> axes(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto& axis = axes[j];
    axis.reserve(points.size() + 1);
    for (const auto& x : points) axis.push_back(x[j]);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    axis.push_back(kInf);
  }
  const auto strides = make_strides(axes);

  // closed[k]: points with x_j <= axis_j[k] for all j.
  std::vector<double> closed(grid_size(axes), 0.0);
  for (const auto& x : points) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const auto r = static_cast<std::size_t>(
          std::lower_bound(axes[j].begin(), axes[j].end(), x[j]) - axes[j].begin());
      flat += r * strides[j];
    }
    closed[flat] += 1.0;
  }
  prefix_sum(closed, axes, strides);
  const auto masses = grid_masses(measure, axes, strides, false);

  double lower = 0.0;
  double upper = 0.0;
  double worst_error = 0.0;
  for (std::size_t flat = 0; flat < closed.size(); ++flat) {
    // open[k] = closed[k - 1 in every coordinate]; zero if any index is 0.
    double open = 0.0;
    std::size_t shifted = 0;
    bool any_zero = false;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t k = (flat / strides[j]) % axes[j].size();
      if (k == 0) {
        any_zero = true;
        break;
      }
      shifted += (k - 1) * strides[j];
    }
    if (!any_zero) open = closed[shifted];
    const auto& m = masses[flat];
    const double local = std::max(closed[flat] / n - m.mass, m.mass - open / n);
    lower = std::max(lower, local - m.error);
    upper = std::max(upper, local + m.error);
    worst_error = std::max(worst_error, m.error);
  }
  DiscrepancyReport report;
  report.lower = clamp01(lower);
  report.upper = clamp01(upper);
  report.method = DiscrepancyMethod::ExactScan;
  report.quadrature_error = worst_error;
  return report;
}

DiscrepancyReport star_discrepancy_bracket(std::span<const Point> points,
                                           const TargetMeasure& measure, const DeltaCover& cover) {
  if (points.empty()) throw PreconditionError("point set is empty");
  if (cover.dimension() != measure.dimension()) throw PreconditionError("cover dimension mismatch");
  const auto n = static_cast<double>(points.size());
  const auto counts = cover.counts(points);
  double lower = 0.0;
  double upper = 0.0;
  double worst_error = 0.0;
  for (std::size_t k = 0; k < cover.size(); ++k) {
    const auto& m = cover.mass(k);
    const double local = std::abs(counts[k] / n - m.mass);
    lower = std::max(lower, local - m.error);
    upper = std::max(upper, local + m.error);
    worst_error = std::max(worst_error, m.error);
  }
  const double delta = std::max(cover.delta(), cover.achieved_delta());
  DiscrepancyReport report;
  report.lower = clamp01(lower);
  report.upper = clamp01(upper + delta);
  report.method = DiscrepancyMethod::CoverBracket;
  report.delta_used = delta;
  report.quadrature_error = worst_error;
  return report;
}

MassEstimate local_discrepancy(std::span<const Point> points, const TargetMeasure& measure,
                               const AnchoredBox& box) {
  if (points.empty()) throw PreconditionError("point set is empty");
  double inside = 0.0;
  for (const auto& x : points) inside += box.contains(x) ? 1.0 : 0.0;
  const auto m = measure.box_mass(box);
  return {inside / static_cast<double>(points.size()) - m.mass, m.error};
}

DiscrepancyReport pullback_discrepancy_mc(const ChainSystem& system, const DriverSequence& driver,
                                          std::size_t burn_in, const DeltaCover& cover,
                                          std::size_t m, Rng& rng) {
  if (driver.size() < burn_in + 1) throw PreconditionError("driver shorter than burn-in + 1");
  const std::size_t n = driver.size() - burn_in;
  const auto nd = static_cast<double>(n);

  const auto path = run_chain(system, driver, burn_in);
  const auto hits = cover.counts(path.retained());

  // volume[k] = (1/n) sum_{i=n0}^{n0+n-1} nu P^i(A_k).
  std::vector<double> volume(cover.size(), 0.0);
  std::vector<double> volume_error(cover.size(), 0.0);
  double stderr_max = 0.0;
  if (system.exact_marginals) {
    const auto& mix = *system.exact_marginals;
    double weight = 0.0;
    for (std::size_t i = burn_in; i < burn_in + n; ++i) weight += mix.nu_weight(i);
    weight /= nd;
    const bool nu_is_pi = mix.initial.get() == system.target.get();
    std::vector<MassEstimate> nu_mass(cover.size());
    if (nu_is_pi || weight == 0.0) {
      for (std::size_t k = 0; k < cover.size(); ++k) nu_mass[k] = cover.mass(k);
    } else {
      parallel_for(cover.size(), [&](std::size_t k) {
        nu_mass[k] = k == cover.empty_member() ? MassEstimate{} : mix.initial->box_mass(cover.member(k));
      });
    }
    for (std::size_t k = 0; k < cover.size(); ++k) {
      const auto& p = cover.mass(k);
      volume[k] = weight * nu_mass[k].mass + (1.0 - weight) * p.mass;
      volume_error[k] = weight * nu_mass[k].error + (1.0 - weight) * p.error;
    }
  } else {
    if (m < 100) throw PreconditionError("pull-back Monte Carlo needs m >= 100 replications");
    const std::size_t s = system.step_dimension();
    std::vector<std::vector<double>> per_chain(m);
    parallel_for(m, [&](std::size_t r) {
      Rng stream = rng.split(r);
      const auto replica = uniform_driver(driver.size(), s, stream);
      const auto rpath = run_chain(system, replica, burn_in);
      per_chain[r] = cover.counts(rpath.retained());
    });
    const auto md = static_cast<double>(m);
    for (std::size_t k = 0; k < cover.size(); ++k) {
      double sum = 0.0;
      double sq = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        const double v = per_chain[r][k] / nd;
        sum += v;
        sq += v * v;
      }
      const double mean = sum / md;
      const double var = std::max(0.0, (sq - md * mean * mean) / (md - 1.0));
      volume[k] = mean;
      stderr_max = std::max(stderr_max, std::sqrt(var / md));
    }
  }

  double lower = 0.0;
  double worst_error = 0.0;
  for (std::size_t k = 0; k < cover.size(); ++k) {
    lower = std::max(lower, std::abs(hits[k] / nd - volume[k]) - volume_error[k]);
    worst_error = std::max(worst_error, volume_error[k]);
  }

  // Bracket gaps are delta-small under pi; under the averaged marginals they
  // can exceed that by the total-variation distance of nu P_n from pi.
  double slack = 0.0;
  if (system.nu_density_norm_centered > 0.0) {
    bounds::BoundInputs in;
    in.n = nd;
    in.lambda0 = system.lambda0;
    in.nu_norm_centered = system.nu_density_norm_centered *
                          (system.beta ? std::pow(*system.beta, static_cast<double>(burn_in)) : 1.0);
    slack = bounds::tv_average_bound(in).value;
  }

  const double delta = std::max(cover.delta(), cover.achieved_delta());
  DiscrepancyReport report;
  report.lower = clamp01(lower);
  report.upper = clamp01(lower + 2.0 * worst_error + delta + stderr_max + slack);
  report.method = DiscrepancyMethod::PullbackMc;
  report.delta_used = delta;
  report.mc_stderr = stderr_max;
  report.quadrature_error = worst_error;
  report.marginal_slack = slack;
  return report;
}

double H1Function::norm() const noexcept {
  double total = std::abs(f0);
  for (const auto& a : atoms) total += std::abs(a.weight);
  return total;
}

double H1Function::operator()(std::span<const double> x) const noexcept {
  double v = f0;
  for (const auto& a : atoms) {
    if (AnchoredBox{a.corner}.contains(x)) v += a.weight;
  }
  return v;
}

MassEstimate H1Function::expectation(const TargetMeasure& measure) const {
  MassEstimate e{f0, 0.0};
  for (const auto& a : atoms) {
    const auto m = measure.box_mass(AnchoredBox{a.corner});
    e.mass += a.weight * m.mass;
    e.error += std::abs(a.weight) * m.error;
  }
  return e;
}

KhCheck kh_error_bound(const H1Function& f, std::span<const Point> points, const TargetMeasure& measure) {
  if (points.empty()) throw PreconditionError("point set is empty");
  const auto expectation = f.expectation(measure);
  double mean = 0.0;
  for (const auto& x : points) mean += f(x);
  mean /= static_cast<double>(points.size());

  KhCheck check;
  check.discrepancy = star_discrepancy_exact(points, measure);
  check.exact_error = std::abs(expectation.mass - mean);
  check.slack = expectation.error;
  check.bound = f.norm() * check.discrepancy.upper;
  return check;
}

double weighted_star_discrepancy(std::span<const Point> points, const TargetMeasure& measure,
                                 std::span<const WeightAtom> atoms, double p) {
  if (!(p >= 1.0)) throw PreconditionError("weighted discrepancy needs p >= 1");
  double acc = 0.0;
  for (const auto& a : atoms) {
    if (a.weight < 0.0) throw PreconditionError("weight measure must be nonnegative");
    if (a.weight == 0.0) continue;
    const double local = std::abs(local_discrepancy(points, measure, AnchoredBox{a.corner}).mass);
    acc = std::isinf(p) ? std::max(acc, local) : acc + a.weight * std::pow(local, p);
  }
  return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

double AtomicHqFunction::norm(double q) const {
  if (!(q >= 1.0)) throw PreconditionError("H_q norm needs q >= 1");
  if (values.size() != atoms.size()) throw PreconditionError("one value per atom required");
  if (std::isinf(q)) {
    double m = std::abs(f0);
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if (atoms[j].weight > 0.0) m = std::max(m, std::abs(values[j]));
    }
    return m;
  }
  double acc = std::pow(std::abs(f0), q);
  for (std::size_t j = 0; j < atoms.size(); ++j) acc += std::pow(std::abs(values[j]), q) * atoms[j].weight;
  return std::pow(acc, 1.0 / q);
}

H1Function AtomicHqFunction::as_h1() const {
  if (values.size() != atoms.size()) throw PreconditionError("one value per atom required");
  H1Function f;
  f.f0 = f0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    f.atoms.push_back({atoms[j].corner, values[j] * atoms[j].weight});
  }
  return f;
}

}  // namespace mcqmc
