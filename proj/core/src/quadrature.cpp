#include "mcqmc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace mcqmc {

namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for nodes 1, 3, 5 and the center.
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  QuadResult r;
  bool operator<(const Panel& other) const { return r.error < other.r.error; }
};

}  // namespace

QuadResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrod[7];
  double gauss = fc * kGauss[3];
  for (std::size_t k = 0; k < 7; ++k) {
    const double dx = half * kNodes[k];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrod[k] * sum;
    if (k % 2 == 1) gauss += kGauss[k / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(kronrod);
  return {kronrod, std::abs(kronrod - gauss) + roundoff};
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, std::span<const double> breakpoints,
                              std::size_t max_panels) {
  if (!(b > a)) return {};
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> panels;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p{cuts[i], cuts[i + 1], gk15(f, cuts[i], cuts[i + 1])};
    total += p.r.value;
    error += p.r.error;
    panels.push(p);
  }

  const double min_width = 1e-13 * std::max(1.0, b - a);
  std::vector<Panel> settled;
  while (error > abs_tol && panels.size() + settled.size() < max_panels && !panels.empty()) {
    Panel worst = panels.top();
    panels.pop();
    if (worst.b - worst.a < min_width) {
      settled.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left{worst.a, mid, gk15(f, worst.a, mid)};
    Panel right{mid, worst.b, gk15(f, mid, worst.b)};
    total += left.r.value + right.r.value - worst.r.value;
    error += left.r.error + right.r.error - worst.r.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum to shed accumulated cancellation in the running totals.
  total = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    total += panels.top().r.value;
    error += panels.top().r.error;
    panels.pop();
  }
  for (const auto& p : settled) {
    total += p.r.value;
    error += p.r.error;
  }
  return {total, error};
}

}  // namespace mcqmc
