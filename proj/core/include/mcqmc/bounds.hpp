#pragma once

#include <cstddef>

namespace mcqmc::bounds {

// Inputs shared by the closed-form calculators. Only the fields a calculator
// reads need to be set.
struct BoundInputs {
  double n = 1;                 // sample size
  double n0 = 0;                // burn-in
  double d = 1;                 // dimension
  double s = 1;                 // driver dimension
  double lambda0 = 0.0;         // max{Lambda, 0}
  double beta = 0.0;            // ||P|| on mean-zero L2
  double nu_norm = 1.0;         // ||d nu / d pi||_2
  double nu_norm_centered = 0;  // ||d nu / d pi - 1||_2
  double cover_size = 1;        // |Gamma_delta|
  double delta = 0.0;
  double epsilon = 0.25;
  double alpha = 0.0;
  double gamma = 1.0;
  double c = 0.0;               // Hoeffding deviation
  double r = 1;                 // point-set size
};

// A bound together with a flag telling whether it says anything. A
// discrepancy or probability bound above 1 is vacuous; the raw value is
// kept so it can be compared with other formulas.
struct BoundValue {
  double value = 0.0;
  bool vacuous = false;
  bool degenerate = false;  // a radicand or log argument fell out of range

  double reported() const noexcept { return value < 1.0 ? value : 1.0; }
};

// 2 ||dnu/dpi||_2 exp(-(1 - L0)/(1 + L0) c^2 n). lambda0 = 1 returns 1.
BoundValue hoeffding_tail(const BoundInputs& in);

// sqrt((1+L0)/(1-L0)) sqrt(2 log(|Gamma|^2 ||dnu/dpi||_2)) / sqrt(n) + delta.
BoundValue main_discrepancy_bound(const BoundInputs& in);

// sqrt((1+L0)/(1-L0)) sqrt(2) (log||dnu/dpi||_2 + d log n + 3 d^2 log(5d))^(1/2) / sqrt(n)
//   + 8 / n^(3/4).  Requires n >= 16.
BoundValue corollary_main_bound(const BoundInputs& in);

// (1 - L0^n) / (n (1 - L0)) ||dnu/dpi - 1||_2.
BoundValue tv_average_bound(const BoundInputs& in);

// beta^n ||dnu/dpi - 1||_2, with n taken from in.n.
BoundValue spectral_tv_bound(const BoundInputs& in);

struct BurnInBound {
  BoundValue mixed;       // uses both L0 and beta
  BoundValue simplified;  // beta only
};

BurnInBound burn_in_bound(const BoundInputs& in);

// 63 sqrt(d) (2 + log2 r)^((3d+1)/2) / r.
BoundValue beck_bound(double r, double d);

struct GapBound {
  double gamma_star = 0.0;  // min{1/sqrt(d+1), 1/alpha}
  double gap = 0.0;         // lower bound on 1 - Lambda at gamma_star
};

GapBound ballwalk_gap_bound(double alpha, std::size_t d);

// Error bound for the ball-walk Metropolis chain over the H1 unit ball. n >= 16.
BoundValue ballwalk_error_bound(double alpha, std::size_t d, double n);

// C_{eps,d} = 4^eps ((3d+1)/(2 e eps log 2))^((3d+1)/2).
double cover_constant(double epsilon, double d);

// (2 + ceil((2 C_{eps,d} / delta)^(1/(1-eps))))^d, as a double since it can
// exceed 64-bit range for small delta and d = 3.
double cover_size_bound(double delta, double d, double epsilon);

}  // namespace mcqmc::bounds
