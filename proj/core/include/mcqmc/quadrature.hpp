#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace mcqmc {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error; reported, never hidden
};

// One 15-point Gauss-Kronrod panel; error is |K15 - G7|.
QuadResult gk15(const std::function<double(double)>& f, double a, double b);

// Globally adaptive Gauss-Kronrod on [a, b]. Interior breakpoints (kinks of f)
// seed the initial partition. Stops when the summed error estimate falls
// below abs_tol or after max_panels panels; the achieved error is returned
// either way.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, std::span<const double> breakpoints = {},
                              std::size_t max_panels = 4000);

}  // namespace mcqmc
