#pragma once

#include <cmath>
#include <vector>

#include "repgrowth/transfer.hpp"

namespace repgrowth {

struct SweepResult {
  std::vector<double> eps_grid;  // strictly decreasing
  std::vector<double> values;    // strictly increasing
  double fitted_alpha = 0.0;
  double fit_residual = 0.0;  // max |log value - fit| over the fitted points
};

// Weighted-square-sum sweep on a geometric eps grid with a log-log least
// squares fit of the growth exponent. Only the small-eps half of the grid
// enters the fit; the large-eps half carries visible subleading terms.
inline SweepResult run_sweep(const TransferOperator& t, const NormalizedSystem& norm,
                             double eps_min, double eps_max, int steps, int a, const Vector& v_a,
                             int b, const Vector& v_b, EpsWeight weight = EpsWeight::Single) {
  if (!(eps_min > 0.0) || !(eps_max > eps_min)) throw std::invalid_argument("bad eps range");
  if (steps < 4) throw std::invalid_argument("sweep needs at least 4 steps");
  SweepResult out;
  double ratio = std::pow(eps_min / eps_max, 1.0 / (steps - 1));
  for (int i = 0; i < steps; ++i) {
    double eps = eps_max * std::pow(ratio, i);
    out.eps_grid.push_back(eps);
    out.values.push_back(phi_norm(t, norm, eps, a, v_a, b, v_b, weight));
  }
  const int lo = steps / 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const int m = steps - lo;
  for (int i = lo; i < steps; ++i) {
    double x = std::log(out.eps_grid[static_cast<std::size_t>(i)]);
    double y = std::log(out.values[static_cast<std::size_t>(i)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double intercept = (sy - slope * sx) / m;
  out.fitted_alpha = -slope;
  for (int i = lo; i < steps; ++i) {
    double x = std::log(out.eps_grid[static_cast<std::size_t>(i)]);
    double y = std::log(out.values[static_cast<std::size_t>(i)]);
    out.fit_residual = std::max(out.fit_residual, std::abs(y - (intercept + slope * x)));
  }
  return out;
}

}  // namespace repgrowth
