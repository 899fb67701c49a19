#pragma once

// Ordinary least squares for the trend fits used in reports.

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

namespace flatmap {

struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
  int points = 0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  const size_t n = std::min(x.size(), y.size());
  f.points = static_cast<int>(n);
  if (n < 2) return f;
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (size_t i = 0; i < n; ++i) {
    a(i, 0) = x[i];
    a(i, 1) = 1;
    b(i) = y[i];
  }
  const Eigen::Vector2d p = a.colPivHouseholderQr().solve(b);
  f.slope = p(0);
  f.intercept = p(1);
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = (a * p - b).squaredNorm();
  f.r2 = ss_tot > 0 ? 1 - ss_res / ss_tot : 1;
  return f;
}

}  // namespace flatmap
