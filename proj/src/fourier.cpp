#include "dnp/fourier.hpp"

#include "dnp/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace dnp {

Eigen::MatrixXd fourier_diff_matrix(int n) {
  if (n < 8) throw std::invalid_argument("fourier_diff_matrix: N must be at least 8");
  if (n % 2 != 0) throw std::invalid_argument("fourier_diff_matrix: N must be even");
  const double h = 2.0 * constants::pi / n;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const int m = j - k;
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      d(j, k) = 0.5 * sign / std::tan(m * h / 2.0);
    }
  }
  return d;
}

PhaseGrid::PhaseGrid(int n) : n_points(n), diff_matrix(fourier_diff_matrix(n)) {
  phases.resize(n);
  for (int k = 0; k < n; ++k) phases[k] = 2.0 * constants::pi * k / n;
}

}  // namespace dnp
