#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dnp {

// Spectral differentiation matrix on phi_k = 2 pi k / N, N even and >= 8.
Eigen::MatrixXd fourier_diff_matrix(int n);

struct PhaseGrid {
  int n_points = 0;
  std::vector<double> phases;
  Eigen::MatrixXd diff_matrix;

  explicit PhaseGrid(int n);
};

}  // namespace dnp
