#pragma once

#include <Eigen/Dense>

#include <functional>

namespace dnp {

using LinearMap = std::function<void(const Eigen::VectorXcd& in, Eigen::VectorXcd& out)>;

struct GmresOptions {
  int restart = 40;
  int max_iterations = 2000;
  double tolerance = 1e-8;
  // When positive, the stopping test is the normwise backward error
  // ||b - Ax|| / (operator_norm ||x|| + ||b||) instead of ||b - Ax|| / ||b||.
  double operator_norm = 0.0;
};

struct GmresResult {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;  // ||b - Ax|| / ||b||
  double backward_error = 0.0;     // equals relative_residual when operator_norm is 0
};

// Restarted GMRES with right preconditioning; x holds the initial guess on entry.
// An empty preconditioner means identity.
GmresResult gmres(const LinearMap& a, const LinearMap& preconditioner, const Eigen::VectorXcd& b,
                  Eigen::VectorXcd& x, const GmresOptions& options = {});

}  // namespace dnp
