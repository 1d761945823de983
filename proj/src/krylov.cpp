#include "dnp/krylov.hpp"

#include <cmath>
#include <vector>

namespace dnp {

namespace {

using cplx = std::complex<double>;

// Givens rotation zeroing b in (a, b).
void givens(const cplx& a, const cplx& b, double& c, cplx& s) {
  const double na = std::abs(a), nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (na == 0.0) {
    c = 0.0;
    s = std::conj(b) / nb;
    return;
  }
  const double r = std::hypot(na, nb);
  c = na / r;
  s = (a / na) * std::conj(b) / r;
}

}  // namespace

GmresResult gmres(const LinearMap& a, const LinearMap& preconditioner, const Eigen::VectorXcd& b,
                  Eigen::VectorXcd& x, const GmresOptions& options) {
  const Eigen::Index n = b.size();
  if (x.size() != n) x = Eigen::VectorXcd::Zero(n);
  GmresResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  const auto apply_m = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    if (preconditioner)
      preconditioner(in, out);
    else
      out = in;
  };

  const auto scale = [&] { return bnorm + options.operator_norm * x.norm(); };
  const int m = options.restart;
  Eigen::VectorXcd r(n), w(n), z(n), ax(n);
  a(x, ax);
  r = b - ax;
  double rnorm = r.norm();
  res.relative_residual = rnorm / bnorm;
  res.backward_error = rnorm / scale();

  std::vector<Eigen::VectorXcd> v(m + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
  std::vector<double> cs(m);
  std::vector<cplx> sn(m);
  Eigen::VectorXcd g(m + 1);

  while (res.backward_error > options.tolerance && res.iterations < options.max_iterations) {
    const double cycle_scale = scale();
    v[0] = r / rnorm;
    g.setZero();
    g(0) = rnorm;
    h.setZero();
    int k = 0;
    for (; k < m && res.iterations < options.max_iterations; ++k) {
      apply_m(v[k], z);
      a(z, w);
      ++res.iterations;
      for (int i = 0; i <= k; ++i) {
        h(i, k) = v[i].dot(w);
        w -= h(i, k) * v[i];
      }
      h(k + 1, k) = w.norm();
      const bool breakdown = std::abs(h(k + 1, k)) < 1e-300;
      if (!breakdown) v[k + 1] = w / h(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const cplx t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -std::conj(sn[i]) * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      givens(h(k, k), h(k + 1, k), cs[k], sn[k]);
      h(k, k) = cs[k] * h(k, k) + sn[k] * h(k + 1, k);
      h(k + 1, k) = 0.0;
      g(k + 1) = -std::conj(sn[k]) * g(k);
      g(k) = cs[k] * g(k);
      if (breakdown || std::abs(g(k + 1)) / cycle_scale <= options.tolerance) {
        ++k;
        break;
      }
    }
    // Back substitution on the k x k triangle.
    Eigen::VectorXcd y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    Eigen::VectorXcd update = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < k; ++i) update += y(i) * v[i];
    apply_m(update, z);
    x += z;
    a(x, ax);
    r = b - ax;
    rnorm = r.norm();
    res.relative_residual = rnorm / bnorm;
    res.backward_error = rnorm / scale();
    if (k == 0) break;
  }
  res.converged = res.backward_error <= options.tolerance;
  return res;
}

}  // namespace dnp
