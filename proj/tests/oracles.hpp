#pragma once

// Reference computations used only by the tests. They share no code with the
// library beyond the spin-system definition and basic operators.

#include "dnp/hamiltonian.hpp"
#include "dnp/relaxation.hpp"
#include "dnp/spin_core.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

using dnp::cplx;
using dnp::Mat3;
using dnp::Operator;
using dnp::Superoperator;
using dnp::Vec3;

// ZYZ angles of a proper rotation, R = Rz(a) Ry(b) Rz(c).
inline Vec3 zyz_angles(const Mat3& r) {
  const double b = std::acos(std::clamp(r(2, 2), -1.0, 1.0));
  if (std::abs(std::sin(b)) < 1e-12) return Vec3(std::atan2(r(1, 0), r(0, 0)), b, 0.0);
  return Vec3(std::atan2(r(1, 2), r(0, 2)), b, std::atan2(r(2, 1), -r(2, 0)));
}

// Whole molecule rotated by q about the origin; tensors expressed through new ZYZ angles.
inline dnp::SpinSystem rotate_molecule(const dnp::SpinSystem& sys, const Mat3& q) {
  dnp::SpinSystem s = sys;
  s.euler_convention = dnp::EulerConvention::ZYZ;
  s.shift_euler = zyz_angles(q * dnp::rotation_matrix(sys.shift_euler, sys.euler_convention));
  s.g1_euler = zyz_angles(q * dnp::rotation_matrix(sys.g1_euler, sys.euler_convention));
  s.g2_euler = zyz_angles(q * dnp::rotation_matrix(sys.g2_euler, sys.euler_convention));
  s.coords_n = q * sys.coords_n;
  s.coords_e1 = q * sys.coords_e1;
  s.coords_e2 = q * sys.coords_e2;
  return s;
}

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    x[k] = es.eigenvalues()(k);
    w[k] = 2.0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
  }
}

inline Mat3 rot(const Vec3& zyz) { return dnp::rotation_matrix(zyz, dnp::EulerConvention::ZYZ); }

// Anisotropic Hamiltonian of one molecular orientation q (molecule rotated by q).
inline Operator anisotropic_hamiltonian(const dnp::SpinSystem& sys, double b0, const Mat3& q) {
  const int n = sys.n_spins();
  const int d = dnp::hilbert_dim(n);
  std::vector<std::array<Operator, 3>> s(n);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < 3; ++a)
      s[k][a] = dnp::single_spin_operator(n, {k, dnp::SpinKind::Electron}, static_cast<dnp::Axis>(a));
  Operator h = Operator::Zero(d, d);
  for (const auto& in : dnp::interactions(sys)) {
    const Mat3 a = in.tensor.matrix - in.tensor.matrix.trace() / 3.0 * Mat3::Identity();
    const Mat3 t = q * a * q.transpose();
    for (int i = 0; i < 3; ++i) {
      if (in.spin_b < 0) {
        h += t(i, 2) * b0 * s[in.spin_a][i];
        continue;
      }
      for (int j = 0; j < 3; ++j) h += t(i, j) * (s[in.spin_a][i] * s[in.spin_b][j]);
    }
  }
  return h;
}

// Redfield superoperator with the isotropic orientation average done by quadrature
// instead of rank-2 algebra: R = -< comm(H1) comm(J[H1]) >_orientations.
inline Superoperator quadrature_redfield(const dnp::SpinSystem& sys, double b0, int n_beta = 6, int n_angle = 7) {
  const int d = dnp::hilbert_dim(sys.n_spins());
  Eigen::SelfAdjointEigenSolver<Operator> es(dnp::isotropic_hamiltonian(sys, b0));
  const Operator& v = es.eigenvectors();
  const Eigen::VectorXd& w = es.eigenvalues();
  std::vector<double> cb, wb;
  gauss_legendre(n_beta, cb, wb);
  const double two_pi = 2.0 * std::numbers::pi;
  Superoperator r = Superoperator::Zero(d * d, d * d);
  double total = 0.0;
  for (int ib = 0; ib < n_beta; ++ib)
    for (int ia = 0; ia < n_angle; ++ia)
      for (int ig = 0; ig < n_angle; ++ig) {
        const Vec3 ang(two_pi * ia / n_angle, std::acos(cb[ib]), two_pi * ig / n_angle);
        const double weight = wb[ib];
        const Operator h1 = anisotropic_hamiltonian(sys, b0, rot(ang));
        Operator he = v.adjoint() * h1 * v;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            double dw = w(a) - w(b);
            if (std::abs(dw) < 1.0) dw = 0.0;
            const double x = dw * sys.tau_c;
            he(a, b) *= sys.tau_c / (1.0 + x * x);
          }
        const Operator hj = v * he * v.adjoint();
        r -= weight * dnp::commutation_superoperator(h1) * dnp::commutation_superoperator(hj);
        total += weight;
      }
  return r / total;
}

// Affine propagator: x -> p.lin x + p.shift.
struct Affine {
  Eigen::MatrixXcd lin;
  Eigen::VectorXcd shift;
};

// Trace preservation is exact for the true propagator; restoring it after each product
// stops roundoff from accumulating along the identity direction under repeated squaring.
inline void restore_trace(Affine& p) {
  const auto m = p.lin.rows();
  const int d = static_cast<int>(std::lround(std::sqrt(double(m))));
  Eigen::VectorXcd id = Eigen::VectorXcd::Zero(m);
  for (int i = 0; i < d; ++i) id(i + d * i) = 1.0;
  const Eigen::RowVectorXcd row = id.adjoint() * p.lin - id.adjoint();
  p.lin -= id * row / double(d);
  p.shift -= id * (id.adjoint() * p.shift) / double(d);
}

inline Affine compose(const Affine& second, const Affine& first) {
  Affine p{second.lin * first.lin, second.lin * first.shift + second.shift};
  restore_trace(p);
  return p;
}

// exp over dt of d/dt x = l x + c, via the augmented matrix exponential.
inline Affine step(const Eigen::MatrixXcd& l, const Eigen::VectorXcd& c, double dt) {
  const auto m = l.rows();
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m + 1, m + 1);
  g.topLeftCorner(m, m) = l * dt;
  g.topRightCorner(m, 1) = c * dt;
  const Eigen::MatrixXcd e = g.exp();
  return {e.topLeftCorner(m, m), e.topRightCorner(m, 1)};
}

// Period map kept as D = P - I. The slow nuclear modes move P away from the identity by
// far less than roundoff on P itself, so only differences are ever accumulated.
struct Increment {
  Eigen::MatrixXcd d;
  Eigen::VectorXcd shift;
};

// x -> x + d x + shift over dt for d/dt x = l x + c, with d = (l dt) phi1(l dt).
inline Increment increment(const Eigen::MatrixXcd& l, const Eigen::VectorXcd& c, double dt) {
  const auto m = l.rows();
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  g.topLeftCorner(m, m) = l * dt;
  g.topRightCorner(m, m) = Eigen::MatrixXcd::Identity(m, m);
  const Eigen::MatrixXcd phi1 = g.exp().topRightCorner(m, m);
  return {l * dt * phi1, phi1 * c * dt};
}

inline Increment then(const Increment& second, const Increment& first) {
  return {second.d + first.d + second.d * first.d, second.shift + first.shift + second.d * first.shift};
}

// Periodic lab-frame steady state by direct time stepping: one microwave period is cut
// into k substeps with the drive phase frozen at each midpoint, the fixed point of the
// period map is solved for, and the orbit is averaged over the period.
inline Operator stroboscopic_average(const dnp::SpinSystem& sys, double b0, double omega_mw, int k = 1000) {
  const Operator h0 = dnp::isotropic_hamiltonian(sys, b0);
  const Operator h1 = dnp::mw_hamiltonian(sys, 0.0);
  const Superoperator r = dnp::brw_superoperator(sys, b0).matrix;
  const Operator rho_eq = dnp::thermal_state(h0, sys.temperature);
  const Eigen::VectorXcd c = -r * dnp::vec(rho_eq);
  const double period = 2.0 * std::numbers::pi / omega_mw;
  const double dt = period / k;
  const cplx mi(0.0, -1.0);
  std::vector<Increment> steps;
  steps.reserve(k);
  for (int j = 0; j < k; ++j) {
    const double phase = omega_mw * (j + 0.5) * dt;
    const Operator h = h0 + std::cos(phase) * h1;
    steps.push_back(increment(mi * dnp::commutation_superoperator(h) + r, c, dt));
  }
  Increment p = steps[0];
  for (int j = 1; j < k; ++j) p = then(steps[j], p);

  // d x = -shift with unit trace, as one overdetermined consistent system.
  const auto m = p.d.rows();
  const int dim = static_cast<int>(h0.rows());
  Eigen::MatrixXcd a(m + 1, m);
  Eigen::VectorXcd rhs(m + 1);
  a.topRows(m) = p.d;
  rhs.head(m) = -p.shift;
  a.row(m).setZero();
  for (int i = 0; i < dim; ++i) a(m, i + dim * i) = 1.0;
  rhs(m) = 1.0;
  Eigen::VectorXcd x = a.colPivHouseholderQr().solve(rhs);

  Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(x.size());
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXcd next = x + steps[j].d * x + steps[j].shift;
    sum += 0.5 * (x + next);
    x = next;
  }
  const Operator avg = dnp::unvec(sum / k);
  return 0.5 * (avg + avg.adjoint());
}

// Long-time limit of the rotating-frame equation d/dt x = (R - iH) x - R rho_eq.
inline Operator rotating_long_time(const Operator& h_rot, const Superoperator& r, const Operator& rho_eq,
                                   double t_final) {
  const cplx mi(0.0, -1.0);
  const Eigen::MatrixXcd l = mi * dnp::commutation_superoperator(h_rot) + r;
  const Eigen::VectorXcd c = -r * dnp::vec(rho_eq);
  // Short first step, then repeated squaring up to t_final.
  int doublings = 0;
  double dt = t_final;
  while (dt * l.cwiseAbs().rowwise().sum().maxCoeff() > 1.0) {
    dt *= 0.5;
    ++doublings;
  }
  Affine p = step(l, c, dt);
  for (int i = 0; i < doublings; ++i) p = compose(p, p);
  return dnp::unvec(p.lin * dnp::vec(rho_eq) + p.shift);
}

}  // namespace oracle
