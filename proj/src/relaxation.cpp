#include "dnp/relaxation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace dnp {

double spectral_density(double omega, double tau_c) {
  if (!(tau_c > 0.0)) throw std::invalid_argument("spectral_density: tau_c must be positive");
  const double x = omega * tau_c;
  return tau_c / (1.0 + x * x);
}

const std::array<Eigen::Matrix3cd, 5>& spherical_rank2_basis() {
  static const std::array<Eigen::Matrix3cd, 5> basis = [] {
    const cplx i(0.0, 1.0);
    const Eigen::Vector3cd ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);
    std::array<Eigen::Matrix3cd, 5> t;
    for (int m = -2; m <= 2; ++m) {
      const double s = m >= 0 ? 1.0 : -1.0;
      const Eigen::Vector3cd u = ex + s * i * ey;
      Eigen::Matrix3cd x;
      if (std::abs(m) == 2)
        x = 0.5 * u * u.transpose();
      else if (std::abs(m) == 1)
        x = -s * 0.5 * (u * ez.transpose() + ez * u.transpose());
      else
        x = (3.0 * ez * ez.transpose() - Eigen::Matrix3cd::Identity()) / std::sqrt(6.0);
      t[m + 2] = x;
    }
    return t;
  }();
  return basis;
}

Mat3 Rank2Decomposition::anisotropic() const {
  Eigen::Matrix3cd a = Eigen::Matrix3cd::Zero();
  const auto& t = spherical_rank2_basis();
  for (int k = 0; k < 5; ++k) a += c[k] * t[k];
  return a.real();
}

Rank2Decomposition decompose_rank2(const Mat3& a, const std::string& label) {
  const double scale = a.norm();
  if ((a - a.transpose()).norm() > 1e-12 * scale)
    throw std::invalid_argument("decompose_rank2: tensor " + label + " has an antisymmetric part");
  Rank2Decomposition d;
  d.interaction = label;
  d.isotropic = a.trace() / 3.0;
  const Mat3 s = 0.5 * (a + a.transpose()) - d.isotropic * Mat3::Identity();
  const auto& t = spherical_rank2_basis();
  for (int k = 0; k < 5; ++k) d.c[k] = (t[k].conjugate().cwiseProduct(s.cast<cplx>())).sum();
  return d;
}

namespace {

// Real orthonormal basis of symmetric traceless 3x3 tensors.
std::array<Mat3, 5> cartesian_rank2_basis() {
  std::array<Mat3, 5> e;
  const double r2 = 1.0 / std::sqrt(2.0);
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int k = 0; k < 3; ++k) {
    e[k].setZero();
    e[k](pairs[k][0], pairs[k][1]) = e[k](pairs[k][1], pairs[k][0]) = r2;
  }
  e[3] = Vec3(1, -1, 0).asDiagonal();
  e[3] *= r2;
  e[4] = Vec3(1, 1, -2).asDiagonal();
  e[4] /= std::sqrt(6.0);
  return e;
}

}  // namespace

RelaxationSuperoperator brw_superoperator(const SpinSystem& sys, double b0) {
  validate(sys);
  const int n = sys.n_spins();
  const int d = hilbert_dim(n);
  const auto e = cartesian_rank2_basis();

  std::vector<std::array<Operator, 3>> s(n);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < 3; ++a) s[k][a] = single_spin_operator(n, {k, SpinKind::Electron}, static_cast<Axis>(a));

  // Per interaction: rank-2 coefficients alpha_p and spin-side projections X_q.
  struct Term {
    std::array<double, 5> alpha;
    std::array<Operator, 5> x;
  };
  std::vector<Term> terms;
  for (const auto& in : interactions(sys)) {
    const Mat3& a = in.tensor.matrix;
    if ((a - a.transpose()).norm() > 1e-12 * a.norm())
      throw std::invalid_argument("brw_superoperator: tensor " + in.label + " has an antisymmetric part");
    const Mat3 aniso = 0.5 * (a + a.transpose()) - a.trace() / 3.0 * Mat3::Identity();
    Term t;
    double norm2 = 0.0;
    for (int p = 0; p < 5; ++p) {
      t.alpha[p] = aniso.cwiseProduct(e[p]).sum();
      norm2 += t.alpha[p] * t.alpha[p];
    }
    if (norm2 == 0.0) continue;
    for (int q = 0; q < 5; ++q) {
      Operator x = Operator::Zero(d, d);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          if (e[q](i, j) == 0.0) continue;
          if (in.spin_b < 0) {
            if (j == 2) x += e[q](i, j) * b0 * s[in.spin_a][i];
          } else {
            x += e[q](i, j) * (s[in.spin_a][i] * s[in.spin_b][j]);
          }
        }
      }
      t.x[q] = x;
    }
    terms.push_back(std::move(t));
  }

  RelaxationSuperoperator out;
  out.tau_c = sys.tau_c;
  out.b0 = b0;
  out.matrix = Superoperator::Zero(d * d, d * d);
  if (terms.empty()) return out;

  Eigen::SelfAdjointEigenSolver<Operator> es(isotropic_hamiltonian(sys, b0));
  if (es.info() != Eigen::Success) throw std::runtime_error("brw_superoperator: eigensolver failed");
  const Operator& v = es.eigenvectors();
  const Eigen::VectorXd& w = es.eigenvalues();
  Eigen::MatrixXd jw(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double dw = w(a) - w(b);
      if (std::abs(dw) < 1.0) dw = 0.0;
      jw(a, b) = spectral_density(dw, sys.tau_c);
    }

  for (int p = 0; p < 5; ++p) {
    for (int q = 0; q < 5; ++q) {
      Operator z = Operator::Zero(d, d);
      for (const auto& t : terms) z += t.alpha[p] * t.x[q];
      if (z.norm() == 0.0) continue;
      const Operator ze = v.adjoint() * z * v;
      const Operator zj = v * ze.cwiseProduct(jw.cast<cplx>()) * v.adjoint();
      out.matrix.noalias() -= 0.2 * commutation_superoperator(z) * commutation_superoperator(zj);
    }
  }
  return out;
}

double rate_between(const Superoperator& r, const Operator& from, const Operator& to) {
  const double nf = from.norm(), nt = to.norm();
  if (nf == 0.0 || nt == 0.0) throw std::invalid_argument("rate_between: zero-norm operator");
  const LiouvilleVector a = vec(from) / nf;
  const LiouvilleVector b = vec(to) / nt;
  return b.dot(r * a).real();
}

double rate_between(const RelaxationSuperoperator& r, const Operator& from, const Operator& to) {
  return rate_between(r.matrix, from, to);
}

ThermalizedAction::ThermalizedAction(const Superoperator& r, const Operator& rho_eq) : r_(r), eq_(vec(rho_eq)) {
  if (r_.rows() != eq_.size()) throw DimensionError("thermalized_action: dimension mismatch");
}

LiouvilleVector ThermalizedAction::operator()(const LiouvilleVector& rho) const {
  if (rho.size() != eq_.size()) throw DimensionError("thermalized_action: dimension mismatch");
  return r_ * (rho - eq_);
}

ThermalizedAction thermalized_action(const RelaxationSuperoperator& r, const Operator& rho_eq) {
  return ThermalizedAction(r.matrix, rho_eq);
}

Superoperator rotating_frame_relaxation(const Superoperator& r, const SpinSystem& sys) {
  const Eigen::VectorXd m = electron_m(sys);
  const auto d = m.size();
  Eigen::VectorXd order(d * d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) order(i + d * j) = m(i) - m(j);
  Superoperator out = r;
  for (Eigen::Index a = 0; a < out.rows(); ++a)
    for (Eigen::Index b = 0; b < out.cols(); ++b)
      if (order(a) != order(b)) out(a, b) = 0.0;
  return out;
}

}  // namespace dnp
