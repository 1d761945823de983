#include "dnp/spin_core.hpp"

#include "dnp/constants.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace dnp {

int hilbert_dim(int n_spins) { return 1 << n_spins; }

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

Eigen::Matrix2cd pauli_half(Axis axis) {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (axis) {
    case Axis::X: m(0, 1) = 0.5; m(1, 0) = 0.5; break;
    case Axis::Y: m(0, 1) = -0.5 * i; m(1, 0) = 0.5 * i; break;
    case Axis::Z: m(0, 0) = 0.5; m(1, 1) = -0.5; break;
    case Axis::Plus: m(0, 1) = 1.0; break;
    case Axis::Minus: m(1, 0) = 1.0; break;
  }
  return m;
}

void check_dims(const Operator& a, const Operator& b, const char* what) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw DimensionError(std::string(what) + ": dimension mismatch");
}

}  // namespace

Operator single_spin_operator(int n_spins, SpinLabel target, Axis axis) {
  if (n_spins < 1 || n_spins > 3)
    throw std::out_of_range("single_spin_operator: n_spins must be 1..3");
  if (target.index < 0 || target.index >= n_spins)
    throw std::out_of_range("single_spin_operator: spin index out of range");
  Operator out = Operator::Identity(1, 1);
  for (int s = 0; s < n_spins; ++s) {
    Operator f = s == target.index ? Operator(pauli_half(axis)) : Operator(Operator::Identity(2, 2));
    out = kron(out, f);
  }
  return out;
}

Operator identity_operator(int n_spins) {
  const int d = hilbert_dim(n_spins);
  return Operator::Identity(d, d);
}

LiouvilleVector vec(const Operator& x) {
  return Eigen::Map<const LiouvilleVector>(x.data(), x.size());
}

Operator unvec(const LiouvilleVector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw DimensionError("unvec: length is not a square");
  return Eigen::Map<const Operator>(v.data(), d, d);
}

Superoperator commutation_superoperator(const Operator& h) {
  if (h.rows() != h.cols()) throw DimensionError("commutation_superoperator: non-square operator");
  const auto d = h.rows();
  const Operator id = Operator::Identity(d, d);
  return kron(id, h) - kron(h.transpose(), id);
}

Operator thermal_state(const Operator& h0, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("thermal_state: temperature must be positive");
  Eigen::SelfAdjointEigenSolver<Operator> es(h0);
  if (es.info() != Eigen::Success) throw std::runtime_error("thermal_state: eigensolver failed");
  const Eigen::VectorXd e = es.eigenvalues();
  const double beta = constants::hbar / (constants::boltzmann * temperature);
  // Shift so the largest Boltzmann factor is exactly 1.
  const Eigen::VectorXd w = (-beta * (e.array() - e.minCoeff())).exp();
  Operator rho = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

double expectation(const Operator& rho, const Operator& obs) {
  check_dims(rho, obs, "expectation");
  const cplx t = (rho * obs).trace();
  if (is_hermitian(obs)) {
    const double scale = std::max(std::abs(t.real()), 1e-14 * rho.norm() * obs.norm());
    if (std::abs(t.imag()) > 1e-10 * scale + 1e-300)
      throw std::logic_error("expectation: imaginary part exceeds tolerance for Hermitian observable");
  }
  return t.real();
}

double polarization(const Operator& rho, const Operator& sz) { return 2.0 * expectation(rho, sz); }

double amplitude(const Operator& rho, const Operator& obs) {
  check_dims(rho, obs, "amplitude");
  const double n = obs.norm();
  if (n == 0.0) throw std::invalid_argument("amplitude: zero-norm observable");
  return std::sqrt(static_cast<double>(rho.rows())) * std::abs((rho * obs).trace()) / n;
}

double signed_amplitude(const Operator& rho, const Operator& obs) {
  const double n = obs.norm();
  if (n == 0.0) throw std::invalid_argument("signed_amplitude: zero-norm observable");
  if (!is_hermitian(obs, 1e-12)) throw std::invalid_argument("signed_amplitude: observable is not Hermitian");
  return std::sqrt(static_cast<double>(rho.rows())) * expectation(rho, obs) / n;
}

double hermiticity_defect(const Operator& x) {
  const double n = x.norm();
  if (n == 0.0) return 0.0;
  return (x - x.adjoint()).norm() / n;
}

bool is_hermitian(const Operator& x, double tol) { return hermiticity_defect(x) <= tol; }

ProductBasis::ProductBasis(int n_spins) : n_spins_(n_spins) {
  const int d = hilbert_dim(n_spins);
  const int size = d * d;
  const double s2 = std::sqrt(2.0);
  const Eigen::Matrix2cd factors[4] = {
      Eigen::Matrix2cd::Identity() / s2, 2.0 * pauli_half(Axis::X) / s2,
      2.0 * pauli_half(Axis::Y) / s2, 2.0 * pauli_half(Axis::Z) / s2};
  u_.resize(size, size);
  for (int k = 0; k < size; ++k) {
    Operator p = Operator::Identity(1, 1);
    for (int s = 0; s < n_spins; ++s) {
      const int digit = (k >> (2 * (n_spins - 1 - s))) & 3;
      p = kron(p, factors[digit]);
    }
    u_.col(k) = vec(p);
  }
}

Eigen::VectorXcd ProductBasis::coordinates(const LiouvilleVector& v) const { return u_.adjoint() * v; }

LiouvilleVector ProductBasis::from_coordinates(const Eigen::VectorXcd& c) const { return u_ * c; }

Eigen::MatrixXcd ProductBasis::transform(const Superoperator& s) const { return u_.adjoint() * s * u_; }

}  // namespace dnp
