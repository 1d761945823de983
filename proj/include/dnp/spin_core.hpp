#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace dnp {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Superoperator = Eigen::MatrixXcd;
using LiouvilleVector = Eigen::VectorXcd;

enum class SpinKind { Electron, Nucleus };

struct SpinLabel {
  int index = 0;
  SpinKind kind = SpinKind::Electron;
};

enum class Axis { X, Y, Z, Plus, Minus };

// Hilbert-space dimension 2^n.
int hilbert_dim(int n_spins);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Kronecker embedding of a spin-1/2 operator; spin 0 is the leftmost factor.
Operator single_spin_operator(int n_spins, SpinLabel target, Axis axis);
Operator identity_operator(int n_spins);

// Column-stacking vectorization.
LiouvilleVector vec(const Operator& x);
Operator unvec(const LiouvilleVector& v);

// Matrix of x -> Hx - xH under column stacking: I (x) H - H^T (x) I.
Superoperator commutation_superoperator(const Operator& h);

// exp(-hbar H0 / kT) / Z; H0 in rad/s.
Operator thermal_state(const Operator& h0, double temperature);

// Re Tr[rho obs]; throws if obs is Hermitian and the trace has a spurious imaginary part.
double expectation(const Operator& rho, const Operator& obs);

// Polarization 2<Sz> convention for a single spin.
double polarization(const Operator& rho, const Operator& sz);

// Normalized amplitude sqrt(d) |Tr[rho O]| / ||O||_F; equals 2<Sz> for single-spin Z.
double amplitude(const Operator& rho, const Operator& obs);
// Same projection, keeping the sign; requires a Hermitian observable.
double signed_amplitude(const Operator& rho, const Operator& obs);

double hermiticity_defect(const Operator& x);  // ||x - x^dag|| / ||x||
bool is_hermitian(const Operator& x, double tol = 1e-12);

// Orthonormal Hermitian basis of normalized Pauli products (identity first).
// Index digits are base 4 per spin (0=I, 1=X, 2=Y, 3=Z), spin 0 most significant.
class ProductBasis {
 public:
  explicit ProductBasis(int n_spins);

  int n_spins() const { return n_spins_; }
  int size() const { return static_cast<int>(u_.cols()); }
  // Columns are vec(P_k).
  const Eigen::MatrixXcd& vectors() const { return u_; }

  // Coordinates of a Liouville vector and back.
  Eigen::VectorXcd coordinates(const LiouvilleVector& v) const;
  LiouvilleVector from_coordinates(const Eigen::VectorXcd& c) const;

  // U^dag S U; real for Hermitian-preserving maps.
  Eigen::MatrixXcd transform(const Superoperator& s) const;

 private:
  int n_spins_;
  Eigen::MatrixXcd u_;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace dnp
