#pragma once

#include "dnp/hamiltonian.hpp"
#include "dnp/spin_core.hpp"

#include <array>
#include <string>

namespace dnp {

// J(omega) = tau_c / (1 + omega^2 tau_c^2).
double spectral_density(double omega, double tau_c);

// Rank-2 part of a symmetric coupling tensor in spherical components m = -2..2.
struct Rank2Decomposition {
  std::string interaction;
  std::array<cplx, 5> c{};  // index m + 2
  double isotropic = 0.0;   // trace / 3

  Mat3 anisotropic() const;  // traceless symmetric reconstruction
};

// Unit-norm spherical rank-2 Cartesian tensors T_m, m = -2..2.
const std::array<Eigen::Matrix3cd, 5>& spherical_rank2_basis();

// Throws if the tensor carries an antisymmetric (rank-1) part.
Rank2Decomposition decompose_rank2(const Mat3& a, const std::string& label = {});

struct RelaxationSuperoperator {
  Superoperator matrix;
  double tau_c = 0.0;
  double b0 = 0.0;
};

// Redfield superoperator for isotropic rotational diffusion, all auto and cross terms,
// no dynamic frequency shifts. Column-stacked, lab frame, rad/s.
RelaxationSuperoperator brw_superoperator(const SpinSystem& sys, double b0);

// <to|R|from> with both operators normalized; real part.
double rate_between(const RelaxationSuperoperator& r, const Operator& from, const Operator& to);
double rate_between(const Superoperator& r, const Operator& from, const Operator& to);

// rho -> R (vec(rho) - vec(rho_eq)).
class ThermalizedAction {
 public:
  ThermalizedAction(const Superoperator& r, const Operator& rho_eq);
  LiouvilleVector operator()(const LiouvilleVector& rho) const;
  LiouvilleVector operator()(const Operator& rho) const { return (*this)(vec(rho)); }

 private:
  Superoperator r_;
  LiouvilleVector eq_;
};
ThermalizedAction thermalized_action(const RelaxationSuperoperator& r, const Operator& rho_eq);

// Keeps only elements connecting equal electron coherence orders (frame-secular part).
Superoperator rotating_frame_relaxation(const Superoperator& r, const SpinSystem& sys);

}  // namespace dnp
