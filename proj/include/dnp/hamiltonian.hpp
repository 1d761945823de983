#pragma once

#include "dnp/spin_core.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dnp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class EulerConvention { ZYZ, XYZ };

enum class InteractionKind { ElectronZeeman, NuclearShift, Hyperfine, InterElectronDipolar };

struct InteractionTensor {
  Mat3 matrix = Mat3::Zero();
  InteractionKind kind = InteractionKind::Hyperfine;
};

// Everything a 1e1n or 2e1n liquid-state system needs. Angles in rad, coordinates in Angstrom.
struct SpinSystem {
  std::string name;
  int n_electrons = 2;
  Vec3 shift_eigs_ppm = Vec3::Zero();
  Vec3 shift_euler = Vec3::Zero();
  Vec3 g1_eigs = Vec3::Constant(2.0023193);
  Vec3 g1_euler = Vec3::Zero();
  Vec3 g2_eigs = Vec3::Constant(2.0023193);
  Vec3 g2_euler = Vec3::Zero();
  EulerConvention euler_convention = EulerConvention::ZYZ;
  Vec3 coords_n = Vec3::Zero();
  Vec3 coords_e1 = Vec3(0, 0, 5);
  Vec3 coords_e2 = Vec3(0, 0, -5);
  double tau_c = 100e-12;        // s
  double exchange_j = 0.0;       // Hz
  double isotropic_hf = 0.0;     // Hz, electron 1 to nucleus contact coupling
  double mw_nutation = 1e6;      // Hz
  double nucleus_gamma = 2.6752218744e8;  // rad/s/T
  double temperature = 298.0;    // K

  int n_spins() const { return n_electrons + 1; }
  int nucleus_index() const { return n_electrons; }
};

// Throws std::invalid_argument on a violated invariant.
void validate(const SpinSystem& sys);

enum class DipolarTruncation { LikeSpin, UnlikeSpin };

// Co-rotating drive amplitude per unit nutation frequency: omega_1 = 2 pi nu kappa.
// kappa = 1/4 reproduces the tabulated steady-state amplitudes.
inline constexpr double kDriveCalibration = 0.25;

Mat3 rotation_matrix(const Vec3& euler, EulerConvention convention = EulerConvention::ZYZ);
Mat3 tensor_from_eigs_euler(const Vec3& eigs, const Vec3& euler,
                            EulerConvention convention = EulerConvention::ZYZ);

// Point-dipole coupling in rad/s; coordinates in Angstrom.
InteractionTensor point_dipolar_tensor(const Vec3& r1, const Vec3& r2, double gamma1, double gamma2,
                                       InteractionKind kind = InteractionKind::InterElectronDipolar);

// Zeeman tensors in rad/s/T.
Mat3 electron_zeeman_tensor(const SpinSystem& sys, int electron);  // electron = 1 or 2
Mat3 nuclear_zeeman_tensor(const SpinSystem& sys);
// Dipolar hyperfine (rad/s) between electron k and the nucleus, without the isotropic constant.
Mat3 hyperfine_tensor(const SpinSystem& sys, int electron);
Mat3 inter_electron_dipolar_tensor(const SpinSystem& sys);

// One anisotropic or isotropic coupling; spin_b < 0 marks a coupling to the static field.
struct Interaction {
  std::string label;  // G1, G2, CSA, HF1, HF2, DD
  InteractionTensor tensor;
  int spin_a = 0;
  int spin_b = -1;
};
std::vector<Interaction> interactions(const SpinSystem& sys);

// Isotropic Larmor frequencies, rad/s (electron positive, proton negative).
double electron_frequency(const SpinSystem& sys, int electron, double b0);
double nuclear_frequency(const SpinSystem& sys, double b0);
// omega_MW for an offset (Hz) relative to electron 1.
double mw_frequency(const SpinSystem& sys, double b0, double offset_hz);
double drive_amplitude(const SpinSystem& sys);  // rad/s, rotating frame, electron 1

// Orientation-specific lab Hamiltonian, rad/s.
Operator assemble_static_hamiltonian(const SpinSystem& sys, double b0);
// Rotationally averaged part: isotropic Zeeman, exchange and contact terms.
Operator isotropic_hamiltonian(const SpinSystem& sys, double b0);
Operator mw_hamiltonian(const SpinSystem& sys, double phase);
Operator rotating_frame_hamiltonian(const SpinSystem& sys, double b0, double omega_mw,
                                    DipolarTruncation truncation = DipolarTruncation::LikeSpin);

// Total electron magnetic quantum number of each Hilbert basis state.
Eigen::VectorXd electron_m(const SpinSystem& sys);

}  // namespace dnp
