#include "dnp/hamiltonian.hpp"

#include "dnp/constants.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace dnp {

namespace {

Mat3 rz(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}

Mat3 ry(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

Mat3 rx(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}

Mat3 isotropic_part(const Mat3& a) { return a.trace() / 3.0 * Mat3::Identity(); }

struct SpinOps {
  std::vector<std::array<Operator, 3>> s;
};

SpinOps spin_ops(int n_spins) {
  SpinOps ops;
  for (int k = 0; k < n_spins; ++k) {
    SpinLabel l{k, SpinKind::Electron};
    ops.s.push_back({single_spin_operator(n_spins, l, Axis::X), single_spin_operator(n_spins, l, Axis::Y),
                     single_spin_operator(n_spins, l, Axis::Z)});
  }
  return ops;
}

Operator zeeman_term(const std::array<Operator, 3>& s, const Mat3& z, double b0) {
  const Vec3 w = z.col(2) * b0;
  return w(0) * s[0] + w(1) * s[1] + w(2) * s[2];
}

Operator bilinear_term(const std::array<Operator, 3>& a, const Mat3& t, const std::array<Operator, 3>& b) {
  Operator out = Operator::Zero(a[0].rows(), a[0].cols());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (t(i, j) != 0.0) out += t(i, j) * (a[i] * b[j]);
  return out;
}

void check_triple(const Vec3& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

void validate(const SpinSystem& sys) {
  if (sys.n_electrons != 1 && sys.n_electrons != 2)
    throw std::invalid_argument("n_electrons must be 1 or 2");
  if (!(sys.tau_c > 0.0) || !std::isfinite(sys.tau_c)) throw std::invalid_argument("tau_c must be positive");
  if (!(sys.temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (!(sys.mw_nutation >= 0.0)) throw std::invalid_argument("mw_nutation must be non-negative");
  if (!std::isfinite(sys.exchange_j) || !std::isfinite(sys.isotropic_hf) || !std::isfinite(sys.nucleus_gamma))
    throw std::invalid_argument("coupling constants must be finite");
  check_triple(sys.shift_eigs_ppm, "shift eigenvalues");
  check_triple(sys.shift_euler, "shift Euler angles");
  check_triple(sys.g1_eigs, "g1 eigenvalues");
  check_triple(sys.g1_euler, "g1 Euler angles");
  check_triple(sys.coords_n, "nucleus coordinates");
  check_triple(sys.coords_e1, "electron 1 coordinates");
  if ((sys.coords_e1 - sys.coords_n).norm() <= 0.1)
    throw std::invalid_argument("electron 1 and nucleus closer than 0.1 Angstrom");
  if (sys.n_electrons == 2) {
    check_triple(sys.g2_eigs, "g2 eigenvalues");
    check_triple(sys.g2_euler, "g2 Euler angles");
    check_triple(sys.coords_e2, "electron 2 coordinates");
    if ((sys.coords_e2 - sys.coords_n).norm() <= 0.1)
      throw std::invalid_argument("electron 2 and nucleus closer than 0.1 Angstrom");
    if ((sys.coords_e1 - sys.coords_e2).norm() <= 0.1)
      throw std::invalid_argument("electrons closer than 0.1 Angstrom");
  }
}

Mat3 rotation_matrix(const Vec3& euler, EulerConvention convention) {
  if (convention == EulerConvention::ZYZ) return rz(euler(0)) * ry(euler(1)) * rz(euler(2));
  return rx(euler(0)) * ry(euler(1)) * rz(euler(2));
}

Mat3 tensor_from_eigs_euler(const Vec3& eigs, const Vec3& euler, EulerConvention convention) {
  const Mat3 r = rotation_matrix(euler, convention);
  return r * eigs.asDiagonal() * r.transpose();
}

InteractionTensor point_dipolar_tensor(const Vec3& r1, const Vec3& r2, double gamma1, double gamma2,
                                       InteractionKind kind) {
  const Vec3 d = (r1 - r2) * constants::angstrom;
  const double r = d.norm();
  if (r < 0.1 * constants::angstrom) throw std::invalid_argument("point_dipolar_tensor: points closer than 0.1 Angstrom");
  const Vec3 e = d / r;
  const double k = constants::mu0_over_4pi * gamma1 * gamma2 * constants::hbar / (r * r * r);
  InteractionTensor t;
  t.matrix = k * (Mat3::Identity() - 3.0 * e * e.transpose());
  t.kind = kind;
  return t;
}

Mat3 electron_zeeman_tensor(const SpinSystem& sys, int electron) {
  if (electron < 1 || electron > sys.n_electrons) throw std::out_of_range("electron index out of range");
  const Vec3& eigs = electron == 1 ? sys.g1_eigs : sys.g2_eigs;
  const Vec3& euler = electron == 1 ? sys.g1_euler : sys.g2_euler;
  return constants::bohr_magneton / constants::hbar * tensor_from_eigs_euler(eigs, euler, sys.euler_convention);
}

Mat3 nuclear_zeeman_tensor(const SpinSystem& sys) {
  const Mat3 delta = tensor_from_eigs_euler(sys.shift_eigs_ppm, sys.shift_euler, sys.euler_convention);
  return -sys.nucleus_gamma * (Mat3::Identity() + 1e-6 * delta);
}

Mat3 hyperfine_tensor(const SpinSystem& sys, int electron) {
  if (electron < 1 || electron > sys.n_electrons) throw std::out_of_range("electron index out of range");
  const Vec3& re = electron == 1 ? sys.coords_e1 : sys.coords_e2;
  return point_dipolar_tensor(re, sys.coords_n, constants::gamma_free_electron, sys.nucleus_gamma,
                              InteractionKind::Hyperfine)
      .matrix;
}

Mat3 inter_electron_dipolar_tensor(const SpinSystem& sys) {
  if (sys.n_electrons != 2) throw std::invalid_argument("inter-electron coupling needs two electrons");
  return point_dipolar_tensor(sys.coords_e1, sys.coords_e2, constants::gamma_free_electron,
                              constants::gamma_free_electron)
      .matrix;
}

std::vector<Interaction> interactions(const SpinSystem& sys) {
  const int n = sys.nucleus_index();
  std::vector<Interaction> out;
  out.push_back({"G1", {electron_zeeman_tensor(sys, 1), InteractionKind::ElectronZeeman}, 0, -1});
  if (sys.n_electrons == 2)
    out.push_back({"G2", {electron_zeeman_tensor(sys, 2), InteractionKind::ElectronZeeman}, 1, -1});
  out.push_back({"CSA", {nuclear_zeeman_tensor(sys), InteractionKind::NuclearShift}, n, -1});
  Mat3 a1 = hyperfine_tensor(sys, 1) + 2.0 * constants::pi * sys.isotropic_hf * Mat3::Identity();
  out.push_back({"HF1", {a1, InteractionKind::Hyperfine}, 0, n});
  if (sys.n_electrons == 2) {
    out.push_back({"HF2", {hyperfine_tensor(sys, 2), InteractionKind::Hyperfine}, 1, n});
    Mat3 d = inter_electron_dipolar_tensor(sys) + 2.0 * constants::pi * sys.exchange_j * Mat3::Identity();
    out.push_back({"DD", {d, InteractionKind::InterElectronDipolar}, 0, 1});
  }
  return out;
}

double electron_frequency(const SpinSystem& sys, int electron, double b0) {
  return electron_zeeman_tensor(sys, electron).trace() / 3.0 * b0;
}

double nuclear_frequency(const SpinSystem& sys, double b0) {
  return nuclear_zeeman_tensor(sys).trace() / 3.0 * b0;
}

double mw_frequency(const SpinSystem& sys, double b0, double offset_hz) {
  return electron_frequency(sys, 1, b0) + 2.0 * constants::pi * offset_hz;
}

double drive_amplitude(const SpinSystem& sys) {
  return 2.0 * constants::pi * sys.mw_nutation * kDriveCalibration;
}

Operator assemble_static_hamiltonian(const SpinSystem& sys, double b0) {
  validate(sys);
  const auto ops = spin_ops(sys.n_spins());
  const int d = hilbert_dim(sys.n_spins());
  Operator h = Operator::Zero(d, d);
  for (const auto& in : interactions(sys)) {
    if (in.spin_b < 0)
      h += zeeman_term(ops.s[in.spin_a], in.tensor.matrix, b0);
    else
      h += bilinear_term(ops.s[in.spin_a], in.tensor.matrix, ops.s[in.spin_b]);
  }
  return 0.5 * (h + h.adjoint());
}

Operator isotropic_hamiltonian(const SpinSystem& sys, double b0) {
  validate(sys);
  const auto ops = spin_ops(sys.n_spins());
  const int d = hilbert_dim(sys.n_spins());
  Operator h = Operator::Zero(d, d);
  for (const auto& in : interactions(sys)) {
    const Mat3 iso = isotropic_part(in.tensor.matrix);
    if (in.spin_b < 0)
      h += zeeman_term(ops.s[in.spin_a], iso, b0);
    else
      h += bilinear_term(ops.s[in.spin_a], iso, ops.s[in.spin_b]);
  }
  return h;
}

Operator mw_hamiltonian(const SpinSystem& sys, double phase) {
  const int n = sys.n_spins();
  const int d = hilbert_dim(n);
  Operator h = Operator::Zero(d, d);
  const double c = std::cos(phase);
  if (c == 0.0 || sys.mw_nutation == 0.0) return h;
  // (B1/3) Tr[Z1] = 2 omega_1; the rotating-wave average keeps half of it.
  const double tr1 = electron_zeeman_tensor(sys, 1).trace();
  const double b1 = 2.0 * drive_amplitude(sys) * 3.0 / tr1;
  for (int k = 1; k <= sys.n_electrons; ++k) {
    const double tr = electron_zeeman_tensor(sys, k).trace();
    h += c * b1 / 3.0 * tr * single_spin_operator(n, {k - 1, SpinKind::Electron}, Axis::X);
  }
  return h;
}

Eigen::VectorXd electron_m(const SpinSystem& sys) {
  const int n = sys.n_spins();
  const int d = hilbert_dim(n);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < sys.n_electrons; ++k) m(i) += ((i >> (n - 1 - k)) & 1) ? -0.5 : 0.5;
  return m;
}

Operator rotating_frame_hamiltonian(const SpinSystem& sys, double b0, double omega_mw,
                                    DipolarTruncation truncation) {
  const int n = sys.n_spins();
  const int d = hilbert_dim(n);
  Operator h = isotropic_hamiltonian(sys, b0);
  for (int k = 0; k < sys.n_electrons; ++k)
    h -= omega_mw * single_spin_operator(n, {k, SpinKind::Electron}, Axis::Z);
  const Eigen::VectorXd m = electron_m(sys);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      bool keep = m(i) == m(j);
      if (truncation == DipolarTruncation::UnlikeSpin)
        for (int k = 0; k < sys.n_electrons; ++k) keep = keep && (((i ^ j) >> (n - 1 - k)) & 1) == 0;
      if (!keep) h(i, j) = 0.0;
    }
  }
  const double w1 = drive_amplitude(sys);
  const double g1 = sys.g1_eigs.mean();
  for (int k = 1; k <= sys.n_electrons; ++k) {
    const double ratio = (k == 1 ? sys.g1_eigs : sys.g2_eigs).mean() / g1;
    h += w1 * ratio * single_spin_operator(n, {k - 1, SpinKind::Electron}, Axis::X);
  }
  return h;
}

}  // namespace dnp
