#include "dnp/config.hpp"

#include <numbers>

namespace dnp {

namespace {

ConfigDocument table1() {
  ConfigDocument d;
  auto& s = d.system;
  s.name = "table1";
  s.n_electrons = 2;
  s.shift_eigs_ppm = {0, 10, 20};
  s.shift_euler_rad = {0, 0, 0};
  s.g1_eigs = {2.0034, 2.0038, 2.0038};
  s.g1_euler_rad = {-0.872, -0.013, 0.868};
  s.g2_eigs = Triple{2.0057, 2.0030, 2.0030};
  s.g2_euler_rad = Triple{-1.145, 0.061, 1.143};
  s.coords_n_angstrom = {0, 0, 0};
  s.coords_e1_angstrom = {5.090, 0.010, 0.958};
  s.coords_e2_angstrom = Triple{-5.090, 0.061, 1.032};
  s.tau_c_ps = 100;
  s.mw_nutation_MHz = 1.0;
  s.exchange_J_MHz = 3.0;
  d.conditions = {14.1, 298.0, -0.62};
  return d;
}

ConfigDocument table_s1_a() {
  ConfigDocument d;
  auto& s = d.system;
  s.name = "tableS1A";
  s.n_electrons = 2;
  s.shift_eigs_ppm = {0, 10, 20};
  s.shift_euler_rad = {0, 0, 0};
  s.g1_eigs = {1.977873, 1.977798, 1.977792};
  s.g1_euler_rad = {0, 0, 0};
  s.g2_eigs = Triple{1.977919, 1.978000, 1.979000};
  s.g2_euler_rad = Triple{-0.590, 0.100, 0.490};
  s.coords_n_angstrom = {0, 0, 0};
  s.coords_e1_angstrom = {7.0300, 0.0187, 0.9820};
  s.coords_e2_angstrom = Triple{-7.0300, 0.2015, 1.0001};
  s.tau_c_ps = 100;
  s.mw_nutation_MHz = 1.0;
  s.exchange_J_MHz = 6.2;
  d.conditions = {14.1, 298.0, 15.4};
  return d;
}

ConfigDocument table_s1_b() {
  ConfigDocument d;
  auto& s = d.system;
  s.name = "tableS1B";
  s.n_electrons = 2;
  s.shift_eigs_ppm = {0, 10, 20};
  s.shift_euler_rad = {0, 0, 0};
  s.g1_eigs = {1.977800, 1.977600, 1.977600};
  s.g1_euler_rad = {-0.180, 0.017, 0.194};
  s.g2_eigs = Triple{2.006800, 2.003800, 2.003800};
  s.g2_euler_rad = Triple{0.632, 0.783, 1.086};
  s.coords_n_angstrom = {0, 0, 0};
  s.coords_e1_angstrom = {6.000, 0.030, 0.317};
  s.coords_e2_angstrom = Triple{-6.000, -0.038, 0.535};
  s.tau_c_ps = 100;
  s.mw_nutation_MHz = 1.0;
  s.exchange_J_MHz = 5.0;
  d.conditions = {14.1, 298.0, 3.2};
  return d;
}

// Single electron with a contact coupling; g-tensor angles are relative to the shift tensor.
ConfigDocument figure1() {
  ConfigDocument d;
  auto& s = d.system;
  s.name = "figure1";
  s.n_electrons = 1;
  s.euler_convention = EulerConvention::XYZ;
  s.shift_eigs_ppm = {15, 5, -20};
  s.shift_euler_rad = {0, 0, 0};
  s.g1_eigs = {2.00210, 2.00250, 2.00290};
  s.g1_euler_rad = {std::numbers::pi / 3, std::numbers::pi / 4, std::numbers::pi / 5};
  s.coords_n_angstrom = {0, 0, 0};
  s.coords_e1_angstrom = {0, 0, 3};
  s.tau_c_ps = 10;
  s.isotropic_hf_MHz = 20;
  s.mw_nutation_MHz = 1.0;  // not stated for this system
  d.conditions = {14.1, 298.0, 0.0};
  return d;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"table1", "tableS1A", "tableS1B", "figure1"};
  return names;
}

ConfigDocument fixture(const std::string& name) {
  if (name == "table1") return table1();
  if (name == "tableS1A") return table_s1_a();
  if (name == "tableS1B") return table_s1_b();
  if (name == "figure1") return figure1();
  throw ConfigError("unknown fixture '" + name + "' (known: table1, tableS1A, tableS1B, figure1)");
}

SpinSystem fixture_system(const std::string& name) { return to_spin_system(fixture(name)); }

}  // namespace dnp
