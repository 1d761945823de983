#pragma once

#include "dnp/hamiltonian.hpp"
#include "dnp/sweeps.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnp {

// Carries the 1-based line of the offending text when it can be located (0 otherwise).
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& message, int line = 0);
  int line;
};

using Triple = std::array<double, 3>;

// Values are kept in document units so that parse -> serialize -> parse is exact.
struct SystemConfig {
  std::string name;
  int n_electrons = 2;
  EulerConvention euler_convention = EulerConvention::ZYZ;
  Triple shift_eigs_ppm{};
  Triple shift_euler_rad{};
  Triple g1_eigs{};
  Triple g1_euler_rad{};
  std::optional<Triple> g2_eigs;
  std::optional<Triple> g2_euler_rad;
  Triple coords_n_angstrom{};
  Triple coords_e1_angstrom{};
  std::optional<Triple> coords_e2_angstrom;
  double tau_c_ps = 100.0;
  double exchange_J_MHz = 0.0;
  double isotropic_hf_MHz = 0.0;
  double mw_nutation_MHz = 1.0;

  bool operator==(const SystemConfig&) const = default;
};

struct ConditionsConfig {
  double B0_tesla = 14.1;
  double temperature_K = 298.0;
  double mw_offset_MHz = 0.0;

  bool operator==(const ConditionsConfig&) const = default;
};

struct AxisConfig {
  SweepAxis quantity = SweepAxis::B0;
  double start = 0.0;  // document units of the quantity
  double stop = 0.0;
  int points = 21;
  Spacing spacing = Spacing::Linear;

  bool operator==(const AxisConfig&) const = default;
};

struct SweepConfig {
  AxisConfig axis1;
  std::optional<AxisConfig> axis2;  // absent for tau_c traces
  std::vector<std::string> observables{"Nz"};
  Normalization normalization = Normalization::ThermalNuclear;
  Frame frame = Frame::Rotating;
  DipolarTruncation truncation = DipolarTruncation::LikeSpin;

  bool operator==(const SweepConfig&) const = default;
};

struct ParameterBoundConfig {
  std::string name;  // a system key, with [i] for vector entries
  double lower = 0.0;
  double upper = 0.0;

  bool operator==(const ParameterBoundConfig&) const = default;
};

struct OptimizeConfig {
  int budget = 40;
  std::uint64_t seed = 1;
  double offset_start_MHz = -40.0;
  double offset_stop_MHz = 40.0;
  int offset_points = 81;
  std::vector<ParameterBoundConfig> parameters;

  bool operator==(const OptimizeConfig&) const = default;
};

struct ConfigDocument {
  SystemConfig system;
  ConditionsConfig conditions;
  std::optional<SweepConfig> sweep;
  std::vector<AblationSwitch> ablation;
  std::optional<OptimizeConfig> optimize;

  bool operator==(const ConfigDocument&) const = default;
};

// Strict JSON. Throws ConfigError.
ConfigDocument parse_config(const std::string& text);
std::string serialize_config(const ConfigDocument& doc);

SpinSystem to_spin_system(const ConfigDocument& doc);
SweepSpec to_sweep_spec(const ConfigDocument& doc);  // needs a sweep section with two axes
Ablation to_ablation(const ConfigDocument& doc);

// Built-in fixtures: table1, tableS1A, tableS1B, figure1.
const std::vector<std::string>& fixture_names();
ConfigDocument fixture(const std::string& name);  // throws ConfigError for unknown names
SpinSystem fixture_system(const std::string& name);

}  // namespace dnp
