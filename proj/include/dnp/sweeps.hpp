#pragma once

#include "dnp/hamiltonian.hpp"
#include "dnp/steady_state.hpp"

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace dnp {

enum class SweepAxis { B0, MwOffset, TauC };
enum class Spacing { Linear, Log };

// Internal units: tesla, Hz (offset from electron 1), seconds.
struct AxisSpec {
  SweepAxis kind = SweepAxis::B0;
  double start = 0.0;
  double stop = 1.0;
  int points = 2;
  Spacing spacing = Spacing::Linear;

  std::vector<double> values() const;
  bool operator==(const AxisSpec&) const = default;
};

std::string axis_name(SweepAxis a);  // column header, document units

enum class Normalization { None, ThermalNuclear };
enum class Frame { Rotating, Lab };

struct SweepSpec {
  AxisSpec axis1{SweepAxis::B0, 1.0, 21.0, 21, Spacing::Linear};
  AxisSpec axis2{SweepAxis::MwOffset, -10e6, 10e6, 21, Spacing::Linear};
  std::vector<std::string> observables{"Nz"};
  Normalization normalization = Normalization::ThermalNuclear;
  Frame frame = Frame::Rotating;
  DipolarTruncation truncation = DipolarTruncation::LikeSpin;
  // Values for whichever quantities are not swept.
  double b0 = 14.1;
  double offset_hz = 0.0;

  bool operator==(const SweepSpec&) const = default;
};

// Throws std::invalid_argument.
void validate(const SweepSpec& spec);

enum class AblationSwitch { ZeroG1Anisotropy, ZeroG2Anisotropy, ZeroCSA, ZeroExchange, ZeroIsotropicHF, RemoveElectron2 };

struct Ablation {
  std::set<AblationSwitch> switches;
  bool operator==(const Ablation&) const = default;
};

std::string ablation_name(AblationSwitch s);
AblationSwitch parse_ablation(const std::string& name);  // throws std::invalid_argument

SpinSystem apply_ablation(const SpinSystem& sys, const Ablation& ablation);

struct GridPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  std::vector<double> values;  // one per observable, NaN on failure
  bool ok = false;
  std::string error;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<double> axis1;
  std::vector<double> axis2;
  std::vector<GridPoint> points;  // axis1 outer, axis2 inner

  const GridPoint& at(std::size_t i, std::size_t j) const { return points[i * axis2.size() + j]; }
  std::size_t failures() const;
};

SweepResult run_sweep(const SpinSystem& sys, const SweepSpec& spec, const Ablation& ablation = {});
// Same kernel, one thread; kept as the reference for the parallel path.
SweepResult run_sweep_serial(const SpinSystem& sys, const SweepSpec& spec, const Ablation& ablation = {});

void write_csv(const SweepResult& result, std::ostream& out);
// Heatmap of one observable, linear color scale.
void write_svg(const SweepResult& result, std::ostream& out, std::size_t observable = 0);

// max |value - 1| over points with a B0 coordinate >= b0_min (all points when B0 is not swept).
double max_enhancement_deviation(const SweepResult& result, double b0_min = 0.0, std::size_t observable = 0);
// max |a - b| / max |b| over points that succeeded in both.
double max_relative_map_change(const SweepResult& a, const SweepResult& b, std::size_t observable = 0);

struct TraceResult {
  std::vector<double> tau_c;
  std::vector<std::string> ops;
  std::vector<std::vector<double>> values;  // [tau index][op index]
  std::vector<std::string> errors;          // empty when the point succeeded
};

TraceResult operator_amplitude_trace(const SpinSystem& sys, double b0, double offset_hz,
                                     const std::vector<double>& tau_c, const std::vector<std::string>& ops);
void write_csv(const TraceResult& trace, std::ostream& out);

}  // namespace dnp
