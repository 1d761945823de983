#pragma once

#include "dnp/hamiltonian.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dnp {

// Parameter names are config keys in document units, with [i] for vector entries,
// e.g. "tau_c_ps", "exchange_J_MHz", "g1_eigs[2]", "coords_e1_angstrom[0]", "g2_euler_zyz_rad[1]".
bool is_parameter_name(const std::string& name);
double get_parameter(const SpinSystem& sys, const std::string& name);
void set_parameter(SpinSystem& sys, const std::string& name, double value);

struct ParameterBound {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
};

// Eq-19 style objective: max(-min, max) of the steady-state nuclear polarization over the offsets.
// Offsets in Hz relative to electron 1. Failed offsets are skipped; throws when all fail.
double objective(const SpinSystem& sys, double b0, const std::vector<double>& offsets_hz);

struct SearchOptions {
  int budget = 40;
  std::uint64_t seed = 1;
  double b0 = 14.1;
  std::vector<double> offsets_hz;
  double sampling_fraction = 0.5;  // share of the budget after the base point spent on Latin hypercube samples
};

struct Evaluation {
  int index = 0;
  std::string stage;  // base, sample, refine
  std::vector<double> x;
  double objective = 0.0;
  bool ok = false;
  std::string error;
  double incumbent = 0.0;  // best objective so far, non-decreasing
};

struct SearchResult {
  std::vector<ParameterBound> bounds;
  std::vector<double> best_x;
  double best_objective = 0.0;
  SpinSystem best_system;
  std::vector<Evaluation> log;
};

// Latin hypercube sampling, then Nelder-Mead from the incumbent. Deterministic for a fixed seed.
SearchResult search(const SpinSystem& base, const std::vector<ParameterBound>& bounds, const SearchOptions& options);

void write_csv(const SearchResult& result, std::ostream& out);

}  // namespace dnp
