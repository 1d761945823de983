#pragma once

#include "dnp/fourier.hpp"
#include "dnp/hamiltonian.hpp"
#include "dnp/krylov.hpp"
#include "dnp/relaxation.hpp"

#include <Eigen/Sparse>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnp {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SteadyState {
  Operator rho;
  std::map<std::string, double> observables;
  double residual = 0.0;
  int iterations = 0;
};

// Signed normalized amplitude for Hermitian observables, magnitude otherwise.
double observable_value(const Operator& rho, const Operator& obs);
void extract_observables(SteadyState& s, const std::vector<std::string>& names, int n_electrons);

// (R - i comm(H)) x = R vec(rho_eq), trace fixed to 1. Throws SolverError when singular.
SteadyState solve_rotating_frame(const Operator& h_rot, const Superoperator& r, const Operator& rho_eq);

// Lab-frame phase-grid block system.
struct FokkerPlanckSystem {
  PhaseGrid grid;
  double omega_mw = 0.0;
  int hilbert_dim = 0;
  Superoperator static_part;  // -i comm(H0) + R
  Superoperator drive_part;   // -i comm(H_mw(phase 0)); block k adds cos(phi_k) times this
  Superoperator relaxation;
  LiouvilleVector relaxed_equilibrium;  // R vec(rho_eq), replicated per block
  Eigen::SparseMatrix<cplx> matrix;     // dimension N 4^n, column-stacked blocks
  Eigen::VectorXcd rhs;

  Superoperator block(int k) const;
  Eigen::Index dimension() const { return matrix.rows(); }
};

FokkerPlanckSystem assemble_fokker_planck(const SpinSystem& sys, double b0, double omega_mw, const PhaseGrid& grid,
                                          const Superoperator& r, const Operator& rho_eq);

enum class Preconditioner { HarmonicBlockTridiagonal, BlockJacobi, None };

struct LabSolveOptions {
  GmresOptions gmres{40, 2000, 1e-10};
  Preconditioner preconditioner = Preconditioner::HarmonicBlockTridiagonal;
  bool direct_fallback = true;
};

struct LabFrameSolution {
  SteadyState average;
  std::vector<Operator> orbit;
  bool used_fallback = false;
};

LabFrameSolution solve_lab_frame(const FokkerPlanckSystem& system, const LabSolveOptions& options = {});

// Orbit average after undoing the microwave phase on the electrons, so electron coherences
// can be compared with the rotating-frame solution. Orbit point k sits at phase 2 pi k / N.
Operator corotating_average(const LabFrameSolution& sol, const SpinSystem& sys);

// Convenience wrappers; offset is relative to electron 1 in Hz.
SteadyState rotating_frame_steady_state(const SpinSystem& sys, double b0, double offset_hz, const Superoperator& r,
                                        DipolarTruncation truncation = DipolarTruncation::LikeSpin);
SteadyState rotating_frame_steady_state(const SpinSystem& sys, double b0, double offset_hz);

struct LabConvergence {
  int n_points = 32;
  int max_points = 256;
  double relative_change = 1e-3;  // on the averaged nuclear observable
  bool refine = true;
};
LabFrameSolution lab_frame_steady_state(const SpinSystem& sys, double b0, double offset_hz, const Superoperator& r,
                                        const LabConvergence& conv = {}, const LabSolveOptions& options = {});

}  // namespace dnp
