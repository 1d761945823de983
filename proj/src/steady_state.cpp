#include "dnp/steady_state.hpp"

#include "dnp/product_operator.hpp"

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include <cmath>
#include <iostream>
#include <memory>
#include <numbers>
#include <vector>

namespace dnp {

double observable_value(const Operator& rho, const Operator& obs) {
  if (is_hermitian(obs)) return signed_amplitude(rho, obs);
  return amplitude(rho, obs);
}

void extract_observables(SteadyState& s, const std::vector<std::string>& names, int n_electrons) {
  for (const auto& name : names) s.observables[name] = observable_value(s.rho, parse_product_operator(name, n_electrons));
}

namespace {

int spins_from_liouville(Eigen::Index l) {
  int n = 0;
  while ((Eigen::Index(1) << (2 * n)) < l) ++n;
  if ((Eigen::Index(1) << (2 * n)) != l) throw DimensionError("Liouville dimension is not a power of 4");
  return n;
}

Operator hermitize(const Operator& x) { return 0.5 * (x + x.adjoint()); }

}  // namespace

SteadyState solve_rotating_frame(const Operator& h_rot, const Superoperator& r, const Operator& rho_eq) {
  const Eigen::Index l = r.rows();
  if (h_rot.size() != l || rho_eq.size() != l) throw DimensionError("solve_rotating_frame: dimension mismatch");
  const ProductBasis basis(spins_from_liouville(l));
  const double d = static_cast<double>(h_rot.rows());
  const cplx mi(0.0, -1.0);
  const Eigen::MatrixXcd a = basis.transform(r + mi * commutation_superoperator(h_rot));
  const Eigen::VectorXcd b = basis.coordinates(r * vec(rho_eq));
  const Eigen::Index m = l - 1;
  const double c0 = 1.0 / std::sqrt(d);
  const Eigen::MatrixXcd ar = a.bottomRightCorner(m, m);
  const Eigen::VectorXcd br = b.tail(m) - a.col(0).tail(m) * c0;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(ar);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) throw SolverError("solve_rotating_frame: singular steady-state system (rcond " + std::to_string(rc) + ")");
  Eigen::VectorXcd c(l);
  c(0) = c0;
  c.tail(m) = lu.solve(br);
  SteadyState s;
  s.rho = hermitize(unvec(basis.from_coordinates(c)));
  s.residual = (ar * c.tail(m) - br).norm() / std::max(br.norm(), 1e-300);
  return s;
}

Superoperator FokkerPlanckSystem::block(int k) const {
  return static_part + std::cos(grid.phases[k]) * drive_part;
}

FokkerPlanckSystem assemble_fokker_planck(const SpinSystem& sys, double b0, double omega_mw, const PhaseGrid& grid,
                                          const Superoperator& r, const Operator& rho_eq) {
  FokkerPlanckSystem fp{grid, omega_mw, hilbert_dim(sys.n_spins()), {}, {}, r, r * vec(rho_eq), {}, {}};
  const cplx mi(0.0, -1.0);
  fp.static_part = mi * commutation_superoperator(isotropic_hamiltonian(sys, b0)) + r;
  fp.drive_part = mi * commutation_superoperator(mw_hamiltonian(sys, 0.0));
  const Eigen::Index l = r.rows();
  const int n = grid.n_points;
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (l * l + n * l));
  for (int k = 0; k < n; ++k) {
    const Superoperator blk = fp.block(k);
    for (Eigen::Index j = 0; j < l; ++j)
      for (Eigen::Index i = 0; i < l; ++i)
        if (blk(i, j) != cplx(0.0)) trips.emplace_back(k * l + i, k * l + j, blk(i, j));
    for (int q = 0; q < n; ++q) {
      const double dkq = grid.diff_matrix(k, q);
      if (dkq == 0.0 || omega_mw == 0.0) continue;
      for (Eigen::Index i = 0; i < l; ++i) trips.emplace_back(k * l + i, q * l + i, omega_mw * dkq);
    }
  }
  fp.matrix.resize(n * l, n * l);
  fp.matrix.setFromTriplets(trips.begin(), trips.end());
  fp.rhs = fp.relaxed_equilibrium.replicate(n, 1);
  return fp;
}

namespace {

// Grid system in the reduced product basis (identity component removed). Vectors are
// stored grid-major: x = [x_0; x_1; ...], each of length m = 4^n - 1.
class ReducedGridOperator {
 public:
  ReducedGridOperator(const FokkerPlanckSystem& fp, const ProductBasis& basis)
      : n_(fp.grid.n_points), omega_(fp.omega_mw), d_(fp.grid.diff_matrix) {
    const Eigen::Index l = fp.static_part.rows();
    m_ = l - 1;
    s0_ = basis.transform(fp.static_part).bottomRightCorner(m_, m_);
    s1_ = basis.transform(fp.drive_part).bottomRightCorner(m_, m_);
    cosines_.resize(n_);
    for (int k = 0; k < n_; ++k) cosines_(k) = std::cos(fp.grid.phases[k]);
    b_ = basis.coordinates(fp.relaxed_equilibrium).tail(m_);
  }

  Eigen::Index block_size() const { return m_; }
  int points() const { return n_; }
  Eigen::Index size() const { return m_ * n_; }
  const Eigen::MatrixXcd& s0() const { return s0_; }
  const Eigen::MatrixXcd& s1() const { return s1_; }
  double omega() const { return omega_; }
  double cosine(int k) const { return cosines_(k); }

  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    const Eigen::Map<const Eigen::MatrixXcd> x(in.data(), m_, n_);
    out.resize(size());
    Eigen::Map<Eigen::MatrixXcd> y(out.data(), m_, n_);
    y.noalias() = s0_ * x;
    y.noalias() += (s1_ * x) * cosines_.cast<cplx>().asDiagonal();
    if (omega_ != 0.0) y.noalias() += omega_ * (x * d_.transpose().cast<cplx>());
  }

  Eigen::VectorXcd rhs() const { return b_.replicate(n_, 1); }

  // Cheap upper-bound scale for the operator 2-norm.
  double norm_estimate() const {
    const auto inf = [](const Eigen::MatrixXcd& x) { return x.cwiseAbs().rowwise().sum().maxCoeff(); };
    return inf(s0_) + inf(s1_) + std::abs(omega_) * d_.cwiseAbs().rowwise().sum().maxCoeff();
  }

  Eigen::SparseMatrix<cplx> sparse() const {
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int k = 0; k < n_; ++k) {
      const Eigen::MatrixXcd blk = s0_ + cosines_(k) * s1_;
      for (Eigen::Index j = 0; j < m_; ++j)
        for (Eigen::Index i = 0; i < m_; ++i)
          if (blk(i, j) != cplx(0.0)) trips.emplace_back(k * m_ + i, k * m_ + j, blk(i, j));
      for (int q = 0; q < n_; ++q) {
        if (d_(k, q) == 0.0 || omega_ == 0.0) continue;
        for (Eigen::Index i = 0; i < m_; ++i) trips.emplace_back(k * m_ + i, q * m_ + i, omega_ * d_(k, q));
      }
    }
    Eigen::SparseMatrix<cplx> a(size(), size());
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
  }

 private:
  int n_;
  double omega_;
  Eigen::MatrixXd d_;
  Eigen::Index m_;
  Eigen::MatrixXcd s0_, s1_;
  Eigen::VectorXd cosines_;
  Eigen::VectorXcd b_;
};

// Exact inverse of the system in the harmonic (DFT) domain with the cyclic corner
// coupling between the highest and lowest harmonics dropped.
class HarmonicPreconditioner {
 public:
  explicit HarmonicPreconditioner(const ReducedGridOperator& a) : m_(a.block_size()), n_(a.points()) {
    const double pi = std::acos(-1.0);
    harmonics_.resize(n_);
    for (int i = 0; i < n_; ++i) harmonics_[i] = i - n_ / 2 + 1;
    forward_.resize(n_, n_);
    inverse_.resize(n_, n_);
    for (int k = 0; k < n_; ++k)
      for (int i = 0; i < n_; ++i) {
        const double ph = 2.0 * pi * k / n_ * harmonics_[i];
        forward_(k, i) = std::polar(1.0 / n_, -ph);
        inverse_(i, k) = std::polar(1.0, ph);
      }
    const Eigen::MatrixXcd c = 0.5 * a.s1();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m_, m_);
    lu_.reserve(n_);
    g_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const int h = harmonics_[i];
      const double mprime = (2 * h == n_) ? 0.0 : static_cast<double>(h);
      Eigen::MatrixXcd blk = a.s0() + cplx(0.0, mprime * a.omega()) * id;
      if (i > 0) blk -= c * g_[i - 1];
      lu_.emplace_back(blk);
      g_[i] = lu_[i].solve(c);
    }
    c_ = c;
  }

  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    const Eigen::Map<const Eigen::MatrixXcd> r(in.data(), m_, n_);
    Eigen::MatrixXcd rh = r * forward_;
    Eigen::MatrixXcd z(m_, n_);
    for (int i = 0; i < n_; ++i) {
      Eigen::VectorXcd rhs = rh.col(i);
      if (i > 0) rhs -= c_ * z.col(i - 1);
      z.col(i) = lu_[i].solve(rhs);
    }
    for (int i = n_ - 2; i >= 0; --i) z.col(i) -= g_[i] * z.col(i + 1);
    out.resize(m_ * n_);
    Eigen::Map<Eigen::MatrixXcd> x(out.data(), m_, n_);
    x.noalias() = z * inverse_;
  }

 private:
  Eigen::Index m_;
  int n_;
  std::vector<int> harmonics_;
  Eigen::MatrixXcd forward_, inverse_, c_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;
  std::vector<Eigen::MatrixXcd> g_;
};

class BlockJacobiPreconditioner {
 public:
  explicit BlockJacobiPreconditioner(const ReducedGridOperator& a) : m_(a.block_size()), n_(a.points()) {
    for (int k = 0; k < n_; ++k) lu_.emplace_back(Eigen::MatrixXcd(a.s0() + a.cosine(k) * a.s1()));
  }

  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    out.resize(in.size());
    for (int k = 0; k < n_; ++k) out.segment(k * m_, m_) = lu_[k].solve(in.segment(k * m_, m_));
  }

 private:
  Eigen::Index m_;
  int n_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;
};

}  // namespace

LabFrameSolution solve_lab_frame(const FokkerPlanckSystem& system, const LabSolveOptions& options) {
  const Eigen::Index l = system.static_part.rows();
  const ProductBasis basis(spins_from_liouville(l));
  const ReducedGridOperator a(system, basis);
  const Eigen::VectorXcd b = a.rhs();
  const LinearMap op = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { a.apply(in, out); };

  LinearMap pre;
  std::unique_ptr<HarmonicPreconditioner> harmonic;
  std::unique_ptr<BlockJacobiPreconditioner> jacobi;
  if (options.preconditioner == Preconditioner::HarmonicBlockTridiagonal) {
    harmonic = std::make_unique<HarmonicPreconditioner>(a);
    pre = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { harmonic->apply(in, out); };
  } else if (options.preconditioner == Preconditioner::BlockJacobi) {
    jacobi = std::make_unique<BlockJacobiPreconditioner>(a);
    pre = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { jacobi->apply(in, out); };
  }

  LabFrameSolution sol;
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(a.size());
  GmresOptions go = options.gmres;
  // The phase derivative (~omega_MW) and nuclear relaxation (~1e2 s^-1) span ~11 decades,
  // so ||b - Ax|| / ||b|| floors near 1e-6 in double precision; use the backward error.
  const double norm_a = a.norm_estimate();
  go.operator_norm = norm_a;
  const GmresResult gr = gmres(op, pre, b, x, go);
  sol.average.iterations = gr.iterations;
  sol.average.residual = gr.backward_error;
  if (!gr.converged) {
    if (!options.direct_fallback)
      throw SolverError("solve_lab_frame: GMRES did not converge (backward error " +
                        std::to_string(gr.backward_error) + ")");
    std::cerr << "warning: GMRES stalled at backward error " << gr.backward_error
              << " after " << gr.iterations << " iterations; using a direct sparse solve\n";
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    const Eigen::SparseMatrix<cplx> sp = a.sparse();
    lu.compute(sp);
    if (lu.info() != Eigen::Success) throw SolverError("solve_lab_frame: sparse factorization failed");
    x = lu.solve(b);
    Eigen::VectorXcd ax;
    a.apply(x, ax);
    sol.average.residual = (ax - b).norm() / (norm_a * x.norm() + b.norm());
    sol.used_fallback = true;
  }

  const Eigen::Index m = a.block_size();
  const double c0 = 1.0 / std::sqrt(static_cast<double>(system.hilbert_dim));
  Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(l);
  sol.orbit.reserve(a.points());
  for (int k = 0; k < a.points(); ++k) {
    Eigen::VectorXcd c(l);
    c(0) = c0;
    c.tail(m) = x.segment(k * m, m);
    mean += c;
    sol.orbit.push_back(hermitize(unvec(basis.from_coordinates(c))));
  }
  mean /= static_cast<double>(a.points());
  sol.average.rho = hermitize(unvec(basis.from_coordinates(mean)));
  return sol;
}

Operator corotating_average(const LabFrameSolution& sol, const SpinSystem& sys) {
  const auto n = sol.orbit.size();
  if (n == 0) throw std::invalid_argument("corotating_average: empty orbit");
  const Eigen::VectorXd m = electron_m(sys);
  if (m.size() != sol.orbit.front().rows()) throw DimensionError("corotating_average: system does not match orbit");
  Operator avg = Operator::Zero(m.size(), m.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    const Eigen::VectorXcd u = (cplx(0.0, -1.0) * phi * m.cast<cplx>()).array().exp();
    avg += u.asDiagonal() * sol.orbit[k] * u.conjugate().asDiagonal();
  }
  return avg / static_cast<double>(n);
}

SteadyState rotating_frame_steady_state(const SpinSystem& sys, double b0, double offset_hz, const Superoperator& r,
                                        DipolarTruncation truncation) {
  const double wmw = mw_frequency(sys, b0, offset_hz);
  const Operator h = rotating_frame_hamiltonian(sys, b0, wmw, truncation);
  const Operator rho_eq = thermal_state(isotropic_hamiltonian(sys, b0), sys.temperature);
  return solve_rotating_frame(h, rotating_frame_relaxation(r, sys), rho_eq);
}

SteadyState rotating_frame_steady_state(const SpinSystem& sys, double b0, double offset_hz) {
  return rotating_frame_steady_state(sys, b0, offset_hz, brw_superoperator(sys, b0).matrix);
}

LabFrameSolution lab_frame_steady_state(const SpinSystem& sys, double b0, double offset_hz, const Superoperator& r,
                                        const LabConvergence& conv, const LabSolveOptions& options) {
  const double wmw = mw_frequency(sys, b0, offset_hz);
  const Operator rho_eq = thermal_state(isotropic_hamiltonian(sys, b0), sys.temperature);
  const Operator nz = single_spin_operator(sys.n_spins(), {sys.nucleus_index(), SpinKind::Nucleus}, Axis::Z);
  int n = conv.n_points;
  LabFrameSolution sol = solve_lab_frame(assemble_fokker_planck(sys, b0, wmw, PhaseGrid(n), r, rho_eq), options);
  if (!conv.refine) return sol;
  while (2 * n <= conv.max_points) {
    n *= 2;
    LabFrameSolution finer = solve_lab_frame(assemble_fokker_planck(sys, b0, wmw, PhaseGrid(n), r, rho_eq), options);
    const double a = expectation(sol.average.rho, nz), b = expectation(finer.average.rho, nz);
    sol = std::move(finer);
    if (std::abs(a - b) <= conv.relative_change * std::abs(b)) return sol;
  }
  throw SolverError("lab_frame_steady_state: phase grid did not converge up to " + std::to_string(conv.max_points) +
                    " points");
}

}  // namespace dnp
