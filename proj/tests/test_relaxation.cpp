#include "doctest.h"

#include "dnp/config.hpp"
#include "dnp/relaxation.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace dnp;

TEST_SUITE("relaxation") {
  TEST_CASE("spectral density") {
    CHECK(spectral_density(0.0, 1e-10) == 1e-10);
    CHECK(spectral_density(1e10, 1e-10) == doctest::Approx(0.5e-10));
    CHECK(spectral_density(-3e10, 1e-10) == spectral_density(3e10, 1e-10));
    CHECK_THROWS(spectral_density(1.0, 0.0));
  }

  TEST_CASE("rank-2 decomposition reconstructs the anisotropic part") {
    const Mat3 t = tensor_from_eigs_euler(Vec3(1.0, 3.0, -7.0), Vec3(0.2, 1.0, -0.4));
    const Rank2Decomposition d = decompose_rank2(t);
    CHECK(d.isotropic == doctest::Approx(-1.0));
    CHECK((d.anisotropic() + Mat3::Identity() * d.isotropic - t).norm() < 1e-13);
    const auto& basis = spherical_rank2_basis();
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) {
        const cplx ip = (basis[a].conjugate().cwiseProduct(basis[b])).sum();
        CHECK(std::abs(ip - cplx(a == b ? 1.0 : 0.0)) < 1e-14);
      }
    Mat3 bad = Mat3::Zero();
    bad(0, 1) = 1.0;
    CHECK_THROWS(decompose_rank2(bad));
  }

  TEST_CASE("orientation quadrature reproduces the rank-2 superoperator") {
    for (const auto& [name, b0] : {std::pair{"figure1", 14.1}, std::pair{"table1", 14.1}, std::pair{"table1", 0.35},
                                   std::pair{"tableS1B", 3.4}}) {
      CAPTURE(name);
      CAPTURE(b0);
      const SpinSystem sys = fixture_system(name);
      const Superoperator r = brw_superoperator(sys, b0).matrix;
      const Superoperator q = oracle::quadrature_redfield(sys, b0);
      CHECK((r - q).norm() < 1e-10 * q.norm());
    }
  }

  TEST_CASE("secular parts are negative semidefinite and the lab Liouvillian is stable") {
    for (const auto& name : fixture_names()) {
      CAPTURE(name);
      const SpinSystem sys = fixture_system(name);
      const Operator h0 = isotropic_hamiltonian(sys, 14.1);
      const Superoperator r = brw_superoperator(sys, 14.1).matrix;
      const int d = static_cast<int>(h0.rows());

      // Eigen-Liouville basis |a><b| of the isotropic Hamiltonian.
      Eigen::SelfAdjointEigenSolver<Operator> es(h0);
      const Eigen::MatrixXcd u = kron(es.eigenvectors().conjugate(), es.eigenvectors());
      Eigen::MatrixXcd sec = u.adjoint() * r * u;
      Eigen::VectorXd f(d * d);
      for (int b = 0; b < d; ++b)
        for (int a = 0; a < d; ++a) f(a + d * b) = es.eigenvalues()(a) - es.eigenvalues()(b);
      for (int i = 0; i < d * d; ++i)
        for (int j = 0; j < d * d; ++j)
          if (std::abs(f(i) - f(j)) > 2.0 * 3.141592653589793 * 1e3) sec(i, j) = 0.0;
      const Eigen::MatrixXcd hs = 0.5 * (sec + sec.adjoint());
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(hs).eigenvalues().maxCoeff() < 1e-12 * r.norm());

      const ProductBasis basis(sys.n_spins());
      const Eigen::MatrixXd t = basis.transform(rotating_frame_relaxation(r, sys)).real();
      const Eigen::MatrixXd ts = 0.5 * (t + t.transpose());
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ts).eigenvalues().maxCoeff() < 1e-12 * r.norm());

      // Non-secular Redfield terms are not semidefinite on their own; with the coherent
      // part the dynamics must still be stable.
      const Eigen::MatrixXcd l = cplx(0.0, -1.0) * commutation_superoperator(h0) + r;
      CHECK(Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(l).eigenvalues().real().maxCoeff() < 1e-10 * r.norm());
      CHECK(basis.transform(r).imag().norm() < 1e-12 * r.norm());
    }
  }

  TEST_CASE("trace conservation") {
    for (const auto& name : fixture_names()) {
      const SpinSystem sys = fixture_system(name);
      const Superoperator r = brw_superoperator(sys, 14.1).matrix;
      const LiouvilleVector id = vec(identity_operator(sys.n_spins()));
      CHECK((r * id).norm() < 1e-12 * r.norm());
      CHECK((id.adjoint() * r).norm() < 1e-12 * r.norm());
    }
  }

  TEST_CASE("rates are invariant under rotation of the whole molecule") {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const auto& name : fixture_names()) {
      CAPTURE(name);
      const SpinSystem sys = fixture_system(name);
      const Superoperator r = brw_superoperator(sys, 14.1).matrix;
      for (int trial = 0; trial < 3; ++trial) {
        const Mat3 q = rotation_matrix(Vec3(u(g), u(g), u(g)));
        const Superoperator rr = brw_superoperator(oracle::rotate_molecule(sys, q), 14.1).matrix;
        CHECK((r - rr).cwiseAbs().maxCoeff() < 1e-8 * r.cwiseAbs().maxCoeff());
      }
    }
  }

  TEST_CASE("thermalized action vanishes at equilibrium") {
    const SpinSystem sys = fixture_system("table1");
    const auto r = brw_superoperator(sys, 14.1);
    const Operator eq = thermal_state(isotropic_hamiltonian(sys, 14.1), sys.temperature);
    const auto act = thermalized_action(r, eq);
    CHECK(act(eq).norm() == 0.0);
    const Operator nz = single_spin_operator(3, {2, SpinKind::Nucleus}, Axis::Z);
    CHECK((act(Operator(eq + 1e-3 * nz)) - 1e-3 * r.matrix * vec(nz)).norm() < 1e-12 * r.matrix.norm());
  }

  TEST_CASE("frame-secular part keeps equal coherence orders only") {
    const SpinSystem sys = fixture_system("table1");
    const Superoperator r = brw_superoperator(sys, 14.1).matrix;
    const Superoperator s = rotating_frame_relaxation(r, sys);
    CHECK((rotating_frame_relaxation(s, sys) - s).norm() == 0.0);
    const Operator nz = single_spin_operator(3, {2, SpinKind::Nucleus}, Axis::Z);
    const Operator ez = single_spin_operator(3, {0, SpinKind::Electron}, Axis::Z);
    const Operator ep = single_spin_operator(3, {0, SpinKind::Electron}, Axis::Plus);
    CHECK(rate_between(s, ez, nz) == rate_between(r, ez, nz));
    CHECK(rate_between(s, ep, ep) == rate_between(r, ep, ep));
    CHECK(rate_between(s, ez, ep) == 0.0);
  }

  TEST_CASE("no anisotropy means no relaxation") {
    SpinSystem sys;
    sys.n_electrons = 1;
    sys.coords_e1 = Vec3(0, 0, 1e4);
    const Superoperator r = brw_superoperator(sys, 14.1).matrix;
    CHECK(r.norm() < 1e-6);
  }
}
