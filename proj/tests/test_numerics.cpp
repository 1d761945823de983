#include "doctest.h"

#include "dnp/fourier.hpp"
#include "dnp/krylov.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace dnp;

TEST_SUITE("fourier") {
  TEST_CASE("spectral differentiation is exact below the Nyquist frequency") {
    for (int n : {8, 16, 32, 64}) {
      CAPTURE(n);
      const PhaseGrid g(n);
      for (int m = 0; m < n / 2; ++m) {
        Eigen::VectorXd f(n), df(n);
        for (int k = 0; k < n; ++k) {
          const double p = 2.0 * std::numbers::pi * k / n;
          CHECK(g.phases[k] == doctest::Approx(p));
          f(k) = std::sin(m * p) + 0.5 * std::cos(m * p);
          df(k) = m * std::cos(m * p) - 0.5 * m * std::sin(m * p);
        }
        CHECK((g.diff_matrix * f - df).norm() < 1e-11 * std::max(1.0, df.norm()));
      }
    }
  }

  TEST_CASE("differentiation matrix is antisymmetric with zero row sums") {
    const Eigen::MatrixXd d = fourier_diff_matrix(32);
    CHECK((d + d.transpose()).norm() < 1e-13);
    CHECK(d.rowwise().sum().norm() < 1e-12);
  }

  TEST_CASE("grid size validation") {
    CHECK_THROWS(fourier_diff_matrix(7));
    CHECK_THROWS(fourier_diff_matrix(6));
  }
}

TEST_SUITE("krylov") {
  TEST_CASE("restarted GMRES matches a dense LU solve") {
    std::mt19937_64 g(9);
    std::normal_distribution<double> n;
    const int dim = 120;
    Eigen::MatrixXcd a(dim, dim);
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) a(i, j) = std::complex<double>(n(g), n(g)) / std::sqrt(double(dim));
    a += 4.0 * Eigen::MatrixXcd::Identity(dim, dim);
    Eigen::VectorXcd b(dim);
    for (int i = 0; i < dim; ++i) b(i) = {n(g), n(g)};
    const Eigen::VectorXcd ref = a.partialPivLu().solve(b);

    const LinearMap op = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out = a * in; };
    for (int restart : {5, 20, 200}) {
      CAPTURE(restart);
      Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
      const GmresResult r = gmres(op, {}, b, x, {restart, 5000, 1e-12});
      CHECK(r.converged);
      CHECK(r.relative_residual <= 1e-12);
      CHECK((x - ref).norm() < 1e-10 * ref.norm());
    }
  }

  TEST_CASE("exact preconditioner converges in one iteration") {
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    const int dim = 40;
    Eigen::VectorXcd diag(dim), b(dim);
    for (int i = 0; i < dim; ++i) {
      diag(i) = {u(g), u(g)};
      b(i) = {u(g), 0.0};
    }
    const LinearMap op = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out = diag.cwiseProduct(in); };
    const LinearMap pre = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out = in.cwiseQuotient(diag); };
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
    const GmresResult r = gmres(op, pre, b, x, {10, 100, 1e-13});
    CHECK(r.converged);
    CHECK(r.iterations == 1);
  }

  TEST_CASE("backward-error stopping test") {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(10, 10);
    a(0, 0) = 1e8;
    const Eigen::VectorXcd b = Eigen::VectorXcd::Ones(10);
    const LinearMap op = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out = a * in; };
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(10);
    GmresOptions o{10, 100, 1e-12};
    o.operator_norm = 1e8;
    const GmresResult r = gmres(op, {}, b, x, o);
    CHECK(r.converged);
    CHECK(r.backward_error <= 1e-12);
    CHECK(r.backward_error <= r.relative_residual + 1e-300);
  }

  TEST_CASE("zero right-hand side returns zero") {
    const LinearMap op = [](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out = 2.0 * in; };
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(4);
    const GmresResult r = gmres(op, {}, Eigen::VectorXcd::Zero(4), x);
    CHECK(r.converged);
    CHECK(x.norm() == 0.0);
  }
}
