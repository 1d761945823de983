#include "doctest.h"

#include "dnp/product_operator.hpp"
#include "dnp/spin_core.hpp"

#include <random>

using namespace dnp;

namespace {

Operator random_operator(int d, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  Operator x(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) x(i, j) = cplx(n(g), n(g));
  return x;
}

}  // namespace

TEST_SUITE("spin_core") {
  TEST_CASE("pauli algebra of embedded spin operators") {
    for (int n = 1; n <= 3; ++n) {
      for (int k = 0; k < n; ++k) {
        const SpinLabel l{k, SpinKind::Electron};
        const Operator x = single_spin_operator(n, l, Axis::X);
        const Operator y = single_spin_operator(n, l, Axis::Y);
        const Operator z = single_spin_operator(n, l, Axis::Z);
        const cplx i(0.0, 1.0);
        CHECK((x * y - y * x - i * z).norm() < 1e-14);
        CHECK((x * x - 0.25 * identity_operator(n)).norm() < 1e-14);
        const Operator plus = single_spin_operator(n, l, Axis::Plus);
        CHECK((plus - (x + i * y)).norm() < 1e-14);
        CHECK((single_spin_operator(n, l, Axis::Minus) - plus.adjoint()).norm() < 1e-14);
      }
    }
  }

  TEST_CASE("operators on different spins commute") {
    const Operator a = single_spin_operator(3, {0, SpinKind::Electron}, Axis::X);
    const Operator b = single_spin_operator(3, {2, SpinKind::Nucleus}, Axis::Y);
    CHECK((a * b - b * a).norm() < 1e-14);
  }

  TEST_CASE("commutation superoperator matches the direct commutator") {
    std::mt19937_64 g(7);
    const Operator h = random_operator(4, g);
    const Operator x = random_operator(4, g);
    const Operator direct = h * x - x * h;
    CHECK((unvec(commutation_superoperator(h) * vec(x)) - direct).norm() < 1e-12 * direct.norm());
  }

  TEST_CASE("vec and unvec are inverse and column stacked") {
    Operator x(2, 2);
    x << 1.0, 2.0, 3.0, 4.0;
    const LiouvilleVector v = vec(x);
    CHECK(v(1).real() == 3.0);
    CHECK(unvec(v) == x);
    CHECK_THROWS_AS(unvec(LiouvilleVector::Zero(3)), DimensionError);
  }

  TEST_CASE("thermal state is a unit-trace Hermitian Boltzmann operator") {
    const Operator z = single_spin_operator(1, {0, SpinKind::Electron}, Axis::Z);
    const double w = 2.0 * 3.141592653589793 * 395e9;
    const Operator rho = thermal_state(w * z, 298.0);
    CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-14);
    CHECK(is_hermitian(rho));
    // 2<Sz> = -tanh(hbar w / 2kT) for H = w Sz.
    const double x = 1.054571817e-34 * w / (2.0 * 1.380649e-23 * 298.0);
    CHECK(polarization(rho, z) == doctest::Approx(-std::tanh(x)).epsilon(1e-12));
  }

  TEST_CASE("amplitude of a single-spin Z operator equals 2<Sz>") {
    const Operator z = single_spin_operator(2, {1, SpinKind::Nucleus}, Axis::Z);
    Operator rho = 0.25 * identity_operator(2) + 0.01 * z;
    CHECK(signed_amplitude(rho, z) == doctest::Approx(2.0 * expectation(rho, z)));
    CHECK(amplitude(rho, -z) == doctest::Approx(std::abs(2.0 * expectation(rho, z))));
  }

  TEST_CASE("signed amplitude rejects non-Hermitian observables") {
    const Operator p = single_spin_operator(1, {0, SpinKind::Electron}, Axis::Plus);
    CHECK_THROWS(signed_amplitude(0.5 * identity_operator(1), p));
  }

  TEST_CASE("product basis is orthonormal and Hermitian") {
    const ProductBasis b(3);
    CHECK(b.size() == 64);
    const Eigen::MatrixXcd gram = b.vectors().adjoint() * b.vectors();
    CHECK((gram - Eigen::MatrixXcd::Identity(64, 64)).norm() < 1e-12);
    for (int k = 0; k < b.size(); ++k) CHECK(is_hermitian(unvec(b.vectors().col(k))));
    const LiouvilleVector v = vec(single_spin_operator(3, {2, SpinKind::Nucleus}, Axis::Z));
    CHECK((b.from_coordinates(b.coordinates(v)) - v).norm() < 1e-14);
  }

  TEST_CASE("product operator parser builds the expected products") {
    const Operator e1z = single_spin_operator(3, {0, SpinKind::Electron}, Axis::Z);
    const Operator e2z = single_spin_operator(3, {1, SpinKind::Electron}, Axis::Z);
    const Operator e1p = single_spin_operator(3, {0, SpinKind::Electron}, Axis::Plus);
    const Operator nz = single_spin_operator(3, {2, SpinKind::Nucleus}, Axis::Z);
    CHECK((parse_product_operator("4Ez1Ez2Nz", 2) - 4.0 * e1z * e2z * nz).norm() < 1e-14);
    CHECK((parse_product_operator("E+1-2E+1Ez2", 2) - (e1p - 2.0 * e1p * e2z)).norm() < 1e-14);
    CHECK((parse_product_operator("Nz", 2) - nz).norm() < 1e-14);
    CHECK_THROWS(parse_product_operator("Ez2", 1));
    CHECK_THROWS(parse_product_operator("Ez", 2));
    CHECK_THROWS(parse_product_operator("2Qz1", 2));
  }

  TEST_CASE("dimension checks") {
    CHECK_THROWS(single_spin_operator(2, {2, SpinKind::Electron}, Axis::X));
    CHECK_THROWS_AS(commutation_superoperator(Operator::Zero(2, 3)), DimensionError);
  }
}
