#include "doctest.h"

#include "dnp/config.hpp"
#include "dnp/constants.hpp"
#include "dnp/product_operator.hpp"
#include "dnp/rates.hpp"

#include <random>

using namespace dnp;

namespace {

Mat3 random_tensor(std::mt19937_64& g, bool symmetric = true) {
  std::normal_distribution<double> n;
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = n(g);
  return symmetric ? Mat3(0.5 * (a + a.transpose())) : a;
}

// For symmetric tensors the second-rank norm is 3/2 of the squared Frobenius norm of the traceless part.
double frobenius_delta2(const Mat3& a) {
  const Mat3 s = 0.5 * (a + a.transpose());
  const Mat3 t = s - s.trace() / 3.0 * Mat3::Identity();
  return 1.5 * t.squaredNorm();
}

const RateRow& row(const std::vector<RateRow>& rows, const std::string& key) {
  for (const auto& r : rows)
    if (r.key == key) return r;
  throw std::out_of_range(key);
}

}  // namespace

TEST_SUITE("rates") {
  TEST_CASE("second-rank norm against the Frobenius form") {
    std::mt19937_64 g(3);
    for (int k = 0; k < 50; ++k) {
      const Mat3 a = random_tensor(g, k % 2 == 0);
      CHECK(delta_squared(a) == doctest::Approx(frobenius_delta2(a)).epsilon(1e-12));
    }
    CHECK(delta_squared(Mat3::Identity() * 4.2) == doctest::Approx(0.0).scale(1.0));
  }

  TEST_CASE("scalar product obeys Cauchy-Schwarz and rotation invariance") {
    std::mt19937_64 g(5);
    for (int k = 0; k < 100; ++k) {
      const Mat3 a = random_tensor(g), b = random_tensor(g);
      const double ab = scalar_product(a, b);
      CHECK(ab * ab <= delta_squared(a) * delta_squared(b) * (1.0 + 1e-12));
      CHECK(scalar_product(a, a) == doctest::Approx(delta_squared(a)).epsilon(1e-12));
      const Mat3 q = rotation_matrix(Vec3(0.1 * k, 0.3, -0.05 * k));
      CHECK(scalar_product(q * a * q.transpose(), q * b * q.transpose()) == doctest::Approx(ab).epsilon(1e-10));
      CHECK(delta_squared(q * a * q.transpose()) == doctest::Approx(delta_squared(a)).epsilon(1e-10));
    }
  }

  TEST_CASE("Overhauser rate equals the exact two-spin dipolar cross-relaxation") {
    // Isotropic free-electron g and no CSA leaves only the electron-nucleus dipolar coupling.
    SpinSystem sys;
    sys.n_electrons = 1;
    sys.g1_eigs = Vec3::Constant(-constants::gamma_free_electron * constants::hbar / constants::bohr_magneton);
    sys.coords_e1 = Vec3(0, 0, 4.0);
    sys.tau_c = 30e-12;
    for (double b0 : {0.35, 3.4, 14.1}) {
      const double sigma = overhauser_sigma(sys, b0);
      const double r = 4.0e-10;
      const double b = constants::mu0_over_4pi * constants::gamma_free_electron * constants::gamma_proton *
                       constants::hbar / (r * r * r);
      const double we = electron_frequency(sys, 1, b0), wn = nuclear_frequency(sys, b0);
      const double oracle = b * b / 10.0 * (6.0 * spectral_density(we + wn, sys.tau_c) - spectral_density(we - wn, sys.tau_c));
      CHECK(sigma == doctest::Approx(oracle).epsilon(1e-10));
      const auto rr = brw_superoperator(sys, b0);
      const Operator ez = parse_product_operator("Ez1", 1), nz = parse_product_operator("Nz", 1);
      CHECK(rate_between(rr, ez, nz) == doctest::Approx(-sigma).epsilon(1e-6));
    }
  }

  TEST_CASE("reference biradical Overhauser rate") {
    CHECK(overhauser_sigma(fixture_system("table1"), 14.1) == doctest::Approx(0.0104).epsilon(0.02));
  }

  TEST_CASE("closed forms agree with the numerical superoperator") {
    // System B is excluded from the exact-row check: its exchange coupling mixes the electron
    // states and moves the E1 -> E2 element by several percent (the closed form assumes J = 0).
    for (const auto& name : {"figure1", "table1", "tableS1A"}) {
      CAPTURE(name);
      for (const auto& r : rate_catalogue(fixture_system(name), 14.1)) {
        CAPTURE(r.key);
        const double scale = std::max(std::abs(r.analytical), std::abs(r.numerical));
        if (r.analytical == 0.0) {
          CHECK(std::abs(r.numerical) < 1e-6);
          continue;
        }
        CHECK(std::abs(r.relative_deviation) <= (r.exact ? 0.01 : 0.25));
        CHECK(scale > 0.0);
      }
    }
  }

  TEST_CASE("exchange-free electron flip-flop element is exact") {
    SpinSystem sys = fixture_system("tableS1B");
    sys.exchange_j = 0.0;
    const auto rows = rate_catalogue(sys, 14.1);
    CHECK(std::abs(row(rows, "Ez1->Ez2").relative_deviation) < 1e-10);
  }

  TEST_CASE("electron-nucleus cross-relaxation falls as 1/B0^2") {
    const SpinSystem sys = fixture_system("table1");
    const Operator ez = parse_product_operator("Ez1", 2), nz = parse_product_operator("Nz", 2);
    const double a = rate_between(brw_superoperator(sys, 14.1), ez, nz);
    const double b = rate_between(brw_superoperator(sys, 28.2), ez, nz);
    CHECK(a / b == doctest::Approx(4.0).epsilon(0.1));
    CHECK(closed_form_rate(ProcessId::Ez1ToNz, sys, 14.1) / closed_form_rate(ProcessId::Ez1ToNz, sys, 28.2) ==
          doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("catalogue topology") {
    const auto one = processes_for(fixture_system("figure1"));
    const auto two = processes_for(fixture_system("table1"));
    for (const auto& p : one) CHECK(p.electrons != 2);
    for (const auto& p : two) CHECK(p.electrons != 1);
    CHECK(two.size() > one.size());
    CHECK(process_info(ProcessId::Ez1ToEz2).exact);
  }
}
