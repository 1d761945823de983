#include "doctest.h"

#include "dnp/config.hpp"
#include "dnp/sweeps.hpp"

#include <cmath>
#include <sstream>

using namespace dnp;

namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.axis1 = {SweepAxis::B0, 5.0, 15.0, 3, Spacing::Linear};
  s.axis2 = {SweepAxis::MwOffset, -3e6, 3e6, 4, Spacing::Linear};
  return s;
}

std::string csv(const SweepResult& r) {
  std::ostringstream o;
  write_csv(r, o);
  return o.str();
}

}  // namespace

TEST_SUITE("sweeps") {
  TEST_CASE("axis values") {
    const AxisSpec lin{SweepAxis::B0, 1.0, 21.0, 21, Spacing::Linear};
    const auto v = lin.values();
    CHECK(v.size() == 21);
    CHECK(v[10] == doctest::Approx(11.0));
    CHECK(v.back() == 21.0);
    const AxisSpec lg{SweepAxis::TauC, 10e-12, 1000e-12, 3, Spacing::Log};
    CHECK(lg.values()[1] == doctest::Approx(100e-12));
  }

  TEST_CASE("spec validation") {
    SweepSpec s = small_spec();
    CHECK_NOTHROW(validate(s));
    s.axis2.kind = SweepAxis::B0;
    CHECK_THROWS(validate(s));
    s = small_spec();
    s.axis1.points = 1;
    CHECK_THROWS(validate(s));
    s = small_spec();
    s.axis1 = {SweepAxis::TauC, 0.0, 1e-9, 3, Spacing::Log};
    CHECK_THROWS(validate(s));
  }

  TEST_CASE("ablation replaces eigenvalues by their mean") {
    const SpinSystem sys = fixture_system("table1");
    const SpinSystem a = apply_ablation(sys, {{AblationSwitch::ZeroG1Anisotropy}});
    CHECK(a.g1_eigs(0) == doctest::Approx(sys.g1_eigs.mean()));
    CHECK(a.g1_eigs(0) == a.g1_eigs(2));
    CHECK(a.g2_eigs == sys.g2_eigs);
    CHECK(electron_frequency(a, 1, 14.1) == doctest::Approx(electron_frequency(sys, 1, 14.1)).epsilon(1e-14));
    const SpinSystem c = apply_ablation(sys, {{AblationSwitch::ZeroCSA}});
    CHECK(c.shift_eigs_ppm.isApproxToConstant(sys.shift_eigs_ppm.mean()));
    // Idempotent.
    const Ablation both{{AblationSwitch::ZeroG1Anisotropy, AblationSwitch::ZeroCSA}};
    const SpinSystem once = apply_ablation(sys, both);
    const SpinSystem twice = apply_ablation(once, both);
    CHECK(once.g1_eigs == twice.g1_eigs);
    CHECK(once.shift_eigs_ppm == twice.shift_eigs_ppm);
  }

  TEST_CASE("exchange ablation removes exactly the scalar coupling") {
    const SpinSystem sys = fixture_system("tableS1A");
    const SpinSystem a = apply_ablation(sys, {{AblationSwitch::ZeroExchange}});
    CHECK(a.exchange_j == 0.0);
    CHECK((assemble_static_hamiltonian(a, 14.1) - assemble_static_hamiltonian(sys, 14.1)).norm() ==
          doctest::Approx(2.0 * 3.141592653589793 * sys.exchange_j * std::sqrt(3.0 * 8.0) / 4.0).epsilon(1e-9));
  }

  TEST_CASE("removing electron 2 gives a 1e1n system") {
    const SpinSystem sys = fixture_system("table1");
    const SpinSystem a = apply_ablation(sys, {{AblationSwitch::RemoveElectron2}});
    CHECK(a.n_electrons == 1);
    CHECK(a.exchange_j == 0.0);
    CHECK_NOTHROW(validate(a));
    CHECK_THROWS(apply_ablation(fixture_system("figure1"), {{AblationSwitch::RemoveElectron2}}));
    CHECK_THROWS(apply_ablation(fixture_system("figure1"), {{AblationSwitch::ZeroG2Anisotropy}}));
    CHECK_THROWS(apply_ablation(sys, {{AblationSwitch::RemoveElectron2, AblationSwitch::ZeroG2Anisotropy}}));
  }

  TEST_CASE("ablation names round trip") {
    for (auto s : {AblationSwitch::ZeroG1Anisotropy, AblationSwitch::ZeroG2Anisotropy, AblationSwitch::ZeroCSA,
                   AblationSwitch::ZeroExchange, AblationSwitch::ZeroIsotropicHF, AblationSwitch::RemoveElectron2})
      CHECK(parse_ablation(ablation_name(s)) == s);
    CHECK_THROWS(parse_ablation("ZeroEverything"));
  }

  TEST_CASE("parallel sweep is identical to the serial reference") {
    const SpinSystem sys = fixture_system("table1");
    SweepSpec s = small_spec();
    s.observables = {"Nz", "4Ez1Ez2Nz"};
    const SweepResult a = run_sweep(sys, s);
    const SweepResult b = run_sweep_serial(sys, s);
    CHECK(a.failures() == 0);
    CHECK(csv(a) == csv(b));
    CHECK(csv(a) == csv(run_sweep(sys, s)));
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].values == b.points[i].values);
  }

  TEST_CASE("grid layout and CSV shape") {
    const SweepResult r = run_sweep(fixture_system("figure1"), small_spec());
    CHECK(r.points.size() == 12);
    CHECK(r.at(1, 2).x1 == r.axis1[1]);
    CHECK(r.at(1, 2).x2 == r.axis2[2]);
    const std::string text = csv(r);
    CHECK(text.rfind("B0_tesla,mw_offset_MHz,Nz,status\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 13);
    std::ostringstream svg;
    write_svg(r, svg);
    CHECK(svg.str().find("<svg") != std::string::npos);
  }

  TEST_CASE("no drive means no enhancement") {
    SpinSystem sys = fixture_system("tableS1B");
    sys.mw_nutation = 0.0;
    const SweepResult r = run_sweep(sys, small_spec());
    CHECK(max_enhancement_deviation(r) < 1e-6);
  }

  TEST_CASE("tau_c axis overrides the system correlation time") {
    const SpinSystem sys = fixture_system("table1");
    SweepSpec s;
    s.axis1 = {SweepAxis::TauC, 50e-12, 100e-12, 2, Spacing::Linear};
    s.axis2 = {SweepAxis::MwOffset, -0.62e6, 0.0, 2, Spacing::Linear};
    s.normalization = Normalization::None;
    const SweepResult r = run_sweep(sys, s);
    CHECK(r.failures() == 0);
    CHECK(std::abs(r.at(1, 0).values[0]) == doctest::Approx(3.584e-4).epsilon(1e-3));
    CHECK(r.at(0, 0).values[0] != r.at(1, 0).values[0]);
  }

  TEST_CASE("map summaries") {
    const SpinSystem sys = fixture_system("table1");
    const SweepSpec s = small_spec();
    const SweepResult base = run_sweep(sys, s);
    CHECK(max_relative_map_change(base, base) == 0.0);
    CHECK(max_enhancement_deviation(base, 100.0) == 0.0);
    const SweepResult csa = run_sweep(sys, s, {{AblationSwitch::ZeroCSA}});
    CHECK(max_relative_map_change(csa, base) < 0.1);
  }

  TEST_CASE("operator amplitude trace") {
    const SpinSystem sys = fixture_system("table1");
    const std::vector<double> tau{50e-12, 100e-12, 200e-12};
    const TraceResult t = operator_amplitude_trace(sys, 14.1, -0.62e6, tau, {"Nz", "E+1"});
    CHECK(t.values.size() == 3);
    for (const auto& e : t.errors) CHECK(e.empty());
    // The middle point is the reference condition.
    CHECK(std::abs(t.values[1][0]) == doctest::Approx(3.584e-4).epsilon(1e-3));
    CHECK_THROWS(operator_amplitude_trace(sys, 14.1, 0.0, {-1.0}, {"Nz"}));
  }
}
