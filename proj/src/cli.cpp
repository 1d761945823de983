#include "dnp/cli.hpp"

#include "dnp/config.hpp"
#include "dnp/product_operator.hpp"
#include "dnp/rates.hpp"
#include "dnp/search.hpp"
#include "dnp/steady_state.hpp"
#include "dnp/sweeps.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <memory>
#include <ostream>
#include <sstream>

namespace dnp::cli {

namespace {

struct Common {
  std::string config_path;
  std::string fixture_name;
  std::string output;
  double b0 = NAN;
  double offset_mhz = NAN;
};

ConfigDocument load(const Common& c) {
  if (!c.config_path.empty() && !c.fixture_name.empty()) throw ConfigError("give either --config or --fixture, not both");
  ConfigDocument doc;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw ConfigError("cannot read config file '" + c.config_path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    doc = parse_config(text);
  } else if (!c.fixture_name.empty()) {
    doc = fixture(c.fixture_name);
  } else {
    throw ConfigError("one of --config or --fixture is required");
  }
  if (!std::isnan(c.b0)) {
    if (!(c.b0 > 0.0 && c.b0 <= 100.0)) throw ConfigError("--B0 must lie in (0, 100] tesla");
    doc.conditions.B0_tesla = c.b0;
  }
  if (!std::isnan(c.offset_mhz)) doc.conditions.mw_offset_MHz = c.offset_mhz;
  return doc;
}

// Writes to --output when given, otherwise to the command's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::vector<std::string> default_observables(const SpinSystem& sys) {
  if (sys.n_electrons == 1) return {"Ez1", "E+1", "2E+1Nz", "2Ez1Nz", "Nz"};
  return {"E+1+2E+1Ez2", "E+1-2E+1Ez2", "E+2+2Ez1E+2", "E+2-2Ez1E+2", "E+1",     "2E+1Ez2",
          "2E+1Nz",      "4E+1Ez2Nz",   "2Ez1Nz",      "2Ez2Nz",      "4Ez1Ez2Nz", "Nz"};
}

double thermal_nz(const SpinSystem& sys, double b0) {
  const Operator nz = single_spin_operator(sys.n_spins(), {sys.nucleus_index(), SpinKind::Nucleus}, Axis::Z);
  return signed_amplitude(thermal_state(isotropic_hamiltonian(sys, b0), sys.temperature), nz);
}

int cmd_rates(const ConfigDocument& doc, std::ostream& out) {
  const SpinSystem sys = apply_ablation(to_spin_system(doc), to_ablation(doc));
  const double b0 = doc.conditions.B0_tesla;
  out << "process,analytical_per_s,numerical_per_s,relative_deviation,exact,formula\n";
  for (const auto& row : rate_catalogue(sys, b0))
    out << row.key << ',' << fmt(row.analytical) << ',' << fmt(row.numerical) << ',' << fmt(row.relative_deviation)
        << ',' << (row.exact ? "yes" : "no") << ',' << csv_quote(row.formula) << '\n';
  // Self-relaxation rates have no closed form in the catalogue.
  const auto r = brw_superoperator(sys, b0);
  std::vector<std::string> selfs{"Ez1", "Nz"};
  if (sys.n_electrons == 2) selfs.insert(selfs.begin() + 1, "Ez2");
  for (const auto& s : selfs) {
    const Operator o = parse_product_operator(s, sys.n_electrons);
    out << "R1[" << s << "],," << fmt(-rate_between(r, o, o)) << ",,,\"-<" << s << "|R|" << s << ">\"\n";
  }
  return kOk;
}

int cmd_steady(const ConfigDocument& doc, const std::vector<std::string>& obs_in, std::ostream& out) {
  const SpinSystem sys = apply_ablation(to_spin_system(doc), to_ablation(doc));
  const double b0 = doc.conditions.B0_tesla;
  const double offset = doc.conditions.mw_offset_MHz * 1e6;
  const auto obs = obs_in.empty() ? default_observables(sys) : obs_in;

  const auto r = brw_superoperator(sys, b0);
  SteadyState rot = rotating_frame_steady_state(sys, b0, offset, r.matrix);
  LabFrameSolution lab = lab_frame_steady_state(sys, b0, offset, r.matrix);
  extract_observables(rot, obs, sys.n_electrons);
  // Electron coherences are compared in the microwave frame.
  lab.average.rho = corotating_average(lab, sys);
  extract_observables(lab.average, obs, sys.n_electrons);
  out << "observable,rotating_frame,lab_frame,relative_deviation\n";
  const auto dev = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); };
  for (const auto& o : obs) {
    const double a = rot.observables[o], b = lab.average.observables[o];
    out << o << ',' << fmt(a) << ',' << fmt(b) << ',' << fmt(dev(a, b)) << '\n';
  }
  const Operator nz = parse_product_operator("Nz", sys.n_electrons);
  const double na = signed_amplitude(rot.rho, nz), nb = signed_amplitude(lab.average.rho, nz);
  const double th = thermal_nz(sys, b0);
  out << "thermal_Nz," << fmt(th) << ',' << fmt(th) << ',' << fmt(0.0) << '\n';
  out << "enhancement," << fmt(na / th) << ',' << fmt(nb / th) << ',' << fmt(dev(na, nb)) << '\n';
  out << "frame_deviation_Nz," << fmt(dev(na, nb)) << ",tolerance," << fmt(1e-2) << '\n';
  return kOk;
}

SweepSpec default_sweep(const ConfigDocument& doc, const std::string& map) {
  SweepSpec spec;
  spec.b0 = doc.conditions.B0_tesla;
  spec.offset_hz = doc.conditions.mw_offset_MHz * 1e6;
  if (map == "offset-tauc") {
    spec.axis1 = {SweepAxis::TauC, 10e-12, 1000e-12, 21, Spacing::Log};
    spec.axis2 = {SweepAxis::MwOffset, -10e6, 10e6, 21, Spacing::Linear};
  } else if (map != "field-offset") {
    throw ConfigError("--map must be field-offset or offset-tauc");
  }
  return spec;
}

int cmd_sweep(const ConfigDocument& doc, const std::string& map, int points, const std::string& svg,
              std::ostream& out, std::ostream& err) {
  SweepSpec spec = doc.sweep && doc.sweep->axis2 ? to_sweep_spec(doc) : default_sweep(doc, map);
  if (points > 0) {
    if (points < 2) throw ConfigError("--points must be >= 2");
    spec.axis1.points = spec.axis2.points = points;
  }
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const SweepResult res = run_sweep(to_spin_system(doc), spec, to_ablation(doc));
  write_csv(res, out);
  if (!svg.empty()) {
    std::ofstream f(svg);
    if (!f) throw ConfigError("cannot write '" + svg + "'");
    write_svg(res, f);
  }
  if (res.failures() > 0) err << "warning: " << res.failures() << " grid points failed\n";
  return kOk;
}

int cmd_trace(const ConfigDocument& doc, const std::vector<std::string>& obs_in, std::ostream& out,
              std::ostream& err) {
  const SpinSystem sys = apply_ablation(to_spin_system(doc), to_ablation(doc));
  AxisSpec axis{SweepAxis::TauC, 10e-12, 1000e-12, 21, Spacing::Log};
  std::vector<std::string> obs = obs_in;
  if (doc.sweep) {
    if (doc.sweep->axis1.quantity != SweepAxis::TauC) throw ConfigError("trace: sweep.axis1 must be tau_c_ps");
    const auto& a = doc.sweep->axis1;
    axis = {SweepAxis::TauC, a.start * 1e-12, a.stop * 1e-12, a.points, a.spacing};
    if (obs.empty()) obs = doc.sweep->observables;
  }
  if (obs.empty()) obs = default_observables(sys);
  const auto tr = operator_amplitude_trace(sys, doc.conditions.B0_tesla, doc.conditions.mw_offset_MHz * 1e6,
                                           axis.values(), obs);
  write_csv(tr, out);
  const auto failed = std::count_if(tr.errors.begin(), tr.errors.end(), [](const std::string& e) { return !e.empty(); });
  if (failed > 0) err << "warning: " << failed << " trace points failed\n";
  return kOk;
}

std::vector<ParameterBound> default_bounds(const SpinSystem& sys) {
  std::vector<ParameterBound> b{{"tau_c_ps", 0.5 * sys.tau_c * 1e12, 2.0 * sys.tau_c * 1e12}};
  if (sys.n_electrons == 2 && sys.exchange_j != 0.0) {
    const double j = std::abs(sys.exchange_j) * 1e-6;
    b.push_back({"exchange_J_MHz", 0.5 * j, 2.0 * j});
  }
  return b;
}

int cmd_optimize(const ConfigDocument& doc, const std::optional<std::uint64_t>& seed, std::ostream& out,
                 std::ostream& err) {
  const SpinSystem sys = apply_ablation(to_spin_system(doc), to_ablation(doc));
  const OptimizeConfig oc = doc.optimize.value_or(OptimizeConfig{});
  std::vector<ParameterBound> bounds;
  for (const auto& p : oc.parameters) bounds.push_back({p.name, p.lower, p.upper});
  if (bounds.empty()) bounds = default_bounds(sys);
  SearchOptions opt;
  opt.budget = oc.budget;
  opt.seed = seed.value_or(oc.seed);
  opt.b0 = doc.conditions.B0_tesla;
  const AxisSpec offsets{SweepAxis::MwOffset, oc.offset_start_MHz * 1e6, oc.offset_stop_MHz * 1e6,
                         std::max(oc.offset_points, 2), Spacing::Linear};
  opt.offsets_hz = oc.offset_points == 1 ? std::vector<double>{oc.offset_start_MHz * 1e6} : offsets.values();
  SearchResult res;
  try {
    res = search(sys, bounds, opt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  write_csv(res, out);
  const double th = thermal_nz(sys, opt.b0);
  err << "best objective " << fmt(res.best_objective) << " (" << fmt(res.best_objective / th)
      << " x thermal) after " << res.log.size() << " evaluations\n";
  if (!std::isfinite(res.best_objective)) return kSolverError;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (const char* env = std::getenv("DNP_NUM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1 || n > 4096) {
      err << "error: DNP_NUM_THREADS must be a positive integer\n";
      return kConfigError;
    }
    omp_set_num_threads(static_cast<int>(n));
  }

  CLI::App app{"Liquid-state DNP steady states, relaxation rates and parameter search", "dnpsim"};
  app.require_subcommand(1);
  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON config file");
    sub->add_option("--fixture", common.fixture_name, "built-in fixture: table1, tableS1A, tableS1B, figure1");
    sub->add_option("--B0", common.b0, "field override, tesla");
    sub->add_option("--offset", common.offset_mhz, "microwave offset override, MHz from electron 1");
    sub->add_option("-o,--output", common.output, "write the CSV here instead of stdout");
  };
  auto* rates = app.add_subcommand("rates", "closed-form vs numerical relaxation rate catalogue");
  auto* steady = app.add_subcommand("steady", "steady state at one condition point, both solver paths");
  auto* sweep = app.add_subcommand("sweep", "two-axis steady-state map (CSV, optional SVG)");
  auto* trace = app.add_subcommand("trace", "operator amplitudes against rotational correlation time");
  auto* optimize = app.add_subcommand("optimize", "derivative-free search of the polarization objective");
  for (auto* s : {rates, steady, sweep, trace, optimize}) add_common(s);

  std::vector<std::string> observables;
  steady->add_option("--observables", observables, "product operators, e.g. Nz 2Ez1Nz");
  trace->add_option("--observables", observables, "product operators");
  std::string map = "field-offset", svg;
  int points = 0;
  bool full = false;
  sweep->add_option("--map", map, "default grid when the config has no sweep: field-offset or offset-tauc");
  sweep->add_option("--points", points, "points per axis");
  sweep->add_flag("--full", full, "full resolution (101 points per axis)");
  sweep->add_option("--svg", svg, "write an SVG heatmap of the first observable");
  std::uint64_t seed_value = 0;
  auto* seed_opt = optimize->add_option("--seed", seed_value, "random seed (overrides the config)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kConfigError;
  }
  for (auto* s : {rates, steady, sweep, trace, optimize}) {
    if (!s->parsed()) continue;
    try {
      const ConfigDocument doc = load(common);
      Sink sink(common.output, out);
      if (s == rates) return cmd_rates(doc, sink.get());
      if (s == steady) return cmd_steady(doc, observables, sink.get());
      if (s == sweep) return cmd_sweep(doc, map, full && points == 0 ? 101 : points, svg, sink.get(), err);
      if (s == trace) return cmd_trace(doc, observables, sink.get(), err);
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      return cmd_optimize(doc, seed, sink.get(), err);
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kConfigError;
    } catch (const std::invalid_argument& e) {
      err << "config error: " << e.what() << "\n";
      return kConfigError;
    } catch (const std::exception& e) {
      err << "solver failure: " << e.what() << "\n";
      return kSolverError;
    }
  }
  err << app.help();
  return kConfigError;
}

}  // namespace dnp::cli
