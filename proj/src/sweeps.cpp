#include "dnp/sweeps.hpp"

#include "dnp/product_operator.hpp"
#include "dnp/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace dnp {

std::vector<double> AxisSpec::values() const {
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    if (spacing == Spacing::Linear)
      v[i] = start + t * (stop - start);
    else
      v[i] = start * std::pow(stop / start, t);
  }
  if (points > 1) v.back() = stop;
  return v;
}

std::string axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::B0: return "B0_tesla";
    case SweepAxis::MwOffset: return "mw_offset_MHz";
    case SweepAxis::TauC: return "tau_c_ps";
  }
  return "?";
}

namespace {

// Document units for CSV and SVG labels.
double to_document_units(SweepAxis a, double x) {
  switch (a) {
    case SweepAxis::B0: return x;
    case SweepAxis::MwOffset: return x * 1e-6;
    case SweepAxis::TauC: return x * 1e12;
  }
  return x;
}

void validate_axis(const AxisSpec& a, const char* which) {
  const std::string w = which;
  if (a.points < 2) throw std::invalid_argument("sweep " + w + ": point count must be >= 2");
  if (!(a.start < a.stop)) throw std::invalid_argument("sweep " + w + ": range must be strictly increasing");
  if (a.spacing == Spacing::Log && !(a.start > 0.0))
    throw std::invalid_argument("sweep " + w + ": log spacing needs a positive start");
  if (a.kind == SweepAxis::B0 && !(a.start > 0.0)) throw std::invalid_argument("sweep " + w + ": B0 must be positive");
  if (a.kind == SweepAxis::TauC && !(a.start > 0.0))
    throw std::invalid_argument("sweep " + w + ": tau_c must be positive");
}

}  // namespace

void validate(const SweepSpec& spec) {
  validate_axis(spec.axis1, "axis1");
  validate_axis(spec.axis2, "axis2");
  if (spec.axis1.kind == spec.axis2.kind) throw std::invalid_argument("sweep: axis1 and axis2 must differ");
  if (spec.observables.empty()) throw std::invalid_argument("sweep: no observables");
  if (!(spec.b0 > 0.0)) throw std::invalid_argument("sweep: B0 must be positive");
}

std::string ablation_name(AblationSwitch s) {
  switch (s) {
    case AblationSwitch::ZeroG1Anisotropy: return "ZeroG1Anisotropy";
    case AblationSwitch::ZeroG2Anisotropy: return "ZeroG2Anisotropy";
    case AblationSwitch::ZeroCSA: return "ZeroCSA";
    case AblationSwitch::ZeroExchange: return "ZeroExchange";
    case AblationSwitch::ZeroIsotropicHF: return "ZeroIsotropicHF";
    case AblationSwitch::RemoveElectron2: return "RemoveElectron2";
  }
  return "?";
}

AblationSwitch parse_ablation(const std::string& name) {
  for (auto s : {AblationSwitch::ZeroG1Anisotropy, AblationSwitch::ZeroG2Anisotropy, AblationSwitch::ZeroCSA,
                 AblationSwitch::ZeroExchange, AblationSwitch::ZeroIsotropicHF, AblationSwitch::RemoveElectron2})
    if (ablation_name(s) == name) return s;
  throw std::invalid_argument("unknown ablation switch '" + name + "'");
}

SpinSystem apply_ablation(const SpinSystem& sys, const Ablation& ablation) {
  const auto has = [&](AblationSwitch s) { return ablation.switches.count(s) > 0; };
  if (sys.n_electrons != 2 && (has(AblationSwitch::ZeroG2Anisotropy) || has(AblationSwitch::RemoveElectron2)))
    throw std::invalid_argument("ablation: electron 2 switches need a 2e1n system");
  if (has(AblationSwitch::ZeroG2Anisotropy) && has(AblationSwitch::RemoveElectron2))
    throw std::invalid_argument("ablation: ZeroG2Anisotropy and RemoveElectron2 are mutually exclusive");

  SpinSystem out = sys;
  const auto flatten = [](Vec3& eigs) { eigs.setConstant(eigs.mean()); };
  if (has(AblationSwitch::ZeroG1Anisotropy)) flatten(out.g1_eigs);
  if (has(AblationSwitch::ZeroG2Anisotropy)) flatten(out.g2_eigs);
  if (has(AblationSwitch::ZeroCSA)) flatten(out.shift_eigs_ppm);
  if (has(AblationSwitch::ZeroExchange)) out.exchange_j = 0.0;
  if (has(AblationSwitch::ZeroIsotropicHF)) out.isotropic_hf = 0.0;
  if (has(AblationSwitch::RemoveElectron2)) {
    const SpinSystem defaults;
    out.n_electrons = 1;
    out.g2_eigs = defaults.g2_eigs;
    out.g2_euler = defaults.g2_euler;
    out.coords_e2 = defaults.coords_e2;
    out.exchange_j = 0.0;
  }
  return out;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const GridPoint& p) { return !p.ok; }));
}

namespace {

struct Condition {
  double b0;
  double offset_hz;
  double tau_c;
};

Condition condition_at(const SweepSpec& spec, const SpinSystem& sys, double x1, double x2) {
  Condition c{spec.b0, spec.offset_hz, sys.tau_c};
  for (const auto& [axis, x] : {std::pair{spec.axis1.kind, x1}, std::pair{spec.axis2.kind, x2}}) {
    switch (axis) {
      case SweepAxis::B0: c.b0 = x; break;
      case SweepAxis::MwOffset: c.offset_hz = x; break;
      case SweepAxis::TauC: c.tau_c = x; break;
    }
  }
  return c;
}

struct PointKernel {
  const SpinSystem& sys;
  const std::vector<Operator>& ops;
  Normalization normalization;
  Frame frame;
  DipolarTruncation truncation;

  // Fills values or throws.
  std::vector<double> operator()(const Condition& c, const Superoperator& r) const {
    SpinSystem s = sys;
    s.tau_c = c.tau_c;
    Operator rho;
    if (frame == Frame::Rotating) {
      rho = rotating_frame_steady_state(s, c.b0, c.offset_hz, r, truncation).rho;
    } else {
      rho = lab_frame_steady_state(s, c.b0, c.offset_hz, r).average.rho;
    }
    double scale = 1.0;
    if (normalization == Normalization::ThermalNuclear) {
      const Operator nz = single_spin_operator(s.n_spins(), {s.nucleus_index(), SpinKind::Nucleus}, Axis::Z);
      scale = signed_amplitude(thermal_state(isotropic_hamiltonian(s, c.b0), s.temperature), nz);
    }
    std::vector<double> v;
    v.reserve(ops.size());
    for (const auto& o : ops) v.push_back(observable_value(rho, o) / scale);
    return v;
  }
};

// Relaxation superoperators keyed by (B0, tau_c); computed once per distinct pair.
struct RelaxationCache {
  std::vector<std::pair<double, double>> keys;
  std::vector<Superoperator> r;
  std::vector<std::string> errors;
  std::vector<int> index;  // per condition

  RelaxationCache(const SpinSystem& sys, const std::vector<Condition>& conds, bool parallel) {
    std::map<std::pair<double, double>, int> lookup;
    index.reserve(conds.size());
    for (const auto& c : conds) {
      const auto key = std::pair{c.b0, c.tau_c};
      auto [it, inserted] = lookup.emplace(key, static_cast<int>(keys.size()));
      if (inserted) keys.push_back(key);
      index.push_back(it->second);
    }
    r.resize(keys.size());
    errors.resize(keys.size());
    const int n = static_cast<int>(keys.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int k = 0; k < n; ++k) {
      try {
        SpinSystem s = sys;
        s.tau_c = keys[k].second;
        r[k] = brw_superoperator(s, keys[k].first).matrix;
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  }
};

// Shared by the parallel and serial entry points; results land in fixed slots so
// the output does not depend on scheduling.
void evaluate(const SpinSystem& sys, const std::vector<Condition>& conds, const std::vector<Operator>& ops,
              Normalization norm, Frame frame, DipolarTruncation trunc, bool parallel,
              std::vector<std::vector<double>>& values, std::vector<std::string>& errors) {
  const RelaxationCache cache(sys, conds, parallel);
  const PointKernel kernel{sys, ops, norm, frame, trunc};
  const int n = static_cast<int>(conds.size());
  values.assign(n, std::vector<double>(ops.size(), std::numeric_limits<double>::quiet_NaN()));
  errors.assign(n, std::string());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    const int k = cache.index[i];
    if (!cache.errors[k].empty()) {
      errors[i] = cache.errors[k];
      continue;
    }
    try {
      values[i] = kernel(conds[i], cache.r[k]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (errors[i].empty()) errors[i] = "solver failure";
    }
  }
}

std::vector<Operator> parse_ops(const std::vector<std::string>& names, int n_electrons) {
  std::vector<Operator> ops;
  for (const auto& n : names) ops.push_back(parse_product_operator(n, n_electrons));
  return ops;
}

SweepResult run_impl(const SpinSystem& base, const SweepSpec& spec, const Ablation& ablation, bool parallel) {
  validate(spec);
  const SpinSystem sys = apply_ablation(base, ablation);
  validate(sys);
  const auto ops = parse_ops(spec.observables, sys.n_electrons);

  SweepResult res;
  res.spec = spec;
  res.axis1 = spec.axis1.values();
  res.axis2 = spec.axis2.values();
  std::vector<Condition> conds;
  for (double x1 : res.axis1)
    for (double x2 : res.axis2) {
      conds.push_back(condition_at(spec, sys, x1, x2));
      res.points.push_back(GridPoint{x1, x2, {}, false, {}});
    }

  std::vector<std::vector<double>> values;
  std::vector<std::string> errors;
  evaluate(sys, conds, ops, spec.normalization, spec.frame, spec.truncation, parallel, values, errors);
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    res.points[i].values = std::move(values[i]);
    res.points[i].error = std::move(errors[i]);
    res.points[i].ok = res.points[i].error.empty();
  }
  return res;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", x);
  return buf;
}

}  // namespace

SweepResult run_sweep(const SpinSystem& sys, const SweepSpec& spec, const Ablation& ablation) {
  return run_impl(sys, spec, ablation, true);
}

SweepResult run_sweep_serial(const SpinSystem& sys, const SweepSpec& spec, const Ablation& ablation) {
  return run_impl(sys, spec, ablation, false);
}

void write_csv(const SweepResult& result, std::ostream& out) {
  const auto& spec = result.spec;
  out << axis_name(spec.axis1.kind) << ',' << axis_name(spec.axis2.kind);
  for (const auto& o : spec.observables) out << ',' << o;
  out << ",status\n";
  for (const auto& p : result.points) {
    out << format_number(to_document_units(spec.axis1.kind, p.x1)) << ','
        << format_number(to_document_units(spec.axis2.kind, p.x2));
    for (double v : p.values) out << ',' << format_number(v);
    out << ',' << (p.ok ? "ok" : "failed") << '\n';
  }
}

namespace {

std::string color_for(double t) {
  // Blue at the minimum, white in the middle, red at the maximum.
  t = std::clamp(t, 0.0, 1.0);
  int r, g, b;
  if (t < 0.5) {
    const double u = t / 0.5;
    r = g = static_cast<int>(std::lround(255 * u));
    b = 255;
  } else {
    const double u = (t - 0.5) / 0.5;
    r = 255;
    g = b = static_cast<int>(std::lround(255 * (1.0 - u)));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

}  // namespace

void write_svg(const SweepResult& result, std::ostream& out, std::size_t observable) {
  const auto& spec = result.spec;
  if (observable >= spec.observables.size()) throw std::out_of_range("write_svg: observable index");
  const int n1 = static_cast<int>(result.axis1.size());
  const int n2 = static_cast<int>(result.axis2.size());
  const int cell = 16, left = 90, top = 40, bar = 20;
  const int width = left + n2 * cell + 110, height = top + n1 * cell + 60;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : result.points)
    if (p.ok) {
      lo = std::min(lo, p.values[observable]);
      hi = std::max(hi, p.values[observable]);
    }
  if (!(lo <= hi)) lo = hi = 0.0;
  const double span = hi > lo ? hi - lo : 1.0;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"" << left << "\" y=\"20\">" << spec.observables[observable]
      << (spec.normalization == Normalization::ThermalNuclear ? " / thermal Nz" : "") << "</text>\n";
  // axis1 runs bottom to top, axis2 left to right.
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const auto& p = result.at(i, j);
      const int x = left + j * cell, y = top + (n1 - 1 - i) * cell;
      const std::string fill = p.ok ? color_for((p.values[observable] - lo) / span) : "#808080";
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
          << fill << "\"/>\n";
    }
  const int bottom = top + n1 * cell;
  const auto a1 = [&](double x) { return short_number(to_document_units(spec.axis1.kind, x)); };
  const auto a2 = [&](double x) { return short_number(to_document_units(spec.axis2.kind, x)); };
  out << "<text x=\"" << left << "\" y=\"" << bottom + 14 << "\">" << a2(result.axis2.front()) << "</text>\n";
  out << "<text x=\"" << left + n2 * cell << "\" y=\"" << bottom + 14 << "\" text-anchor=\"end\">"
      << a2(result.axis2.back()) << "</text>\n";
  out << "<text x=\"" << left + n2 * cell / 2 << "\" y=\"" << bottom + 32 << "\" text-anchor=\"middle\">"
      << axis_name(spec.axis2.kind) << "</text>\n";
  out << "<text x=\"" << left - 4 << "\" y=\"" << bottom << "\" text-anchor=\"end\">" << a1(result.axis1.front())
      << "</text>\n";
  out << "<text x=\"" << left - 4 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << a1(result.axis1.back())
      << "</text>\n";
  out << "<text x=\"12\" y=\"" << top + n1 * cell / 2 << "\" transform=\"rotate(-90 12 " << top + n1 * cell / 2
      << ")\" text-anchor=\"middle\">" << axis_name(spec.axis1.kind) << "</text>\n";
  // Color bar.
  const int bx = left + n2 * cell + 20;
  for (int k = 0; k < 50; ++k) {
    const double t = 1.0 - k / 49.0;
    out << "<rect x=\"" << bx << "\" y=\"" << top + k * n1 * cell / 50 << "\" width=\"" << bar << "\" height=\""
        << n1 * cell / 50 + 1 << "\" fill=\"" << color_for(t) << "\"/>\n";
  }
  out << "<text x=\"" << bx + bar + 4 << "\" y=\"" << top + 10 << "\">" << short_number(hi) << "</text>\n";
  out << "<text x=\"" << bx + bar + 4 << "\" y=\"" << bottom << "\">" << short_number(lo) << "</text>\n";
  out << "</svg>\n";
}

double max_enhancement_deviation(const SweepResult& result, double b0_min, std::size_t observable) {
  const auto& spec = result.spec;
  double best = 0.0;
  for (const auto& p : result.points) {
    if (!p.ok) continue;
    double b0 = spec.b0;
    if (spec.axis1.kind == SweepAxis::B0) b0 = p.x1;
    if (spec.axis2.kind == SweepAxis::B0) b0 = p.x2;
    if (b0 < b0_min) continue;
    best = std::max(best, std::abs(p.values.at(observable) - 1.0));
  }
  return best;
}

double max_relative_map_change(const SweepResult& a, const SweepResult& b, std::size_t observable) {
  if (a.points.size() != b.points.size()) throw std::invalid_argument("max_relative_map_change: grid mismatch");
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (!a.points[i].ok || !b.points[i].ok) continue;
    diff = std::max(diff, std::abs(a.points[i].values.at(observable) - b.points[i].values.at(observable)));
    scale = std::max(scale, std::abs(b.points[i].values.at(observable)));
  }
  return scale > 0.0 ? diff / scale : diff;
}

TraceResult operator_amplitude_trace(const SpinSystem& sys, double b0, double offset_hz,
                                     const std::vector<double>& tau_c, const std::vector<std::string>& ops) {
  validate(sys);
  if (ops.empty()) throw std::invalid_argument("operator_amplitude_trace: no operators");
  for (double t : tau_c)
    if (!(t > 0.0)) throw std::invalid_argument("operator_amplitude_trace: tau_c must be positive");
  const auto parsed = parse_ops(ops, sys.n_electrons);
  std::vector<Condition> conds;
  for (double t : tau_c) conds.push_back({b0, offset_hz, t});

  TraceResult tr;
  tr.tau_c = tau_c;
  tr.ops = ops;
  evaluate(sys, conds, parsed, Normalization::None, Frame::Rotating, DipolarTruncation::LikeSpin, true, tr.values,
           tr.errors);
  return tr;
}

void write_csv(const TraceResult& trace, std::ostream& out) {
  out << "tau_c_ps";
  for (const auto& o : trace.ops) out << ',' << o;
  out << ",status\n";
  for (std::size_t i = 0; i < trace.tau_c.size(); ++i) {
    out << format_number(trace.tau_c[i] * 1e12);
    for (double v : trace.values[i]) out << ',' << format_number(v);
    out << ',' << (trace.errors[i].empty() ? "ok" : "failed") << '\n';
  }
}

}  // namespace dnp
