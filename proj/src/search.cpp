#include "dnp/search.hpp"

#include "dnp/relaxation.hpp"
#include "dnp/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <regex>
#include <stdexcept>

namespace dnp {

namespace {

struct ScalarField {
  const char* key;
  double SpinSystem::*member;
  double scale;  // internal per document unit
};

struct VectorField {
  const char* key;
  Vec3 SpinSystem::*member;
  int euler = -1;  // -1: not an angle; otherwise the EulerConvention it belongs to
};

const ScalarField kScalars[] = {
    {"tau_c_ps", &SpinSystem::tau_c, 1e-12},
    {"exchange_J_MHz", &SpinSystem::exchange_j, 1e6},
    {"isotropic_hf_MHz", &SpinSystem::isotropic_hf, 1e6},
    {"mw_nutation_MHz", &SpinSystem::mw_nutation, 1e6},
};

constexpr int kZyz = static_cast<int>(EulerConvention::ZYZ);
constexpr int kXyz = static_cast<int>(EulerConvention::XYZ);

const VectorField kVectors[] = {
    {"shift_eigs_ppm", &SpinSystem::shift_eigs_ppm},
    {"g1_eigs", &SpinSystem::g1_eigs},
    {"g2_eigs", &SpinSystem::g2_eigs},
    {"coords_n_angstrom", &SpinSystem::coords_n},
    {"coords_e1_angstrom", &SpinSystem::coords_e1},
    {"coords_e2_angstrom", &SpinSystem::coords_e2},
    {"shift_euler_zyz_rad", &SpinSystem::shift_euler, kZyz},
    {"shift_euler_xyz_rad", &SpinSystem::shift_euler, kXyz},
    {"g1_euler_zyz_rad", &SpinSystem::g1_euler, kZyz},
    {"g1_euler_xyz_rad", &SpinSystem::g1_euler, kXyz},
    {"g2_euler_zyz_rad", &SpinSystem::g2_euler, kZyz},
    {"g2_euler_xyz_rad", &SpinSystem::g2_euler, kXyz},
};

struct Resolved {
  const ScalarField* scalar = nullptr;
  const VectorField* vector = nullptr;
  int index = 0;
};

bool resolve(const std::string& name, Resolved& out) {
  for (const auto& f : kScalars)
    if (name == f.key) {
      out.scalar = &f;
      return true;
    }
  static const std::regex indexed(R"(([a-z0-9_]+)\[([0-2])\])");
  std::smatch m;
  if (!std::regex_match(name, m, indexed)) return false;
  for (const auto& f : kVectors)
    if (m[1] == f.key) {
      out.vector = &f;
      out.index = m[2].str()[0] - '0';
      return true;
    }
  return false;
}

Resolved resolve_for(const SpinSystem& sys, const std::string& name) {
  Resolved r;
  if (!resolve(name, r)) throw std::invalid_argument("unknown parameter '" + name + "'");
  if (r.vector && r.vector->euler >= 0 && r.vector->euler != static_cast<int>(sys.euler_convention))
    throw std::invalid_argument("parameter '" + name + "' does not match the system's Euler convention");
  if (sys.n_electrons == 1 && (name.starts_with("g2_") || name.starts_with("coords_e2") || name.starts_with("exchange")))
    throw std::invalid_argument("parameter '" + name + "' needs a second electron");
  return r;
}

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(std::mt19937_64& g, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(g) * static_cast<double>(n)));
}

// n points in [0,1]^d, one per stratum along every axis.
std::vector<std::vector<double>> latin_hypercube(int n, int d, std::mt19937_64& g) {
  std::vector<std::vector<double>> u(n, std::vector<double>(d));
  std::vector<int> perm(n);
  for (int j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_index(g, i + 1)]);
    for (int i = 0; i < n; ++i) u[i][j] = (perm[i] + uniform01(g)) / n;
  }
  return u;
}

}  // namespace

bool is_parameter_name(const std::string& name) {
  Resolved r;
  return resolve(name, r);
}

double get_parameter(const SpinSystem& sys, const std::string& name) {
  const Resolved r = resolve_for(sys, name);
  if (r.scalar) return sys.*(r.scalar->member) / r.scalar->scale;
  return (sys.*(r.vector->member))(r.index);
}

void set_parameter(SpinSystem& sys, const std::string& name, double value) {
  const Resolved r = resolve_for(sys, name);
  if (r.scalar)
    sys.*(r.scalar->member) = value * r.scalar->scale;
  else
    (sys.*(r.vector->member))(r.index) = value;
}

double objective(const SpinSystem& sys, double b0, const std::vector<double>& offsets_hz) {
  if (offsets_hz.empty()) throw std::invalid_argument("objective: empty offset grid");
  validate(sys);
  const Superoperator r = brw_superoperator(sys, b0).matrix;
  const Operator nz = single_spin_operator(sys.n_spins(), {sys.nucleus_index(), SpinKind::Nucleus}, Axis::Z);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::string last_error;
  int ok = 0;
  for (double off : offsets_hz) {
    try {
      const double v = signed_amplitude(rotating_frame_steady_state(sys, b0, off, r).rho, nz);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++ok;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  if (ok == 0) throw SolverError("objective: every offset failed (" + last_error + ")");
  return std::max(-lo, hi);
}

SearchResult search(const SpinSystem& base, const std::vector<ParameterBound>& bounds, const SearchOptions& options) {
  if (options.budget < 1) throw std::invalid_argument("search: budget must be >= 1");
  if (!(options.sampling_fraction >= 0.0 && options.sampling_fraction <= 1.0))
    throw std::invalid_argument("search: sampling_fraction must lie in [0, 1]");
  for (const auto& b : bounds) {
    resolve_for(base, b.name);
    if (!(b.lower < b.upper)) throw std::invalid_argument("search: empty bound for '" + b.name + "'");
  }
  const int d = static_cast<int>(bounds.size());

  SearchResult res;
  res.bounds = bounds;
  const auto to_x = [&](const std::vector<double>& u) {
    std::vector<double> x(d);
    for (int j = 0; j < d; ++j) x[j] = bounds[j].lower + std::clamp(u[j], 0.0, 1.0) * (bounds[j].upper - bounds[j].lower);
    return x;
  };
  const auto system_at = [&](const std::vector<double>& x) {
    SpinSystem s = base;
    for (int j = 0; j < d; ++j) set_parameter(s, bounds[j].name, x[j]);
    return s;
  };
  const auto evaluate = [&](const std::vector<double>& x) {
    Evaluation e;
    e.x = x;
    try {
      e.objective = objective(system_at(x), options.b0, options.offsets_hz);
      e.ok = true;
    } catch (const std::exception& ex) {
      e.objective = std::numeric_limits<double>::quiet_NaN();
      e.error = ex.what();
    }
    return e;
  };

  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_u(d);
  const auto record = [&](Evaluation e, const char* stage, const std::vector<double>& u) {
    e.index = static_cast<int>(res.log.size());
    e.stage = stage;
    if (e.ok && e.objective > best) {
      best = e.objective;
      best_u = u;
      res.best_x = e.x;
    }
    e.incumbent = best;
    res.log.push_back(std::move(e));
  };

  // Base point, clipped into the box.
  std::vector<double> u0(d);
  for (int j = 0; j < d; ++j) {
    const double v = get_parameter(base, bounds[j].name);
    u0[j] = std::clamp((v - bounds[j].lower) / (bounds[j].upper - bounds[j].lower), 0.0, 1.0);
  }
  res.best_x = to_x(u0);
  record(evaluate(to_x(u0)), "base", u0);

  int remaining = d == 0 ? 0 : options.budget - 1;
  std::mt19937_64 rng(options.seed);

  const int n_samples =
      remaining > 0 ? std::min(remaining, std::max(1, static_cast<int>(std::lround(remaining * options.sampling_fraction))))
                    : 0;
  if (n_samples > 0) {
    const auto u = latin_hypercube(n_samples, d, rng);
    std::vector<Evaluation> batch(n_samples);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_samples; ++i) batch[i] = evaluate(to_x(u[i]));
    for (int i = 0; i < n_samples; ++i) record(std::move(batch[i]), "sample", u[i]);
    remaining -= n_samples;
  }

  // Nelder-Mead on the unit cube, minimizing -objective.
  const auto cost = [&](const std::vector<double>& u) {
    Evaluation e = evaluate(to_x(u));
    const double c = e.ok ? -e.objective : std::numeric_limits<double>::infinity();
    record(std::move(e), "refine", u);
    --remaining;
    return c;
  };
  if (remaining > 0) {
    std::vector<std::vector<double>> simplex{best_u};
    std::vector<double> f{-best};
    const double h = 0.1;
    for (int j = 0; j < d && remaining > 0; ++j) {
      auto v = best_u;
      v[j] += v[j] + h <= 1.0 ? h : -h;
      f.push_back(cost(v));
      simplex.push_back(std::move(v));
    }
    const auto blend = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
      std::vector<double> out(d);
      for (int j = 0; j < d; ++j) out[j] = std::clamp(a[j] + t * (b[j] - a[j]), 0.0, 1.0);
      return out;
    };
    while (remaining > 0 && static_cast<int>(simplex.size()) == d + 1) {
      std::vector<int> order(d + 1);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
      std::vector<std::vector<double>> s2;
      std::vector<double> f2;
      for (int i : order) {
        s2.push_back(simplex[i]);
        f2.push_back(f[i]);
      }
      simplex = std::move(s2);
      f = std::move(f2);

      double size = 0.0;
      for (int i = 1; i <= d; ++i)
        for (int j = 0; j < d; ++j) size = std::max(size, std::abs(simplex[i][j] - simplex[0][j]));
      if (size < 1e-9) break;

      std::vector<double> c(d, 0.0);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) c[j] += simplex[i][j] / d;
      const auto& worst = simplex[d];

      const auto xr = blend(c, worst, -1.0);
      const double fr = cost(xr);
      if (fr < f[0]) {
        if (remaining > 0) {
          const auto xe = blend(c, worst, -2.0);
          const double fe = cost(xe);
          if (fe < fr) {
            simplex[d] = xe;
            f[d] = fe;
            continue;
          }
        }
        simplex[d] = xr;
        f[d] = fr;
      } else if (fr < f[d - 1]) {
        simplex[d] = xr;
        f[d] = fr;
      } else {
        if (remaining == 0) break;
        const bool outside = fr < f[d];
        const auto xc = outside ? blend(c, xr, 0.5) : blend(c, worst, 0.5);
        const double fc = cost(xc);
        if (fc < std::min(fr, f[d])) {
          simplex[d] = xc;
          f[d] = fc;
        } else {
          for (int i = 1; i <= d && remaining > 0; ++i) {
            simplex[i] = blend(simplex[0], simplex[i], 0.5);
            f[i] = cost(simplex[i]);
          }
        }
      }
    }
  }

  res.best_objective = best;
  res.best_system = system_at(res.best_x);
  return res;
}

void write_csv(const SearchResult& result, std::ostream& out) {
  out << "index,stage";
  for (const auto& b : result.bounds) out << ',' << b.name;
  out << ",objective,incumbent,status\n";
  char buf[32];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return std::string(buf);
  };
  for (const auto& e : result.log) {
    out << e.index << ',' << e.stage;
    for (double v : e.x) out << ',' << num(v);
    out << ',' << num(e.objective) << ',' << num(e.incumbent) << ',' << (e.ok ? "ok" : "failed") << '\n';
  }
}

}  // namespace dnp
