#include "dnp/config.hpp"

#include "dnp/search.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace dnp {

ConfigError::ConfigError(const std::string& message, int l)
    : std::runtime_error(l > 0 ? "line " + std::to_string(l) + ": " + message : message), line(l) {}

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

int line_at(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Walks the document with a path so errors can name the key and find its line.
class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
    std::string dotted;
    for (const auto& p : path) dotted += (dotted.empty() ? "" : ".") + p;
    throw ConfigError(dotted + ": " + message, locate(path));
  }

  void check_keys(const json& obj, const std::vector<std::string>& path, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      if (allowed.count(key)) continue;
      auto sub = path;
      sub.push_back(key);
      for (const auto& a : allowed)
        if (a.rfind(key + "_", 0) == 0) fail(sub, "missing unit suffix (expected '" + a + "')");
      fail(sub, "unknown key");
    }
  }

  double number(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  double bounded(const json& v, const std::vector<std::string>& path, double lo, double hi, bool open_lo) const {
    const double x = number(v, path);
    if ((open_lo ? !(x > lo) : !(x >= lo)) || x > hi) {
      fail(path, "value " + json(x).dump() + " outside " + (open_lo ? "(" : "[") + json(lo).dump() + ", " +
                     json(hi).dump() + "]");
    }
    return x;
  }

  long long integer(const json& v, const std::vector<std::string>& path, long long lo, long long hi) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) fail(path, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  Triple triple(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array() || v.size() != 3) fail(path, "expected an array of 3 numbers");
    Triple t;
    for (int i = 0; i < 3; ++i) t[i] = number(v[i], path);
    return t;
  }

  std::string string(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

 private:
  int locate(const std::vector<std::string>& path) const {
    std::size_t pos = 0;
    bool found = false;
    for (const auto& p : path) {
      const auto at = text_.find('"' + p + '"', pos);
      if (at == std::string::npos) break;
      pos = at;
      found = true;
    }
    return found ? line_at(text_, pos) : 0;
  }

  const std::string& text_;
};

using Path = std::vector<std::string>;

const char* euler_suffix(EulerConvention c) { return c == EulerConvention::ZYZ ? "_euler_zyz_rad" : "_euler_xyz_rad"; }

void read_system(const Reader& r, const json& j, SystemConfig& s, bool inherited) {
  const Path base{"system"};
  std::set<std::string> allowed{"name",          "n_electrons",        "shift_eigs_ppm",     "g1_eigs",
                                "g2_eigs",       "coords_n_angstrom",  "coords_e1_angstrom", "coords_e2_angstrom",
                                "tau_c_ps",      "exchange_J_MHz",     "isotropic_hf_MHz",   "mw_nutation_MHz"};
  for (const char* t : {"shift", "g1", "g2"})
    for (auto c : {EulerConvention::ZYZ, EulerConvention::XYZ}) allowed.insert(std::string(t) + euler_suffix(c));
  r.check_keys(j, base, allowed);
  const auto at = [&](const std::string& k) { return Path{"system", k}; };

  // Euler convention: every angle key in one document must agree.
  std::optional<EulerConvention> conv;
  int angle_keys = 0;
  for (const auto& [key, value] : j.items()) {
    for (auto c : {EulerConvention::ZYZ, EulerConvention::XYZ}) {
      const std::string suf = euler_suffix(c);
      if (key.size() > suf.size() && key.compare(key.size() - suf.size(), suf.size(), suf) == 0) {
        if (conv && *conv != c) r.fail(at(key), "mixes ZYZ and XYZ Euler conventions");
        conv = c;
        ++angle_keys;
      }
    }
  }

  if (j.contains("name")) s.name = r.string(j["name"], at("name"));
  bool set_n = false;
  if (j.contains("n_electrons")) {
    s.n_electrons = static_cast<int>(r.integer(j["n_electrons"], at("n_electrons"), 1, 2));
    set_n = true;
  }
  if (conv && *conv != s.euler_convention && inherited) {
    const int needed = s.n_electrons == 2 ? 3 : 2;
    if (angle_keys < needed)
      r.fail(base, "changing the Euler convention of a fixture requires every Euler angle key");
  }
  if (conv) s.euler_convention = *conv;
  const std::string suf = euler_suffix(s.euler_convention);

  const auto required = [&](const std::string& k) {
    if (!inherited && !j.contains(k)) r.fail(at(k), "required key is missing");
    return j.contains(k);
  };
  const auto g_eigs = [&](const std::string& k, Triple& t) {
    t = r.triple(j[k], at(k));
    for (double g : t)
      if (!(g >= 1.5 && g <= 2.5)) r.fail(at(k), "g eigenvalue outside [1.5, 2.5]");
  };

  if (required("shift_eigs_ppm")) s.shift_eigs_ppm = r.triple(j["shift_eigs_ppm"], at("shift_eigs_ppm"));
  if (j.contains("shift" + suf)) s.shift_euler_rad = r.triple(j["shift" + suf], at("shift" + suf));
  if (required("g1_eigs")) g_eigs("g1_eigs", s.g1_eigs);
  if (j.contains("g1" + suf)) s.g1_euler_rad = r.triple(j["g1" + suf], at("g1" + suf));
  if (required("coords_n_angstrom")) s.coords_n_angstrom = r.triple(j["coords_n_angstrom"], at("coords_n_angstrom"));
  if (required("coords_e1_angstrom"))
    s.coords_e1_angstrom = r.triple(j["coords_e1_angstrom"], at("coords_e1_angstrom"));
  if (required("tau_c_ps")) s.tau_c_ps = r.bounded(j["tau_c_ps"], at("tau_c_ps"), 0.0, 1e6, true);
  if (required("mw_nutation_MHz"))
    s.mw_nutation_MHz = r.bounded(j["mw_nutation_MHz"], at("mw_nutation_MHz"), 0.0, 1e3, false);
  if (j.contains("isotropic_hf_MHz"))
    s.isotropic_hf_MHz = r.bounded(j["isotropic_hf_MHz"], at("isotropic_hf_MHz"), -1e4, 1e4, false);

  const bool second_keys = j.contains("g2_eigs") || j.contains("g2" + suf) || j.contains("coords_e2_angstrom") ||
                           j.contains("exchange_J_MHz");
  if (s.n_electrons == 1) {
    if (second_keys) r.fail(base, "electron 2 keys given for a 1e1n system");
    if (set_n) {
      s.g2_eigs.reset();
      s.g2_euler_rad.reset();
      s.coords_e2_angstrom.reset();
      s.exchange_J_MHz = 0.0;
    }
    return;
  }
  const auto required2 = [&](const std::string& k, bool have) {
    if (!j.contains(k) && !have) r.fail(at(k), "required for a 2e1n system");
    return j.contains(k);
  };
  if (required2("g2_eigs", s.g2_eigs.has_value())) {
    Triple t;
    g_eigs("g2_eigs", t);
    s.g2_eigs = t;
  }
  if (j.contains("g2" + suf)) s.g2_euler_rad = r.triple(j["g2" + suf], at("g2" + suf));
  if (!s.g2_euler_rad) s.g2_euler_rad = Triple{0, 0, 0};
  if (required2("coords_e2_angstrom", s.coords_e2_angstrom.has_value()))
    s.coords_e2_angstrom = r.triple(j["coords_e2_angstrom"], at("coords_e2_angstrom"));
  if (j.contains("exchange_J_MHz"))
    s.exchange_J_MHz = r.bounded(j["exchange_J_MHz"], at("exchange_J_MHz"), -1e4, 1e4, false);
}

void read_conditions(const Reader& r, const json& j, ConditionsConfig& c) {
  r.check_keys(j, {"conditions"}, {"B0_tesla", "temperature_K", "mw_offset_MHz"});
  if (j.contains("B0_tesla")) c.B0_tesla = r.bounded(j["B0_tesla"], {"conditions", "B0_tesla"}, 0.0, 100.0, true);
  if (j.contains("temperature_K"))
    c.temperature_K = r.bounded(j["temperature_K"], {"conditions", "temperature_K"}, 0.0, 1e4, true);
  if (j.contains("mw_offset_MHz"))
    c.mw_offset_MHz = r.bounded(j["mw_offset_MHz"], {"conditions", "mw_offset_MHz"}, -1e5, 1e5, false);
}

const char* quantity_key(SweepAxis a) {
  switch (a) {
    case SweepAxis::B0: return "B0_tesla";
    case SweepAxis::MwOffset: return "mw_offset_MHz";
    case SweepAxis::TauC: return "tau_c_ps";
  }
  return "?";
}

AxisConfig read_axis(const Reader& r, const json& j, const Path& path) {
  r.check_keys(j, path, {"B0_tesla", "mw_offset_MHz", "tau_c_ps", "points", "spacing"});
  AxisConfig a;
  int found = 0;
  for (auto q : {SweepAxis::B0, SweepAxis::MwOffset, SweepAxis::TauC}) {
    const std::string k = quantity_key(q);
    if (!j.contains(k)) continue;
    ++found;
    auto p = path;
    p.push_back(k);
    const json& range = j[k];
    if (!range.is_array() || range.size() != 2) r.fail(p, "expected [start, stop]");
    a.quantity = q;
    a.start = r.number(range[0], p);
    a.stop = r.number(range[1], p);
    if (!(a.start < a.stop)) r.fail(p, "range must be strictly increasing");
    if (q != SweepAxis::MwOffset && !(a.start > 0.0)) r.fail(p, "range must be positive");
  }
  if (found != 1) r.fail(path, "exactly one of B0_tesla, mw_offset_MHz, tau_c_ps must give the range");
  if (j.contains("points")) a.points = static_cast<int>(r.integer(j["points"], Path{path[0], path[1], "points"}, 2, 4096));
  if (j.contains("spacing")) {
    const auto s = r.string(j["spacing"], {path[0], path[1], "spacing"});
    if (s == "linear")
      a.spacing = Spacing::Linear;
    else if (s == "log")
      a.spacing = Spacing::Log;
    else
      r.fail({path[0], path[1], "spacing"}, "expected 'linear' or 'log'");
    if (a.spacing == Spacing::Log && !(a.start > 0.0)) r.fail(path, "log spacing needs a positive range");
  }
  return a;
}

void read_sweep(const Reader& r, const json& j, SweepConfig& s) {
  const Path base{"sweep"};
  r.check_keys(j, base, {"axis1", "axis2", "observables", "normalization", "frame", "truncation"});
  if (!j.contains("axis1")) r.fail({"sweep", "axis1"}, "required key is missing");
  s.axis1 = read_axis(r, j["axis1"], {"sweep", "axis1"});
  if (j.contains("axis2")) {
    s.axis2 = read_axis(r, j["axis2"], {"sweep", "axis2"});
    if (s.axis2->quantity == s.axis1.quantity) r.fail({"sweep", "axis2"}, "must sweep a different quantity");
  }
  if (j.contains("observables")) {
    const auto& o = j["observables"];
    if (!o.is_array() || o.empty()) r.fail({"sweep", "observables"}, "expected a non-empty array of strings");
    s.observables.clear();
    for (const auto& x : o) s.observables.push_back(r.string(x, {"sweep", "observables"}));
  }
  const auto choice = [&](const char* key, std::initializer_list<const char*> names) {
    const auto v = r.string(j[key], {"sweep", key});
    int i = 0;
    for (const char* n : names) {
      if (v == n) return i;
      ++i;
    }
    r.fail({"sweep", key}, "unexpected value '" + v + "'");
  };
  if (j.contains("normalization"))
    s.normalization = choice("normalization", {"none", "thermal_nuclear"}) == 0 ? Normalization::None
                                                                                : Normalization::ThermalNuclear;
  if (j.contains("frame")) s.frame = choice("frame", {"rotating", "lab"}) == 0 ? Frame::Rotating : Frame::Lab;
  if (j.contains("truncation"))
    s.truncation = choice("truncation", {"like_spin", "unlike_spin"}) == 0 ? DipolarTruncation::LikeSpin
                                                                          : DipolarTruncation::UnlikeSpin;
}

void read_optimize(const Reader& r, const json& j, OptimizeConfig& o) {
  const Path base{"optimize"};
  r.check_keys(j, base, {"budget", "seed", "offset_range_MHz", "offset_points", "parameters"});
  if (j.contains("budget")) o.budget = static_cast<int>(r.integer(j["budget"], {"optimize", "budget"}, 1, 1000000));
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) r.fail({"optimize", "seed"}, "expected a non-negative integer");
    o.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("offset_range_MHz")) {
    const auto& v = j["offset_range_MHz"];
    const Path p{"optimize", "offset_range_MHz"};
    if (!v.is_array() || v.size() != 2) r.fail(p, "expected [start, stop]");
    o.offset_start_MHz = r.number(v[0], p);
    o.offset_stop_MHz = r.number(v[1], p);
    if (!(o.offset_start_MHz < o.offset_stop_MHz)) r.fail(p, "range must be strictly increasing");
  }
  if (j.contains("offset_points"))
    o.offset_points = static_cast<int>(r.integer(j["offset_points"], {"optimize", "offset_points"}, 1, 100000));
  if (j.contains("parameters")) {
    const auto& ps = j["parameters"];
    const Path p{"optimize", "parameters"};
    if (!ps.is_array()) r.fail(p, "expected an array");
    o.parameters.clear();
    for (const auto& item : ps) {
      r.check_keys(item, p, {"name", "lower", "upper"});
      ParameterBoundConfig b;
      if (!item.contains("name") || !item.contains("lower") || !item.contains("upper"))
        r.fail(p, "each parameter needs name, lower and upper");
      b.name = r.string(item["name"], p);
      if (!is_parameter_name(b.name)) r.fail({"optimize", "parameters", b.name}, "unknown parameter name");
      b.lower = r.number(item["lower"], {"optimize", "parameters", b.name});
      b.upper = r.number(item["upper"], {"optimize", "parameters", b.name});
      if (!(b.lower < b.upper)) r.fail({"optimize", "parameters", b.name}, "lower must be below upper");
      o.parameters.push_back(b);
    }
  }
}

ojson triple_json(const Triple& t) { return ojson::array({t[0], t[1], t[2]}); }

ojson axis_json(const AxisConfig& a) {
  ojson j;
  j[quantity_key(a.quantity)] = ojson::array({a.start, a.stop});
  j["points"] = a.points;
  j["spacing"] = a.spacing == Spacing::Linear ? "linear" : "log";
  return j;
}

Vec3 vec3(const Triple& t) { return Vec3(t[0], t[1], t[2]); }

double axis_scale(SweepAxis q) {
  switch (q) {
    case SweepAxis::B0: return 1.0;
    case SweepAxis::MwOffset: return 1e6;
    case SweepAxis::TauC: return 1e-12;
  }
  return 1.0;
}

AxisSpec axis_spec(const AxisConfig& a) {
  const double k = axis_scale(a.quantity);
  return AxisSpec{a.quantity, a.start * k, a.stop * k, a.points, a.spacing};
}

}  // namespace

ConfigDocument parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line_at(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  const Reader r(text);
  if (!j.is_object()) throw ConfigError("top level must be an object", 1);
  r.check_keys(j, {}, {"fixture", "system", "conditions", "sweep", "ablation", "optimize"});

  ConfigDocument doc;
  bool inherited = false;
  if (j.contains("fixture")) {
    const auto name = r.string(j["fixture"], {"fixture"});
    try {
      doc = fixture(name);
    } catch (const ConfigError& e) {
      r.fail({"fixture"}, e.what());
    }
    inherited = true;
  } else if (!j.contains("system")) {
    throw ConfigError("a system section or a fixture name is required");
  }
  if (j.contains("system")) read_system(r, j["system"], doc.system, inherited);
  if (j.contains("conditions")) read_conditions(r, j["conditions"], doc.conditions);
  if (j.contains("sweep")) {
    SweepConfig s;
    read_sweep(r, j["sweep"], s);
    doc.sweep = s;
  }
  if (j.contains("ablation")) {
    const auto& a = j["ablation"];
    if (!a.is_array()) r.fail({"ablation"}, "expected an array of switch names");
    doc.ablation.clear();
    for (const auto& x : a) {
      const auto name = r.string(x, {"ablation"});
      try {
        const auto sw = parse_ablation(name);
        if (std::find(doc.ablation.begin(), doc.ablation.end(), sw) == doc.ablation.end()) doc.ablation.push_back(sw);
      } catch (const std::invalid_argument& e) {
        r.fail({"ablation", name}, e.what());
      }
    }
  }
  if (j.contains("optimize")) {
    OptimizeConfig o;
    read_optimize(r, j["optimize"], o);
    doc.optimize = o;
  }
  try {
    validate(to_spin_system(doc));
    if (!doc.ablation.empty()) apply_ablation(to_spin_system(doc), to_ablation(doc));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return doc;
}

std::string serialize_config(const ConfigDocument& doc) {
  ojson j;
  const auto& s = doc.system;
  const std::string suf = euler_suffix(s.euler_convention);
  ojson sys;
  sys["name"] = s.name;
  sys["n_electrons"] = s.n_electrons;
  sys["shift_eigs_ppm"] = triple_json(s.shift_eigs_ppm);
  sys["shift" + suf] = triple_json(s.shift_euler_rad);
  sys["g1_eigs"] = triple_json(s.g1_eigs);
  sys["g1" + suf] = triple_json(s.g1_euler_rad);
  if (s.g2_eigs) sys["g2_eigs"] = triple_json(*s.g2_eigs);
  if (s.g2_euler_rad) sys["g2" + suf] = triple_json(*s.g2_euler_rad);
  sys["coords_n_angstrom"] = triple_json(s.coords_n_angstrom);
  sys["coords_e1_angstrom"] = triple_json(s.coords_e1_angstrom);
  if (s.coords_e2_angstrom) sys["coords_e2_angstrom"] = triple_json(*s.coords_e2_angstrom);
  sys["tau_c_ps"] = s.tau_c_ps;
  if (s.n_electrons == 2) sys["exchange_J_MHz"] = s.exchange_J_MHz;
  sys["isotropic_hf_MHz"] = s.isotropic_hf_MHz;
  sys["mw_nutation_MHz"] = s.mw_nutation_MHz;
  j["system"] = sys;

  j["conditions"] = ojson{{"B0_tesla", doc.conditions.B0_tesla},
                          {"temperature_K", doc.conditions.temperature_K},
                          {"mw_offset_MHz", doc.conditions.mw_offset_MHz}};
  if (doc.sweep) {
    const auto& w = *doc.sweep;
    ojson sw;
    sw["axis1"] = axis_json(w.axis1);
    if (w.axis2) sw["axis2"] = axis_json(*w.axis2);
    sw["observables"] = w.observables;
    sw["normalization"] = w.normalization == Normalization::None ? "none" : "thermal_nuclear";
    sw["frame"] = w.frame == Frame::Rotating ? "rotating" : "lab";
    sw["truncation"] = w.truncation == DipolarTruncation::LikeSpin ? "like_spin" : "unlike_spin";
    j["sweep"] = sw;
  }
  if (!doc.ablation.empty()) {
    ojson a = ojson::array();
    for (auto s2 : doc.ablation) a.push_back(ablation_name(s2));
    j["ablation"] = a;
  }
  if (doc.optimize) {
    const auto& o = *doc.optimize;
    ojson op;
    op["budget"] = o.budget;
    op["seed"] = o.seed;
    op["offset_range_MHz"] = ojson::array({o.offset_start_MHz, o.offset_stop_MHz});
    op["offset_points"] = o.offset_points;
    ojson ps = ojson::array();
    for (const auto& p : o.parameters) ps.push_back(ojson{{"name", p.name}, {"lower", p.lower}, {"upper", p.upper}});
    op["parameters"] = ps;
    j["optimize"] = op;
  }
  return j.dump(2) + "\n";
}

SpinSystem to_spin_system(const ConfigDocument& doc) {
  const auto& c = doc.system;
  SpinSystem s;
  s.name = c.name;
  s.n_electrons = c.n_electrons;
  s.euler_convention = c.euler_convention;
  s.shift_eigs_ppm = vec3(c.shift_eigs_ppm);
  s.shift_euler = vec3(c.shift_euler_rad);
  s.g1_eigs = vec3(c.g1_eigs);
  s.g1_euler = vec3(c.g1_euler_rad);
  if (c.g2_eigs) s.g2_eigs = vec3(*c.g2_eigs);
  if (c.g2_euler_rad) s.g2_euler = vec3(*c.g2_euler_rad);
  s.coords_n = vec3(c.coords_n_angstrom);
  s.coords_e1 = vec3(c.coords_e1_angstrom);
  if (c.coords_e2_angstrom) s.coords_e2 = vec3(*c.coords_e2_angstrom);
  s.tau_c = c.tau_c_ps * 1e-12;
  s.exchange_j = c.exchange_J_MHz * 1e6;
  s.isotropic_hf = c.isotropic_hf_MHz * 1e6;
  s.mw_nutation = c.mw_nutation_MHz * 1e6;
  s.temperature = doc.conditions.temperature_K;
  return s;
}

SweepSpec to_sweep_spec(const ConfigDocument& doc) {
  if (!doc.sweep || !doc.sweep->axis2) throw ConfigError("sweep: a two-axis sweep section is required");
  const auto& w = *doc.sweep;
  SweepSpec spec;
  spec.axis1 = axis_spec(w.axis1);
  spec.axis2 = axis_spec(*w.axis2);
  spec.observables = w.observables;
  spec.normalization = w.normalization;
  spec.frame = w.frame;
  spec.truncation = w.truncation;
  spec.b0 = doc.conditions.B0_tesla;
  spec.offset_hz = doc.conditions.mw_offset_MHz * 1e6;
  return spec;
}

Ablation to_ablation(const ConfigDocument& doc) {
  Ablation a;
  a.switches.insert(doc.ablation.begin(), doc.ablation.end());
  return a;
}

}  // namespace dnp
