#include "dnp/rates.hpp"

#include "dnp/constants.hpp"
#include "dnp/product_operator.hpp"

#include <cmath>
#include <stdexcept>

namespace dnp {

double delta_squared(const Mat3& a) {
  const double xx = a(0, 0), yy = a(1, 1), zz = a(2, 2);
  const double xy = a(0, 1) + a(1, 0), xz = a(0, 2) + a(2, 0), yz = a(1, 2) + a(2, 1);
  return xx * xx + yy * yy + zz * zz - xx * yy - xx * zz - yy * zz + 0.75 * (xy * xy + xz * xz + yz * yz);
}

double scalar_product(const Mat3& a, const Mat3& b) {
  return (delta_squared(a + b) - delta_squared(a - b)) / 4.0;
}

double TensorInvariants::aleph(const std::string& a, const std::string& b) const {
  const auto ia = tensors.find(a), ib = tensors.find(b);
  if (ia == tensors.end() || ib == tensors.end())
    throw std::invalid_argument("aleph: unknown interaction " + (ia == tensors.end() ? a : b));
  return scalar_product(ia->second, ib->second);
}

TensorInvariants tensor_invariants(const SpinSystem& sys, double b0) {
  TensorInvariants inv;
  for (const auto& in : interactions(sys)) {
    Mat3 t = in.tensor.matrix;
    if (in.spin_b < 0) t *= b0;
    inv.tensors[in.label] = t;
    inv.delta_sq[in.label] = delta_squared(t);
  }
  return inv;
}

double overhauser_sigma(const SpinSystem& sys, double b0, int electron) {
  const Vec3& re = electron == 1 ? sys.coords_e1 : sys.coords_e2;
  if (electron < 1 || electron > sys.n_electrons) throw std::out_of_range("overhauser_sigma: electron index");
  const double r = (re - sys.coords_n).norm() * constants::angstrom;
  const double ge = constants::gamma_free_electron, gn = sys.nucleus_gamma;
  const double we = electron_frequency(sys, electron, b0), wn = nuclear_frequency(sys, b0);
  const double t = sys.tau_c;
  const double pre = ge * ge * gn * gn * constants::hbar * constants::hbar / 10.0 * constants::mu0_over_4pi *
                     constants::mu0_over_4pi * t / std::pow(r, 6);
  const double sp = (we + wn) * t, sm = (we - wn) * t;
  return pre * (6.0 / (1.0 + sp * sp) - 1.0 / (1.0 + sm * sm));
}

const std::vector<ProcessInfo>& process_catalogue() {
  using P = ProcessId;
  static const std::vector<ProcessInfo> cat = {
      {P::Overhauser_E1, "overhauser_sigma_E1", "-(ge^2 gN^2 hbar^2/10)(mu0/4pi)^2 (tc/r^6)[6/(1+(wE+wN)^2tc^2) - 1/(1+(wE-wN)^2tc^2)]",
       "Ez1", "Nz", 0, false},
      {P::EzToTwoEzNz, "Ez->2EzNz", "-(2/15) aleph(HF,G) J(wE)", "Ez1", "2Ez1Nz", 1, false},
      {P::TwoEzNzToNz, "2EzNz->Nz", "-(2/15) aleph(HF,CSA) J(wN)", "2Ez1Nz", "Nz", 1, false},
      {P::EpToTwoEpNz, "E+->2E+Nz", "-(aleph(HF,G)/45)[4J(0) + 3J(wE)]", "E+1", "2E+1Nz", 1, false},
      {P::Ez1ToNz, "Ez1->Nz", "-(Delta2(HF1)/18) J(wE1)", "Ez1", "Nz", 2, true},
      {P::Ez2ToNz, "Ez2->Nz", "-(Delta2(HF2)/18) J(wE2)", "Ez2", "Nz", 2, true},
      {P::Ez1ToTwoEz1Nz, "Ez1->2Ez1Nz", "-(2/15) aleph(G1,HF1) J(wE1)", "Ez1", "2Ez1Nz", 2, false},
      {P::Ez2ToTwoEz2Nz, "Ez2->2Ez2Nz", "-(2/15) aleph(G2,HF2) J(wE2)", "Ez2", "2Ez2Nz", 2, false},
      {P::Ez1ToFourEzEzNz, "Ez1->4Ez1Ez2Nz", "-(1/15) aleph(DD,HF1) J(wE1)", "Ez1", "4Ez1Ez2Nz", 2, false},
      {P::Ez2ToFourEzEzNz, "Ez2->4Ez1Ez2Nz", "-(1/15) aleph(DD,HF2) J(wE2)", "Ez2", "4Ez1Ez2Nz", 2, false},
      {P::TwoEzEzToNz, "2Ez1Ez2->Nz", "0", "2Ez1Ez2", "Nz", 2, false},
      {P::TwoEzEzToTwoEz1Nz, "2Ez1Ez2->2Ez1Nz", "-(Delta2(HF2)/18) J(wE2) - (aleph(DD,HF1)/15) J(wE1)", "2Ez1Ez2",
       "2Ez1Nz", 2, false},
      {P::TwoEzEzToTwoEz2Nz, "2Ez1Ez2->2Ez2Nz", "-(Delta2(HF1)/18) J(wE1) - (aleph(DD,HF2)/15) J(wE2)", "2Ez1Ez2",
       "2Ez2Nz", 2, false},
      {P::TwoEzEzToFourEzEzNz, "2Ez1Ez2->4Ez1Ez2Nz", "-(2/15) aleph(G1,HF1) J(wE1) - (2/15) aleph(G2,HF2) J(wE2)",
       "2Ez1Ez2", "4Ez1Ez2Nz", 2, false},
      {P::Ez1ToEz2, "Ez1->Ez2", "(Delta2(DD)/90)[J(wE1-wE2) - 6J(wE1+wE2)]", "Ez1", "Ez2", 2, true},
      {P::Ep1PlusTwoEp1Ez2, "E+1+2E+1Ez2",
       "-(Delta2(DD)/180)[4J(0)+J(wE2-wE1)] - (Delta2(G1)/45)4J(0) - (Delta2(HF1)/90)[2J(0)+3J(wN)] - (aleph(DD,G1)/45)4J(0)",
       "E+1+2E+1Ez2", "E+1+2E+1Ez2", 2, false},
      {P::Ep1MinusTwoEp1Ez2, "E+1-2E+1Ez2",
       "-(Delta2(DD)/180)[4J(0)+J(wE2-wE1)] - (Delta2(G1)/45)4J(0) - (Delta2(HF1)/90)[2J(0)+3J(wN)] + (aleph(DD,G1)/45)4J(0)",
       "E+1-2E+1Ez2", "E+1-2E+1Ez2", 2, false},
      {P::Ep2PlusTwoEz1Ep2, "E+2+2Ez1E+2",
       "-(Delta2(DD)/180)[4J(0)+J(wE1-wE2)] - (Delta2(G2)/45)4J(0) - (Delta2(HF2)/90)[2J(0)+3J(wN)] - (aleph(DD,G2)/45)4J(0)",
       "E+2+2Ez1E+2", "E+2+2Ez1E+2", 2, false},
      {P::Ep2MinusTwoEz1Ep2, "E+2-2Ez1E+2",
       "-(Delta2(DD)/180)[4J(0)+J(wE1-wE2)] - (Delta2(G2)/45)4J(0) - (Delta2(HF2)/90)[2J(0)+3J(wN)] + (aleph(DD,G2)/45)4J(0)",
       "E+2-2Ez1E+2", "E+2-2Ez1E+2", 2, false},
      {P::Ep1ToTwoEp1Nz, "E+1->2E+1Nz", "-(aleph(G1,HF1)/45)4J(0)", "E+1", "2E+1Nz", 2, false},
      {P::Ep2ToTwoEp2Nz, "E+2->2E+2Nz", "-(aleph(G2,HF2)/45)4J(0)", "E+2", "2E+2Nz", 2, false},
      {P::Ep1ToFourEp1Ez2Nz, "E+1->4E+1Ez2Nz", "-(aleph(DD,HF1)/90)4J(0)", "E+1", "4E+1Ez2Nz", 2, false},
      {P::Ep2ToFourEz1Ep2Nz, "E+2->4Ez1E+2Nz", "-(aleph(DD,HF2)/90)4J(0)", "E+2", "4Ez1E+2Nz", 2, false},
      {P::TwoEp1Ez2ToFourEp1Ez2Nz, "2E+1Ez2->4E+1Ez2Nz", "-(aleph(G1,HF1)/45)4J(0)", "2E+1Ez2", "4E+1Ez2Nz", 2,
       false},
      {P::TwoEz1Ep2ToFourEz1Ep2Nz, "2Ez1E+2->4Ez1E+2Nz", "-(aleph(G2,HF2)/45)4J(0)", "2Ez1E+2", "4Ez1E+2Nz", 2,
       false},
      {P::TwoEz1NzToNz, "2Ez1Nz->Nz", "-(2/15) aleph(CSA,HF1) J(wN)", "2Ez1Nz", "Nz", 2, true},
      {P::TwoEz2NzToNz, "2Ez2Nz->Nz", "-(2/15) aleph(CSA,HF2) J(wN)", "2Ez2Nz", "Nz", 2, true},
      {P::FourEzEzNzToNz, "4Ez1Ez2Nz->Nz", "-(1/15) aleph(HF1,HF2) J(wN)", "4Ez1Ez2Nz", "Nz", 2, true},
  };
  return cat;
}

const ProcessInfo& process_info(ProcessId id) {
  for (const auto& p : process_catalogue())
    if (p.id == id) return p;
  throw std::invalid_argument("process_info: unknown process");
}

std::vector<ProcessInfo> processes_for(const SpinSystem& sys) {
  std::vector<ProcessInfo> out;
  for (const auto& p : process_catalogue())
    if (p.electrons == 0 || p.electrons == sys.n_electrons) out.push_back(p);
  return out;
}

double closed_form_rate(ProcessId id, const SpinSystem& sys, double b0) {
  using P = ProcessId;
  const ProcessInfo& info = process_info(id);
  if (info.electrons != 0 && info.electrons != sys.n_electrons)
    throw std::invalid_argument("closed_form_rate: process " + info.key + " does not apply to a " +
                                std::to_string(sys.n_electrons) + "-electron system");
  const auto inv = tensor_invariants(sys, b0);
  const auto d2 = [&](const char* k) { return inv.delta_sq.at(k); };
  const auto al = [&](const char* a, const char* b) { return inv.aleph(a, b); };
  const double tc = sys.tau_c;
  const auto j = [&](double w) { return spectral_density(w, tc); };
  const double j0 = tc;
  const double w1 = electron_frequency(sys, 1, b0);
  const double w2 = sys.n_electrons == 2 ? electron_frequency(sys, 2, b0) : 0.0;
  const double wn = nuclear_frequency(sys, b0);

  const auto transverse = [&](int k, double sign) {
    const char* g = k == 1 ? "G1" : "G2";
    const char* hf = k == 1 ? "HF1" : "HF2";
    const double dw = k == 1 ? w2 - w1 : w1 - w2;
    return -d2("DD") / 180.0 * (4.0 * j0 + j(dw)) - d2(g) / 45.0 * 4.0 * j0 -
           d2(hf) / 90.0 * (2.0 * j0 + 3.0 * j(wn)) + sign * al("DD", g) / 45.0 * 4.0 * j0;
  };

  switch (id) {
    case P::Overhauser_E1: return -overhauser_sigma(sys, b0, 1);
    case P::EzToTwoEzNz: return -2.0 / 15.0 * al("HF1", "G1") * j(w1);
    case P::TwoEzNzToNz: return -2.0 / 15.0 * al("HF1", "CSA") * j(wn);
    case P::EpToTwoEpNz: return -al("HF1", "G1") / 45.0 * (4.0 * j0 + 3.0 * j(w1));
    case P::Ez1ToNz: return -d2("HF1") / 18.0 * j(w1);
    case P::Ez2ToNz: return -d2("HF2") / 18.0 * j(w2);
    case P::Ez1ToTwoEz1Nz: return -2.0 / 15.0 * al("G1", "HF1") * j(w1);
    case P::Ez2ToTwoEz2Nz: return -2.0 / 15.0 * al("G2", "HF2") * j(w2);
    case P::Ez1ToFourEzEzNz: return -1.0 / 15.0 * al("DD", "HF1") * j(w1);
    case P::Ez2ToFourEzEzNz: return -1.0 / 15.0 * al("DD", "HF2") * j(w2);
    case P::TwoEzEzToNz: return 0.0;
    case P::TwoEzEzToTwoEz1Nz: return -d2("HF2") / 18.0 * j(w2) - al("DD", "HF1") / 15.0 * j(w1);
    case P::TwoEzEzToTwoEz2Nz: return -d2("HF1") / 18.0 * j(w1) - al("DD", "HF2") / 15.0 * j(w2);
    case P::TwoEzEzToFourEzEzNz:
      return -2.0 / 15.0 * al("G1", "HF1") * j(w1) - 2.0 / 15.0 * al("G2", "HF2") * j(w2);
    case P::Ez1ToEz2: return d2("DD") / 90.0 * (j(w1 - w2) - 6.0 * j(w1 + w2));
    case P::Ep1PlusTwoEp1Ez2: return transverse(1, -1.0);
    case P::Ep1MinusTwoEp1Ez2: return transverse(1, +1.0);
    case P::Ep2PlusTwoEz1Ep2: return transverse(2, -1.0);
    case P::Ep2MinusTwoEz1Ep2: return transverse(2, +1.0);
    case P::Ep1ToTwoEp1Nz: return -al("G1", "HF1") / 45.0 * 4.0 * j0;
    case P::Ep2ToTwoEp2Nz: return -al("G2", "HF2") / 45.0 * 4.0 * j0;
    case P::Ep1ToFourEp1Ez2Nz: return -al("DD", "HF1") / 90.0 * 4.0 * j0;
    case P::Ep2ToFourEz1Ep2Nz: return -al("DD", "HF2") / 90.0 * 4.0 * j0;
    case P::TwoEp1Ez2ToFourEp1Ez2Nz: return -al("G1", "HF1") / 45.0 * 4.0 * j0;
    case P::TwoEz1Ep2ToFourEz1Ep2Nz: return -al("G2", "HF2") / 45.0 * 4.0 * j0;
    case P::TwoEz1NzToNz: return -2.0 / 15.0 * al("CSA", "HF1") * j(wn);
    case P::TwoEz2NzToNz: return -2.0 / 15.0 * al("CSA", "HF2") * j(wn);
    case P::FourEzEzNzToNz: return -1.0 / 15.0 * al("HF1", "HF2") * j(wn);
  }
  throw std::invalid_argument("closed_form_rate: unhandled process");
}

double numerical_rate(ProcessId id, const SpinSystem& sys, const RelaxationSuperoperator& r) {
  const ProcessInfo& info = process_info(id);
  if (info.electrons != 0 && info.electrons != sys.n_electrons)
    throw std::invalid_argument("numerical_rate: process " + info.key + " does not apply to this system");
  const Operator from = parse_product_operator(info.from, sys.n_electrons);
  const Operator to = parse_product_operator(info.to, sys.n_electrons);
  return rate_between(r, from, to);
}

std::vector<RateRow> rate_catalogue(const SpinSystem& sys, double b0) {
  const RelaxationSuperoperator r = brw_superoperator(sys, b0);
  std::vector<RateRow> rows;
  for (const auto& p : processes_for(sys)) {
    RateRow row;
    row.key = p.key;
    row.formula = p.formula;
    row.exact = p.exact;
    row.analytical = closed_form_rate(p.id, sys, b0);
    row.numerical = numerical_rate(p.id, sys, r);
    const double den = std::max(std::abs(row.numerical), std::abs(row.analytical));
    row.relative_deviation = den == 0.0 ? 0.0 : (row.analytical - row.numerical) / den;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dnp
