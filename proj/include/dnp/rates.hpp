#pragma once

#include "dnp/hamiltonian.hpp"
#include "dnp/relaxation.hpp"

#include <map>
#include <string>
#include <vector>

namespace dnp {

// Second-rank norm, literal form including the 3/4 off-diagonal block.
double delta_squared(const Mat3& a);
// Polarization of delta_squared.
double scalar_product(const Mat3& a, const Mat3& b);

// Interaction tensors in rad/s at field b0, keyed G1, G2, CSA, HF1, HF2, DD.
struct TensorInvariants {
  std::map<std::string, Mat3> tensors;
  std::map<std::string, double> delta_sq;

  double aleph(const std::string& a, const std::string& b) const;
};
TensorInvariants tensor_invariants(const SpinSystem& sys, double b0);

// Literal dipolar Overhauser cross-relaxation rate for electron k (positive in extreme narrowing).
double overhauser_sigma(const SpinSystem& sys, double b0, int electron = 1);

enum class ProcessId {
  Overhauser_E1,
  EzToTwoEzNz,          // 1e1n
  TwoEzNzToNz,          // 1e1n
  EpToTwoEpNz,          // 1e1n transverse HF-G
  Ez1ToNz,
  Ez2ToNz,
  Ez1ToTwoEz1Nz,
  Ez2ToTwoEz2Nz,
  Ez1ToFourEzEzNz,
  Ez2ToFourEzEzNz,
  TwoEzEzToNz,
  TwoEzEzToTwoEz1Nz,
  TwoEzEzToTwoEz2Nz,
  TwoEzEzToFourEzEzNz,
  Ez1ToEz2,
  Ep1PlusTwoEp1Ez2,
  Ep1MinusTwoEp1Ez2,
  Ep2PlusTwoEz1Ep2,
  Ep2MinusTwoEz1Ep2,
  Ep1ToTwoEp1Nz,
  Ep2ToTwoEp2Nz,
  Ep1ToFourEp1Ez2Nz,
  Ep2ToFourEz1Ep2Nz,
  TwoEp1Ez2ToFourEp1Ez2Nz,
  TwoEz1Ep2ToFourEz1Ep2Nz,
  TwoEz1NzToNz,
  TwoEz2NzToNz,
  FourEzEzNzToNz,
};

struct ProcessInfo {
  ProcessId id;
  std::string key;      // stable identifier used in CSV output
  std::string formula;  // printed closed form
  std::string from;     // product-operator expression
  std::string to;       // equal to `from` for self-rates
  int electrons;        // topology the formula applies to
  bool exact;           // printed without omitted high-field remainders
};

const std::vector<ProcessInfo>& process_catalogue();
const ProcessInfo& process_info(ProcessId id);
std::vector<ProcessInfo> processes_for(const SpinSystem& sys);

// Closed-form value in s^-1 using the superoperator-element sign convention.
double closed_form_rate(ProcessId id, const SpinSystem& sys, double b0);
// The matching projection of a numerical superoperator.
double numerical_rate(ProcessId id, const SpinSystem& sys, const RelaxationSuperoperator& r);

struct RateRow {
  std::string key;
  std::string formula;
  double analytical = 0.0;
  double numerical = 0.0;
  double relative_deviation = 0.0;  // (analytical - numerical) / max(|analytical|, |numerical|)
  bool exact = false;
};
std::vector<RateRow> rate_catalogue(const SpinSystem& sys, double b0);

}  // namespace dnp
