#pragma once

#include <string>
#include <vector>

#include "etale/verify.hpp"

namespace etale::verify {

struct ReportEntry {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  bool exact = false;   // certified in exact arithmetic
  std::string note;
};

struct SpectralReport {
  std::string fixture;
  std::string mode;               // invariant | convolution
  std::string status;             // pass | fail | obstructed
  std::string obstruction;        // "", "w1", "w2"
  std::vector<int> certificate;   // infeasibility certificate rows
  std::vector<uint8_t> w1_witness;
  std::vector<uint8_t> spin_epsilon;
  bool projective = false;
  bool w2_trivial = true;
  std::vector<ReportEntry> entries;
  dirac::SpectrumResult spectrum;
  dirac::SummabilityReport summability;
  double integral_one = 0.0;

  bool ok() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return status != "fail";
  }
};

struct VerifyOptions {
  std::string mode = "invariant";
  int eigen_count = 40;
  int twist_class = 0;
  bool allow_projective = false;
  uint64_t seed = 0x5EED;
  int sample_functions = 5;
  std::string fixture_name;
};

SpectralReport verify_triple(const GroupoidPresentation& p, const VerifyOptions& opt);

std::string report_to_text(const SpectralReport& r);
std::string report_to_json(const SpectralReport& r);
std::string spectrum_to_csv(const dirac::SpectrumResult& s);

}  // namespace etale::verify
