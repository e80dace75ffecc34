#pragma once

// JSON and CSV serialisation. Every number is written with 15 significant
// digits; every file carries the code version and the run configuration.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oscswap/invariants.hpp"
#include "oscswap/protocol.hpp"
#include "oscswap/tuner.hpp"

namespace oscswap::io {

using json = nlohmann::ordered_json;

std::string_view version();

/// Value rounded to 15 significant digits (what is written to disk).
double round15(double v);
/// "%.15g"
std::string format15(double v);

json to_json(const ProtocolSpec& spec);
json to_json(const FrameDecomposition& frame);
json to_json(const ProtocolTable& table);
json to_json(const TransferCoeffs& coeffs);
json to_json(const FinalStatePrediction& prediction);
json to_json(const SweepCurve& curve, std::string_view parameter, std::string_view value);
json to_json(const PerfectLambda& result);
json complex_json(cplx z);

/// {"version", "command", "config", "result"}
json envelope(std::string_view command, const json& config, json result);

/// Rounds every floating-point leaf to 15 significant digits.
json rounded(const json& j);

/// Writes a pretty-printed, rounded document.
void write_json(std::ostream& os, const json& document);

/// Minimal CSV writer: a comment header with version and config, one column
/// header line, then rows of numbers (NaN written as empty cells).
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const json& config, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);

 private:
  std::ostream& os_;
  std::size_t width_;
};

/// t,M11,M12,M22,theta,omega1_sq,omega2_sq
void write_csv(std::ostream& os, const ProtocolTable& table, const json& config);
void write_csv(std::ostream& os, const SweepCurve& curve, std::string_view parameter,
               std::string_view value, const json& config);

/// Inverse of to_json(ProtocolTable) for round-trip checks.
ProtocolTable table_from_json(const json& j);

void write_file(const std::string& path, const std::string& contents);

}  // namespace oscswap::io
