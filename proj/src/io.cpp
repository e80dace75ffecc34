#include "oscswap/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "oscswap/error.hpp"

#ifndef OSCSWAP_VERSION
#define OSCSWAP_VERSION "0.0.0"
#endif

namespace oscswap::io {

std::string_view version() { return OSCSWAP_VERSION; }

std::string format15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

double round15(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format15(v).c_str(), nullptr);
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const ProtocolSpec& spec) {
  return {{"w1", spec.w1}, {"w2", spec.w2}, {"tf", spec.tf}, {"lambda", spec.lambda},
          {"gamma", spec.gamma}};
}

json to_json(const FrameDecomposition& frame) {
  return {{"theta", frame.theta}, {"omega1_sq", frame.omega1_sq}, {"omega2_sq", frame.omega2_sq}};
}

json to_json(const ProtocolTable& table) {
  json j = to_json(table.spec);
  json rows = json::array();
  for (const auto& s : table.samples) {
    rows.push_back({{"t", s.t},
                    {"M11", s.M.a11},
                    {"M12", s.M.a12},
                    {"M22", s.M.a22},
                    {"theta", s.frame.theta},
                    {"omega1_sq", s.frame.omega1_sq},
                    {"omega2_sq", s.frame.omega2_sq}});
  }
  j["samples"] = std::move(rows);
  return j;
}

ProtocolTable table_from_json(const json& j) {
  ProtocolTable table;
  table.spec = build_spec(j.at("w1").get<double>(), j.at("w2").get<double>(),
                          j.at("tf").get<double>(), j.at("lambda").get<double>(),
                          j.at("gamma").get<double>());
  for (const auto& r : j.at("samples")) {
    ProtocolSample s;
    s.t = r.at("t").get<double>();
    s.M = {r.at("M11").get<double>(), r.at("M12").get<double>(), r.at("M22").get<double>()};
    s.frame = {r.at("theta").get<double>(), r.at("omega1_sq").get<double>(),
               r.at("omega2_sq").get<double>()};
    table.samples.push_back(s);
  }
  return table;
}

json to_json(const TransferCoeffs& c) {
  json j = {{"cx", complex_json(c.cx)},
            {"cy", complex_json(c.cy)},
            {"cpx", complex_json(c.cpx)},
            {"cpy", complex_json(c.cpy)},
            {"b", c.b}};
  j["phi"] = c.phi ? json(*c.phi) : json(nullptr);
  j["phi_prime"] = c.phi_prime ? json(*c.phi_prime) : json(nullptr);
  return j;
}

json to_json(const FinalStatePrediction& p) {
  json rows = json::array();
  for (const auto& [label, amp] : p.amplitudes)
    rows.push_back({{"m", label.n}, {"l", label.k}, {"amplitude", complex_json(amp)},
                    {"population", std::norm(amp)}});
  return rows;
}

json to_json(const SweepCurve& curve, std::string_view parameter, std::string_view value) {
  json points = json::array();
  for (const auto& p : curve.points)
    points.push_back({{std::string(parameter), p.parameter}, {std::string(value), p.value}});
  json gaps = json::array();
  for (const auto& g : curve.gaps)
    gaps.push_back({{std::string(parameter), g.parameter}, {"reason", g.reason}});
  json candidates = json::array();
  for (std::size_t i : curve.candidates) candidates.push_back(curve.points[i].parameter);
  return {{"points", points}, {"gaps", gaps}, {"candidates", candidates}};
}

json to_json(const PerfectLambda& r) {
  return {{"lambda_star", r.lambda_star}, {"b", r.b_at_star}, {"bracket", {r.lo, r.hi}}};
}

json envelope(std::string_view command, const json& config, json result) {
  return {{"version", version()},
          {"command", command},
          {"config", config},
          {"result", std::move(result)}};
}

json rounded(const json& j) {
  if (j.is_number_float()) return round15(j.get<double>());
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = rounded(*it);
    return out;
  }
  return j;
}

void write_json(std::ostream& os, const json& document) { os << rounded(document).dump(2) << '\n'; }

CsvWriter::CsvWriter(std::ostream& os, const json& config, const std::vector<std::string>& columns)
    : os_(os), width_(columns.size()) {
  os_ << "# oscswap " << version() << '\n';
  os_ << "# config " << rounded(config).dump() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
  os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw InvalidInput("CSV row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os_ << ',';
    if (std::isfinite(values[i])) os_ << format15(values[i]);
  }
  os_ << '\n';
}

void write_csv(std::ostream& os, const ProtocolTable& table, const json& config) {
  CsvWriter csv(os, config, {"t", "M11", "M12", "M22", "theta", "omega1_sq", "omega2_sq"});
  for (const auto& s : table.samples)
    csv.row({s.t, s.M.a11, s.M.a12, s.M.a22, s.frame.theta, s.frame.omega1_sq, s.frame.omega2_sq});
}

void write_csv(std::ostream& os, const SweepCurve& curve, std::string_view parameter,
               std::string_view value, const json& config) {
  CsvWriter csv(os, config, {std::string(parameter), std::string(value)});
  for (const auto& p : curve.points) csv.row({p.parameter, p.value});
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << contents;
  if (!f) throw Error("failed writing " + path);
}

}  // namespace oscswap::io
