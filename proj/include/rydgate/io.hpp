/* Copyright 2026 The RydGate Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
//
// JSON/CSV serialization. All files are in V=1 units. Doubles in CSV are
// written as %.12e so reruns are byte-identical; JSON uses the library's
// shortest-round-trip encoding. An infinite Rabi ratio p serializes as the
// string "inf".

#ifndef RYDGATE_IO_HPP_
#define RYDGATE_IO_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydgate/analytic.hpp"
#include "rydgate/fidelity.hpp"
#include "rydgate/grape.hpp"

namespace rydgate {

using json = nlohmann::json;

inline std::string format_sci(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", x);
  return buf;
}

inline json p_to_json(double p) {
  if (std::isinf(p)) return json("inf");
  return json(p);
}

inline double p_from_json(const json& j) {
  if (j.is_string()) {
    require(j.get<std::string>() == "inf",
            "p: the only string value accepted is \"inf\"");
    return std::numeric_limits<double>::infinity();
  }
  require(j.is_number(), "p: expected a number or \"inf\"");
  return j.get<double>();
}

inline json segment_to_json(const PulseSegment& s) {
  return json{{"duration", s.duration},
              {"omega_control", s.omega_control},
              {"omega_target", s.omega_target},
              {"xi", s.xi},
              {"delta", s.delta}};
}

inline PulseSegment segment_from_json(const json& j) {
  PulseSegment s;
  s.duration = j.at("duration").get<double>();
  s.omega_control = j.at("omega_control").get<double>();
  s.omega_target = j.at("omega_target").get<double>();
  s.xi = j.at("xi").get<double>();
  s.delta = j.at("delta").get<double>();
  s.validate();
  return s;
}

inline json sequence_to_json(const PulseSequence& seq) {
  json arr = json::array();
  for (const auto& s : seq) arr.push_back(segment_to_json(s));
  return json{{"units", "V=1"}, {"segments", arr}};
}

inline PulseSequence sequence_from_json(const json& j) {
  const json& arr = j.is_array() ? j : j.at("segments");
  PulseSequence seq;
  for (const auto& e : arr) seq.push_back(segment_from_json(e));
  return seq;
}

inline json waveform_to_json(const PhaseWaveform& w) {
  std::vector<double> xi(w.xi.data(), w.xi.data() + w.xi.size());
  return json{{"N", w.n},
              {"duration", w.duration},
              {"omega", w.omega},
              {"V", w.V},
              {"xi", xi}};
}

inline PhaseWaveform waveform_from_json(const json& j) {
  PhaseWaveform w;
  w.n = j.at("N").get<int>();
  w.duration = j.at("duration").get<double>();
  w.omega = j.at("omega").get<double>();
  w.V = j.at("V").get<double>();
  const auto xi = j.at("xi").get<std::vector<double>>();
  w.xi = Eigen::Map<const Eigen::VectorXd>(xi.data(),
                                           static_cast<long>(xi.size()));
  w.validate();
  return w;
}

inline double design_gate_duration(const GateDesign& d) {
  // Two control pi pulses sandwich the (already loops-inclusive) target.
  const double control =
      std::isinf(d.p) ? 0.0 : 2.0 * kPi / (d.p * d.omega);
  return d.t_target + control;
}

inline json design_to_json(const GateDesign& d) {
  const PhasePair ph =
      target_pulse_phases(d.omega, d.delta, d.V, d.t_target);
  // The closed-form scattering error applies to the basic CZ design only.
  const bool basic_cz =
      d.branch == '0' && std::abs(d.theta - kPi) < 1e-12 && d.loops == 1;
  json eps = nullptr;
  if (basic_cz) eps = scattering_error(d.p, 1.0, 1.0);
  return json{{"units", "V=1"},
              {"theta", d.theta},
              {"V", d.V},
              {"p", p_to_json(d.p)},
              {"omega", d.omega},
              {"delta", d.delta},
              {"t_target", d.t_target},
              {"n0", d.n0},
              {"nv", d.nv},
              {"loops", d.loops},
              {"branch", std::string(1, d.branch)},
              {"derived",
               {{"phi", ph.phi},
                {"phi_v", ph.phi_v},
                {"theta_bell", wrap_angle(ph.phi - ph.phi_v)},
                {"t_gate", design_gate_duration(d)},
                {"eps_vtau", eps}}}};
}

inline GateDesign design_from_json(const json& j) {
  GateDesign d;
  d.theta = j.at("theta").get<double>();
  d.V = j.at("V").get<double>();
  d.p = p_from_json(j.at("p"));
  d.omega = j.at("omega").get<double>();
  d.delta = j.at("delta").get<double>();
  d.t_target = j.at("t_target").get<double>();
  d.n0 = j.at("n0").get<int>();
  d.nv = j.at("nv").get<int>();
  d.loops = j.at("loops").get<int>();
  const auto b = j.at("branch").get<std::string>();
  d.branch = b.empty() ? '0' : b[0];
  return d;
}

inline json report_to_json(const FidelityReport& r) {
  return json{{"raw_fidelity", r.raw_f},
              {"fstar", r.fstar},
              {"infidelity", 1.0 - r.fstar},
              {"alpha", r.alpha},
              {"beta", r.beta},
              {"global_phase", r.global_phase},
              {"leakage", r.leakage},
              {"decay_loss", r.decay_loss}};
}

inline void ensure_parent_directory(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  out << content;
  require(out.good(), "write failed: " + path);
}

inline void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open for reading: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw PreconditionError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

// CSV assembled row by row; every double renders as %.12e.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::string& header, bool units_comment = true) {
    if (units_comment) body_ += "# units: V=1\n";
    body_ += header + "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ",";
      body_ += cells[i];
    }
    body_ += "\n";
  }

  void row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double c : cells) s.push_back(format_sci(c));
    row(s);
  }

  const std::string& str() const { return body_; }

 private:
  std::string body_;
};

inline std::string scan_to_csv(
    const std::vector<std::pair<double, double>>& curve) {
  CsvBuilder csv("param_frac_error,infidelity", /*units_comment=*/false);
  for (const auto& [f, e] : curve) csv.row(std::vector<double>{f, e});
  return csv.str();
}

inline std::string log_to_csv(
    const std::vector<std::array<double, 3>>& log) {
  CsvBuilder csv("iter,objective,grad_norm", /*units_comment=*/false);
  for (const auto& e : log) {
    csv.row(std::vector<std::string>{
        std::to_string(static_cast<long>(e[0])), format_sci(e[1]),
        format_sci(e[2])});
  }
  return csv.str();
}

}  // namespace rydgate

#endif  // RYDGATE_IO_HPP_
