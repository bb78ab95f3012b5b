// Copyright 2026 The hyperpure Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hyperpure/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hyperpure {

std::string format_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("format_double: non-finite value");
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return {buf, res.ptr};
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("json: missing field '") + key + "'");
  return j.at(key);
}

void only_keys(const Json& j, std::initializer_list<const char*> keys, const char* what) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) throw std::invalid_argument(std::string(what) + ": unknown key '" + k + "'");
  }
}

}  // namespace

Json to_json(const JointDensityMatrix& rho) {
  const Matrix& m = rho.matrix();
  Json re = Json::array(), im = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json rr = Json::array(), ii = Json::array();
    for (int c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return Json{{"dim", rho.dim()}, {"re", re}, {"im", im}};
}

JointDensityMatrix density_matrix_from_json(const Json& j) {
  only_keys(j, {"dim", "re", "im"}, "density matrix");
  const int dim = field(j, "dim").get<int>();
  const int d = static_cast<int>(std::lround(std::sqrt(dim)));
  if (dim <= 0 || d * d != dim) throw std::invalid_argument("density matrix: dim must be a perfect square");
  const Json& re = field(j, "re");
  const Json& im = field(j, "im");
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != dim || static_cast<int>(im.size()) != dim)
    throw std::invalid_argument("density matrix: re/im must be dim x dim");
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    if (static_cast<int>(re[r].size()) != dim || static_cast<int>(im[r].size()) != dim)
      throw std::invalid_argument("density matrix: ragged row");
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
  }
  return {m, d, d};
}

Json to_json(const NamedCircuit& circuit) {
  Json els = Json::array();
  for (const auto& e : circuit.elements) {
    Json ports = Json::array();
    ports.push_back(e.ports[0]);
    if (e.kind != ElementKind::phase_shift) ports.push_back(e.ports[1]);
    els.push_back(Json{{"kind", to_string(e.kind)}, {"ports", ports}, {"theta", e.theta}, {"psi", e.psi}});
  }
  return Json{{"name", circuit.name}, {"elements", els}};
}

NamedCircuit circuit_from_json(const Json& j) {
  only_keys(j, {"name", "elements"}, "circuit");
  NamedCircuit c;
  c.name = field(j, "name").get<std::string>();
  for (const auto& e : field(j, "elements")) {
    only_keys(e, {"kind", "ports", "theta", "psi"}, "circuit element");
    const ElementKind kind = element_kind_from_string(field(e, "kind").get<std::string>());
    const auto ports = field(e, "ports").get<std::vector<int>>();
    const double theta = e.value("theta", 0.0);
    const double psi = e.value("psi", 0.0);
    switch (kind) {
      case ElementKind::mzi:
        if (ports.size() != 2) throw std::invalid_argument("circuit: mzi needs two ports");
        c.elements.push_back(CircuitElement::mzi(ports[0], ports[1], PhaseSetting(theta, psi)));
        break;
      case ElementKind::crossing:
        if (ports.size() != 2) throw std::invalid_argument("circuit: crossing needs two ports");
        c.elements.push_back(CircuitElement::crossing(ports[0], ports[1]));
        break;
      case ElementKind::phase_shift:
        if (ports.size() != 1) throw std::invalid_argument("circuit: phase_shift needs one port");
        c.elements.push_back(CircuitElement::phase_shift(ports[0], theta));
        break;
      case ElementKind::identity:
        c.elements.push_back(CircuitElement::identity());
        break;
    }
  }
  return c;
}

Json to_json(const ChannelMix& mix) {
  Json b = Json::array();
  for (const auto& br : mix.branches()) b.push_back(Json{{"p", br.probability}, {"kind", to_string(br.kind)}});
  return Json{{"branches", b}};
}

ChannelMix channel_mix_from_json(const Json& j) {
  only_keys(j, {"branches"}, "channel mix");
  std::vector<std::pair<double, ErrorKind>> w;
  for (const auto& b : field(j, "branches")) {
    only_keys(b, {"p", "kind"}, "channel branch");
    w.emplace_back(field(b, "p").get<double>(), error_kind_from_string(field(b, "kind").get<std::string>()));
  }
  return ChannelMix::from_kinds(w);
}

Json to_json(const ChshResult& r) {
  return Json{{"S", r.S},
              {"E_values", r.E},
              {"angles",
               {{"a", r.settings.a}, {"a_prime", r.settings.a_prime}, {"b", r.settings.b}, {"b_prime", r.settings.b_prime}}}};
}

Json to_json(const LockReport& r) {
  return Json{{"relative_power_std", r.relative_power_std},
              {"mean_power_w", r.mean_power},
              {"locked_fraction", r.locked_fraction},
              {"relock_events", r.relock_events},
              {"max_unlock_duration_s", r.max_unlock_duration},
              {"relocked_within_timeout", r.relocked_within_timeout},
              {"samples", r.samples}};
}

std::string coincidence_csv(const CoincidenceTable& table) {
  std::string out = "basis_label,count\n";
  for (int nu = 0; nu < 16; ++nu) out += table.labels[nu] + "," + std::to_string(table.counts[nu]) + "\n";
  return out;
}

CoincidenceTable parse_coincidence_csv(const std::string& text, const TomographyBasisSet& basis) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "basis_label,count")
    throw std::invalid_argument("coincidence csv: header must be 'basis_label,count'");
  CoincidenceTable t = CoincidenceTable::for_basis(basis);
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || row >= 16) throw std::invalid_argument("coincidence csv: malformed row");
    if (line.substr(0, comma) != t.labels[row])
      throw std::invalid_argument("coincidence csv: expected label " + t.labels[row]);
    const std::string count = line.substr(comma + 1);
    uint64_t v = 0;
    const auto res = std::from_chars(count.data(), count.data() + count.size(), v);
    if (res.ec != std::errc() || res.ptr != count.data() + count.size())
      throw std::invalid_argument("coincidence csv: counts must be non-negative integers");
    t.counts[row++] = v;
  }
  if (row != 16) throw std::invalid_argument("coincidence csv: need 16 rows");
  return t;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string syndrome_csv(const std::vector<SyndromeRow>& rows) {
  std::string out = "spatial,polar,probability,coincidence,post_label\n";
  for (const auto& r : rows)
    out += bell_name(r.spatial_bell, Dof::spatial) + "," + bell_name(r.polar_bell, Dof::polarization) + "," +
           format_double(r.probability) + "," + (r.coincidence ? "Yes" : "No") + "," + csv_escape(r.post_label) + "\n";
  return out;
}

std::string pll_trace_csv(const std::vector<PllSample>& trace) {
  std::string out = "t_s,drift_phase_rad,control_phase_rad,monitor_power_w,locked\n";
  for (const auto& s : trace)
    out += format_double(s.t) + "," + format_double(s.drift_phase) + "," + format_double(s.control_phase) + "," +
           format_double(s.monitor_power) + "," + (s.locked ? "1" : "0") + "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  f.close();
  if (!f) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace hyperpure
