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

#ifndef HYPERPURE_IO_HPP
#define HYPERPURE_IO_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyperpure/analysis.hpp"
#include "hyperpure/circuit.hpp"
#include "hyperpure/noise.hpp"
#include "hyperpure/pll.hpp"
#include "hyperpure/purify.hpp"
#include "hyperpure/qstate.hpp"

namespace hyperpure {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form; identical bytes on every run.
std::string format_double(double x);

// {dim, re: [[...]], im: [[...]]}; photon dimensions are sqrt(dim) each.
Json to_json(const JointDensityMatrix& rho);
JointDensityMatrix density_matrix_from_json(const Json& j);

// {name, elements: [{kind, ports, theta, psi}]}
Json to_json(const NamedCircuit& circuit);
NamedCircuit circuit_from_json(const Json& j);

// {branches: [{p, kind}]}
Json to_json(const ChannelMix& mix);
ChannelMix channel_mix_from_json(const Json& j);

// {S, E_values, angles: {a, a_prime, b, b_prime}}
Json to_json(const ChshResult& r);
Json to_json(const LockReport& r);

/// Quotes a CSV cell only when it holds a comma, quote or newline.
std::string csv_escape(const std::string& s);

/// basis_label,count with one row per projector.
std::string coincidence_csv(const CoincidenceTable& table);
CoincidenceTable parse_coincidence_csv(const std::string& text,
                                       const TomographyBasisSet& basis = TomographyBasisSet::standard());

/// spatial,polar,probability,coincidence,post_label
std::string syndrome_csv(const std::vector<SyndromeRow>& rows);

std::string pll_trace_csv(const std::vector<PllSample>& trace);

/// Writes atomically enough for reports: throws IoError on any failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace hyperpure

#endif  // HYPERPURE_IO_HPP
