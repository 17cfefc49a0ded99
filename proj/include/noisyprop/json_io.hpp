// Copyright 2026 The noisyprop Authors
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

#pragma once

#include <optional>

#include "json.hpp"

#include "noisyprop/channels.hpp"
#include "noisyprop/circuit.hpp"
#include "noisyprop/montecarlo.hpp"
#include "noisyprop/pauli.hpp"
#include "noisyprop/propagation.hpp"

namespace noisyprop {

using Json = nlohmann::ordered_json;

// Parsers throw ConfigError on schema violations.

/// [{"pauli": "XIZ", "coeff": 0.5}, ...] or a bare Pauli string "XIZ".
PauliSum pauli_sum_from_json(const Json& j);
Json to_json(const PauliSum& sum);

/// {"kind": "amplitude_damping" | "dephasing" | "depolarizing", "param": x}
/// or {"kind": "custom", "D": [..], "t": [..], "pre": 4x4, "post": 4x4}.
NormalFormChannel channel_from_json(const Json& j);
Json to_json(const NormalFormChannel& channel);

/// {"type": "rot", "generator": "XX", "support": [0, 1], "angle": 0.24 | "uniform"}
/// or {"type": "clifford", "name": "H" | "uniform", "support": [2]}.
Gate gate_from_json(const Json& j);
Json to_json(const Gate& gate);

/// {"n": 3, "layers": [{"gates": [...] | "moments": [[...], ...], "noise": channel |
/// [channel per qubit] | null}], "final_layer": [...]}. A flat "gates" list
/// is packed into moments in order, each gate going to the earliest moment
/// after the last one touching its qubits.
Circuit circuit_from_json(const Json& j);
Json to_json(const Circuit& circuit);

/// "zeros" or {"bloch": [[x, y, z], ...]}. num_qubits is needed for "zeros".
ProductState state_from_json(const Json& j, std::size_t num_qubits);
Json to_json(const ProductState& state);

/// {"k": 30 | null, "coeff_cutoff": 0, "xy_cutoff": null,
///  "current_weight_cutoff": null, "per_moment": false, "max_terms": null}
TruncationConfig truncation_from_json(const Json& j);
Json to_json(const TruncationConfig& trunc);

Json to_json(const PropagationStats& stats);
Json to_json(const EstimateResult& result);

/// {"kind": "worst_case" | "two_design" | "scrambler", "eta": 0.25}
Design design_from_json(const Json& j);

}  // namespace noisyprop
