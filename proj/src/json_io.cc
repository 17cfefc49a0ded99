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

#include "noisyprop/json_io.hpp"

#include <cmath>
#include <string>

#include "noisyprop/errors.hpp"

namespace noisyprop {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

std::size_t count(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) bad(std::string(what) + " must be a non-negative integer");
  return j.get<std::size_t>();
}

std::optional<std::size_t> optional_count(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return count(j.at(key), key);
}

Vec3 vec3(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) bad(std::string(what) + " must be an array of 3 numbers");
  return {number(j[0], what), number(j[1], what), number(j[2], what)};
}

SingleQubitPtm ptm_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) bad("rotation PTM must be a 4x4 array");
  Matrix4 m{};
  for (int r = 0; r < 4; ++r) {
    if (!j[r].is_array() || j[r].size() != 4) bad("rotation PTM must be a 4x4 array");
    for (int c = 0; c < 4; ++c) m[r][c] = number(j[r][c], "PTM entry");
  }
  return SingleQubitPtm(m, true);
}

Json ptm_to_json(const SingleQubitPtm& p) {
  Json out = Json::array();
  for (const auto& row : p.matrix()) out.push_back(row);
  return out;
}

std::vector<std::size_t> support_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) bad("gate support must be a non-empty array");
  std::vector<std::size_t> out;
  for (const auto& q : j) out.push_back(count(q, "qubit index"));
  return out;
}

std::vector<Gate> gates_from_json(const Json& j) {
  if (!j.is_array()) bad("gate list must be an array");
  std::vector<Gate> out;
  for (const auto& g : j) out.push_back(gate_from_json(g));
  return out;
}

std::vector<std::vector<Gate>> pack_moments(const std::vector<Gate>& gates, std::size_t n) {
  std::vector<std::vector<Gate>> moments;
  std::vector<std::size_t> next_free(n, 0);
  for (const Gate& g : gates) {
    std::size_t slot = 0;
    for (std::size_t q : gate_support(g)) {
      if (q >= n) bad("gate acts on qubit " + std::to_string(q) + " of a " + std::to_string(n) + "-qubit circuit");
      slot = std::max(slot, next_free[q]);
    }
    if (slot == moments.size()) moments.emplace_back();
    moments[slot].push_back(g);
    for (std::size_t q : gate_support(g)) next_free[q] = slot + 1;
  }
  return moments;
}

Layer layer_from_json(const Json& j, std::size_t n, bool final) {
  Layer layer;
  if (j.is_array()) {
    layer.moments = pack_moments(gates_from_json(j), n);
  } else if (j.is_object()) {
    if (j.contains("moments")) {
      for (const auto& m : j.at("moments")) layer.moments.push_back(gates_from_json(m));
    } else if (j.contains("gates")) {
      layer.moments = pack_moments(gates_from_json(j.at("gates")), n);
    }
    if (j.contains("noise") && !j.at("noise").is_null()) {
      if (final) bad("final layer cannot carry noise");
      const Json& noise = j.at("noise");
      if (noise.is_array()) {
        if (noise.size() != n) bad("per-qubit noise list must have one entry per qubit");
        for (const auto& c : noise) layer.noise.push_back(channel_from_json(c));
      } else {
        layer.noise.assign(n, channel_from_json(noise));
      }
    }
  } else {
    bad("layer must be an object or a gate list");
  }
  return layer;
}

Json layer_to_json(const Layer& layer, bool final) {
  Json moments = Json::array();
  for (const auto& m : layer.moments) {
    Json gates = Json::array();
    for (const auto& g : m) gates.push_back(to_json(g));
    moments.push_back(std::move(gates));
  }
  Json out;
  out["moments"] = std::move(moments);
  if (final) return out;
  if (!layer.has_noise()) {
    out["noise"] = nullptr;
    return out;
  }
  const bool uniform = std::all_of(layer.noise.begin(), layer.noise.end(), [&](const NormalFormChannel& c) {
    return to_json(c) == to_json(layer.noise.front());
  });
  if (uniform) {
    out["noise"] = to_json(layer.noise.front());
  } else {
    Json list = Json::array();
    for (const auto& c : layer.noise) list.push_back(to_json(c));
    out["noise"] = std::move(list);
  }
  return out;
}

}  // namespace

PauliSum pauli_sum_from_json(const Json& j) {
  if (j.is_string()) {
    const PauliString p = PauliString::from_string(j.get<std::string>());
    return PauliSum::from_pauli(p);
  }
  if (!j.is_array() || j.empty()) bad("observable must be a Pauli string or a non-empty list of terms");
  std::optional<PauliSum> out;
  for (const auto& term : j) {
    const PauliString p = PauliString::from_string(require(term, "pauli").get<std::string>());
    const double c = number(require(term, "coeff"), "coeff");
    if (!out) out = PauliSum(p.num_qubits());
    if (p.num_qubits() != out->num_qubits()) bad("observable terms have different lengths");
    out->add(p, c);
  }
  if (out->empty()) bad("observable has only zero coefficients");
  return *out;
}

Json to_json(const PauliSum& sum) {
  Json out = Json::array();
  for (const auto& [p, c] : sum.sorted_terms()) out.push_back({{"pauli", p.str()}, {"coeff", c}});
  return out;
}

NormalFormChannel channel_from_json(const Json& j) {
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "custom") {
    std::optional<SingleQubitPtm> pre;
    std::optional<SingleQubitPtm> post;
    if (j.contains("pre") && !j.at("pre").is_null()) pre = ptm_from_json(j.at("pre"));
    if (j.contains("post") && !j.at("post").is_null()) post = ptm_from_json(j.at("post"));
    return NormalFormChannel::make(vec3(require(j, "D"), "D"), vec3(require(j, "t"), "t"), pre, post);
  }
  const double param = number(require(j, "param"), "param");
  if (kind == "amplitude_damping") return make_amplitude_damping(param);
  if (kind == "dephasing") return make_dephasing(param);
  if (kind == "depolarizing") return make_depolarizing(param);
  bad("unknown channel kind '" + kind + "'");
}

Json to_json(const NormalFormChannel& channel) {
  if (channel.kind() != "custom") return {{"kind", channel.kind()}, {"param", channel.param()}};
  Json out{{"kind", "custom"}, {"D", channel.damping()}, {"t", channel.shift()}};
  if (!channel.pre_rotation().is_identity()) out["pre"] = ptm_to_json(channel.pre_rotation());
  if (!channel.post_rotation().is_identity()) out["post"] = ptm_to_json(channel.post_rotation());
  return out;
}

Gate gate_from_json(const Json& j) {
  const std::string type = require(j, "type").get<std::string>();
  auto support = support_from_json(require(j, "support"));
  if (type == "rot") {
    const std::string gen = require(j, "generator").get<std::string>();
    const Json& angle = require(j, "angle");
    if (angle.is_string()) {
      if (angle.get<std::string>() != "uniform") bad("rotation angle must be a number or \"uniform\"");
      return make_uniform_rotation(gen, std::move(support));
    }
    return make_rotation(gen, std::move(support), number(angle, "angle"));
  }
  if (type == "clifford") {
    const std::string name = require(j, "name").get<std::string>();
    if (name == "uniform") {
      if (support.size() != 1) bad("uniform Clifford acts on one qubit");
      return make_uniform_clifford(support[0]);
    }
    return make_clifford(name, std::move(support));
  }
  bad("unknown gate type '" + type + "'");
}

Json to_json(const Gate& gate) {
  if (const auto* r = std::get_if<PauliRotation>(&gate)) {
    Json out{{"type", "rot"}, {"generator", r->generator.str()}, {"support", r->support}};
    if (r->uniform) {
      out["angle"] = "uniform";
    } else {
      out["angle"] = r->angle;
    }
    return out;
  }
  const auto& c = std::get<CliffordGate>(gate);
  return {{"type", "clifford"}, {"name", c.uniform ? std::string("uniform") : c.table.name()}, {"support", c.support}};
}

Circuit circuit_from_json(const Json& j) {
  const std::size_t n = count(require(j, "n"), "n");
  if (n == 0) bad("circuit needs at least one qubit");
  Circuit c(n);
  if (j.contains("layers")) {
    if (!j.at("layers").is_array()) bad("layers must be an array");
    for (const auto& l : j.at("layers")) c.add_layer(layer_from_json(l, n, false));
  }
  if (j.contains("final_layer") && !j.at("final_layer").is_null()) {
    c.set_final_layer(layer_from_json(j.at("final_layer"), n, true));
  }
  return c;
}

Json to_json(const Circuit& circuit) {
  Json layers = Json::array();
  for (const auto& l : circuit.layers()) layers.push_back(layer_to_json(l, false));
  Json out{{"n", circuit.num_qubits()}, {"layers", std::move(layers)}};
  out["final_layer"] = circuit.final_layer() ? layer_to_json(*circuit.final_layer(), true) : Json(nullptr);
  return out;
}

ProductState state_from_json(const Json& j, std::size_t num_qubits) {
  if (j.is_string()) {
    if (j.get<std::string>() != "zeros") bad("unknown named state '" + j.get<std::string>() + "'");
    return ProductState::zeros(num_qubits);
  }
  const Json& bloch = require(j, "bloch");
  if (!bloch.is_array() || bloch.size() != num_qubits) {
    bad("state needs one Bloch vector per qubit (" + std::to_string(num_qubits) + ")");
  }
  std::vector<BlochVector> sites;
  for (const auto& b : bloch) sites.push_back(vec3(b, "Bloch vector"));
  return ProductState(std::move(sites));
}

Json to_json(const ProductState& state) {
  Json bloch = Json::array();
  for (std::size_t q = 0; q < state.num_qubits(); ++q) bloch.push_back(state.bloch(q));
  return {{"bloch", std::move(bloch)}};
}

TruncationConfig truncation_from_json(const Json& j) {
  if (j.is_null()) return {};
  if (!j.is_object()) bad("truncation must be an object");
  TruncationConfig t;
  t.path_weight_cutoff = optional_count(j, "k");
  if (t.path_weight_cutoff && *t.path_weight_cutoff == 0) bad("k must be positive");
  if (j.contains("coeff_cutoff") && !j.at("coeff_cutoff").is_null()) {
    t.coeff_cutoff = number(j.at("coeff_cutoff"), "coeff_cutoff");
    if (t.coeff_cutoff < 0) bad("coeff_cutoff must be non-negative");
  }
  t.xy_cutoff = optional_count(j, "xy_cutoff");
  t.current_weight_cutoff = optional_count(j, "current_weight_cutoff");
  if (j.contains("per_moment")) {
    if (!j.at("per_moment").is_boolean()) bad("per_moment must be a boolean");
    t.per_moment_cutoffs = j.at("per_moment").get<bool>();
  }
  t.max_terms = optional_count(j, "max_terms");
  return t;
}

Json to_json(const TruncationConfig& t) {
  auto opt = [](const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); };
  return {{"k", opt(t.path_weight_cutoff)},
          {"coeff_cutoff", t.coeff_cutoff},
          {"xy_cutoff", opt(t.xy_cutoff)},
          {"current_weight_cutoff", opt(t.current_weight_cutoff)},
          {"per_moment", t.per_moment_cutoffs},
          {"max_terms", opt(t.max_terms)}};
}

Json to_json(const PropagationStats& s) {
  return {{"paths_discarded_by_weight", s.paths_discarded_by_weight},
          {"paths_discarded_by_coeff", s.paths_discarded_by_coeff},
          {"paths_discarded_by_xy", s.paths_discarded_by_xy},
          {"paths_discarded_by_current_weight", s.paths_discarded_by_current_weight},
          {"peak_term_count", s.peak_term_count},
          {"surviving_path_count", s.surviving_path_count}};
}

Json to_json(const EstimateResult& r) {
  return {{"mean", r.mean},
          {"stderr", r.standard_error},
          {"samples", r.samples},
          {"seed", r.seed},
          {"orthogonal_paths", r.orthogonal_paths}};
}

Design design_from_json(const Json& j) {
  if (j.is_null()) return WorstCase{};
  const std::string kind = j.is_string() ? j.get<std::string>() : require(j, "kind").get<std::string>();
  if (kind == "worst_case") return WorstCase{};
  if (kind == "two_design") return TwoDesign{};
  if (kind == "scrambler") {
    Scrambler s;
    if (j.is_object() && j.contains("eta")) s.eta = number(j.at("eta"), "eta");
    if (s.eta < 0.0 || s.eta >= 1.0) bad("scrambler eta must lie in [0, 1)");
    return s;
  }
  bad("unknown design '" + kind + "'");
}

}  // namespace noisyprop
