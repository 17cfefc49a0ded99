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

#include "noisyprop/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "noisyprop/errors.hpp"
#include "noisyprop/rng.hpp"

namespace noisyprop {

const std::vector<std::size_t>& gate_support(const Gate& g) {
  return std::visit([](const auto& gate) -> const std::vector<std::size_t>& { return gate.support; },
                    g);
}

bool is_placeholder(const Gate& g) {
  return std::visit([](const auto& gate) { return gate.uniform; }, g);
}

namespace {

PauliRotation rotation(std::string_view generator, std::vector<std::size_t> support) {
  PauliRotation r;
  r.generator = PauliString::from_string(generator);
  if (r.generator.num_qubits() != support.size()) {
    throw ConfigError("rotation generator '" + std::string(generator) + "' does not match support size");
  }
  if (r.generator.is_identity()) throw ConfigError("rotation generator must be non-identity");
  r.support = std::move(support);
  return r;
}

}  // namespace

Gate make_rotation(std::string_view generator, std::vector<std::size_t> support, double angle) {
  if (!std::isfinite(angle)) throw ConfigError("rotation angle must be finite");
  PauliRotation r = rotation(generator, std::move(support));
  r.angle = angle;
  return r;
}

Gate make_uniform_rotation(std::string_view generator, std::vector<std::size_t> support) {
  PauliRotation r = rotation(generator, std::move(support));
  r.uniform = true;
  return r;
}

Gate make_clifford(std::string_view name, std::vector<std::size_t> support) {
  CliffordGate c{std::move(support), CliffordTable::named(name), false};
  if (c.table.num_sites() != c.support.size()) {
    throw ConfigError("Clifford '" + std::string(name) + "' acts on " +
                      std::to_string(c.table.num_sites()) + " qubit(s), support has " +
                      std::to_string(c.support.size()));
  }
  return c;
}

Gate make_uniform_clifford(std::size_t qubit) {
  return CliffordGate{{qubit}, CliffordTable::named("I"), true};
}

std::size_t Layer::gate_count() const {
  std::size_t total = 0;
  for (const auto& m : moments) total += m.size();
  return total;
}

void Circuit::validate(const Layer& layer, bool final) const {
  for (const auto& moment : layer.moments) {
    std::vector<bool> used(n_, false);
    for (const auto& gate : moment) {
      const auto& support = gate_support(gate);
      if (support.empty()) throw ConfigError("gate with empty support");
      if (final && support.size() != 1) {
        throw ConfigError("final layer may only contain single-qubit gates");
      }
      for (std::size_t q : support) {
        if (q >= n_) {
          throw ConfigError("gate acts on qubit " + std::to_string(q) + " of a " +
                            std::to_string(n_) + "-qubit circuit");
        }
        if (used[q]) throw ConfigError("overlapping gate supports within one moment");
        used[q] = true;
      }
    }
  }
  if (final && layer.has_noise()) throw ConfigError("final layer must be noiseless");
  if (layer.has_noise() && layer.noise.size() != n_) {
    throw ConfigError("layer noise must list one channel per qubit");
  }
}

void Circuit::add_layer(Layer layer) {
  validate(layer, false);
  layers_.push_back(std::move(layer));
}

void Circuit::set_final_layer(Layer layer) {
  validate(layer, true);
  final_layer_ = std::move(layer);
}

bool Circuit::has_placeholders() const {
  auto layer_has = [](const Layer& layer) {
    for (const auto& m : layer.moments) {
      for (const auto& g : m) {
        if (is_placeholder(g)) return true;
      }
    }
    return false;
  };
  if (final_layer_ && layer_has(*final_layer_)) return true;
  return std::any_of(layers_.begin(), layers_.end(), layer_has);
}

namespace {

void add_edge(std::vector<Edge>& edges, std::set<Edge>& seen, std::size_t a, std::size_t b) {
  if (a == b) return;
  Edge e{std::min(a, b), std::max(a, b)};
  if (seen.insert(e).second) edges.push_back(e);
}

}  // namespace

Lattice Lattice::chain(std::size_t n, bool periodic) {
  if (n == 0) throw ConfigError("chain needs at least one qubit");
  Lattice l;
  l.periodic_ = periodic;
  l.rows_ = 1;
  l.cols_ = n;
  std::set<Edge> seen;
  for (std::size_t i = 0; i + 1 < n; ++i) add_edge(l.edges_, seen, i, i + 1);
  if (periodic && n > 2) add_edge(l.edges_, seen, n - 1, 0);
  return l;
}

Lattice Lattice::square(std::size_t rows, std::size_t cols, bool periodic) {
  if (rows == 0 || cols == 0) throw ConfigError("square lattice needs positive rows and cols");
  Lattice l;
  l.square_ = true;
  l.periodic_ = periodic;
  l.rows_ = rows;
  l.cols_ = cols;
  std::set<Edge> seen;
  auto site = [cols](std::size_t r, std::size_t c) { return r * cols + c; };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c + 1 < cols; ++c) add_edge(l.edges_, seen, site(r, c), site(r, c + 1));
    if (periodic && cols > 2) add_edge(l.edges_, seen, site(r, cols - 1), site(r, 0));
  }
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r + 1 < rows; ++r) add_edge(l.edges_, seen, site(r, c), site(r + 1, c));
    if (periodic && rows > 2) add_edge(l.edges_, seen, site(rows - 1, c), site(0, c));
  }
  return l;
}

std::vector<std::vector<Edge>> Lattice::edge_rounds() const {
  std::vector<std::vector<Edge>> rounds;
  std::vector<std::vector<bool>> busy;
  for (const Edge& e : edges_) {
    std::size_t r = 0;
    while (r < rounds.size() && (busy[r][e.first] || busy[r][e.second])) ++r;
    if (r == rounds.size()) {
      rounds.emplace_back();
      busy.emplace_back(num_qubits(), false);
    }
    rounds[r].push_back(e);
    busy[r][e.first] = busy[r][e.second] = true;
  }
  return rounds;
}

std::size_t Lattice::center() const {
  if (square_) return (rows_ / 2) * cols_ + cols_ / 2;
  return cols_ / 2;
}

namespace {

std::vector<NormalFormChannel> expand_noise(const NoiseSpec& noise, std::size_t n) {
  if (noise.empty()) return {};
  if (noise.size() == 1) return std::vector<NormalFormChannel>(n, noise.front());
  if (noise.size() != n) {
    throw ConfigError("noise must give one channel or one per qubit (" + std::to_string(n) + ")");
  }
  return noise;
}

Gate rotation_gate(std::string_view generator, std::vector<std::size_t> support,
                   const EnsembleSpec& angles) {
  if (angles.angle_law == AngleLaw::Uniform) return make_uniform_rotation(generator, std::move(support));
  return make_rotation(generator, std::move(support), angles.fixed_angle);
}

std::vector<Gate> single_qubit_round(std::string_view generator, std::size_t n,
                                     const EnsembleSpec& angles) {
  std::vector<Gate> moment;
  for (std::size_t q = 0; q < n; ++q) moment.push_back(rotation_gate(generator, {q}, angles));
  return moment;
}

// Appends moments as layers, one noise round each (EveryLayer), or as one
// layer with a single trailing noise round (EveryBlock).
void append_block(Circuit& c, std::vector<std::vector<std::vector<Gate>>> logical_layers,
                  const std::vector<NormalFormChannel>& noise, NoisePlacement placement) {
  if (placement == NoisePlacement::EveryLayer) {
    for (auto& moments : logical_layers) c.add_layer(Layer{std::move(moments), noise});
    return;
  }
  Layer block;
  block.noise = noise;
  for (auto& moments : logical_layers) {
    for (auto& m : moments) block.moments.push_back(std::move(m));
  }
  c.add_layer(std::move(block));
}

}  // namespace

Circuit build_hva(const Lattice& lattice, const NoiseSpec& noise, const EnsembleSpec& angles,
                  std::size_t blocks, NoisePlacement placement, bool final_rotations) {
  const std::size_t n = lattice.num_qubits();
  const auto channels = expand_noise(noise, n);
  const auto rounds = lattice.edge_rounds();
  Circuit c(n);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<std::vector<Gate>> zz;
    for (const auto& round : rounds) {
      std::vector<Gate> moment;
      for (const Edge& e : round) moment.push_back(rotation_gate("ZZ", {e.first, e.second}, angles));
      zz.push_back(std::move(moment));
    }
    std::vector<std::vector<std::vector<Gate>>> logical;
    logical.push_back({single_qubit_round("X", n, angles)});
    logical.push_back({single_qubit_round("Z", n, angles)});
    if (!zz.empty()) logical.push_back(std::move(zz));
    append_block(c, std::move(logical), channels, placement);
  }
  if (final_rotations) {
    c.set_final_layer(Layer{{single_qubit_round("X", n, angles), single_qubit_round("Z", n, angles)}, {}});
  }
  return c;
}

Circuit build_trotter_tfim(const Lattice& lattice, double coupling, double field, double dt,
                           std::size_t steps, const NoiseSpec& noise, NoisePlacement placement) {
  if (!std::isfinite(coupling) || !std::isfinite(field) || !std::isfinite(dt)) {
    throw ConfigError("Trotter parameters must be finite");
  }
  const std::size_t n = lattice.num_qubits();
  const auto channels = expand_noise(noise, n);
  const auto rounds = lattice.edge_rounds();
  EnsembleSpec half_z{AngleLaw::Fixed, -field * dt, 0};
  EnsembleSpec xx{AngleLaw::Fixed, -2.0 * coupling * dt, 0};
  Circuit c(n);
  for (std::size_t s = 0; s < steps; ++s) {
    std::vector<std::vector<Gate>> coupling_round;
    for (const auto& round : rounds) {
      std::vector<Gate> moment;
      for (const Edge& e : round) moment.push_back(rotation_gate("XX", {e.first, e.second}, xx));
      coupling_round.push_back(std::move(moment));
    }
    std::vector<std::vector<std::vector<Gate>>> logical;
    logical.push_back({single_qubit_round("Z", n, half_z)});
    if (!coupling_round.empty()) logical.push_back(std::move(coupling_round));
    logical.push_back({single_qubit_round("Z", n, half_z)});
    append_block(c, std::move(logical), channels, placement);
  }
  return c;
}

namespace {

void sample_layer(Layer& layer, SplitMix64& rng) {
  for (auto& moment : layer.moments) {
    for (auto& gate : moment) {
      if (auto* r = std::get_if<PauliRotation>(&gate); r && r->uniform) {
        r->angle = 2.0 * std::numbers::pi * rng.uniform();
        r->uniform = false;
      } else if (auto* cg = std::get_if<CliffordGate>(&gate); cg && cg->uniform) {
        const auto& group = single_qubit_cliffords();
        cg->table = group[rng.below(group.size())];
        cg->uniform = false;
      }
    }
  }
}

}  // namespace

Circuit sample_circuit(const Circuit& templ, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Circuit out(templ.num_qubits());
  for (Layer layer : templ.layers()) {
    sample_layer(layer, rng);
    out.add_layer(std::move(layer));
  }
  if (templ.final_layer()) {
    Layer fin = *templ.final_layer();
    sample_layer(fin, rng);
    out.set_final_layer(std::move(fin));
  }
  return out;
}

Circuit truncate_to_last_layers(const Circuit& circuit, std::size_t j) {
  const std::size_t depth = circuit.depth();
  if (j > depth) {
    throw ConfigError("cannot keep the last " + std::to_string(j) + " + 1 layers of a depth-" +
                      std::to_string(depth) + " circuit");
  }
  Circuit out(circuit.num_qubits());
  const std::size_t first = depth > j + 1 ? depth - j - 1 : 0;
  for (std::size_t i = first; i < depth; ++i) out.add_layer(circuit.layers()[i]);
  if (circuit.final_layer()) out.set_final_layer(*circuit.final_layer());
  return out;
}

}  // namespace noisyprop
