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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "noisyprop/channels.hpp"
#include "noisyprop/clifford.hpp"
#include "noisyprop/pauli.hpp"

namespace noisyprop {

/// exp(-i (angle / 2) G) for a Pauli generator G on `support`. When
/// `uniform` is set the angle is a placeholder, drawn from [0, 2 pi) by
/// sample_circuit.
struct PauliRotation {
  std::vector<std::size_t> support;
  PauliString generator;  ///< local, one site per support entry
  double angle = 0.0;
  bool uniform = false;
};

/// Clifford unitary on one or two qubits. When `uniform` is set the gate is a
/// placeholder for a uniformly random single-qubit Clifford.
struct CliffordGate {
  std::vector<std::size_t> support;
  CliffordTable table;
  bool uniform = false;
};

using Gate = std::variant<CliffordGate, PauliRotation>;

const std::vector<std::size_t>& gate_support(const Gate& g);
bool is_placeholder(const Gate& g);

Gate make_rotation(std::string_view generator, std::vector<std::size_t> support, double angle);
Gate make_uniform_rotation(std::string_view generator, std::vector<std::size_t> support);
Gate make_clifford(std::string_view name, std::vector<std::size_t> support);
Gate make_uniform_clifford(std::size_t qubit);

/// One logical layer: gates applied moment by moment, then optional local
/// noise. Gates inside one moment have pairwise-disjoint supports.
struct Layer {
  std::vector<std::vector<Gate>> moments;
  /// Empty (noiseless) or exactly one channel per qubit.
  std::vector<NormalFormChannel> noise;

  bool has_noise() const { return !noise.empty(); }
  std::size_t gate_count() const;
};

/// Ordered noisy layers 1..L followed by an optional noiseless layer of
/// single-qubit gates.
class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::size_t num_qubits) : n_(num_qubits) {}

  std::size_t num_qubits() const { return n_; }
  std::size_t depth() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  const std::optional<Layer>& final_layer() const { return final_layer_; }

  void add_layer(Layer layer);
  void set_final_layer(Layer layer);

  bool has_placeholders() const;

 private:
  void validate(const Layer& layer, bool final) const;

  std::size_t n_ = 0;
  std::vector<Layer> layers_;
  std::optional<Layer> final_layer_;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// Qubit connectivity. Square sites are numbered row-major.
class Lattice {
 public:
  static Lattice chain(std::size_t n, bool periodic);
  static Lattice square(std::size_t rows, std::size_t cols, bool periodic);

  bool is_square() const { return square_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool periodic() const { return periodic_; }
  std::size_t num_qubits() const { return rows_ * cols_; }

  /// Each undirected neighbor pair exactly once, as (min, max).
  const std::vector<Edge>& edges() const { return edges_; }

  /// Greedy edge coloring: groups of edges with pairwise-disjoint endpoints.
  std::vector<std::vector<Edge>> edge_rounds() const;

  /// Site (rows/2, cols/2) for squares, n/2 for chains.
  std::size_t center() const;

 private:
  bool square_ = false;
  bool periodic_ = false;
  std::size_t rows_ = 1;
  std::size_t cols_ = 0;
  std::vector<Edge> edges_;
};

enum class AngleLaw { Fixed, Uniform };

/// How random elements of a circuit family are drawn.
struct EnsembleSpec {
  AngleLaw angle_law = AngleLaw::Uniform;
  double fixed_angle = 0.0;
  std::uint64_t seed = 0;
};

enum class NoisePlacement {
  EveryLayer,  ///< after each logical layer (rotation round or entangling round)
  EveryBlock,  ///< once per HVA block / Trotter step
};

/// Noise for builders: empty (noiseless), one channel for every qubit, or one
/// channel per qubit.
using NoiseSpec = std::vector<NormalFormChannel>;

/// Blocks of RX on every qubit, RZ on every qubit and RZZ on every lattice
/// edge (edges split into disjoint rounds inside one logical layer). With
/// final_rotations, a noiseless final layer of RX then RZ on every qubit.
Circuit build_hva(const Lattice& lattice, const NoiseSpec& noise, const EnsembleSpec& angles,
                  std::size_t blocks, NoisePlacement placement = NoisePlacement::EveryLayer,
                  bool final_rotations = false);

/// Second-order Trotterization of H = -J sum XX - h sum Z. Each step applies
/// RZ(-h dt), RXX(-2 J dt), RZ(-h dt) with RP(a) = exp(-i a P / 2).
Circuit build_trotter_tfim(const Lattice& lattice, double coupling, double field, double dt,
                           std::size_t steps, const NoiseSpec& noise,
                           NoisePlacement placement = NoisePlacement::EveryLayer);

/// Replaces every placeholder by an independent draw. Deterministic in seed.
Circuit sample_circuit(const Circuit& templ, std::uint64_t seed);

/// Keeps the final single-qubit layer and the last j + 1 noisy layers
/// (layers L - j .. L, clamped at 1). Throws ConfigError when j > L.
Circuit truncate_to_last_layers(const Circuit& circuit, std::size_t j);

}  // namespace noisyprop
