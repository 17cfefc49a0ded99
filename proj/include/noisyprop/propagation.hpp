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
#include <vector>

#include "noisyprop/circuit.hpp"
#include "noisyprop/pauli.hpp"

namespace noisyprop {

/// Cutoffs for Heisenberg-picture propagation. Unset optionals mean no cutoff.
struct TruncationConfig {
  /// Paths with total weight |gamma| >= k are discarded (strict: kept iff < k).
  std::optional<std::size_t> path_weight_cutoff;
  /// Terms with |coeff| < coeff_cutoff are dropped after each layer.
  double coeff_cutoff = 0.0;
  /// Terms with more than this many X/Y sites are dropped after each layer.
  std::optional<std::size_t> xy_cutoff;
  /// Terms with Pauli weight above this are dropped after each layer.
  std::optional<std::size_t> current_weight_cutoff;
  /// Also apply the three cutoffs above to the branches of each term after
  /// every moment inside a layer, not only to the merged frontier.
  bool per_moment_cutoffs = false;
  /// Abort with InfeasibleSizeError once a frontier holds more terms.
  std::optional<std::size_t> max_terms;

  static TruncationConfig exact() { return {}; }
  static TruncationConfig weight(std::size_t k) {
    TruncationConfig t;
    t.path_weight_cutoff = k;
    return t;
  }
  bool is_exact() const {
    return !path_weight_cutoff && coeff_cutoff == 0.0 && !xy_cutoff && !current_weight_cutoff;
  }
};

/// Path counters saturate at UINT64_MAX.
struct PropagationStats {
  std::uint64_t paths_discarded_by_weight = 0;
  std::uint64_t paths_discarded_by_coeff = 0;
  std::uint64_t paths_discarded_by_xy = 0;
  std::uint64_t paths_discarded_by_current_weight = 0;
  std::size_t peak_term_count = 0;
  /// Number of distinct layer-boundary sequences (P_0, ..., P_L) retained.
  std::uint64_t surviving_path_count = 0;
};

struct BackpropResult {
  PauliSum terms;
  PropagationStats stats;
};

/// Truncated adjoint evolution C_k^dag(O). Terms are keyed by (Pauli,
/// accumulated path weight) until the last layer, so the weight cutoff acts
/// on each path exactly. `threads` only affects speed, never the result.
BackpropResult backpropagate(const Circuit& circuit, const PauliSum& observable,
                             const TruncationConfig& trunc, std::size_t threads = 1);

double expectation(const BackpropResult& result, const ProductState& state);

/// Number of legal paths with |gamma| < k (k unset: all legal paths).
std::uint64_t count_legal_paths(const Circuit& circuit, const PauliSum& observable,
                                std::optional<std::size_t> k);

struct PauliPath {
  /// Layer-boundary Paulis P_0 ... P_L.
  std::vector<PauliString> paulis;
  /// Weight accumulated during enumeration.
  std::size_t weight = 0;
  double amplitude = 0.0;
};

/// Depth-first enumeration of the legal paths counted by count_legal_paths,
/// stopping after `limit` paths.
std::vector<PauliPath> enumerate_paths(const Circuit& circuit, const PauliSum& observable,
                                       std::optional<std::size_t> k, std::size_t limit);

struct DepthComparison {
  double full = 0.0;
  double truncated = 0.0;
  double gap = 0.0;
};

/// Compares Tr[O C(rho)] with Tr[O C_[L, L-j](sigma)].
DepthComparison effective_depth_compare(const Circuit& circuit, const PauliSum& observable,
                                        const ProductState& rho, const ProductState& sigma,
                                        std::size_t j, const TruncationConfig& trunc);

}  // namespace noisyprop
