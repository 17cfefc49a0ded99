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

// Circuit layers flattened into the form the propagation and sampling loops
// consume. Pointers refer into the Circuit, which must outlive these objects.

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "noisyprop/circuit.hpp"

namespace noisyprop::detail {

/// cos/sin with angles at multiples of pi/2 snapped to exact 0 and +-1.
std::pair<double, double> rotation_cos_sin(double angle);

struct CompiledRotation {
  PauliString generator;  // full n-qubit string
  double cos = 1.0;
  double sin = 0.0;
  bool uniform = false;
  std::vector<std::size_t> support;
};

struct CompiledClifford {
  std::vector<std::size_t> support;
  const CliffordTable* table = nullptr;
  bool uniform = false;
};

using CompiledGate = std::variant<CompiledClifford, CompiledRotation>;

struct CompiledLayer {
  std::vector<std::vector<CompiledGate>> moments;
  /// One entry per qubit; nullptr where the channel is the identity.
  std::vector<const NormalFormChannel*> noise;
  bool noisy = false;
};

CompiledLayer compile_layer(const Layer& layer, std::size_t num_qubits);

/// Applies U^dag P U for a Clifford in place; returns the sign.
double apply_clifford_adjoint(const CompiledClifford& gate, PauliString& p);

/// G * P = i^m R for anticommuting G, P. Replaces p by R and returns the
/// real sign s with i G P = s R.
double fold_rotation_branch(const PauliString& generator, PauliString& p);

/// Calls f(q) for every non-identity site of p in increasing order.
template <class F>
void for_each_support_site(const PauliString& p, F&& f) {
  const auto xs = p.x_words();
  const auto zs = p.z_words();
  for (std::size_t w = 0; w < xs.size(); ++w) {
    auto bits = xs[w] | zs[w];
    while (bits != 0) {
      const int b = __builtin_ctzll(bits);
      f(w * PauliString::kWordBits + static_cast<std::size_t>(b));
      bits &= bits - 1;
    }
  }
}

}  // namespace noisyprop::detail
