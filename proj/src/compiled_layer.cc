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

#include "compiled_layer.hpp"

#include <cmath>

namespace noisyprop::detail {

std::pair<double, double> rotation_cos_sin(double angle) {
  constexpr double kSnap = 1e-14;
  double c = std::cos(angle);
  double s = std::sin(angle);
  if (std::abs(c) < kSnap) {
    c = 0.0;
    s = s > 0 ? 1.0 : -1.0;
  } else if (std::abs(s) < kSnap) {
    s = 0.0;
    c = c > 0 ? 1.0 : -1.0;
  }
  return {c, s};
}

CompiledLayer compile_layer(const Layer& layer, std::size_t num_qubits) {
  CompiledLayer out;
  for (const auto& moment : layer.moments) {
    auto& cm = out.moments.emplace_back();
    for (const auto& gate : moment) {
      if (const auto* r = std::get_if<PauliRotation>(&gate)) {
        CompiledRotation cr;
        cr.generator = PauliString(num_qubits);
        for (std::size_t i = 0; i < r->support.size(); ++i) {
          cr.generator.set(r->support[i], r->generator.get(i));
        }
        cr.uniform = r->uniform;
        if (!r->uniform) std::tie(cr.cos, cr.sin) = rotation_cos_sin(r->angle);
        cr.support = r->support;
        cm.emplace_back(std::move(cr));
      } else {
        const auto& c = std::get<CliffordGate>(gate);
        cm.emplace_back(CompiledClifford{c.support, &c.table, c.uniform});
      }
    }
  }
  if (layer.has_noise()) {
    out.noise.resize(num_qubits, nullptr);
    for (std::size_t q = 0; q < num_qubits; ++q) {
      if (!layer.noise[q].is_identity()) {
        out.noise[q] = &layer.noise[q];
        out.noisy = true;
      }
    }
  }
  return out;
}

double apply_clifford_adjoint(const CompiledClifford& gate, PauliString& p) {
  std::size_t local = 0;
  for (std::size_t i = 0; i < gate.support.size(); ++i) {
    local |= static_cast<std::size_t>(p.get(gate.support[i])) << (2 * i);
  }
  const SignedLocalPauli image = gate.table->adjoint(local);
  for (std::size_t i = 0; i < gate.support.size(); ++i) {
    p.set(gate.support[i], local_digit(image.index, i));
  }
  return image.sign;
}

double fold_rotation_branch(const PauliString& generator, PauliString& p) {
  const int m = p.left_multiply(generator);
  // m is odd for anticommuting factors, so i^(m+1) is +1 or -1.
  return ((m + 1) & 3) == 0 ? 1.0 : -1.0;
}

}  // namespace noisyprop::detail
