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
#include <vector>

#include "noisyprop/circuit.hpp"
#include "noisyprop/pauli.hpp"

namespace noisyprop {

inline constexpr std::size_t kMaxForwardQubits = 12;
inline constexpr std::size_t kMaxHeisenbergQubits = 8;

/// Dense real Pauli-basis vector of length 4^n. Index digit q, i.e.
/// (index >> 2q) & 3, is the Pauli on qubit q. A state is stored as
/// rho = sum_P c_P P / 2^n, an observable as O = sum_P c_P P.
class DensePauliVector {
 public:
  DensePauliVector(std::size_t num_qubits, std::size_t max_qubits);

  static DensePauliVector from_state(const ProductState& state);
  static DensePauliVector from_observable(const PauliSum& observable,
                                          std::size_t max_qubits = kMaxHeisenbergQubits);

  std::size_t num_qubits() const { return n_; }
  std::size_t size() const { return c_.size(); }
  double operator[](std::size_t index) const { return c_[index]; }
  double& operator[](std::size_t index) { return c_[index]; }

  PauliSum to_pauli_sum() const;
  /// sum_P a_P c_P, i.e. Tr[O rho] when *this holds a state.
  double dot(const PauliSum& observable) const;

  /// c <- M c with M a 4^k x 4^k row-major matrix on the given sites.
  void apply_local(const std::vector<std::size_t>& sites, const std::vector<double>& matrix);

 private:
  std::size_t n_;
  std::vector<double> c_;
};

/// Forward evolution of a state vector through the circuit.
DensePauliVector evolve_state(const Circuit& circuit, DensePauliVector state);

/// Tr[O C(rho)] computed densely. Throws InfeasibleSizeError for n > 12.
double simulate_exact(const Circuit& circuit, const ProductState& state, const PauliSum& observable);

/// C^dag(O) computed densely. Throws InfeasibleSizeError for n > 8.
PauliSum heisenberg_exact(const Circuit& circuit, const PauliSum& observable);

}  // namespace noisyprop
