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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "noisyprop/channels.hpp"

namespace noisyprop {

/// Local Pauli on a gate support of k sites: base-4 index with the Pauli of
/// local site i in digits (idx >> 2i) & 3.
struct SignedLocalPauli {
  std::uint8_t index = 0;
  std::int8_t sign = 1;
};

inline Pauli local_digit(std::size_t index, std::size_t site) {
  return static_cast<Pauli>((index >> (2 * site)) & 3U);
}

/// Conjugation table of a Clifford unitary on one or two qubits.
class CliffordTable {
 public:
  /// Builds both tables by dense conjugation. Throws ConfigError if the
  /// unitary does not map every Pauli to a signed Pauli. In the dense matrix,
  /// local site 0 is the leftmost tensor factor.
  static CliffordTable from_unitary(std::string name, const Eigen::MatrixXcd& u);

  /// I, X, Y, Z, H, S, SDG, SX, SXDG (one qubit); CNOT/CX, CZ, SWAP (two);
  /// C0 .. C23 for the elements of single_qubit_cliffords().
  static CliffordTable named(std::string_view name);

  const std::string& name() const { return name_; }
  std::size_t num_sites() const { return sites_; }

  /// U^dag P U.
  SignedLocalPauli adjoint(std::size_t local) const { return adjoint_[local]; }
  /// U P U^dag.
  SignedLocalPauli forward(std::size_t local) const { return forward_[local]; }

  /// Forward PTM; only valid for single-qubit tables.
  SingleQubitPtm ptm() const;

 private:
  std::string name_;
  std::size_t sites_ = 1;
  std::vector<SignedLocalPauli> adjoint_;
  std::vector<SignedLocalPauli> forward_;
};

/// The 24 single-qubit Cliffords (modulo phase), generated from H and S.
const std::vector<CliffordTable>& single_qubit_cliffords();

/// Dense matrix of a local Pauli on k sites, site 0 leftmost.
Eigen::MatrixXcd local_pauli_matrix(std::size_t index, std::size_t sites);

}  // namespace noisyprop
