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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace noisyprop {

/// Single-site Pauli label. The numeric value doubles as the row/column index
/// into 4x4 Pauli transfer matrices (basis order I, X, Y, Z).
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

/// An n-qubit Pauli operator without phase, stored as packed x/z bit planes.
///
/// Site encoding: I=(0,0), X=(1,0), Y=(1,1), Z=(0,1). Qubit q lives in word
/// q / 64, bit q % 64. The weight is cached and kept in sync by every mutator.
class PauliString {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  PauliString() = default;
  explicit PauliString(std::size_t num_qubits);

  /// Parses "XIZ" style text; the leftmost character is qubit 0.
  static PauliString from_string(std::string_view text);
  static PauliString single(std::size_t num_qubits, std::size_t qubit, Pauli p);

  std::size_t num_qubits() const { return n_; }
  std::size_t num_words() const { return words_.size() / 2; }

  Pauli get(std::size_t qubit) const;
  void set(std::size_t qubit, Pauli p);

  std::size_t weight() const { return weight_; }
  /// Number of sites carrying X or Y.
  std::size_t xy_count() const;
  bool is_identity() const { return weight_ == 0; }

  std::string str() const;

  std::span<const Word> x_words() const { return {words_.data(), num_words()}; }
  std::span<const Word> z_words() const {
    return {words_.data() + num_words(), num_words()};
  }

  /// Replaces *this by g * (*this) and returns m with g * old = i^m * new.
  int left_multiply(const PauliString& g);

  std::size_t hash() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }
  friend bool operator<(const PauliString& a, const PauliString& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return a.words_ < b.words_;
  }

 private:
  void refresh_weight();

  std::uint32_t n_ = 0;
  std::uint32_t weight_ = 0;
  boost::container::small_vector<Word, 4> words_;
};

struct PauliHash {
  std::size_t operator()(const PauliString& p) const { return p.hash(); }
};

/// lhs * rhs = i^phase * pauli, phase in {0,1,2,3}.
std::pair<PauliString, int> multiply(const PauliString& lhs, const PauliString& rhs);

/// True iff the symplectic inner product of p and q vanishes.
bool commutes(const PauliString& p, const PauliString& q);

/// Sparse real linear combination of Pauli strings. Stored coefficients are
/// never exactly zero.
class PauliSum {
 public:
  using Map = std::unordered_map<PauliString, double, PauliHash>;

  PauliSum() = default;
  explicit PauliSum(std::size_t num_qubits) : n_(num_qubits) {}

  static PauliSum from_pauli(const PauliString& p, double coeff = 1.0);

  std::size_t num_qubits() const { return n_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Adds coeff to the term for p, dropping it if the result is exactly zero.
  void add(const PauliString& p, double coeff);
  double coeff(const PauliString& p) const;

  Map::const_iterator begin() const { return terms_.begin(); }
  Map::const_iterator end() const { return terms_.end(); }

  /// Sum of squared coefficients (normalized Frobenius norm squared).
  double frobenius_norm_sq() const;

  /// Terms ordered by Pauli key; used wherever summation order must be fixed.
  std::vector<std::pair<PauliString, double>> sorted_terms() const;

 private:
  std::size_t n_ = 0;
  Map terms_;
};

using BlochVector = std::array<double, 3>;

/// Product state given by one Bloch vector per qubit.
class ProductState {
 public:
  ProductState() = default;
  explicit ProductState(std::vector<BlochVector> bloch);

  /// |0...0>, Bloch vector (0,0,1) on every site.
  static ProductState zeros(std::size_t num_qubits);

  std::size_t num_qubits() const { return bloch_.size(); }
  const BlochVector& bloch(std::size_t qubit) const { return bloch_[qubit]; }

  /// Tr[p rho] for a single site.
  double site_factor(std::size_t qubit, Pauli p) const {
    return p == Pauli::I ? 1.0 : bloch_[qubit][static_cast<int>(p) - 1];
  }

  /// Tr[P rho] = product over sites of the matching Bloch component.
  double overlap(const PauliString& p) const;

 private:
  std::vector<BlochVector> bloch_;
};

double expectation_product_state(const PauliSum& observable, const ProductState& state);

}  // namespace noisyprop

template <>
struct std::hash<noisyprop::PauliString> {
  std::size_t operator()(const noisyprop::PauliString& p) const { return p.hash(); }
};
