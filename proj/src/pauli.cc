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

#include "noisyprop/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "noisyprop/errors.hpp"

namespace noisyprop {

char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I':
    case '_':
      return Pauli::I;
    case 'X':
      return Pauli::X;
    case 'Y':
      return Pauli::Y;
    case 'Z':
      return Pauli::Z;
    default:
      throw ConfigError(std::string("invalid Pauli character '") + c + "'");
  }
}

PauliString::PauliString(std::size_t num_qubits)
    : n_(static_cast<std::uint32_t>(num_qubits)),
      words_(2 * ((num_qubits + kWordBits - 1) / kWordBits), 0) {}

PauliString PauliString::from_string(std::string_view text) {
  PauliString p(text.size());
  for (std::size_t q = 0; q < text.size(); ++q) p.set(q, pauli_from_char(text[q]));
  return p;
}

PauliString PauliString::single(std::size_t num_qubits, std::size_t qubit, Pauli p) {
  PauliString s(num_qubits);
  s.set(qubit, p);
  return s;
}

Pauli PauliString::get(std::size_t qubit) const {
  const std::size_t w = qubit / kWordBits;
  const std::size_t b = qubit % kWordBits;
  const unsigned x = (words_[w] >> b) & 1U;
  const unsigned z = (words_[num_words() + w] >> b) & 1U;
  // (x,z): (0,0)->I (1,0)->X (1,1)->Y (0,1)->Z
  return static_cast<Pauli>(x ? 1 + z : 3 * z);
}

void PauliString::set(std::size_t qubit, Pauli p) {
  if (qubit >= n_) throw ConfigError("qubit index out of range");
  const std::size_t w = qubit / kWordBits;
  const Word mask = Word{1} << (qubit % kWordBits);
  Word& xw = words_[w];
  Word& zw = words_[num_words() + w];
  const bool was_active = ((xw | zw) & mask) != 0;
  const bool x = p == Pauli::X || p == Pauli::Y;
  const bool z = p == Pauli::Y || p == Pauli::Z;
  xw = x ? (xw | mask) : (xw & ~mask);
  zw = z ? (zw | mask) : (zw & ~mask);
  const bool active = x || z;
  weight_ = weight_ + static_cast<std::uint32_t>(active) -
            static_cast<std::uint32_t>(was_active);
}

std::size_t PauliString::xy_count() const {
  std::size_t c = 0;
  for (Word w : x_words()) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::string PauliString::str() const {
  std::string s(n_, 'I');
  for (std::size_t q = 0; q < n_; ++q) s[q] = pauli_char(get(q));
  return s;
}

void PauliString::refresh_weight() {
  std::size_t c = 0;
  const std::size_t nw = num_words();
  for (std::size_t i = 0; i < nw; ++i) {
    c += static_cast<std::size_t>(std::popcount(words_[i] | words_[nw + i]));
  }
  weight_ = static_cast<std::uint32_t>(c);
}

int PauliString::left_multiply(const PauliString& g) {
  if (g.n_ != n_) throw ConfigError("Pauli strings act on different qubit counts");
  // With P = i^{x.z} X^x Z^z per site, g*p = i^{m} r where
  // m = x_g z_g + x_p z_p + 2 z_g x_p - x_r z_r (mod 4).
  const std::size_t nw = num_words();
  unsigned m = 0;
  for (std::size_t i = 0; i < nw; ++i) {
    const Word xg = g.words_[i];
    const Word zg = g.words_[nw + i];
    const Word xp = words_[i];
    const Word zp = words_[nw + i];
    const Word xr = xg ^ xp;
    const Word zr = zg ^ zp;
    m += static_cast<unsigned>(std::popcount(xg & zg));
    m += static_cast<unsigned>(std::popcount(xp & zp));
    m += 2U * static_cast<unsigned>(std::popcount(zg & xp));
    m += 3U * static_cast<unsigned>(std::popcount(xr & zr));
    words_[i] = xr;
    words_[nw + i] = zr;
  }
  refresh_weight();
  return static_cast<int>(m & 3U);
}

std::size_t PauliString::hash() const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ n_;
  for (Word w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 31));
}

std::pair<PauliString, int> multiply(const PauliString& lhs, const PauliString& rhs) {
  PauliString r = rhs;
  const int m = r.left_multiply(lhs);
  return {std::move(r), m};
}

bool commutes(const PauliString& p, const PauliString& q) {
  if (p.num_qubits() != q.num_qubits()) {
    throw ConfigError("Pauli strings act on different qubit counts");
  }
  auto px = p.x_words();
  auto pz = p.z_words();
  auto qx = q.x_words();
  auto qz = q.z_words();
  unsigned parity = 0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    parity ^= static_cast<unsigned>(std::popcount((px[i] & qz[i]) ^ (pz[i] & qx[i]))) & 1U;
  }
  return parity == 0;
}

PauliSum PauliSum::from_pauli(const PauliString& p, double coeff) {
  PauliSum s(p.num_qubits());
  s.add(p, coeff);
  return s;
}

void PauliSum::add(const PauliString& p, double coeff) {
  if (p.num_qubits() != n_) throw ConfigError("Pauli term has wrong qubit count");
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(p, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double PauliSum::coeff(const PauliString& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? 0.0 : it->second;
}

double PauliSum::frobenius_norm_sq() const {
  double s = 0.0;
  for (const auto& [p, c] : sorted_terms()) s += c * c;
  return s;
}

std::vector<std::pair<PauliString, double>> PauliSum::sorted_terms() const {
  std::vector<std::pair<PauliString, double>> out(terms_.begin(), terms_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

ProductState::ProductState(std::vector<BlochVector> bloch) : bloch_(std::move(bloch)) {
  for (const auto& r : bloch_) {
    const double norm_sq = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    if (!std::isfinite(norm_sq) || norm_sq > 1.0 + 1e-12) {
      throw ConfigError("Bloch vector must have norm at most 1");
    }
  }
}

ProductState ProductState::zeros(std::size_t num_qubits) {
  return ProductState(std::vector<BlochVector>(num_qubits, BlochVector{0.0, 0.0, 1.0}));
}

double ProductState::overlap(const PauliString& p) const {
  if (p.num_qubits() != bloch_.size()) throw ConfigError("state and Pauli size mismatch");
  double v = 1.0;
  const std::size_t nw = p.num_words();
  auto xs = p.x_words();
  auto zs = p.z_words();
  for (std::size_t w = 0; w < nw && v != 0.0; ++w) {
    PauliString::Word active = xs[w] | zs[w];
    while (active != 0) {
      const int b = std::countr_zero(active);
      active &= active - 1;
      const std::size_t q = w * PauliString::kWordBits + static_cast<std::size_t>(b);
      v *= site_factor(q, p.get(q));
    }
  }
  return v;
}

double expectation_product_state(const PauliSum& observable, const ProductState& state) {
  if (observable.num_qubits() != state.num_qubits()) {
    throw ConfigError("observable and state act on different qubit counts");
  }
  double total = 0.0;
  for (const auto& [p, c] : observable.sorted_terms()) total += c * state.overlap(p);
  return total;
}

}  // namespace noisyprop
