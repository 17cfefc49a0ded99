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

#include "noisyprop/oracle.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "noisyprop/errors.hpp"

namespace noisyprop {

namespace {

void check_size(std::size_t n, std::size_t max_qubits) {
  if (n > max_qubits) {
    throw InfeasibleSizeError("dense oracle supports at most " + std::to_string(max_qubits) +
                              " qubits, got " + std::to_string(n));
  }
}

/// Row-major forward PTM of a gate on its support, R_ab = Tr[P_a U P_b U^dag] / 2^k.
std::vector<double> gate_ptm(const Gate& gate) {
  if (is_placeholder(gate)) throw ConfigError("circuit has unsampled random gates");
  const std::size_t k = gate_support(gate).size();
  const std::size_t dim = std::size_t{1} << (2 * k);
  std::vector<double> m(dim * dim, 0.0);
  if (const auto* c = std::get_if<CliffordGate>(&gate)) {
    for (std::size_t b = 0; b < dim; ++b) {
      const auto image = c->table.forward(b);
      m[image.index * dim + b] = image.sign;
    }
    return m;
  }
  const auto& r = std::get<PauliRotation>(gate);
  std::size_t gen_index = 0;
  for (std::size_t i = 0; i < k; ++i) gen_index |= static_cast<std::size_t>(r.generator.get(i)) << (2 * i);
  const Eigen::MatrixXcd g = local_pauli_matrix(gen_index, k);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(g.rows(), g.cols());
  const Eigen::MatrixXcd u =
      std::cos(r.angle / 2) * id - std::complex<double>(0, 1) * std::sin(r.angle / 2) * g;
  const double norm = static_cast<double>(g.rows());
  for (std::size_t b = 0; b < dim; ++b) {
    const Eigen::MatrixXcd conj = u * local_pauli_matrix(b, k) * u.adjoint();
    for (std::size_t a = 0; a < dim; ++a) {
      m[a * dim + b] = (local_pauli_matrix(a, k) * conj).trace().real() / norm;
    }
  }
  // Unitaries are unital and trace preserving; keep that exact.
  for (std::size_t a = 1; a < dim; ++a) m[a] = m[a * dim] = 0.0;
  m[0] = 1.0;
  return m;
}

std::vector<double> flat(const Matrix4& a) {
  std::vector<double> m(16);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m[r * 4 + c] = a[r][c];
  }
  return m;
}

std::vector<double> transposed(const std::vector<double>& m) {
  const auto dim = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m.size()))));
  std::vector<double> t(m.size());
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) t[c * dim + r] = m[r * dim + c];
  }
  return t;
}

struct LocalOp {
  std::vector<std::size_t> sites;
  std::vector<double> ptm;  // forward
};

/// Circuit as a time-ordered list of local forward PTMs.
std::vector<LocalOp> local_ops(const Circuit& circuit) {
  std::vector<LocalOp> ops;
  auto add_layer = [&](const Layer& layer) {
    for (const auto& moment : layer.moments) {
      for (const auto& gate : moment) ops.push_back({gate_support(gate), gate_ptm(gate)});
    }
    for (std::size_t q = 0; q < layer.noise.size(); ++q) {
      if (!layer.noise[q].is_identity()) ops.push_back({{q}, flat(layer.noise[q].forward_ptm())});
    }
  };
  for (const Layer& layer : circuit.layers()) add_layer(layer);
  if (circuit.final_layer()) add_layer(*circuit.final_layer());
  return ops;
}

}  // namespace

DensePauliVector::DensePauliVector(std::size_t num_qubits, std::size_t max_qubits) : n_(num_qubits) {
  check_size(num_qubits, max_qubits);
  c_.assign(std::size_t{1} << (2 * num_qubits), 0.0);
}

DensePauliVector DensePauliVector::from_state(const ProductState& state) {
  DensePauliVector v(state.num_qubits(), kMaxForwardQubits);
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    double prod = 1.0;
    for (std::size_t q = 0; q < v.n_ && prod != 0.0; ++q) {
      prod *= state.site_factor(q, static_cast<Pauli>((idx >> (2 * q)) & 3U));
    }
    v.c_[idx] = prod;
  }
  return v;
}

DensePauliVector DensePauliVector::from_observable(const PauliSum& observable, std::size_t max_qubits) {
  DensePauliVector v(observable.num_qubits(), max_qubits);
  for (const auto& [p, a] : observable) {
    std::size_t idx = 0;
    for (std::size_t q = 0; q < v.n_; ++q) idx |= static_cast<std::size_t>(p.get(q)) << (2 * q);
    v.c_[idx] += a;
  }
  return v;
}

PauliSum DensePauliVector::to_pauli_sum() const {
  PauliSum out(n_);
  for (std::size_t idx = 0; idx < c_.size(); ++idx) {
    if (c_[idx] == 0.0) continue;
    PauliString p(n_);
    for (std::size_t q = 0; q < n_; ++q) p.set(q, static_cast<Pauli>((idx >> (2 * q)) & 3U));
    out.add(p, c_[idx]);
  }
  return out;
}

double DensePauliVector::dot(const PauliSum& observable) const {
  if (observable.num_qubits() != n_) throw ConfigError("observable size does not match the state");
  double total = 0.0;
  for (const auto& [p, a] : observable.sorted_terms()) {
    std::size_t idx = 0;
    for (std::size_t q = 0; q < n_; ++q) idx |= static_cast<std::size_t>(p.get(q)) << (2 * q);
    total += a * c_[idx];
  }
  return total;
}

void DensePauliVector::apply_local(const std::vector<std::size_t>& sites, const std::vector<double>& matrix) {
  const std::size_t k = sites.size();
  const std::size_t dim = std::size_t{1} << (2 * k);
  std::size_t mask = 0;
  std::vector<std::size_t> offset(dim, 0);
  for (std::size_t i = 0; i < k; ++i) mask |= std::size_t{3} << (2 * sites[i]);
  for (std::size_t local = 0; local < dim; ++local) {
    for (std::size_t i = 0; i < k; ++i) offset[local] |= ((local >> (2 * i)) & 3U) << (2 * sites[i]);
  }
  std::vector<double> in(dim);
  for (std::size_t base = 0; base < c_.size(); ++base) {
    if ((base & mask) != 0) continue;
    for (std::size_t b = 0; b < dim; ++b) in[b] = c_[base | offset[b]];
    for (std::size_t a = 0; a < dim; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < dim; ++b) acc += matrix[a * dim + b] * in[b];
      c_[base | offset[a]] = acc;
    }
  }
}

DensePauliVector evolve_state(const Circuit& circuit, DensePauliVector state) {
  if (state.num_qubits() != circuit.num_qubits()) throw ConfigError("state size does not match the circuit");
  for (const LocalOp& op : local_ops(circuit)) state.apply_local(op.sites, op.ptm);
  return state;
}

double simulate_exact(const Circuit& circuit, const ProductState& state, const PauliSum& observable) {
  check_size(circuit.num_qubits(), kMaxForwardQubits);
  if (observable.num_qubits() != circuit.num_qubits()) throw ConfigError("observable size does not match the circuit");
  const DensePauliVector out = evolve_state(circuit, DensePauliVector::from_state(state));
  const double value = out.dot(observable);
  if (!std::isfinite(value)) throw NumericError("non-finite oracle result");
  return value;
}

PauliSum heisenberg_exact(const Circuit& circuit, const PauliSum& observable) {
  check_size(circuit.num_qubits(), kMaxHeisenbergQubits);
  if (observable.num_qubits() != circuit.num_qubits()) throw ConfigError("observable size does not match the circuit");
  DensePauliVector v = DensePauliVector::from_observable(observable);
  const auto ops = local_ops(circuit);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) v.apply_local(it->sites, transposed(it->ptm));
  return v.to_pauli_sum();
}

}  // namespace noisyprop
