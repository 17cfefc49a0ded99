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

#include "noisyprop/clifford.hpp"

#include <cmath>
#include <complex>
#include <algorithm>
#include <deque>
#include <string>

#include <Eigen/Dense>

#include "noisyprop/errors.hpp"

namespace noisyprop {
namespace {

using cd = std::complex<double>;

Eigen::Matrix2cd pauli_matrix(Pauli p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I:
      m << 1, 0, 0, 1;
      break;
    case Pauli::X:
      m << 0, 1, 1, 0;
      break;
    case Pauli::Y:
      m << 0, cd(0, -1), cd(0, 1), 0;
      break;
    case Pauli::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

std::vector<SignedLocalPauli> conjugation_table(const Eigen::MatrixXcd& u, std::size_t sites,
                                                bool adjoint, const std::string& name) {
  const std::size_t count = std::size_t{1} << (2 * sites);
  const double dim = static_cast<double>(u.rows());
  std::vector<Eigen::MatrixXcd> basis;
  basis.reserve(count);
  for (std::size_t b = 0; b < count; ++b) basis.push_back(local_pauli_matrix(b, sites));

  std::vector<SignedLocalPauli> table(count);
  for (std::size_t a = 0; a < count; ++a) {
    const Eigen::MatrixXcd image =
        adjoint ? Eigen::MatrixXcd(u.adjoint() * basis[a] * u)
                : Eigen::MatrixXcd(u * basis[a] * u.adjoint());
    bool found = false;
    for (std::size_t b = 0; b < count && !found; ++b) {
      const cd overlap = (basis[b].adjoint() * image).trace() / dim;
      if (std::abs(overlap) < 0.5) continue;
      const double s = overlap.real() > 0 ? 1.0 : -1.0;
      if ((image - s * basis[b]).norm() > 1e-9) break;
      table[a] = SignedLocalPauli{static_cast<std::uint8_t>(b), static_cast<std::int8_t>(s)};
      found = true;
    }
    if (!found) throw ConfigError("gate '" + name + "' is not a Clifford unitary");
  }
  return table;
}

}  // namespace

Eigen::MatrixXcd local_pauli_matrix(std::size_t index, std::size_t sites) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (std::size_t s = 0; s < sites; ++s) m = kron(m, pauli_matrix(local_digit(index, s)));
  return m;
}

CliffordTable CliffordTable::from_unitary(std::string name, const Eigen::MatrixXcd& u) {
  std::size_t sites = 0;
  while ((Eigen::Index{1} << sites) < u.rows()) ++sites;
  if (u.rows() != u.cols() || (Eigen::Index{1} << sites) != u.rows() || sites == 0 || sites > 2) {
    throw ConfigError("Clifford gates must act on one or two qubits");
  }
  if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).norm() > 1e-9) {
    throw ConfigError("gate '" + name + "' is not unitary");
  }
  CliffordTable t;
  t.sites_ = sites;
  t.adjoint_ = conjugation_table(u, sites, true, name);
  t.forward_ = conjugation_table(u, sites, false, name);
  t.name_ = std::move(name);
  return t;
}

CliffordTable CliffordTable::named(std::string_view name) {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd u;
  if (name == "I" || name == "X" || name == "Y" || name == "Z") {
    u = pauli_matrix(pauli_from_char(name[0]));
  } else if (name == "H") {
    u.resize(2, 2);
    u << r, r, r, -r;
  } else if (name == "S") {
    u.resize(2, 2);
    u << 1, 0, 0, cd(0, 1);
  } else if (name == "SDG") {
    u.resize(2, 2);
    u << 1, 0, 0, cd(0, -1);
  } else if (name == "SX") {
    u.resize(2, 2);
    u << cd(0.5, 0.5), cd(0.5, -0.5), cd(0.5, -0.5), cd(0.5, 0.5);
  } else if (name == "SXDG") {
    u.resize(2, 2);
    u << cd(0.5, -0.5), cd(0.5, 0.5), cd(0.5, 0.5), cd(0.5, -0.5);
  } else if (name == "CNOT" || name == "CX") {
    u = Eigen::MatrixXcd::Zero(4, 4);
    u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1;
  } else if (name == "CZ") {
    u = Eigen::MatrixXcd::Identity(4, 4);
    u(3, 3) = -1;
  } else if (name == "SWAP") {
    u = Eigen::MatrixXcd::Zero(4, 4);
    u(0, 0) = u(1, 2) = u(2, 1) = u(3, 3) = 1;
  } else if (name.size() >= 2 && name[0] == 'C' &&
             std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    // Elements of single_qubit_cliffords() by index, as produced by sampling.
    const std::size_t index = std::stoul(std::string(name.substr(1)));
    const auto& group = single_qubit_cliffords();
    if (index >= group.size()) throw ConfigError("unknown Clifford gate '" + std::string(name) + "'");
    return group[index];
  } else {
    throw ConfigError("unknown Clifford gate '" + std::string(name) + "'");
  }
  return from_unitary(std::string(name == "CX" ? "CNOT" : name), u);
}

SingleQubitPtm CliffordTable::ptm() const {
  if (sites_ != 1) throw ConfigError("PTM requested for a multi-qubit Clifford");
  Matrix4 m{};
  for (std::size_t p = 0; p < 4; ++p) {
    const auto img = forward_[p];
    m[img.index][p] = img.sign;
  }
  return SingleQubitPtm(m, true);
}

const std::vector<CliffordTable>& single_qubit_cliffords() {
  static const std::vector<CliffordTable> group = [] {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd h;
    h << r, r, r, -r;
    Eigen::Matrix2cd s;
    s << 1, 0, 0, cd(0, 1);
    std::vector<CliffordTable> tables;
    auto key = [](const CliffordTable& t) {
      return std::pair{t.adjoint(1).index * 2 + (t.adjoint(1).sign > 0),
                       t.adjoint(3).index * 2 + (t.adjoint(3).sign > 0)};
    };
    std::vector<std::pair<int, int>> keys;
    std::deque<Eigen::Matrix2cd> queue{Eigen::Matrix2cd::Identity()};
    while (!queue.empty()) {
      Eigen::Matrix2cd u = queue.front();
      queue.pop_front();
      CliffordTable t = CliffordTable::from_unitary("C" + std::to_string(tables.size()), u);
      const auto k = key(t);
      if (std::find(keys.begin(), keys.end(), k) != keys.end()) continue;
      keys.push_back(k);
      tables.push_back(std::move(t));
      queue.push_back(h * u);
      queue.push_back(s * u);
    }
    return tables;
  }();
  return group;
}

}  // namespace noisyprop
