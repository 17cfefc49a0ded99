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

#include "support/dense_sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace noisyprop::ref {

namespace {

using cd = std::complex<double>;

Mat single(char c) {
  Mat m(2, 2);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cd(0, -1), cd(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

Mat from_string(const std::string& s) {
  Mat m = Mat::Identity(1, 1);
  for (char c : s) m = kron(m, single(c));
  return m;
}

Mat named_unitary(const std::string& name) {
  const double r = 1.0 / std::sqrt(2.0);
  Mat u(2, 2);
  if (name == "I" || name == "X" || name == "Y" || name == "Z") return single(name[0]);
  if (name == "H") {
    u << r, r, r, -r;
  } else if (name == "S") {
    u << 1, 0, 0, cd(0, 1);
  } else if (name == "SDG") {
    u << 1, 0, 0, cd(0, -1);
  } else if (name == "SX") {
    u << cd(0.5, 0.5), cd(0.5, -0.5), cd(0.5, -0.5), cd(0.5, 0.5);
  } else if (name == "SXDG") {
    u << cd(0.5, -0.5), cd(0.5, 0.5), cd(0.5, 0.5), cd(0.5, -0.5);
  } else if (name == "CNOT" || name == "CX") {
    u = Mat::Zero(4, 4);
    u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1;
  } else if (name == "CZ") {
    u = Mat::Identity(4, 4);
    u(3, 3) = -1;
  } else if (name == "SWAP") {
    u = Mat::Zero(4, 4);
    u(0, 0) = u(1, 2) = u(2, 1) = u(3, 3) = 1;
  } else {
    return Mat();
  }
  return u;
}

bool maps_to(const Mat& u, const Mat& p, const Mat& target) {
  return (u * p * u.adjoint() - target).norm() < 1e-9;
}

/// Finds a word in H and S reproducing a single-qubit conjugation table.
Mat search_unitary(const CliffordTable& t) {
  const Mat x = single('X');
  const Mat z = single('Z');
  auto image = [&](std::size_t local) {
    const auto img = t.forward(local);
    return static_cast<double>(img.sign) * single("IXYZ"[img.index]);
  };
  const Mat h = named_unitary("H");
  const Mat s = named_unitary("S");
  std::deque<Mat> queue{Mat::Identity(2, 2)};
  for (int visited = 0; visited < 5000 && !queue.empty(); ++visited) {
    Mat u = queue.front();
    queue.pop_front();
    if (maps_to(u, x, image(1)) && maps_to(u, z, image(3))) return u;
    queue.push_back(h * u);
    queue.push_back(s * u);
  }
  throw std::runtime_error("no H/S word matches Clifford " + t.name());
}

}  // namespace

Mat pauli_matrix(const PauliString& p) { return from_string(p.str()); }

Mat observable_matrix(const PauliSum& o) {
  const auto dim = static_cast<Eigen::Index>(1) << o.num_qubits();
  Mat m = Mat::Zero(dim, dim);
  for (const auto& [p, c] : o) m += c * pauli_matrix(p);
  return m;
}

Mat density(const ProductState& state) {
  Mat rho = Mat::Identity(1, 1);
  for (std::size_t q = 0; q < state.num_qubits(); ++q) {
    const auto& b = state.bloch(q);
    Mat site = 0.5 * (single('I') + b[0] * single('X') + b[1] * single('Y') + b[2] * single('Z'));
    rho = kron(rho, site);
  }
  return rho;
}

Mat embed(const Mat& local, const std::vector<std::size_t>& support, std::size_t n) {
  const std::size_t k = support.size();
  const std::size_t dim = std::size_t{1} << n;
  std::size_t mask = 0;
  for (std::size_t q : support) mask |= std::size_t{1} << (n - 1 - q);
  auto sub = [&](std::size_t i) {
    std::size_t s = 0;
    for (std::size_t a = 0; a < k; ++a) s |= ((i >> (n - 1 - support[a])) & 1U) << (k - 1 - a);
    return s;
  };
  Mat full = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      if ((i & ~mask) != (j & ~mask)) continue;
      full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          local(static_cast<Eigen::Index>(sub(i)), static_cast<Eigen::Index>(sub(j)));
    }
  }
  return full;
}

Mat gate_unitary(const Gate& gate) {
  if (is_placeholder(gate)) throw std::invalid_argument("placeholder gate");
  if (const auto* r = std::get_if<PauliRotation>(&gate)) {
    const Mat g = from_string(r->generator.str());
    return std::cos(r->angle / 2) * Mat::Identity(g.rows(), g.cols()) - cd(0, 1) * std::sin(r->angle / 2) * g;
  }
  const auto& c = std::get<CliffordGate>(gate);
  Mat u = named_unitary(c.table.name());
  if (u.size() == 0) u = search_unitary(c.table);
  return u;
}

std::vector<Mat> kraus(const NormalFormChannel& ch) {
  const double p = ch.param();
  auto scaled = [](double s, char c) -> Mat { return std::sqrt(s) * single(c); };
  if (ch.kind() == "amplitude_damping") {
    Mat k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1 - p);
    k1 << 0, std::sqrt(p), 0, 0;
    return {k0, k1};
  }
  if (ch.kind() == "dephasing") return {scaled(1 - p, 'I'), scaled(p, 'Z')};
  if (ch.kind() == "depolarizing") {
    return {scaled(1 - 0.75 * p, 'I'), scaled(p / 4, 'X'), scaled(p / 4, 'Y'), scaled(p / 4, 'Z')};
  }
  // Choi matrix J[(i,a),(j,b)] = <a| N(|i><j|) |b>.
  const auto& r = ch.forward_ptm();
  Mat choi = Mat::Zero(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Mat e = Mat::Zero(2, 2);
      e(i, j) = 1;
      Mat out = Mat::Zero(2, 2);
      for (int q = 0; q < 4; ++q) {
        const cd cq = (single("IXYZ"[q]) * e).trace() / 2.0;
        for (int pp = 0; pp < 4; ++pp) out += cq * r[pp][q] * single("IXYZ"[pp]);
      }
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) choi(2 * i + a, 2 * j + b) = out(a, b);
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(choi);
  std::vector<Mat> ops;
  for (int k = 0; k < 4; ++k) {
    const double lambda = eig.eigenvalues()(k);
    if (lambda < 1e-14) continue;
    Mat kk(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int a = 0; a < 2; ++a) kk(a, i) = std::sqrt(lambda) * eig.eigenvectors()(2 * i + a, k);
    }
    ops.push_back(kk);
  }
  return ops;
}

Mat evolve(const Circuit& circuit, Mat rho) {
  const std::size_t n = circuit.num_qubits();
  auto apply_layer = [&](const Layer& layer) {
    for (const auto& moment : layer.moments) {
      for (const auto& gate : moment) {
        const Mat u = embed(gate_unitary(gate), gate_support(gate), n);
        rho = u * rho * u.adjoint();
      }
    }
    for (std::size_t q = 0; q < layer.noise.size(); ++q) {
      Mat next = Mat::Zero(rho.rows(), rho.cols());
      for (const Mat& k : kraus(layer.noise[q])) {
        const Mat kf = embed(k, {q}, n);
        next += kf * rho * kf.adjoint();
      }
      rho = next;
    }
  };
  for (const Layer& l : circuit.layers()) apply_layer(l);
  if (circuit.final_layer()) apply_layer(*circuit.final_layer());
  return rho;
}

double expectation(const Circuit& circuit, const ProductState& state, const PauliSum& o) {
  const Mat rho = evolve(circuit, density(state));
  return (observable_matrix(o) * rho).trace().real();
}

double pauli_overlap(const Mat& a, const Mat& b) {
  return (a * b).trace().real() / static_cast<double>(a.rows());
}

PauliString random_pauli(std::size_t n, SplitMix64& rng) {
  PauliString p(n);
  for (std::size_t q = 0; q < n; ++q) p.set(q, static_cast<Pauli>(rng.below(4)));
  return p;
}

PauliSum random_pauli_sum(std::size_t n, std::size_t terms, SplitMix64& rng) {
  PauliSum s(n);
  for (std::size_t i = 0; i < terms; ++i) s.add(random_pauli(n, rng), 2.0 * rng.uniform() - 1.0);
  return s;
}

ProductState random_product_state(std::size_t n, SplitMix64& rng) {
  std::vector<BlochVector> b;
  for (std::size_t q = 0; q < n; ++q) {
    BlochVector v{};
    double norm = 0;
    do {
      for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
      norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    } while (norm > 1.0 || norm == 0.0);
    const double radius = rng.uniform() < 0.5 ? 1.0 : rng.uniform();
    for (double& x : v) x *= radius / norm;
    b.push_back(v);
  }
  return ProductState(std::move(b));
}

NormalFormChannel random_named_channel(SplitMix64& rng) {
  const double rate = rng.uniform();
  switch (rng.below(3)) {
    case 0: return make_depolarizing(rate);
    case 1: return make_dephasing(rate);
    default: return make_amplitude_damping(rate);
  }
}

Circuit random_circuit(std::size_t n, std::size_t depth, SplitMix64& rng, bool with_final_layer) {
  static const char* kOneQubit[] = {"H", "S"};
  static const char* kTwoQubit[] = {"CNOT", "CZ"};
  auto random_angle = [&] { return 2.0 * std::numbers::pi * rng.uniform(); };
  auto random_generator = [&](std::size_t k) {
    std::string s;
    do {
      s.clear();
      for (std::size_t i = 0; i < k; ++i) s.push_back("IXYZ"[rng.below(4)]);
    } while (s.find_first_not_of('I') == std::string::npos);
    return s;
  };
  Circuit c(n);
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<std::size_t> order(n);
    for (std::size_t q = 0; q < n; ++q) order[q] = q;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<Gate> moment;
    for (std::size_t i = 0; i < n;) {
      const bool two = i + 1 < n && rng.below(2) == 0;
      const bool rotation = rng.below(2) == 0;
      if (two) {
        std::vector<std::size_t> sup{order[i], order[i + 1]};
        moment.push_back(rotation ? make_rotation(random_generator(2), sup, random_angle())
                                  : make_clifford(kTwoQubit[rng.below(2)], sup));
        i += 2;
      } else {
        std::vector<std::size_t> sup{order[i]};
        moment.push_back(rotation ? make_rotation(random_generator(1), sup, random_angle())
                                  : make_clifford(kOneQubit[rng.below(2)], sup));
        i += 1;
      }
    }
    Layer layer;
    layer.moments.push_back(std::move(moment));
    if (rng.below(5) != 0) {
      for (std::size_t q = 0; q < n; ++q) layer.noise.push_back(random_named_channel(rng));
    }
    c.add_layer(std::move(layer));
  }
  if (with_final_layer && rng.below(2) == 0) {
    Layer fin;
    std::vector<Gate> moment;
    for (std::size_t q = 0; q < n; ++q) {
      if (rng.below(2) == 0) moment.push_back(make_rotation(random_generator(1), {q}, random_angle()));
    }
    fin.moments.push_back(std::move(moment));
    c.set_final_layer(std::move(fin));
  }
  return c;
}

}  // namespace noisyprop::ref
