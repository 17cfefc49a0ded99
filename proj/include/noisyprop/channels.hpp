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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "noisyprop/pauli.hpp"
#include "noisyprop/rng.hpp"

namespace noisyprop {

using Vec3 = std::array<double, 3>;
using Matrix4 = std::array<std::array<double, 4>, 4>;

Matrix4 identity4();
Matrix4 matmul(const Matrix4& a, const Matrix4& b);
Matrix4 transpose(const Matrix4& a);

/// Pauli transfer matrix of a single-qubit trace-preserving map, basis order
/// (I, X, Y, Z). Entry (r, c) is Tr[P_r N(P_c)] / 2.
class SingleQubitPtm {
 public:
  SingleQubitPtm() : m_(identity4()) {}
  /// Rejects matrices whose first row is not (1,0,0,0). With check_unitary,
  /// additionally requires the (X,Y,Z) block to be orthogonal.
  explicit SingleQubitPtm(const Matrix4& m, bool check_unitary = false);

  static SingleQubitPtm from_unitary(const Eigen::Matrix2cd& u);

  double operator()(int row, int col) const { return m_[row][col]; }
  const Matrix4& matrix() const { return m_; }
  bool is_identity(double tol = 0.0) const;
  bool is_orthogonal(double tol = 1e-12) const;

  friend SingleQubitPtm operator*(const SingleQubitPtm& a, const SingleQubitPtm& b) {
    return SingleQubitPtm(matmul(a.m_, b.m_));
  }

 private:
  Matrix4 m_;
};

enum class ChannelClass { Unitary, DepolarizingLike, DephasingLike, NonUnital };

std::string to_string(ChannelClass c);

/// Single-qubit channel N = U o N' o V in normal form. N' has PTM entries
/// 1 at (I,I), D_P at (P,P) and t_P at (P,I). `pre` is the unitary map
/// applied first, `post` the one applied last.
class NormalFormChannel {
 public:
  /// Validates ranges, common sign of D, the normal-form constraint and
  /// complete positivity (Choi matrix eigenvalues).
  static NormalFormChannel make(const Vec3& damping, const Vec3& shift,
                                std::optional<SingleQubitPtm> pre = std::nullopt,
                                std::optional<SingleQubitPtm> post = std::nullopt);

  const Vec3& damping() const { return d_; }
  const Vec3& shift() const { return t_; }
  const SingleQubitPtm& pre_rotation() const { return pre_; }
  const SingleQubitPtm& post_rotation() const { return post_; }
  bool has_rotations() const { return !pre_.is_identity() || !post_.is_identity(); }

  /// Forward PTM post * core * pre.
  const Matrix4& forward_ptm() const { return forward_; }
  /// PTM of N^dag, the transpose of the forward one. N^dag(P_a) =
  /// sum_b forward_ptm()[a][b] P_b.
  const Matrix4& adjoint_ptm() const { return adjoint_; }

  bool is_unital() const { return t_[0] == 0.0 && t_[1] == 0.0 && t_[2] == 0.0; }
  bool is_identity() const;

  /// Builder label ("depolarizing", "dephasing", "amplitude_damping" or "custom").
  const std::string& kind() const { return kind_; }
  double param() const { return param_; }

 private:
  friend NormalFormChannel make_depolarizing(double p);
  friend NormalFormChannel make_dephasing(double p);
  friend NormalFormChannel make_amplitude_damping(double gamma);

  Vec3 d_{1.0, 1.0, 1.0};
  Vec3 t_{0.0, 0.0, 0.0};
  SingleQubitPtm pre_;
  SingleQubitPtm post_;
  Matrix4 forward_ = identity4();
  Matrix4 adjoint_ = identity4();
  std::string kind_ = "custom";
  double param_ = 0.0;
};

NormalFormChannel make_depolarizing(double p);
NormalFormChannel make_dephasing(double p);
NormalFormChannel make_amplitude_damping(double gamma);

ChannelClass classify(const NormalFormChannel& channel);

/// N^dag applied to a single-site Pauli, as a one-qubit PauliSum.
PauliSum adjoint_action(const NormalFormChannel& channel, Pauli p);

/// max over unit a of sum_Q a_Q^2 D_Q^2 + (a . t)^2, i.e. the top eigenvalue
/// of diag(D^2) + t t^T.
double upsilon(const Vec3& damping, const Vec3& shift);

/// Worst-case bound on the squared contraction coefficient, Upsilon(D, t).
double chi_sq_worstcase(const NormalFormChannel& channel);

/// ||D||_inf^2 + ||t||_2^2, the Hoelder relaxation of Upsilon. Equals
/// 1 - g + g^2 for amplitude damping with rate g.
double chi_sq_holder(const NormalFormChannel& channel);

struct WorstCase {};
struct TwoDesign {};
struct Scrambler {
  double eta = 0.25;
};
using Design = std::variant<WorstCase, TwoDesign, Scrambler>;

std::string to_string(const Design& design);

/// Mean squared contraction coefficient under locally scrambling gates.
/// TwoDesign: (|D|^2 + |t|^2) / 3. Scrambler(eta) is only defined for
/// dephasing-like channels: eta + (1 - eta) |D|^2 / 3. WorstCase returns
/// Upsilon.
double chi_sq_mean(const NormalFormChannel& channel, const Design& design);

/// p = 1 - sqrt(chi^2) under the given assumption.
double effective_depolarizing_rate(const NormalFormChannel& channel, const Design& design);

struct ScramblerReport {
  double eta_estimate = 0.0;
  bool orthogonality_ok = false;
  /// Largest |E[M_PA M_QB]| over P != Q.
  double max_cross_moment = 0.0;
};

using UnitarySampler = std::function<SingleQubitPtm(SplitMix64&)>;

/// Monte Carlo check of the approximate-scrambler conditions for a
/// distribution over single-qubit unitaries, given as a PTM sampler.
ScramblerReport verify_scrambler(const UnitarySampler& sampler, std::size_t samples,
                                 double tol, std::uint64_t seed);

}  // namespace noisyprop
