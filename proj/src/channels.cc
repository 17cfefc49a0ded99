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

#include "noisyprop/channels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Dense>

#include "noisyprop/clifford.hpp"
#include "noisyprop/errors.hpp"

namespace noisyprop {
namespace {

constexpr double kClassTol = 1e-12;

void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << what << " must lie in [0, 1], got " << v;
    throw ConfigError(msg.str());
  }
}

Eigen::Matrix2cd pauli2(int p) {
  using cd = std::complex<double>;
  Eigen::Matrix2cd m;
  switch (p) {
    case 0:
      m << 1, 0, 0, 1;
      break;
    case 1:
      m << 0, 1, 1, 0;
      break;
    case 2:
      m << 0, cd(0, -1), cd(0, 1), 0;
      break;
    default:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

/// Smallest eigenvalue of the Choi matrix sum_{P,Q} R_PQ / 2 * P_Q^T (x) P_P.
double choi_min_eigenvalue(const Matrix4& r) {
  Eigen::Matrix4cd choi = Eigen::Matrix4cd::Zero();
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      if (r[p][q] == 0.0) continue;
      const Eigen::Matrix2cd a = pauli2(q).transpose();
      const Eigen::Matrix2cd b = pauli2(p);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          choi.block<2, 2>(2 * i, 2 * j) += 0.5 * r[p][q] * a(i, j) * b;
        }
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(choi, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

Matrix4 identity4() {
  Matrix4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

Matrix4 matmul(const Matrix4& a, const Matrix4& b) {
  Matrix4 c{};
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      if (a[i][k] == 0.0) continue;
      for (int j = 0; j < 4; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

Matrix4 transpose(const Matrix4& a) {
  Matrix4 t{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) t[i][j] = a[j][i];
  }
  return t;
}

SingleQubitPtm::SingleQubitPtm(const Matrix4& m, bool check_unitary) : m_(m) {
  for (const auto& row : m_) {
    for (double v : row) {
      if (!std::isfinite(v)) throw ConfigError("PTM entries must be finite");
    }
  }
  if (std::abs(m_[0][0] - 1.0) > 1e-12 || std::abs(m_[0][1]) > 1e-12 ||
      std::abs(m_[0][2]) > 1e-12 || std::abs(m_[0][3]) > 1e-12) {
    throw ConfigError("PTM first row must be (1, 0, 0, 0) for a trace-preserving map");
  }
  if (check_unitary && !is_orthogonal()) {
    throw ConfigError("PTM flagged unitary but its Pauli block is not orthogonal");
  }
}

SingleQubitPtm SingleQubitPtm::from_unitary(const Eigen::Matrix2cd& u) {
  Matrix4 m{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      m[a][b] = 0.5 * (pauli2(a) * u * pauli2(b) * u.adjoint()).trace().real();
    }
  }
  return SingleQubitPtm(m, true);
}

bool SingleQubitPtm::is_identity(double tol) const {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (std::abs(m_[i][j] - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return true;
}

bool SingleQubitPtm::is_orthogonal(double tol) const {
  for (int i = 1; i < 4; ++i) {
    if (std::abs(m_[i][0]) > tol) return false;
    for (int j = 1; j < 4; ++j) {
      double dot = 0.0;
      for (int k = 1; k < 4; ++k) dot += m_[i][k] * m_[j][k];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return true;
}

std::string to_string(ChannelClass c) {
  switch (c) {
    case ChannelClass::Unitary:
      return "Unitary";
    case ChannelClass::DepolarizingLike:
      return "DepolarizingLike";
    case ChannelClass::DephasingLike:
      return "DephasingLike";
    case ChannelClass::NonUnital:
      return "NonUnital";
  }
  return "Unknown";
}

NormalFormChannel NormalFormChannel::make(const Vec3& damping, const Vec3& shift,
                                          std::optional<SingleQubitPtm> pre,
                                          std::optional<SingleQubitPtm> post) {
  for (int i = 0; i < 3; ++i) {
    if (!(std::abs(damping[i]) <= 1.0) || !(std::abs(shift[i]) <= 1.0)) {
      throw ConfigError("normal-form parameters must lie in [-1, 1]");
    }
  }
  const bool any_pos = std::any_of(damping.begin(), damping.end(), [](double v) { return v > 0; });
  const bool any_neg = std::any_of(damping.begin(), damping.end(), [](double v) { return v < 0; });
  if (any_pos && any_neg) throw ConfigError("entries of D must share one sign");
  if (upsilon(damping, shift) > 1.0 + 1e-12) {
    throw ConfigError("normal-form parameters violate Upsilon(D, t) <= 1");
  }
  if (pre && !pre->is_orthogonal()) throw ConfigError("pre-rotation must be unitary");
  if (post && !post->is_orthogonal()) throw ConfigError("post-rotation must be unitary");

  NormalFormChannel ch;
  ch.d_ = damping;
  ch.t_ = shift;
  ch.pre_ = pre.value_or(SingleQubitPtm());
  ch.post_ = post.value_or(SingleQubitPtm());
  Matrix4 core = identity4();
  for (int i = 0; i < 3; ++i) {
    core[i + 1][i + 1] = damping[i];
    core[i + 1][0] = shift[i];
  }
  if (choi_min_eigenvalue(core) < -1e-10) {
    throw ConfigError("normal-form parameters do not describe a completely positive map");
  }
  ch.forward_ = matmul(ch.post_.matrix(), matmul(core, ch.pre_.matrix()));
  ch.adjoint_ = transpose(ch.forward_);
  return ch;
}

bool NormalFormChannel::is_identity() const {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (forward_[i][j] != (i == j ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

NormalFormChannel make_depolarizing(double p) {
  check_unit_interval(p, "depolarizing rate");
  auto ch = NormalFormChannel::make({1 - p, 1 - p, 1 - p}, {0, 0, 0});
  ch.kind_ = "depolarizing";
  ch.param_ = p;
  return ch;
}

NormalFormChannel make_dephasing(double p) {
  check_unit_interval(p, "dephasing rate");
  // Above p = 1/2 the map is Z conjugation after dephasing at 1 - p, which
  // keeps the entries of D non-negative.
  std::optional<SingleQubitPtm> post;
  if (p > 0.5) {
    Matrix4 z = identity4();
    z[1][1] = z[2][2] = -1.0;
    post = SingleQubitPtm(z, true);
  }
  const double d = std::abs(1 - 2 * p);
  auto ch = NormalFormChannel::make({d, d, 1.0}, {0, 0, 0}, std::nullopt, post);
  ch.kind_ = "dephasing";
  ch.param_ = p;
  return ch;
}

NormalFormChannel make_amplitude_damping(double gamma) {
  check_unit_interval(gamma, "amplitude damping rate");
  const double s = std::sqrt(1 - gamma);
  auto ch = NormalFormChannel::make({s, s, 1 - gamma}, {0, 0, gamma});
  ch.kind_ = "amplitude_damping";
  ch.param_ = gamma;
  return ch;
}

ChannelClass classify(const NormalFormChannel& channel) {
  const auto& t = channel.shift();
  if (std::any_of(t.begin(), t.end(), [](double v) { return std::abs(v) > kClassTol; })) {
    return ChannelClass::NonUnital;
  }
  int ones = 0;
  for (double d : channel.damping()) {
    if (std::abs(std::abs(d) - 1.0) <= kClassTol) ++ones;
  }
  if (ones == 3) return ChannelClass::Unitary;
  if (ones == 1) return ChannelClass::DephasingLike;
  // Two unit entries with t = 0 cannot be completely positive; make() rejects them.
  return ChannelClass::DepolarizingLike;
}

PauliSum adjoint_action(const NormalFormChannel& channel, Pauli p) {
  PauliSum out(1);
  const auto& row = channel.forward_ptm()[static_cast<int>(p)];
  for (int b = 0; b < 4; ++b) {
    out.add(PauliString::single(1, 0, static_cast<Pauli>(b)), row[b]);
  }
  return out;
}

double upsilon(const Vec3& damping, const Vec3& shift) {
  Eigen::Matrix3d m = Eigen::Vector3d(shift[0], shift[1], shift[2]) *
                      Eigen::RowVector3d(shift[0], shift[1], shift[2]);
  for (int i = 0; i < 3; ++i) m(i, i) += damping[i] * damping[i];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double chi_sq_worstcase(const NormalFormChannel& channel) {
  return upsilon(channel.damping(), channel.shift());
}

double chi_sq_holder(const NormalFormChannel& channel) {
  double dmax = 0.0;
  double tnorm = 0.0;
  for (int i = 0; i < 3; ++i) {
    dmax = std::max(dmax, channel.damping()[i] * channel.damping()[i]);
    tnorm += channel.shift()[i] * channel.shift()[i];
  }
  return dmax + tnorm;
}

std::string to_string(const Design& design) {
  if (std::holds_alternative<WorstCase>(design)) return "worst_case";
  if (std::holds_alternative<TwoDesign>(design)) return "two_design";
  std::ostringstream s;
  s << "scrambler(" << std::get<Scrambler>(design).eta << ")";
  return s.str();
}

double chi_sq_mean(const NormalFormChannel& channel, const Design& design) {
  double d2 = 0.0;
  double t2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    d2 += channel.damping()[i] * channel.damping()[i];
    t2 += channel.shift()[i] * channel.shift()[i];
  }
  if (std::holds_alternative<WorstCase>(design)) return chi_sq_worstcase(channel);
  if (std::holds_alternative<TwoDesign>(design)) return (d2 + t2) / 3.0;
  const double eta = std::get<Scrambler>(design).eta;
  if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("scrambler eta must lie in [0, 1)");
  if (classify(channel) != ChannelClass::DephasingLike) {
    throw UnsupportedError(
        "scrambler contraction is only available for dephasing-like channels; "
        "use the two-design or worst-case assumption");
  }
  return eta + (1.0 - eta) * d2 / 3.0;
}

double effective_depolarizing_rate(const NormalFormChannel& channel, const Design& design) {
  const double chi_sq = chi_sq_mean(channel, design);
  return 1.0 - std::sqrt(std::max(0.0, chi_sq));
}

ScramblerReport verify_scrambler(const UnitarySampler& sampler, std::size_t samples,
                                 double tol, std::uint64_t seed) {
  if (samples < 1000) throw ConfigError("verify_scrambler needs at least 1000 samples");
  // cross[P][A][Q][B] accumulates M_PA * M_QB, where U^dag P U = sum_A M_PA A.
  std::array<double, 256> cross{};
  std::array<std::array<double, 4>, 4> mixing{};
  for (std::size_t s = 0; s < samples; ++s) {
    auto rng = SplitMix64::stream(seed, s);
    const Matrix4& m = sampler(rng).matrix();
    for (int p = 0; p < 4; ++p) {
      for (int a = 0; a < 4; ++a) {
        const double mpa = m[p][a];
        if (mpa == 0.0) continue;
        for (int q = 0; q < 4; ++q) {
          for (int b = 0; b < 4; ++b) cross[((p * 4 + a) * 4 + q) * 4 + b] += mpa * m[q][b];
        }
      }
    }
    for (int p = 1; p < 4; ++p) {
      for (int q = 1; q < 4; ++q) mixing[p][q] += m[p][q] * m[p][q];
    }
  }
  const double inv = 1.0 / static_cast<double>(samples);
  ScramblerReport report;
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      if (p == q) continue;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          report.max_cross_moment = std::max(
              report.max_cross_moment, std::abs(cross[((p * 4 + a) * 4 + q) * 4 + b] * inv));
        }
      }
    }
  }
  report.orthogonality_ok = report.max_cross_moment <= tol;
  double max_mix = 0.0;
  for (int p = 1; p < 4; ++p) {
    for (int q = 1; q < 4; ++q) max_mix = std::max(max_mix, mixing[p][q] * inv);
  }
  report.eta_estimate = (3.0 * max_mix - 1.0) / 2.0;
  return report;
}

}  // namespace noisyprop
