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

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

#include "noisyprop/clifford.hpp"
#include "noisyprop/errors.hpp"
#include "support/dense_sim.hpp"

using namespace noisyprop;

namespace {

void expect_vec(const Vec3& got, const Vec3& want, double tol = 1e-15) {
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], tol) << "component " << i;
}

double coeff(const PauliSum& s, const char* p) { return s.coeff(PauliString::from_string(p)); }

Eigen::Matrix2cd rotation(char axis, double theta) {
  Eigen::Matrix2cd g;
  if (axis == 'X') g << 0, 1, 1, 0;
  if (axis == 'Y') g << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
  if (axis == 'Z') g << 1, 0, 0, -1;
  return std::cos(theta / 2) * Eigen::Matrix2cd::Identity() - std::complex<double>(0, 1) * std::sin(theta / 2) * g;
}

/// Forward PTM through the Kraus representation, independent of the normal form.
Matrix4 kraus_ptm(const NormalFormChannel& ch) {
  Matrix4 m{};
  const auto ks = ref::kraus(ch);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const ref::Mat pc = ref::pauli_matrix(PauliString::single(1, 0, static_cast<Pauli>(c)));
      const ref::Mat pr = ref::pauli_matrix(PauliString::single(1, 0, static_cast<Pauli>(r)));
      ref::Mat out = ref::Mat::Zero(2, 2);
      for (const auto& k : ks) out += k * pc * k.adjoint();
      m[r][c] = (pr * out).trace().real() / 2;
    }
  }
  return m;
}

}  // namespace

TEST(channels, depolarizing_builder) {
  expect_vec(make_depolarizing(0).damping(), {1, 1, 1});
  expect_vec(make_depolarizing(1).damping(), {0, 0, 0});
  expect_vec(make_depolarizing(1).shift(), {0, 0, 0});
  ASSERT_TRUE(make_depolarizing(0).is_identity());
  ASSERT_THROW(make_depolarizing(-0.1), ConfigError);
  ASSERT_THROW(make_depolarizing(1.5), ConfigError);
}

TEST(channels, depolarizing_scales_weight_w_paulis_by_power) {
  const auto ch = make_depolarizing(0.1);
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
    const PauliSum s = adjoint_action(ch, p);
    ASSERT_EQ(s.size(), 1u);
    ASSERT_NEAR(s.coeff(PauliString::single(1, 0, p)), 0.9, 1e-15);
  }
}

TEST(channels, dephasing_builder) {
  ASSERT_TRUE(make_dephasing(0).is_identity());
  expect_vec(make_dephasing(0.5).damping(), {0, 0, 1});
  expect_vec(make_dephasing(0.25).damping(), {0.5, 0.5, 1});
  const PauliSum x = adjoint_action(make_dephasing(0.5), Pauli::X);
  ASSERT_TRUE(x.empty());
  ASSERT_EQ(coeff(adjoint_action(make_dephasing(0.5), Pauli::Z), "Z"), 1.0);
}

TEST(channels, amplitude_damping_builder) {
  ASSERT_TRUE(make_amplitude_damping(0).is_identity());
  expect_vec(make_amplitude_damping(1).damping(), {0, 0, 0});
  expect_vec(make_amplitude_damping(1).shift(), {0, 0, 1});
  expect_vec(make_amplitude_damping(0.36).damping(), {0.8, 0.8, 0.64}, 1e-15);
  expect_vec(make_amplitude_damping(0.36).shift(), {0, 0, 0.36});
  // gamma = 1 resets to |0>: every input maps to the state with Bloch vector (0,0,1).
  const auto& m = make_amplitude_damping(1).forward_ptm();
  for (int c = 0; c < 4; ++c) {
    ASSERT_EQ(m[1][c], 0.0);
    ASSERT_EQ(m[2][c], 0.0);
  }
  ASSERT_EQ(m[3][0], 1.0);
}

TEST(channels, builders_match_kraus_ptms) {
  for (double r : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
    for (const auto& ch : {make_depolarizing(r), make_dephasing(r), make_amplitude_damping(r)}) {
      const Matrix4 dense = kraus_ptm(ch);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) ASSERT_NEAR(ch.forward_ptm()[a][b], dense[a][b], 1e-12) << ch.kind() << " " << r;
      }
    }
  }
}

TEST(channels, classify) {
  ASSERT_EQ(classify(make_amplitude_damping(0.1)), ChannelClass::NonUnital);
  ASSERT_EQ(classify(make_dephasing(0.1)), ChannelClass::DephasingLike);
  ASSERT_EQ(classify(make_depolarizing(0.1)), ChannelClass::DepolarizingLike);
  ASSERT_EQ(classify(make_depolarizing(0)), ChannelClass::Unitary);
  for (double r : {0.05, 0.3, 0.6, 0.95}) {
    ASSERT_EQ(classify(make_amplitude_damping(r)), ChannelClass::NonUnital);
    ASSERT_EQ(classify(make_dephasing(r)), ChannelClass::DephasingLike);
    ASSERT_EQ(classify(make_depolarizing(r)), ChannelClass::DepolarizingLike);
  }
}

TEST(channels, adjoint_action_examples) {
  const double g = 0.3;
  const PauliSum z = adjoint_action(make_amplitude_damping(g), Pauli::Z);
  ASSERT_NEAR(coeff(z, "Z"), 1 - g, 1e-15);
  ASSERT_NEAR(coeff(z, "I"), g, 1e-15);
  ASSERT_EQ(z.size(), 2u);
  ASSERT_NEAR(coeff(adjoint_action(make_dephasing(0.2), Pauli::X), "X"), 0.6, 1e-15);
  for (const auto& ch : {make_amplitude_damping(0.4), make_dephasing(0.3), make_depolarizing(0.7)}) {
    const PauliSum id = adjoint_action(ch, Pauli::I);
    ASSERT_EQ(id.size(), 1u);
    ASSERT_EQ(coeff(id, "I"), 1.0);
  }
}

TEST(channels, adjoint_ptm_is_transpose_of_forward) {
  for (double r : {0.1, 0.5, 0.8}) {
    for (const auto& ch : {make_depolarizing(r), make_dephasing(r), make_amplitude_damping(r)}) {
      const Matrix4 dense = kraus_ptm(ch);
      for (int a = 0; a < 4; ++a) {
        const PauliSum s = adjoint_action(ch, static_cast<Pauli>(a));
        for (int b = 0; b < 4; ++b) {
          ASSERT_NEAR(ch.adjoint_ptm()[b][a], dense[a][b], 1e-12);
          ASSERT_NEAR(s.coeff(PauliString::single(1, 0, static_cast<Pauli>(b))), dense[a][b], 1e-12);
        }
      }
    }
  }
}

TEST(channels, adjoint_action_with_rotations_matches_kraus) {
  SplitMix64 rng(3);
  const auto& group = single_qubit_cliffords();
  for (int trial = 0; trial < 20; ++trial) {
    const SingleQubitPtm pre = group[rng.below(group.size())].ptm();
    const SingleQubitPtm post = SingleQubitPtm::from_unitary(rotation('Y', 2 * std::numbers::pi * rng.uniform()));
    const auto ch = NormalFormChannel::make({0.6, 0.6, 0.5}, {0, 0, 0.3}, pre, post);
    const Matrix4 dense = kraus_ptm(ch);
    for (int a = 0; a < 4; ++a) {
      const PauliSum s = adjoint_action(ch, static_cast<Pauli>(a));
      for (int b = 0; b < 4; ++b) ASSERT_NEAR(s.coeff(PauliString::single(1, 0, static_cast<Pauli>(b))), dense[a][b], 1e-12);
    }
  }
}

TEST(channels, rejects_invalid_parameters) {
  ASSERT_THROW(NormalFormChannel::make({0.5, -0.5, 0.5}, {0, 0, 0}), ConfigError);
  ASSERT_THROW(NormalFormChannel::make({1, 1, 1}, {0, 0, 0.5}), ConfigError);
  ASSERT_THROW(NormalFormChannel::make({1.2, 1, 1}, {0, 0, 0}), ConfigError);
  // Satisfies Upsilon <= 1 but is not completely positive (transpose-like).
  ASSERT_THROW(NormalFormChannel::make({1, 1, 0}, {0, 0, 0}), ConfigError);
  ASSERT_THROW(NormalFormChannel::make({-1, -1, -1}, {0, 0, 0}), ConfigError);
  ASSERT_NO_THROW(NormalFormChannel::make({-1.0 / 3, -1.0 / 3, -1.0 / 3}, {0, 0, 0}));
}

TEST(channels, upsilon_examples) {
  ASSERT_NEAR(upsilon({1, 1, 1}, {0, 0, 0}), 1.0, 1e-15);
  ASSERT_NEAR(upsilon({0.8, 0.8, 0.8}, {0, 0, 0}), 0.64, 1e-15);
  const auto ad = make_amplitude_damping(0.5);
  ASSERT_NEAR(upsilon(ad.damping(), ad.shift()), 0.5, 1e-15);
}

TEST(channels, upsilon_is_top_eigenvalue_of_rayleigh_quotient) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Vec3 d{}, t{};
    for (int i = 0; i < 3; ++i) {
      d[i] = rng.uniform();
      t[i] = 2 * rng.uniform() - 1;
    }
    const double u = upsilon(d, t);
    // No unit vector exceeds it, and random directions approach it from below.
    double best = 0;
    for (int s = 0; s < 2000; ++s) {
      double a[3], norm = 0;
      for (double& x : a) {
        x = 2 * rng.uniform() - 1;
        norm += x * x;
      }
      norm = std::sqrt(norm);
      double value = 0, dot = 0;
      for (int i = 0; i < 3; ++i) {
        a[i] /= norm;
        value += a[i] * a[i] * d[i] * d[i];
        dot += a[i] * t[i];
      }
      best = std::max(best, value + dot * dot);
    }
    ASSERT_LE(best, u + 1e-12);
    ASSERT_GE(best, u - 0.05);
  }
}

TEST(channels, upsilon_at_most_one_for_valid_channels) {
  SplitMix64 rng(6);
  int built = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    Vec3 d{}, t{};
    for (int i = 0; i < 3; ++i) {
      d[i] = rng.uniform();
      t[i] = 0.5 * (2 * rng.uniform() - 1);
    }
    try {
      const auto ch = NormalFormChannel::make(d, t);
      ++built;
      const double u = upsilon(ch.damping(), ch.shift());
      ASSERT_LE(u, 1.0 + 1e-12);
      double dinf = 0, t2 = 0;
      for (int i = 0; i < 3; ++i) {
        dinf = std::max(dinf, std::abs(d[i]));
        t2 += t[i] * t[i];
      }
      if (dinf < 1) ASSERT_LT(u, 1.0);
    } catch (const ConfigError&) {
    }
  }
  ASSERT_GT(built, 100);
}

TEST(channels, chi_sq_worstcase) {
  ASSERT_EQ(chi_sq_worstcase(make_depolarizing(0)), 1.0);
  for (int i = 1; i <= 19; ++i) {
    const double g = 0.05 * i;
    ASSERT_LE(chi_sq_worstcase(make_amplitude_damping(g)), 1 - g + g * g + 1e-15);
    ASSERT_NEAR(chi_sq_holder(make_amplitude_damping(g)), 1 - g + g * g, 1e-15);
    ASSERT_NEAR(chi_sq_worstcase(make_dephasing(g)), 1.0, 1e-15);
  }
}

TEST(channels, chi_sq_mean) {
  ASSERT_NEAR(chi_sq_mean(make_amplitude_damping(1.0), TwoDesign{}), 1.0 / 3, 1e-15);
  ASSERT_NEAR(chi_sq_mean(make_dephasing(0.5), Scrambler{0.25}), 0.5, 1e-15);
  for (int i = 1; i <= 19; ++i) {
    const double p = 0.05 * i;
    const double d = 1 - 2 * p;
    ASSERT_NEAR(chi_sq_mean(make_dephasing(p), Scrambler{0.25}), (1 + d * d) / 2, 1e-15);
  }
  ASSERT_THROW(chi_sq_mean(make_amplitude_damping(0.1), Scrambler{0.25}), UnsupportedError);
  ASSERT_THROW(chi_sq_mean(make_depolarizing(0.1), Scrambler{0.25}), UnsupportedError);
  ASSERT_THROW(chi_sq_mean(make_dephasing(0.1), Scrambler{1.0}), ConfigError);
  ASSERT_EQ(chi_sq_mean(make_amplitude_damping(0.3), WorstCase{}), chi_sq_worstcase(make_amplitude_damping(0.3)));
}

TEST(channels, effective_depolarizing_rate) {
  ASSERT_EQ(effective_depolarizing_rate(make_depolarizing(0), WorstCase{}), 0.0);
  ASSERT_EQ(effective_depolarizing_rate(make_depolarizing(0), TwoDesign{}), 0.0);
  // Holder bound of amplitude damping, 1 - g + g^2 = 0.84 at g = 0.2.
  ASSERT_NEAR(1 - std::sqrt(chi_sq_holder(make_amplitude_damping(0.2))), 0.08348, 1e-5);
  ASSERT_NEAR(effective_depolarizing_rate(make_dephasing(0.2), Scrambler{0.25}), 1 - std::sqrt(0.68), 1e-15);
  ASSERT_NEAR(effective_depolarizing_rate(make_dephasing(0.2), Scrambler{0.25}), 0.17538, 1e-5);
  ASSERT_NEAR(effective_depolarizing_rate(make_depolarizing(0.3), TwoDesign{}), 0.3, 1e-15);
}

TEST(channels, verify_scrambler_uniform_clifford) {
  const auto& group = single_qubit_cliffords();
  const auto report = verify_scrambler([&](SplitMix64& rng) { return group[rng.below(group.size())].ptm(); },
                                       20000, 0.05, 1);
  ASSERT_TRUE(report.orthogonality_ok) << report.max_cross_moment;
  ASSERT_NEAR(report.eta_estimate, 0.0, 0.05);
}

TEST(channels, verify_scrambler_two_rotations) {
  const auto report = verify_scrambler(
      [](SplitMix64& rng) {
        const double a = 2 * std::numbers::pi * rng.uniform();
        const double b = 2 * std::numbers::pi * rng.uniform();
        return SingleQubitPtm::from_unitary(rotation('Z', b) * rotation('X', a));
      },
      20000, 0.05, 2);
  ASSERT_TRUE(report.orthogonality_ok) << report.max_cross_moment;
  ASSERT_NEAR(report.eta_estimate, 0.25, 0.05);
}

TEST(channels, verify_scrambler_single_axis_fails) {
  const auto report = verify_scrambler(
      [](SplitMix64& rng) { return SingleQubitPtm::from_unitary(rotation('Z', 2 * std::numbers::pi * rng.uniform())); },
      5000, 0.05, 3);
  ASSERT_FALSE(report.orthogonality_ok);
  ASSERT_THROW(verify_scrambler([](SplitMix64&) { return SingleQubitPtm(); }, 10, 0.1, 0), ConfigError);
}

TEST(single_qubit_ptm, validation) {
  Matrix4 bad = identity4();
  bad[0][1] = 0.5;
  ASSERT_THROW(SingleQubitPtm{bad}, ConfigError);
  Matrix4 shrink = identity4();
  shrink[1][1] = 0.5;
  ASSERT_NO_THROW(SingleQubitPtm{shrink});
  ASSERT_THROW(SingleQubitPtm(shrink, true), ConfigError);
  ASSERT_TRUE(SingleQubitPtm::from_unitary(rotation('X', 0.3)).is_orthogonal());
}
