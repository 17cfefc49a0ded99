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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "noisyprop/channels.hpp"
#include "noisyprop/circuit.hpp"
#include "noisyprop/pauli.hpp"

namespace noisyprop {

/// f(gamma) = Tr[P_0 rho]^2.
struct Variance {
  ProductState state;
};
/// f(gamma) = Tr[P_0 rho]^2 if |gamma| >= k, else 0.
struct TruncMse {
  std::size_t k = 0;
  ProductState state;
};
/// f(gamma) = 1 if |gamma| >= k, else 0.
struct TruncFrobenius {
  std::size_t k = 0;
};
using Functional = std::variant<Variance, TruncMse, TruncFrobenius>;

std::string functional_name(const Functional& f);

struct EstimateResult {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  /// False when distinct sampled paths of this circuit can have correlated
  /// amplitudes, in which case the mean is biased (see orthogonality_check).
  bool orthogonal_paths = true;
};

struct SecondMomentOutcome {
  PauliString pauli;
  double probability = 0.0;
};

/// Sampling rule for one primitive: outputs with probabilities proportional
/// to their mean squared transition amplitude, and the total of those
/// amplitudes (the factor the path weight K picks up).
struct SecondMomentStep {
  std::vector<SecondMomentOutcome> outcomes;
  double norm = 1.0;
};

/// Uniform-angle rotation about `generator` acting on `input` (same n).
SecondMomentStep second_moment_rotation(const PauliString& generator, const PauliString& input);
/// Fixed noise channel on a single-site input.
SecondMomentStep second_moment_noise(const NormalFormChannel& channel, Pauli input);
/// Uniformly random single-qubit Clifford on a single-site input.
SecondMomentStep second_moment_uniform_clifford(Pauli input);

struct OrthogonalityReport {
  /// Cross terms between distinct sampled paths vanish for TruncFrobenius.
  bool frobenius_ok = true;
  /// ... and also for the state functionals (Variance, TruncMse).
  bool state_ok = true;
  std::string reason;
};

/// Static check that the per-primitive path sampler is unbiased. A noise
/// site that maps one Pauli to several must be preceded (in time) on that
/// qubit by a twirl, i.e. uniform rotations about two different axes or a
/// uniform Clifford, before any other splitting noise reaches it.
OrthogonalityReport orthogonality_check(const Circuit& templ, const PauliSum& observable);

/// Monte Carlo estimate of E_C[sum_gamma Phi_gamma(C)^2 f(gamma)] over the
/// circuit ensemble. Sample i uses the RNG stream (seed, i); results do not
/// depend on `threads`.
EstimateResult estimate(const Circuit& templ, const PauliSum& observable, const Functional& f,
                        std::size_t samples, std::uint64_t seed, std::size_t threads = 1);

/// Same as estimate, with every sampled path scored by all functionals.
std::vector<EstimateResult> estimate_many(const Circuit& templ, const PauliSum& observable,
                                          std::span<const Functional> functionals,
                                          std::size_t samples, std::uint64_t seed,
                                          std::size_t threads = 1);

struct ValidationResult {
  EstimateResult mc;
  EstimateResult direct;
  bool agree = false;
};

/// Compares the path-sampling estimate with direct averaging over `circuits`
/// sampled circuits evaluated exactly. Requires n <= 4.
ValidationResult validate_estimator(const Circuit& templ, const PauliSum& observable,
                                    const Functional& f, std::size_t samples,
                                    std::size_t circuits, std::uint64_t seed,
                                    std::size_t threads = 1);

}  // namespace noisyprop
