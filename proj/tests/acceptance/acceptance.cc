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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "noisyprop/channels.hpp"
#include "noisyprop/circuit.hpp"
#include "noisyprop/montecarlo.hpp"
#include "noisyprop/oracle.hpp"
#include "noisyprop/propagation.hpp"
#include "support/dense_sim.hpp"

namespace {

using namespace noisyprop;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t worker_threads() { return std::max<std::size_t>(std::thread::hardware_concurrency(), 1); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

PauliSum z_at(std::size_t n, std::size_t q) { return PauliSum::from_pauli(PauliString::single(n, q, Pauli::Z)); }

Outcome ac1_oracle_equivalence() {
  SplitMix64 rng(20260101);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(4);
    const std::size_t depth = rng.below(7);
    const Circuit c = ref::random_circuit(n, depth, rng);
    const PauliSum o = ref::random_pauli_sum(n, 1 + rng.below(4), rng);
    const ProductState s = ref::random_product_state(n, rng);
    const double prop = expectation(backpropagate(c, o, TruncationConfig::exact()), s);
    worst = std::max({worst, std::abs(prop - simulate_exact(c, s, o)), std::abs(prop - ref::expectation(c, s, o))});
  }
  return {worst <= 1e-10, fmt("200 circuits, max |propagation - oracle| = %.3g (tol 1e-10)", worst)};
}

Outcome ac2_normal_form_arithmetic() {
  const PauliSum o = [] {
    PauliSum s(2);
    s.add(PauliString::from_string("ZZ"), 1.0);
    s.add(PauliString::from_string("IZ"), 1.0);
    s.add(PauliString::from_string("ZI"), 1.0);
    return s;
  }();
  double worst = 0.0;
  bool extra_terms = false;
  double ratio = 0.0;
  for (double q : {0.1, 0.5, 1.0}) {
    Circuit c(2);
    c.add_layer(Layer{{}, NoiseSpec(2, make_amplitude_damping(q))});
    const double zz = (1 - q) * (1 - q);
    const double z = 1 - q * q;
    const double id = 2 * q + q * q;
    for (const PauliSum& out : {backpropagate(c, o, {}).terms, heisenberg_exact(c, o)}) {
      worst = std::max({worst, std::abs(out.coeff(PauliString::from_string("ZZ")) - zz),
                        std::abs(out.coeff(PauliString::from_string("IZ")) - z),
                        std::abs(out.coeff(PauliString::from_string("ZI")) - z),
                        std::abs(out.coeff(PauliString::from_string("II")) - id)});
      for (const auto& [p, a] : out) {
        if (p.str() != "ZZ" && p.str() != "IZ" && p.str() != "ZI" && p.str() != "II" && a != 0.0) extra_terms = true;
      }
      if (q == 1.0) ratio = out.frobenius_norm_sq() / o.frobenius_norm_sq();
    }
  }
  const bool pass = worst <= 1e-15 && !extra_terms && std::abs(ratio - 3.0) <= 1e-12;
  return {pass, fmt("max coefficient error %.3g, Frobenius ratio at q=1 = %.15g", worst, ratio)};
}

Outcome ac3_contraction_coefficients() {
  double worst_ad = -1.0;
  double worst_deph = 0.0;
  for (int i = 1; i <= 19; ++i) {
    const double x = 0.05 * i;
    worst_ad = std::max(worst_ad, chi_sq_worstcase(make_amplitude_damping(x)) - (1 - x + x * x));
    const double expected = (1 + (1 - 2 * x) * (1 - 2 * x)) / 2;
    worst_deph = std::max(worst_deph, std::abs(chi_sq_mean(make_dephasing(x), Scrambler{0.25}) - expected));
  }
  const bool pass = worst_ad <= 0.0 && worst_deph <= 4 * std::numeric_limits<double>::epsilon();
  return {pass, fmt("max(worstcase - (1-g+g^2)) = %.3g, max |mean - (1+(1-2p)^2)/2| = %.3g", worst_ad, worst_deph)};
}

Outcome ac4_mse_bound() {
  const Lattice lattice = Lattice::square(3, 3, true);
  const PauliSum o = z_at(9, lattice.center());
  constexpr std::size_t kMaxK = 16;
  std::vector<Functional> fs;
  for (std::size_t k = 1; k <= kMaxK; ++k) fs.push_back(TruncFrobenius{k});

  struct Family {
    const char* name;
    std::function<NormalFormChannel(double)> make;
    std::function<double(double)> coefficient;
    std::vector<double> grid;
  };
  const std::vector<Family> families = {
      {"amplitude_damping", make_amplitude_damping, [](double g) { return 1 - g + g * g; }, {0.02, 0.05, 0.1, 0.2}},
      {"dephasing", make_dephasing, [](double p) { return (1 + (1 - 2 * p) * (1 - 2 * p)) / 2; },
       {0.02, 0.05, 0.1, 0.2, 0.3}},
  };
  int bound_fail = 0;
  int decay_fail = 0;
  int points = 0;
  std::uint64_t seed = 4000;
  for (const Family& fam : families) {
    for (double x : fam.grid) {
      const Circuit templ =
          build_hva(lattice, {fam.make(x)}, {}, 2, NoisePlacement::EveryBlock, /*final_rotations=*/true);
      const auto rs = estimate_many(templ, o, fs, 1000000, ++seed, worker_threads());
      std::printf("  AC4 %s %.2f:", fam.name, x);
      for (std::size_t i = 0; i < kMaxK; ++i) {
        const double bound = std::pow(fam.coefficient(x), static_cast<double>(i + 1));
        ++points;
        if (!rs[i].orthogonal_paths || rs[i].mean > bound + 3 * rs[i].standard_error) ++bound_fail;
        if (x >= 0.05 && i + 4 < kMaxK && rs[i + 4].mean > rs[i].mean / 2) ++decay_fail;
        std::printf(" %.4g", rs[i].mean);
      }
      std::printf("\n");
    }
  }
  return {bound_fail == 0 && decay_fail == 0,
          fmt("%g grid points, %g above (chi^2)^k + 3se, %g k -> k+4 pairs decaying by less than 2", points,
              bound_fail, decay_fail)};
}

Outcome ac5_unbiasedness() {
  struct Config {
    Lattice lattice;
    NormalFormChannel noise;
    std::size_t blocks;
    int functional;  // 0 Variance, 1 TruncMse, 2 TruncFrobenius
    std::size_t k;
  };
  const Lattice c2 = Lattice::chain(2, false);
  const Lattice c3 = Lattice::chain(3, false);
  const Lattice r3 = Lattice::chain(3, true);
  const std::vector<Config> configs = {
      {c2, make_amplitude_damping(0.1), 1, 0, 0},  {c2, make_amplitude_damping(0.3), 3, 1, 4},
      {c3, make_amplitude_damping(0.2), 3, 2, 4},  {c3, make_amplitude_damping(0.5), 2, 0, 0},
      {r3, make_amplitude_damping(0.15), 3, 1, 5}, {c3, make_amplitude_damping(0.05), 3, 1, 4},
      {r3, make_amplitude_damping(0.3), 3, 2, 5},  {c2, make_dephasing(0.1), 2, 0, 0},
      {c2, make_dephasing(0.3), 3, 2, 4},          {c3, make_dephasing(0.2), 3, 1, 5},
      {c3, make_dephasing(0.05), 1, 0, 0},         {r3, make_dephasing(0.25), 3, 2, 4},
      {r3, make_dephasing(0.4), 3, 1, 4},          {c2, make_depolarizing(0.1), 3, 1, 4},
      {c2, make_depolarizing(0.3), 3, 2, 4},       {c3, make_depolarizing(0.05), 2, 0, 0},
      {c3, make_depolarizing(0.2), 3, 2, 5},       {r3, make_depolarizing(0.1), 3, 1, 5},
      {r3, make_depolarizing(0.02), 1, 0, 0},      {c3, make_depolarizing(0.4), 2, 1, 2},
  };
  int passed = 0;
  std::uint64_t seed = 5000;
  for (const Config& cfg : configs) {
    const std::size_t n = cfg.lattice.num_qubits();
    const Circuit templ = build_hva(cfg.lattice, {cfg.noise}, {}, cfg.blocks, NoisePlacement::EveryBlock);
    const PauliSum o = z_at(n, cfg.lattice.center());
    SplitMix64 rng(++seed);
    const ProductState s = ref::random_product_state(n, rng);
    Functional f = TruncFrobenius{cfg.k};
    if (cfg.functional == 0) f = Variance{s};
    if (cfg.functional == 1) f = TruncMse{cfg.k, s};
    const auto v = validate_estimator(templ, o, f, 200000, 20000, seed, worker_threads());
    passed += v.agree ? 1 : 0;
    std::printf("  AC5 %s %.2f n=%zu blocks=%zu %s: mc %.5g +- %.2g, direct %.5g +- %.2g %s\n", cfg.noise.kind().c_str(),
                cfg.noise.param(), n, cfg.blocks, functional_name(f).c_str(), v.mc.mean, v.mc.standard_error,
                v.direct.mean, v.direct.standard_error, v.agree ? "agree" : "DISAGREE");
  }
  return {passed >= 19, fmt("%g/20 configurations agree within 4 combined standard errors (need 19)", passed)};
}

Outcome ac6_effective_depth() {
  const NormalFormChannel ad = make_amplitude_damping(0.3);
  const double contraction = chi_sq_worstcase(ad);  // (1 - p)^2
  const Lattice lattice = Lattice::chain(6, false);
  const Circuit templ = build_hva(lattice, {ad}, {}, 20, NoisePlacement::EveryBlock);
  const PauliSum o = z_at(6, lattice.center());
  const ProductState rho(std::vector<BlochVector>(6, BlochVector{0, 0, -1}));
  const ProductState sigma = ProductState::zeros(6);
  constexpr int kCircuits = 200;
  std::vector<Circuit> circuits;
  for (int i = 0; i < kCircuits; ++i) circuits.push_back(sample_circuit(templ, 6000 + i));
  bool pass = true;
  std::string detail;
  for (std::size_t j : {2, 4, 6, 8}) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (const Circuit& c : circuits) {
      const double gap = simulate_exact(c, rho, o) - simulate_exact(truncate_to_last_layers(c, j), sigma, o);
      s1 += gap * gap;
      s2 += gap * gap * gap * gap;
    }
    const double mean = s1 / kCircuits;
    const double se = std::sqrt(std::max(s2 / kCircuits - mean * mean, 0.0) / (kCircuits - 1));
    const double bound = 4 * std::pow(contraction, static_cast<double>(j)) * o.frobenius_norm_sq();
    pass = pass && mean <= bound + 3 * se;
    detail += fmt("j=%g: %.3g<=%.3g ", static_cast<double>(j), mean, bound);
  }
  return {pass, detail + fmt("(L=20, 1-p=%.4f)", std::sqrt(contraction))};
}

Outcome ac7_barren_plateau_absence() {
  const Lattice lattice = Lattice::chain(20, false);
  const PauliSum o = z_at(20, lattice.center());
  const Functional f = Variance{ProductState::zeros(20)};
  auto run = [&](const NormalFormChannel& ch, std::size_t depth, std::uint64_t seed) {
    return estimate(build_hva(lattice, {ch}, {}, depth, NoisePlacement::EveryBlock), o, f, 100000, seed,
                    worker_threads());
  };
  const EstimateResult control = run(make_depolarizing(0.1), 40, 7040);
  const double ceiling = control.mean + 3 * control.standard_error;
  bool pass = control.orthogonal_paths;
  std::string detail = fmt("depolarizing(0.1) control at depth 40: %.3g; ", control.mean);
  for (double g : {0.1, 0.3}) {
    detail += fmt("AD %.1f:", g);
    for (std::size_t d : {5, 10, 20, 40}) {
      const EstimateResult r = run(make_amplitude_damping(g), d, 7000 + d + static_cast<std::uint64_t>(g * 100));
      pass = pass && r.orthogonal_paths && r.mean - 3 * r.standard_error > ceiling;
      detail += fmt(" %.3g", r.mean);
    }
    detail += "; ";
  }
  return {pass, detail};
}

Outcome ac8_dynamics_convergence() {
  constexpr double kJ = 3.004438;
  constexpr double kH = 1.0;
  constexpr double kDt = 0.04;
  const NoiseSpec noise{make_amplitude_damping(0.1)};
  auto trunc = [](std::size_t k) {
    TruncationConfig t = TruncationConfig::weight(k);
    t.coeff_cutoff = std::ldexp(1.0, -23);
    t.xy_cutoff = 5;
    t.per_moment_cutoffs = true;
    return t;
  };
  auto series = [&](const Lattice& lattice, std::size_t last_step, std::size_t k) {
    std::vector<double> v;
    const PauliSum o = z_at(lattice.num_qubits(), lattice.center());
    for (std::size_t s = 0; s <= last_step; ++s) {
      const Circuit c = build_trotter_tfim(lattice, kJ, kH, kDt, s, noise, NoisePlacement::EveryBlock);
      v.push_back(expectation(backpropagate(c, o, trunc(k), worker_threads()), ProductState::zeros(lattice.num_qubits())));
    }
    return v;
  };
  // t <= 0.2 is the first five of the ten steps.
  const Lattice big = Lattice::square(4, 4, true);
  const auto a = series(big, 5, 15);
  const auto b = series(big, 5, 20);
  double big_gap = 0.0;
  std::printf("  AC8 4x4 t, k=15, k=20:");
  for (std::size_t s = 0; s < a.size(); ++s) {
    big_gap = std::max(big_gap, std::abs(a[s] - b[s]));
    std::printf(" (%.2f, %.5f, %.5f)", kDt * static_cast<double>(s), a[s], b[s]);
  }
  std::printf("\n");

  // Same window on the 2x2 torus against the dense oracle. Later times are
  // printed for reference only.
  const Lattice small = Lattice::square(2, 2, true);
  const auto sa = series(small, 10, 15);
  const auto sb = series(small, 10, 20);
  double small_gap = 0.0;
  const PauliSum o = z_at(4, small.center());
  std::printf("  AC8 2x2 t, |k=15 - oracle|, |k=20 - oracle|:");
  for (std::size_t s = 0; s <= 10; ++s) {
    const Circuit c = build_trotter_tfim(small, kJ, kH, kDt, s, noise, NoisePlacement::EveryBlock);
    const double exact = simulate_exact(c, ProductState::zeros(4), o);
    if (s < a.size()) small_gap = std::max({small_gap, std::abs(sa[s] - exact), std::abs(sb[s] - exact)});
    std::printf(" (%.2f, %.2g, %.2g)", kDt * static_cast<double>(s), std::abs(sa[s] - exact), std::abs(sb[s] - exact));
  }
  std::printf("\n");
  return {big_gap <= 0.02 && small_gap <= 0.01,
          fmt("4x4 max |k15 - k20| for t<=0.2 = %.3g (tol 0.02); 2x2 max |k - oracle| for t<=0.2 = %.3g (tol 0.01)", big_gap,
              small_gap)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"AC1", "oracle equivalence", ac1_oracle_equivalence},
      {"AC2", "normal-form arithmetic", ac2_normal_form_arithmetic},
      {"AC3", "contraction coefficients", ac3_contraction_coefficients},
      {"AC4", "truncation MSE bound", ac4_mse_bound},
      {"AC5", "Monte Carlo unbiasedness", ac5_unbiasedness},
      {"AC6", "effective depth", ac6_effective_depth},
      {"AC7", "barren-plateau absence", ac7_barren_plateau_absence},
      {"AC8", "dynamics convergence", ac8_dynamics_convergence},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s %s: %s [%.1fs]\n", c.id, out.pass ? "PASS" : "FAIL", c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
