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

#include "noisyprop/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "compiled_layer.hpp"
#include "noisyprop/errors.hpp"
#include "noisyprop/oracle.hpp"
#include "noisyprop/propagation.hpp"
#include "noisyprop/rng.hpp"

namespace noisyprop {

using detail::CompiledClifford;
using detail::CompiledLayer;
using detail::CompiledRotation;

std::string functional_name(const Functional& f) {
  switch (f.index()) {
    case 0: return "variance";
    case 1: return "trunc_mse";
    default: return "trunc_frobenius";
  }
}

SecondMomentStep second_moment_rotation(const PauliString& generator, const PauliString& input) {
  if (generator.num_qubits() != input.num_qubits()) throw ConfigError("generator and input sizes differ");
  SecondMomentStep step;
  if (commutes(generator, input)) {
    step.outcomes.push_back({input, 1.0});
    return step;
  }
  PauliString folded = input;
  detail::fold_rotation_branch(generator, folded);
  step.outcomes.push_back({input, 0.5});
  step.outcomes.push_back({std::move(folded), 0.5});
  return step;
}

SecondMomentStep second_moment_noise(const NormalFormChannel& channel, Pauli input) {
  const auto& row = channel.forward_ptm()[static_cast<int>(input)];
  SecondMomentStep step;
  step.norm = 0.0;
  for (int b = 0; b < 4; ++b) step.norm += row[b] * row[b];
  if (step.norm == 0.0) return step;
  for (int b = 0; b < 4; ++b) {
    if (row[b] == 0.0) continue;
    step.outcomes.push_back({PauliString::single(1, 0, static_cast<Pauli>(b)), row[b] * row[b] / step.norm});
  }
  return step;
}

SecondMomentStep second_moment_uniform_clifford(Pauli input) {
  SecondMomentStep step;
  if (input == Pauli::I) {
    step.outcomes.push_back({PauliString(1), 1.0});
    return step;
  }
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
    step.outcomes.push_back({PauliString::single(1, 0, p), 1.0 / 3.0});
  }
  return step;
}

namespace {

bool splits(const NormalFormChannel& ch) {
  for (int a = 1; a < 4; ++a) {
    int nonzero = 0;
    for (int b = 0; b < 4; ++b) nonzero += ch.forward_ptm()[a][b] != 0.0;
    if (nonzero > 1) return true;
  }
  return false;
}

struct NoiseTable {
  std::array<std::array<double, 4>, 4> cumulative{};
  std::array<double, 4> norm{};
};

NoiseTable noise_table(const NormalFormChannel& ch) {
  NoiseTable t;
  for (int a = 1; a < 4; ++a) {
    const SecondMomentStep step = second_moment_noise(ch, static_cast<Pauli>(a));
    t.norm[a] = step.norm;
    double acc = 0.0;
    std::size_t next = 0;
    for (int b = 0; b < 4; ++b) {
      if (next < step.outcomes.size() && step.outcomes[next].pauli.get(0) == static_cast<Pauli>(b)) {
        acc += step.outcomes[next++].probability;
      }
      t.cumulative[a][b] = acc;
    }
    t.cumulative[a][3] = 1.0;
  }
  return t;
}

struct SamplerLayer {
  CompiledLayer layer;
  std::vector<int> table_of;  // per qubit: index into tables, -1 for identity
  std::vector<NoiseTable> tables;
};

SamplerLayer sampler_layer(const Layer& layer, std::size_t n) {
  SamplerLayer s{detail::compile_layer(layer, n), {}, {}};
  for (const auto& moment : s.layer.moments) {
    for (const auto& gate : moment) {
      const auto* r = std::get_if<CompiledRotation>(&gate);
      if (r != nullptr && !r->uniform && r->cos != 0.0 && r->sin != 0.0) {
        throw UnsupportedError(
            "path sampling needs uniform-angle rotations; fixed non-Clifford angles are not supported");
      }
    }
  }
  if (s.layer.noisy) {
    s.table_of.assign(n, -1);
    for (std::size_t q = 0; q < n; ++q) {
      if (s.layer.noise[q] == nullptr) continue;
      s.table_of[q] = static_cast<int>(s.tables.size());
      s.tables.push_back(noise_table(*s.layer.noise[q]));
    }
  }
  return s;
}

struct Sampler {
  std::size_t n = 0;
  std::vector<SamplerLayer> layers;
  std::optional<SamplerLayer> prefix;
  std::vector<std::pair<PauliString, double>> terms;
  std::vector<double> cumulative;
  double norm_sq = 0.0;
};

Sampler make_sampler(const Circuit& templ, const PauliSum& observable) {
  if (observable.empty()) throw ConfigError("observable is empty");
  if (observable.num_qubits() != templ.num_qubits()) throw ConfigError("observable size does not match the circuit");
  Sampler s;
  s.n = templ.num_qubits();
  for (const Layer& l : templ.layers()) s.layers.push_back(sampler_layer(l, s.n));
  if (templ.final_layer()) s.prefix = sampler_layer(*templ.final_layer(), s.n);
  s.terms = observable.sorted_terms();
  for (const auto& [p, a] : s.terms) {
    s.norm_sq += a * a;
    s.cumulative.push_back(s.norm_sq);
  }
  for (double& c : s.cumulative) c /= s.norm_sq;
  s.cumulative.back() = 1.0;
  return s;
}

void walk_moments(const CompiledLayer& layer, PauliString& p, SplitMix64& rng) {
  for (auto m = layer.moments.rbegin(); m != layer.moments.rend(); ++m) {
    for (const auto& gate : *m) {
      if (const auto* cl = std::get_if<CompiledClifford>(&gate)) {
        if (!cl->uniform) {
          detail::apply_clifford_adjoint(*cl, p);
          continue;
        }
        const std::size_t q = cl->support.front();
        if (p.get(q) != Pauli::I) p.set(q, static_cast<Pauli>(1 + rng.below(3)));
        continue;
      }
      const auto& rot = std::get<CompiledRotation>(gate);
      if (commutes(p, rot.generator)) continue;
      const bool fold = rot.uniform ? (rng.next() >> 63) != 0 : rot.cos == 0.0;
      if (fold) detail::fold_rotation_branch(rot.generator, p);
    }
  }
}

/// Noise on every support site; returns the product of row norms.
double walk_noise(const SamplerLayer& s, PauliString& p, SplitMix64& rng) {
  if (!s.layer.noisy) return 1.0;
  double k = 1.0;
  const PauliString origin = p;
  detail::for_each_support_site(origin, [&](std::size_t q) {
    const int t = s.table_of[q];
    if (t < 0 || k == 0.0) return;
    const NoiseTable& table = s.tables[static_cast<std::size_t>(t)];
    const int a = static_cast<int>(origin.get(q));
    k *= table.norm[a];
    if (k == 0.0) return;
    const double u = rng.uniform();
    int b = 0;
    while (b < 3 && u >= table.cumulative[a][b]) ++b;
    p.set(q, static_cast<Pauli>(b));
  });
  return k;
}

struct PathSample {
  PauliString p0;
  std::size_t weight = 0;
  double k = 0.0;  // ||O||^2 times the product of norm contributions
};

PathSample sample_path(const Sampler& s, SplitMix64& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(s.cumulative.begin(), s.cumulative.end(), u);
  const std::size_t idx = std::min<std::size_t>(it - s.cumulative.begin(), s.terms.size() - 1);
  PathSample out{s.terms[idx].first, 0, s.norm_sq};
  PauliString& p = out.p0;
  const std::size_t depth = s.layers.size();
  if (depth == 0) {
    if (s.prefix) walk_moments(s.prefix->layer, p, rng);
    return out;
  }
  out.weight = p.weight();
  for (std::size_t j = depth; j >= 1; --j) {
    if (j == depth && s.prefix) walk_moments(s.prefix->layer, p, rng);
    const SamplerLayer& layer = s.layers[j - 1];
    out.k *= walk_noise(layer, p, rng);
    if (out.k == 0.0) return out;
    walk_moments(layer.layer, p, rng);
    if (j >= 2) out.weight += p.weight();
  }
  return out;
}

double score(const Functional& f, const PathSample& path) {
  return std::visit(
      [&](const auto& fn) -> double {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, Variance>) {
          const double v = fn.state.overlap(path.p0);
          return v * v;
        } else if constexpr (std::is_same_v<T, TruncMse>) {
          if (path.weight < fn.k) return 0.0;
          const double v = fn.state.overlap(path.p0);
          return v * v;
        } else {
          return path.weight >= fn.k ? 1.0 : 0.0;
        }
      },
      f);
}

void check_functional(const Functional& f, std::size_t n) {
  const ProductState* state = nullptr;
  if (const auto* v = std::get_if<Variance>(&f)) state = &v->state;
  if (const auto* m = std::get_if<TruncMse>(&f)) state = &m->state;
  if (state != nullptr && state->num_qubits() != n) throw ConfigError("state size does not match the circuit");
}

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * o.count / total;
    m2 += o.m2 + delta * delta * count * o.count / total;
    count = total;
  }
};

constexpr std::size_t kBlock = 1024;

bool orthogonal_for(const OrthogonalityReport& r, const Functional& f) {
  return std::holds_alternative<TruncFrobenius>(f) ? r.frobenius_ok : r.state_ok;
}

}  // namespace

OrthogonalityReport orthogonality_check(const Circuit& templ, const PauliSum& observable) {
  const std::size_t n = templ.num_qubits();
  std::vector<bool> pending(n, false);
  std::vector<unsigned> axes(n, 0);
  OrthogonalityReport report;
  auto fail = [&](std::string why) {
    if (report.frobenius_ok) report.reason = std::move(why);
    report.frobenius_ok = false;
    report.state_ok = false;
  };
  if (observable.size() > 1) {
    for (const auto& [p, a] : observable) {
      for (std::size_t q = 0; q < n; ++q) pending[q] = pending[q] || p.get(q) != Pauli::I;
    }
  }

  auto gates = [&](const Layer& layer) {
    for (auto m = layer.moments.rbegin(); m != layer.moments.rend(); ++m) {
      for (const auto& gate : *m) {
        const auto& support = gate_support(gate);
        if (const auto* r = std::get_if<PauliRotation>(&gate); r && r->uniform) {
          if (support.size() == 1 && pending[support[0]]) {
            auto& seen = axes[support[0]];
            seen |= 1U << static_cast<unsigned>(r->generator.get(0));
            if (std::popcount(seen) >= 2) {
              pending[support[0]] = false;
              seen = 0;
            }
          }
          continue;
        }
        if (const auto* c = std::get_if<CliffordGate>(&gate); c && c->uniform) {
          pending[support[0]] = false;
          axes[support[0]] = 0;
          continue;
        }
        // Fixed Clifford action: moves differences between paths around.
        const bool touched = std::any_of(support.begin(), support.end(), [&](std::size_t q) { return pending[q]; });
        if (!touched) continue;
        for (std::size_t q : support) {
          pending[q] = true;
          axes[q] = 0;
        }
      }
    }
  };
  auto noise = [&](const Layer& layer, std::size_t index) {
    for (std::size_t q = 0; q < layer.noise.size(); ++q) {
      if (!splits(layer.noise[q])) continue;
      if (pending[q]) {
        fail("splitting noise on qubit " + std::to_string(q) + " in layer " + std::to_string(index) +
             " is not separated from the next splitting noise by a twirl");
      }
      pending[q] = true;
      axes[q] = 0;
    }
  };

  if (templ.final_layer()) gates(*templ.final_layer());
  for (std::size_t j = templ.depth(); j >= 1; --j) {
    noise(templ.layers()[j - 1], j);
    gates(templ.layers()[j - 1]);
  }
  if (report.state_ok && std::find(pending.begin(), pending.end(), true) != pending.end()) {
    report.state_ok = false;
    report.reason = "paths can still differ at the input state; state functionals are biased";
  }
  return report;
}

std::vector<EstimateResult> estimate_many(const Circuit& templ, const PauliSum& observable,
                                          std::span<const Functional> functionals,
                                          std::size_t samples, std::uint64_t seed,
                                          std::size_t threads) {
  const Sampler sampler = make_sampler(templ, observable);
  for (const auto& f : functionals) check_functional(f, sampler.n);
  const OrthogonalityReport ortho = orthogonality_check(templ, observable);
  const std::size_t nf = functionals.size();
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::vector<Moments>> per_block(blocks, std::vector<Moments>(nf));
  std::atomic<std::size_t> next_block{0};
  const double bound = sampler.norm_sq * (1.0 + 1e-9);

  auto worker = [&] {
    for (std::size_t b = next_block++; b < blocks; b = next_block++) {
      auto& acc = per_block[b];
      const std::size_t end = std::min(samples, (b + 1) * kBlock);
      for (std::size_t i = b * kBlock; i < end; ++i) {
        SplitMix64 rng = SplitMix64::stream(seed, i);
        const PathSample path = sample_path(sampler, rng);
        for (std::size_t fi = 0; fi < nf; ++fi) {
          const double lambda = path.k == 0.0 ? 0.0 : path.k * score(functionals[fi], path);
          if (!(lambda >= 0.0 && lambda <= bound)) {
            throw NumericError("path sample outside [0, ||O||_F^2]: " + std::to_string(lambda));
          }
          acc[fi].add(lambda);
        }
      }
    }
  };

  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(blocks, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          worker();
        } catch (...) {
          errors[t] = std::current_exception();
          next_block = blocks;
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<EstimateResult> out(nf);
  for (std::size_t fi = 0; fi < nf; ++fi) {
    Moments total;
    for (const auto& block : per_block) total.merge(block[fi]);
    EstimateResult& r = out[fi];
    r.mean = total.mean;
    r.samples = samples;
    r.seed = seed;
    r.standard_error = samples > 1 ? std::sqrt(total.m2 / (total.count - 1.0) / total.count) : 0.0;
    r.orthogonal_paths = orthogonal_for(ortho, functionals[fi]);
  }
  return out;
}

EstimateResult estimate(const Circuit& templ, const PauliSum& observable, const Functional& f,
                        std::size_t samples, std::uint64_t seed, std::size_t threads) {
  return estimate_many(templ, observable, std::span<const Functional>(&f, 1), samples, seed, threads)
      .front();
}

namespace {

double frobenius_distance_sq(const PauliSum& a, const PauliSum& b) {
  PauliSum diff = a;
  for (const auto& [p, c] : b.sorted_terms()) diff.add(p, -c);
  return diff.frobenius_norm_sq();
}

double direct_value(const Circuit& c, const PauliSum& observable, const Functional& f) {
  return std::visit(
      [&](const auto& fn) -> double {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, Variance>) {
          const double v = simulate_exact(c, fn.state, observable);
          return v * v;
        } else if constexpr (std::is_same_v<T, TruncMse>) {
          const double exact = simulate_exact(c, fn.state, observable);
          const double cut = expectation(backpropagate(c, observable, TruncationConfig::weight(fn.k)), fn.state);
          return (exact - cut) * (exact - cut);
        } else {
          const PauliSum exact = heisenberg_exact(c, observable);
          const PauliSum cut = backpropagate(c, observable, TruncationConfig::weight(fn.k)).terms;
          return frobenius_distance_sq(exact, cut);
        }
      },
      f);
}

}  // namespace

ValidationResult validate_estimator(const Circuit& templ, const PauliSum& observable,
                                    const Functional& f, std::size_t samples,
                                    std::size_t circuits, std::uint64_t seed,
                                    std::size_t threads) {
  constexpr std::size_t kMaxQubits = 4;
  if (templ.num_qubits() > kMaxQubits) {
    throw InfeasibleSizeError("validate_estimator supports at most 4 qubits");
  }
  ValidationResult out;
  out.mc = estimate(templ, observable, f, samples, seed, threads);

  Moments direct;
  for (std::size_t i = 0; i < circuits; ++i) {
    const std::uint64_t circuit_seed = SplitMix64::stream(seed ^ 0x5851f42d4c957f2dULL, i).next();
    direct.add(direct_value(sample_circuit(templ, circuit_seed), observable, f));
  }
  out.direct.mean = direct.mean;
  out.direct.samples = circuits;
  out.direct.seed = seed;
  out.direct.standard_error = circuits > 1 ? std::sqrt(direct.m2 / (direct.count - 1.0) / direct.count) : 0.0;

  const double combined = std::hypot(out.mc.standard_error, out.direct.standard_error);
  out.agree = std::abs(out.mc.mean - out.direct.mean) <= std::max(4.0 * combined, 1e-12);
  return out;
}

}  // namespace noisyprop
