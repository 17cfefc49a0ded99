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

#include "noisyprop/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "compiled_layer.hpp"
#include "noisyprop/errors.hpp"

namespace noisyprop {

namespace {

using detail::CompiledClifford;
using detail::CompiledLayer;
using detail::CompiledRotation;

constexpr std::size_t kBlockTerms = 4096;

struct Branch {
  PauliString p;
  double c;
};

struct Term {
  PauliString p;
  std::uint32_t w;
  double c;
  std::uint64_t count;
};

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}

void merge_by_pauli(std::vector<Branch>& v) {
  if (v.size() < 2) return;
  std::sort(v.begin(), v.end(), [](const Branch& a, const Branch& b) { return a.p < b.p; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < v.size();) {
    Branch acc = std::move(v[i]);
    std::size_t j = i + 1;
    for (; j < v.size() && v[j].p == acc.p; ++j) acc.c += v[j].c;
    if (acc.c != 0.0) v[out++] = std::move(acc);
    i = j;
  }
  v.resize(out);
}

void apply_noise(const CompiledLayer& layer, std::vector<Branch>& cur, std::vector<Branch>& next) {
  if (!layer.noisy) return;
  // All branches share the support of the incoming Pauli; sites are expanded
  // one at a time.
  const PauliString origin = cur.front().p;
  detail::for_each_support_site(origin, [&](std::size_t q) {
    const NormalFormChannel* ch = layer.noise[q];
    if (ch == nullptr) return;
    const auto& row = ch->forward_ptm()[static_cast<int>(origin.get(q))];
    next.clear();
    for (const Branch& br : cur) {
      for (int b = 0; b < 4; ++b) {
        if (row[b] == 0.0) continue;
        Branch nb = br;
        nb.p.set(q, static_cast<Pauli>(b));
        nb.c *= row[b];
        next.push_back(std::move(nb));
      }
    }
    cur.swap(next);
  });
}

/// Heuristic cutoffs applied to the branches of one term after each moment.
struct MomentFilter {
  const TruncationConfig& trunc;
  std::uint64_t by_coeff = 0;
  std::uint64_t by_xy = 0;
  std::uint64_t by_current_weight = 0;

  void apply(std::vector<Branch>& v) {
    std::size_t out = 0;
    for (Branch& br : v) {
      if (std::abs(br.c) < trunc.coeff_cutoff) {
        ++by_coeff;
      } else if (trunc.xy_cutoff && br.p.xy_count() > *trunc.xy_cutoff) {
        ++by_xy;
      } else if (trunc.current_weight_cutoff && br.p.weight() > *trunc.current_weight_cutoff) {
        ++by_current_weight;
      } else {
        v[out++] = std::move(br);
      }
    }
    v.resize(out);
  }
};

void apply_moments(const CompiledLayer& layer, std::vector<Branch>& cur, std::vector<Branch>& next,
                   MomentFilter* filter = nullptr) {
  for (auto m = layer.moments.rbegin(); m != layer.moments.rend(); ++m) {
    bool branched = false;
    for (const auto& gate : *m) {
      if (const auto* cl = std::get_if<CompiledClifford>(&gate)) {
        for (Branch& br : cur) br.c *= detail::apply_clifford_adjoint(*cl, br.p);
        continue;
      }
      const auto& rot = std::get<CompiledRotation>(gate);
      if (rot.uniform) throw ConfigError("circuit has unsampled random gates; call sample_circuit first");
      next.clear();
      for (Branch& br : cur) {
        if (commutes(br.p, rot.generator)) {
          next.push_back(std::move(br));
          continue;
        }
        if (rot.cos != 0.0) next.push_back({br.p, br.c * rot.cos});
        if (rot.sin != 0.0) {
          const double sign = detail::fold_rotation_branch(rot.generator, br.p);
          next.push_back({std::move(br.p), br.c * rot.sin * sign});
        }
        branched = true;
      }
      cur.swap(next);
    }
    if (branched) merge_by_pauli(cur);
    if (filter != nullptr) filter->apply(cur);
  }
}

/// Adjoint of one layer (with an optional noiseless prefix layer applied
/// first) on a single term. Output is merged by Pauli; exact zeros dropped.
void expand_layer(const CompiledLayer* prefix, const CompiledLayer& layer, const PauliString& p,
                  double c, std::vector<Branch>& cur, std::vector<Branch>& scratch,
                  MomentFilter* filter = nullptr) {
  cur.clear();
  cur.push_back({p, c});
  if (prefix != nullptr) apply_moments(*prefix, cur, scratch, filter);
  if (layer.noisy) {
    // Noise acts on each distinct incoming Pauli separately.
    std::vector<Branch> incoming;
    incoming.swap(cur);
    for (Branch& in : incoming) {
      std::vector<Branch> part{std::move(in)};
      apply_noise(layer, part, scratch);
      for (Branch& b : part) cur.push_back(std::move(b));
    }
  }
  apply_moments(layer, cur, scratch, filter);
  merge_by_pauli(cur);
}

struct Prepared {
  std::vector<CompiledLayer> layers;  // index 0 is layer 1
  std::optional<CompiledLayer> final_layer;
};

Prepared prepare(const Circuit& circuit, const PauliSum& observable) {
  if (observable.empty()) throw ConfigError("observable is empty");
  if (observable.num_qubits() != circuit.num_qubits()) {
    throw ConfigError("observable acts on " + std::to_string(observable.num_qubits()) +
                      " qubits, circuit on " + std::to_string(circuit.num_qubits()));
  }
  Prepared p;
  for (const Layer& l : circuit.layers()) {
    p.layers.push_back(detail::compile_layer(l, circuit.num_qubits()));
  }
  if (circuit.final_layer()) {
    p.final_layer = detail::compile_layer(*circuit.final_layer(), circuit.num_qubits());
  }
  return p;
}

struct WorkerOutput {
  std::vector<Term> terms;
  std::uint64_t discarded_by_weight = 0;
  std::uint64_t discarded_by_coeff = 0;
  std::uint64_t discarded_by_xy = 0;
  std::uint64_t discarded_by_current_weight = 0;
};

void expand_chunk(const std::vector<Term>& frontier, std::size_t begin, std::size_t end,
                  const CompiledLayer* prefix, const CompiledLayer& layer, bool add_weight,
                  const TruncationConfig& trunc, WorkerOutput& out) {
  const auto k = trunc.path_weight_cutoff;
  const auto max_terms = trunc.max_terms;
  std::vector<Branch> cur;
  std::vector<Branch> scratch;
  MomentFilter filter{trunc};
  MomentFilter* per_moment = trunc.per_moment_cutoffs ? &filter : nullptr;
  for (std::size_t i = begin; i < end; ++i) {
    const Term& t = frontier[i];
    expand_layer(prefix, layer, t.p, t.c, cur, scratch, per_moment);
    for (Branch& child : cur) {
      const std::size_t w = t.w + (add_weight ? child.p.weight() : 0);
      if (k && w >= *k) {
        ++out.discarded_by_weight;
        continue;
      }
      out.terms.push_back({std::move(child.p), static_cast<std::uint32_t>(w), child.c, t.count});
    }
    if (max_terms && out.terms.size() > *max_terms) {
      throw InfeasibleSizeError("term count exceeded max_terms = " + std::to_string(*max_terms));
    }
  }
  out.discarded_by_coeff = filter.by_coeff;
  out.discarded_by_xy = filter.by_xy;
  out.discarded_by_current_weight = filter.by_current_weight;
}

std::vector<Term> merge_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    if (a.w != b.w) return a.w < b.w;
    return a.p < b.p;
  });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size();) {
    Term acc = std::move(terms[i]);
    std::size_t j = i + 1;
    for (; j < terms.size() && terms[j].w == acc.w && terms[j].p == acc.p; ++j) {
      acc.c += terms[j].c;
      acc.count = sat_add(acc.count, terms[j].count);
    }
    terms[out++] = std::move(acc);
    i = j;
  }
  terms.resize(out);
  return terms;
}

/// Merges two lists sorted and deduplicated by (w, p).
std::vector<Term> merge_sorted(std::vector<Term> a, std::vector<Term> b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  auto less = [](const Term& x, const Term& y) { return x.w != y.w ? x.w < y.w : x.p < y.p; };
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (less(a[i], b[j])) {
      out.push_back(std::move(a[i++]));
    } else if (less(b[j], a[i])) {
      out.push_back(std::move(b[j++]));
    } else {
      Term t = std::move(a[i++]);
      t.c += b[j].c;
      t.count = sat_add(t.count, b[j].count);
      ++j;
      out.push_back(std::move(t));
    }
  }
  for (; i < a.size(); ++i) out.push_back(std::move(a[i]));
  for (; j < b.size(); ++j) out.push_back(std::move(b[j]));
  return out;
}

}  // namespace

BackpropResult backpropagate(const Circuit& circuit, const PauliSum& observable,
                             const TruncationConfig& trunc, std::size_t threads) {
  const Prepared prep = prepare(circuit, observable);
  const auto k = trunc.path_weight_cutoff;
  const std::size_t depth = prep.layers.size();
  threads = std::max<std::size_t>(threads, 1);

  BackpropResult result;
  auto& stats = result.stats;

  std::vector<Term> frontier;
  for (const auto& [p, c] : observable.sorted_terms()) {
    const std::size_t w = depth >= 1 ? p.weight() : 0;
    if (k && w >= *k) {
      ++stats.paths_discarded_by_weight;
      continue;
    }
    frontier.push_back({p, static_cast<std::uint32_t>(w), c, 1});
  }
  stats.peak_term_count = frontier.size();

  const CompiledLayer empty_layer;
  auto run_layer = [&](const CompiledLayer* prefix, const CompiledLayer& layer, bool add_weight) {
    // Fixed-size blocks of the frontier are expanded and merged (in parallel)
    // and then folded into the result in block order, so the summation order
    // and hence the result do not depend on the thread count.
    const std::size_t blocks = (frontier.size() + kBlockTerms - 1) / kBlockTerms;
    // Binary-counter merge of the block results: runs of equal level combine,
    // older run first.
    std::vector<std::pair<std::size_t, std::vector<Term>>> runs;
    std::size_t held = 0;
    std::vector<WorkerOutput> outputs;
    for (std::size_t first = 0; first < blocks; first += threads) {
      const std::size_t wave = std::min(threads, blocks - first);
      outputs.assign(wave, WorkerOutput{});
      auto work = [&](std::size_t b) {
        const std::size_t begin = (first + b) * kBlockTerms;
        expand_chunk(frontier, begin, std::min(begin + kBlockTerms, frontier.size()), prefix, layer, add_weight,
                     trunc, outputs[b]);
        outputs[b].terms = merge_terms(std::move(outputs[b].terms));
      };
      if (wave == 1) {
        work(0);
      } else {
        std::vector<std::exception_ptr> errors(wave);
        std::vector<std::thread> pool;
        for (std::size_t b = 0; b < wave; ++b) {
          pool.emplace_back([&, b] {
            try {
              work(b);
            } catch (...) {
              errors[b] = std::current_exception();
            }
          });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
          if (e) std::rethrow_exception(e);
        }
      }
      for (auto& o : outputs) {
        stats.paths_discarded_by_weight = sat_add(stats.paths_discarded_by_weight, o.discarded_by_weight);
        stats.paths_discarded_by_coeff = sat_add(stats.paths_discarded_by_coeff, o.discarded_by_coeff);
        stats.paths_discarded_by_xy = sat_add(stats.paths_discarded_by_xy, o.discarded_by_xy);
        stats.paths_discarded_by_current_weight =
            sat_add(stats.paths_discarded_by_current_weight, o.discarded_by_current_weight);
        held += o.terms.size();
        runs.emplace_back(0, std::move(o.terms));
        while (runs.size() >= 2 && runs[runs.size() - 2].first == runs.back().first) {
          auto top = std::move(runs.back());
          runs.pop_back();
          auto& below = runs.back();
          held -= below.second.size() + top.second.size();
          below.second = merge_sorted(std::move(below.second), std::move(top.second));
          held += below.second.size();
          ++below.first;
        }
        if (trunc.max_terms && held > *trunc.max_terms) {
          throw InfeasibleSizeError("term count exceeded max_terms = " + std::to_string(*trunc.max_terms));
        }
      }
    }
    std::vector<Term> acc;
    for (auto& run : runs) acc = merge_sorted(std::move(acc), std::move(run.second));
    frontier = std::move(acc);

    std::size_t out = 0;
    for (Term& t : frontier) {
      if (std::abs(t.c) < trunc.coeff_cutoff) {
        ++stats.paths_discarded_by_coeff;
      } else if (trunc.xy_cutoff && t.p.xy_count() > *trunc.xy_cutoff) {
        ++stats.paths_discarded_by_xy;
      } else if (trunc.current_weight_cutoff && t.p.weight() > *trunc.current_weight_cutoff) {
        ++stats.paths_discarded_by_current_weight;
      } else {
        frontier[out++] = std::move(t);
      }
    }
    frontier.resize(out);
    stats.peak_term_count = std::max(stats.peak_term_count, frontier.size());
  };

  const CompiledLayer* prefix = prep.final_layer ? &*prep.final_layer : nullptr;
  if (depth == 0) {
    if (prefix != nullptr) run_layer(nullptr, *prefix, false);
  } else {
    for (std::size_t j = depth; j >= 1; --j) {
      // P_{j-1} adds to the path weight unless it is P_0.
      run_layer(j == depth ? prefix : nullptr, prep.layers[j - 1], j >= 2);
    }
  }

  result.terms = PauliSum(circuit.num_qubits());
  for (const Term& t : frontier) {
    if (!std::isfinite(t.c)) throw NumericError("non-finite coefficient during propagation");
    result.terms.add(t.p, t.c);
    stats.surviving_path_count = sat_add(stats.surviving_path_count, t.count);
  }
  return result;
}

double expectation(const BackpropResult& result, const ProductState& state) {
  return expectation_product_state(result.terms, state);
}

std::uint64_t count_legal_paths(const Circuit& circuit, const PauliSum& observable,
                                std::optional<std::size_t> k) {
  TruncationConfig t;
  t.path_weight_cutoff = k;
  return backpropagate(circuit, observable, t).stats.surviving_path_count;
}

std::vector<PauliPath> enumerate_paths(const Circuit& circuit, const PauliSum& observable,
                                       std::optional<std::size_t> k, std::size_t limit) {
  const Prepared prep = prepare(circuit, observable);
  const std::size_t depth = prep.layers.size();
  const CompiledLayer* prefix = prep.final_layer ? &*prep.final_layer : nullptr;
  std::vector<PauliPath> paths;

  // stack holds P_L ... P_j (reversed at the end).
  std::vector<PauliString> stack;
  auto dfs = [&](auto&& self, std::size_t j, std::size_t w, double amp) -> void {
    if (paths.size() >= limit) return;
    if (j == 0) {
      PauliPath path{{stack.rbegin(), stack.rend()}, w, amp};
      paths.push_back(std::move(path));
      return;
    }
    std::vector<Branch> cur;
    std::vector<Branch> scratch;
    expand_layer(j == depth ? prefix : nullptr, prep.layers[j - 1], stack.back(), amp, cur, scratch);
    for (Branch& child : cur) {
      const std::size_t nw = w + (j >= 2 ? child.p.weight() : 0);
      if (k && nw >= *k) continue;
      stack.push_back(std::move(child.p));
      self(self, j - 1, nw, child.c);
      stack.pop_back();
      if (paths.size() >= limit) return;
    }
  };

  for (const auto& [p, c] : observable.sorted_terms()) {
    const std::size_t w = depth >= 1 ? p.weight() : 0;
    if (k && w >= *k) continue;
    if (depth == 0) {
      std::vector<Branch> cur{{p, c}};
      std::vector<Branch> scratch;
      if (prefix != nullptr) {
        apply_moments(*prefix, cur, scratch);
        merge_by_pauli(cur);
      }
      for (Branch& b : cur) {
        if (paths.size() >= limit) break;
        paths.push_back({{b.p}, 0, b.c});
      }
      continue;
    }
    stack.assign(1, p);
    dfs(dfs, depth, w, c);
    if (paths.size() >= limit) break;
  }
  return paths;
}

DepthComparison effective_depth_compare(const Circuit& circuit, const PauliSum& observable,
                                        const ProductState& rho, const ProductState& sigma,
                                        std::size_t j, const TruncationConfig& trunc) {
  const Circuit shallow = truncate_to_last_layers(circuit, j);
  DepthComparison out;
  out.full = expectation(backpropagate(circuit, observable, trunc), rho);
  out.truncated = expectation(backpropagate(shallow, observable, trunc), sigma);
  out.gap = std::abs(out.full - out.truncated);
  return out;
}

}  // namespace noisyprop
