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

#include "noisyprop/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "noisyprop/channels.hpp"
#include "noisyprop/circuit.hpp"
#include "noisyprop/errors.hpp"
#include "noisyprop/json_io.hpp"
#include "noisyprop/montecarlo.hpp"
#include "noisyprop/oracle.hpp"
#include "noisyprop/propagation.hpp"

#ifndef NOISYPROP_VERSION
#define NOISYPROP_VERSION "unknown"
#endif

namespace noisyprop {

const char* version_string() { return NOISYPROP_VERSION; }

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::size_t threads = std::max(1U, std::thread::hardware_concurrency());
  std::string format;
  std::optional<std::size_t> max_terms;
  // channel-info shortcuts
  std::string kind;
  std::optional<double> param;
  std::optional<double> eta;
};

Json load_config(const Options& opt) {
  if (opt.config_path.empty()) return Json::object();
  std::ifstream in(opt.config_path);
  if (!in) throw ConfigError("cannot open config file '" + opt.config_path + "'");
  Json j = Json::parse(in);
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  return j;
}

std::uint64_t resolve_seed(const Options& opt, Json& config) {
  std::uint64_t seed = 0;
  if (config.contains("seed")) seed = config.at("seed").get<std::uint64_t>();
  if (opt.seed) seed = *opt.seed;
  config["seed"] = seed;
  return seed;
}

Lattice lattice_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  const bool periodic = j.value("periodic", false);
  if (type == "chain") return Lattice::chain(j.at("n").get<std::size_t>(), periodic);
  if (type == "square") return Lattice::square(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), periodic);
  throw ConfigError("unknown lattice type '" + type + "'");
}

NoiseSpec noise_from_json(const Json& j) {
  if (j.is_null()) return {};
  if (j.is_array()) {
    NoiseSpec out;
    for (const auto& c : j) out.push_back(channel_from_json(c));
    return out;
  }
  return {channel_from_json(j)};
}

NoisePlacement placement_from_json(const Json& j, const char* block_word) {
  const std::string s = j.get<std::string>();
  if (s == "layer") return NoisePlacement::EveryLayer;
  if (s == block_word) return NoisePlacement::EveryBlock;
  throw ConfigError("noise placement must be \"layer\" or \"" + std::string(block_word) + "\"");
}

struct BuiltCircuit {
  Circuit circuit;
  std::optional<Lattice> lattice;
};

/// Fills defaults into `spec` so the resolved config can be echoed back.
BuiltCircuit circuit_from_spec(Json& spec) {
  if (!spec.contains("builder")) return {circuit_from_json(spec), std::nullopt};
  const std::string builder = spec.at("builder").get<std::string>();
  const Lattice lattice = lattice_from_json(spec.at("lattice"));
  if (!spec.contains("noise")) spec["noise"] = nullptr;
  const NoiseSpec noise = noise_from_json(spec.at("noise"));
  if (builder == "hva") {
    if (!spec.contains("blocks")) throw ConfigError("hva builder needs \"blocks\" (the ansatz depth)");
    if (!spec.contains("placement")) spec["placement"] = "layer";
    if (!spec.contains("angles")) spec["angles"] = "uniform";
    EnsembleSpec angles;
    const Json& a = spec.at("angles");
    if (a.is_object()) {
      angles.angle_law = AngleLaw::Fixed;
      angles.fixed_angle = a.at("fixed").get<double>();
    } else if (a.get<std::string>() != "uniform") {
      throw ConfigError("angles must be \"uniform\" or {\"fixed\": value}");
    }
    if (!spec.contains("final_layer")) spec["final_layer"] = false;
    return {build_hva(lattice, noise, angles, spec.at("blocks").get<std::size_t>(),
                      placement_from_json(spec.at("placement"), "block"), spec.at("final_layer").get<bool>()),
            lattice};
  }
  if (builder == "trotter_tfim") {
    if (!spec.contains("placement")) spec["placement"] = "layer";
    return {build_trotter_tfim(lattice, spec.at("J").get<double>(), spec.at("h").get<double>(),
                               spec.at("dt").get<double>(), spec.at("steps").get<std::size_t>(), noise,
                               placement_from_json(spec.at("placement"), "step")),
            lattice};
  }
  throw ConfigError("unknown circuit builder '" + builder + "'");
}

PauliSum center_z(const Lattice& lattice) {
  return PauliSum::from_pauli(PauliString::single(lattice.num_qubits(), lattice.center(), Pauli::Z));
}

PauliSum observable_from_spec(Json& config, const BuiltCircuit& built) {
  if (!config.contains("observable")) {
    if (!built.lattice) throw ConfigError("config needs an \"observable\"");
    config["observable"] = "center_z";
  }
  const Json& o = config.at("observable");
  PauliSum obs = (o.is_string() && o.get<std::string>() == "center_z")
                     ? (built.lattice ? center_z(*built.lattice)
                                      : throw ConfigError("center_z needs a lattice builder"))
                     : pauli_sum_from_json(o);
  if (obs.num_qubits() != built.circuit.num_qubits()) {
    throw ConfigError("observable acts on " + std::to_string(obs.num_qubits()) + " qubits, circuit on " +
                      std::to_string(built.circuit.num_qubits()));
  }
  return obs;
}

ProductState state_from_spec(Json& config, std::size_t n) {
  if (!config.contains("state")) config["state"] = "zeros";
  return state_from_json(config.at("state"), n);
}

TruncationConfig truncation_from_spec(Json& config, const Options& opt) {
  TruncationConfig t = truncation_from_json(config.value("truncation", Json(nullptr)));
  if (opt.max_terms) t.max_terms = opt.max_terms;
  config["truncation"] = to_json(t);
  return t;
}

/// Concrete circuit: templates with random gates are sampled with the seed.
Circuit concrete(const Circuit& c, std::uint64_t seed) {
  return c.has_placeholders() ? sample_circuit(c, seed) : c;
}

struct Output {
  std::ostream& stream;
  std::ofstream file;
  std::ostream* target;

  Output(const Options& opt, std::ostream& fallback) : stream(fallback), target(&fallback) {
    if (!opt.out_path.empty()) {
      file.open(opt.out_path);
      if (!file) throw ConfigError("cannot write '" + opt.out_path + "'");
      target = &file;
    }
  }
  std::ostream& operator*() { return *target; }
};

Json envelope(const Json& config, std::uint64_t seed, Json result) {
  Json out;
  out["version"] = version_string();
  out["seed"] = seed;
  out["config"] = config;
  out["result"] = std::move(result);
  return out;
}

void csv_preamble(std::ostream& os, const Json& config, std::uint64_t seed) {
  os << "# noisyprop " << version_string() << "\n";
  os << "# seed " << seed << "\n";
  os << "# config " << config.dump() << "\n";
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string format_or(const Options& opt, const char* fallback) {
  const std::string f = opt.format.empty() ? fallback : opt.format;
  if (f != "csv" && f != "json") throw ConfigError("--format must be csv or json");
  return f;
}

Functional functional_from(const std::string& name, std::optional<std::size_t> k, const ProductState& state) {
  if (name == "variance") return Variance{state};
  if (!k) throw ConfigError("functional '" + name + "' needs k");
  if (name == "trunc_mse") return TruncMse{*k, state};
  if (name == "trunc_frobenius") return TruncFrobenius{*k};
  throw ConfigError("unknown functional '" + name + "'");
}

int cmd_channel_info(const Options& opt, std::ostream& out_stream, std::ostream& err) {
  Json config = load_config(opt);
  if (!opt.kind.empty()) {
    config["channel"] = {{"kind", opt.kind}, {"param", opt.param.value_or(0.0)}};
  }
  if (opt.eta) config["design"] = {{"kind", "scrambler"}, {"eta", *opt.eta}};
  if (!config.contains("channel")) throw ConfigError("channel-info needs --kind/--param or a config with \"channel\"");
  const NormalFormChannel ch = channel_from_json(config.at("channel"));

  Json r;
  r["D"] = ch.damping();
  r["t"] = ch.shift();
  r["class"] = to_string(classify(ch));
  r["upsilon"] = upsilon(ch.damping(), ch.shift());
  r["chi_sq_worstcase"] = chi_sq_worstcase(ch);
  r["chi_sq_holder"] = chi_sq_holder(ch);
  r["chi_sq_two_design"] = chi_sq_mean(ch, TwoDesign{});
  r["p_eff_worstcase"] = effective_depolarizing_rate(ch, WorstCase{});
  r["p_eff_two_design"] = effective_depolarizing_rate(ch, TwoDesign{});
  if (config.contains("design")) {
    const Design d = design_from_json(config.at("design"));
    r["design"] = to_string(d);
    r["chi_sq_design"] = chi_sq_mean(ch, d);
    r["p_eff_design"] = effective_depolarizing_rate(ch, d);
  }
  if (effective_depolarizing_rate(ch, WorstCase{}) == 0.0) {
    err << "warning: effective depolarizing rate is 0 under the worst-case bound; truncation error is not controlled\n";
  }

  Output out(opt, out_stream);
  if (format_or(opt, "json") == "csv") {
    *out << "field,value\n";
    for (const auto& [key, value] : r.items()) *out << key << "," << value.dump() << "\n";
  } else {
    *out << envelope(config, 0, r).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_propagate(const Options& opt, std::ostream& out_stream, std::ostream&) {
  Json config = load_config(opt);
  const std::uint64_t seed = resolve_seed(opt, config);
  if (!config.contains("circuit")) throw ConfigError("config needs a \"circuit\"");
  BuiltCircuit built = circuit_from_spec(config["circuit"]);
  const Circuit circuit = concrete(built.circuit, seed);
  const PauliSum obs = observable_from_spec(config, built);
  const ProductState state = state_from_spec(config, circuit.num_qubits());
  const TruncationConfig trunc = truncation_from_spec(config, opt);

  Output out(opt, out_stream);
  if (config.contains("k_sweep")) {
    std::vector<std::size_t> ks = config.at("k_sweep").get<std::vector<std::size_t>>();
    const std::string format = format_or(opt, "csv");
    Json rows = Json::array();
    for (std::size_t k : ks) {
      if (k == 0) throw ConfigError("k_sweep entries must be positive");
      TruncationConfig t = trunc;
      t.path_weight_cutoff = k;
      const auto start = std::chrono::steady_clock::now();
      const BackpropResult r = backpropagate(circuit, obs, t, opt.threads);
      const double value = expectation(r, state);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rows.push_back({{"k", k}, {"expectation", value}, {"surviving_paths", r.stats.surviving_path_count},
                      {"wall_time", wall}});
    }
    if (format == "json") {
      *out << envelope(config, seed, rows).dump(2) << "\n";
    } else {
      csv_preamble(*out, config, seed);
      *out << "k,expectation,surviving_paths,wall_time\n";
      for (const auto& row : rows) {
        *out << row["k"].get<std::size_t>() << "," << fmt(row["expectation"].get<double>()) << ","
             << row["surviving_paths"].get<std::uint64_t>() << "," << fmt(row["wall_time"].get<double>()) << "\n";
      }
    }
    return kExitOk;
  }

  const BackpropResult r = backpropagate(circuit, obs, trunc, opt.threads);
  Json result{{"expectation", expectation(r, state)}, {"term_count", r.terms.size()}, {"stats", to_json(r.stats)}};
  if (config.value("emit_terms", false)) result["terms"] = to_json(r.terms);
  if (format_or(opt, "json") == "csv") {
    csv_preamble(*out, config, seed);
    *out << "expectation,term_count,surviving_paths\n"
         << fmt(result["expectation"].get<double>()) << "," << r.terms.size() << ","
         << r.stats.surviving_path_count << "\n";
  } else {
    *out << envelope(config, seed, result).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_estimate(const Options& opt, std::ostream& out_stream, std::ostream& err) {
  Json config = load_config(opt);
  if (!config.contains("circuit")) throw ConfigError("config needs a \"circuit\"");
  BuiltCircuit built = circuit_from_spec(config["circuit"]);
  const PauliSum obs = observable_from_spec(config, built);
  Json& est = config["estimator"];
  if (est.is_null()) est = Json::object();
  if (!est.contains("functional")) est["functional"] = "variance";
  if (!est.contains("samples")) est["samples"] = 100000;
  if (!est.contains("state")) est["state"] = config.value("state", Json("zeros"));
  if (opt.seed) est["seed"] = *opt.seed;
  if (!est.contains("seed")) est["seed"] = config.value("seed", std::uint64_t{0});
  const std::uint64_t seed = est.at("seed").get<std::uint64_t>();
  const ProductState state = state_from_json(est.at("state"), built.circuit.num_qubits());
  std::optional<std::size_t> k;
  if (est.contains("k") && !est.at("k").is_null()) k = est.at("k").get<std::size_t>();
  const Functional f = functional_from(est.at("functional").get<std::string>(), k, state);

  const EstimateResult r = estimate(built.circuit, obs, f, est.at("samples").get<std::size_t>(), seed, opt.threads);
  if (!r.orthogonal_paths) {
    err << "warning: " << orthogonality_check(built.circuit, obs).reason << "\n";
  }
  Output out(opt, out_stream);
  if (format_or(opt, "json") == "csv") {
    csv_preamble(*out, config, seed);
    *out << "mean,stderr,samples,orthogonal_paths\n"
         << fmt(r.mean) << "," << fmt(r.standard_error) << "," << r.samples << "," << r.orthogonal_paths << "\n";
  } else {
    *out << envelope(config, seed, to_json(r)).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_oracle(const Options& opt, std::ostream& out_stream, std::ostream&) {
  Json config = load_config(opt);
  const std::uint64_t seed = resolve_seed(opt, config);
  if (!config.contains("circuit")) throw ConfigError("config needs a \"circuit\"");
  BuiltCircuit built = circuit_from_spec(config["circuit"]);
  const Circuit circuit = concrete(built.circuit, seed);
  const PauliSum obs = observable_from_spec(config, built);
  const ProductState state = state_from_spec(config, circuit.num_qubits());
  const double value = simulate_exact(circuit, state, obs);
  Output out(opt, out_stream);
  if (format_or(opt, "json") == "csv") {
    csv_preamble(*out, config, seed);
    *out << "expectation\n" << fmt(value) << "\n";
  } else {
    *out << envelope(config, seed, Json{{"expectation", value}}).dump(2) << "\n";
  }
  return kExitOk;
}

double sweep_bound_coefficient(const NormalFormChannel& ch) {
  switch (classify(ch)) {
    case ChannelClass::NonUnital: return chi_sq_holder(ch);
    case ChannelClass::DephasingLike: return chi_sq_mean(ch, Scrambler{0.25});
    default: return chi_sq_worstcase(ch);
  }
}

int cmd_sweep(const Options& opt, std::ostream& out_stream, std::ostream& err) {
  Json config = load_config(opt);
  const std::uint64_t seed = resolve_seed(opt, config);
  const Lattice lattice = lattice_from_json(config.at("lattice"));
  if (!config.contains("blocks")) throw ConfigError("sweep needs \"blocks\" (the ansatz depth)");
  const std::size_t blocks = config.at("blocks").get<std::size_t>();
  if (!config.contains("placement")) config["placement"] = "block";
  const NoisePlacement placement = placement_from_json(config.at("placement"), "block");
  // The bound column assumes the observable is scrambled before the first
  // noise layer it meets, hence a random final layer by default.
  if (!config.contains("final_layer")) config["final_layer"] = true;
  const bool final_rotations = config.at("final_layer").get<bool>();
  const std::string kind = config.at("noise_kind").get<std::string>();
  const auto grid = config.at("noise_grid").get<std::vector<double>>();
  const auto ks = config.value("k_grid", std::vector<std::size_t>{});
  if (!config.contains("functional")) config["functional"] = "trunc_frobenius";
  if (!config.contains("samples")) config["samples"] = 100000;
  const std::string fname = config.at("functional").get<std::string>();
  const std::size_t samples = config.at("samples").get<std::size_t>();
  const ProductState state = state_from_spec(config, lattice.num_qubits());
  BuiltCircuit probe{Circuit(lattice.num_qubits()), lattice};
  const PauliSum obs = observable_from_spec(config, probe);
  std::vector<Functional> functionals;
  for (std::size_t k : ks) {
    if (k == 0) throw ConfigError("k_grid entries must be positive");
    if (fname == "variance") throw ConfigError("sweep needs a truncation functional");
    functionals.push_back(functional_from(fname, k, state));
  }

  struct Row {
    double param;
    std::size_t k;
    EstimateResult r;
    double bound;
  };
  std::vector<Row> rows;
  for (double param : grid) {
    const NormalFormChannel ch = channel_from_json(Json{{"kind", kind}, {"param", param}});
    const Circuit templ = build_hva(lattice, {ch}, EnsembleSpec{}, blocks, placement, final_rotations);
    if (functionals.empty()) continue;
    const auto results = estimate_many(templ, obs, functionals, samples, seed, opt.threads);
    const double chi_sq = sweep_bound_coefficient(ch);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (!results[i].orthogonal_paths) {
        err << "warning: noise " << param << ": " << orthogonality_check(templ, obs).reason << "\n";
      }
      rows.push_back({param, ks[i], results[i], std::pow(chi_sq, static_cast<double>(ks[i])) * obs.frobenius_norm_sq()});
    }
  }

  Output out(opt, out_stream);
  if (format_or(opt, "csv") == "json") {
    Json list = Json::array();
    for (const Row& row : rows) {
      list.push_back({{"noise_param", row.param}, {"k", row.k}, {"estimate", row.r.mean},
                      {"stderr", row.r.standard_error}, {"theory_bound", row.bound}});
    }
    *out << envelope(config, seed, list).dump(2) << "\n";
  } else {
    csv_preamble(*out, config, seed);
    *out << "noise_param,k,estimate,stderr,theory_bound\n";
    for (const Row& row : rows) {
      *out << fmt(row.param) << "," << row.k << "," << fmt(row.r.mean) << "," << fmt(row.r.standard_error) << ","
           << fmt(row.bound) << "\n";
    }
  }
  return kExitOk;
}

int cmd_dynamics(const Options& opt, std::ostream& out_stream, std::ostream&) {
  Json config = load_config(opt);
  const std::uint64_t seed = resolve_seed(opt, config);
  const Lattice lattice = lattice_from_json(config.at("lattice"));
  const double coupling = config.at("J").get<double>();
  const double field = config.at("h").get<double>();
  const double dt = config.at("dt").get<double>();
  const std::size_t steps = config.at("steps").get<std::size_t>();
  if (!config.contains("noise")) config["noise"] = nullptr;
  const NoiseSpec noise = noise_from_json(config.at("noise"));
  if (!config.contains("placement")) config["placement"] = "layer";
  const NoisePlacement placement = placement_from_json(config.at("placement"), "step");
  const TruncationConfig trunc = truncation_from_spec(config, opt);
  const PauliSum obs = center_z(lattice);
  const ProductState state = ProductState::zeros(lattice.num_qubits());

  Json rows = Json::array();
  for (std::size_t s = 0; s <= steps; ++s) {
    const Circuit c = build_trotter_tfim(lattice, coupling, field, dt, s, noise, placement);
    const BackpropResult r = backpropagate(c, obs, trunc, opt.threads);
    rows.push_back({{"t", dt * static_cast<double>(s)},
                    {"expectation", expectation(r, state)},
                    {"surviving_paths", r.stats.surviving_path_count}});
  }
  Output out(opt, out_stream);
  if (format_or(opt, "csv") == "json") {
    *out << envelope(config, seed, rows).dump(2) << "\n";
  } else {
    csv_preamble(*out, config, seed);
    *out << "t,expectation,surviving_paths\n";
    for (const auto& row : rows) {
      *out << fmt(row["t"].get<double>()) << "," << fmt(row["expectation"].get<double>()) << ","
           << row["surviving_paths"].get<std::uint64_t>() << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noisy-circuit Pauli propagation engine"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_path, "Write the result here instead of stdout");
    sub->add_option("--seed", opt.seed, "Seed (overrides the config)");
    sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--max-terms", opt.max_terms, "Abort when a propagation frontier grows past this");
  };

  auto* info = app.add_subcommand("channel-info", "Normal form, class and contraction coefficients of a channel");
  add_common(info);
  info->add_option("--kind", opt.kind, "amplitude_damping | dephasing | depolarizing");
  info->add_option("--param", opt.param, "Channel parameter");
  info->add_option("--eta", opt.eta, "Also report the eta-scrambler coefficient");
  auto* prop = app.add_subcommand("propagate", "Truncated Heisenberg propagation and expectation value");
  add_common(prop);
  auto* est = app.add_subcommand("estimate", "Monte Carlo path-sampling estimate of a second-moment functional");
  add_common(est);
  auto* orc = app.add_subcommand("oracle", "Exact dense simulation (n <= 12)");
  add_common(orc);
  auto* swp = app.add_subcommand("sweep", "Truncation error versus k and noise strength (CSV)");
  add_common(swp);
  auto* dyn = app.add_subcommand("dynamics", "Trotterized TFIM center-Z time series (CSV)");
  add_common(dyn);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (info->parsed()) return cmd_channel_info(opt, out, err);
    if (prop->parsed()) return cmd_propagate(opt, out, err);
    if (est->parsed()) return cmd_estimate(opt, out, err);
    if (orc->parsed()) return cmd_oracle(opt, out, err);
    if (swp->parsed()) return cmd_sweep(opt, out, err);
    if (dyn->parsed()) return cmd_dynamics(opt, out, err);
  } catch (const InfeasibleSizeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {  // ConfigError, UnsupportedError
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "error: bad config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace noisyprop
