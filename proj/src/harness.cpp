#include "dgc/harness.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "dgc/errors.hpp"
#include "dgc/rng.hpp"
#include "json.hpp"

namespace dgc {

using nlohmann::json;

std::string to_string(Algorithm algorithm) { return algorithm == Algorithm::dgc ? "dgc" : "cgc"; }

Algorithm parse_algorithm(const std::string& text) {
  if (text == "dgc") return Algorithm::dgc;
  if (text == "cgc") return Algorithm::cgc;
  throw ConfigError("unknown algorithm '" + text + "'");
}

LossKind parse_loss_kind(const std::string& text) {
  if (text == "kmeans") return LossKind::kmeans;
  if (text == "huber") return LossKind::huber;
  throw ConfigError("unknown loss '" + text + "'");
}

LossModel make_loss(const LossSpec& spec) {
  return spec.kind == LossKind::kmeans ? kmeans_loss() : huber_loss(spec.huber_delta);
}

const SchemeSummary& StudySummary::scheme(const std::string& name) const {
  for (const auto& s : schemes)
    if (s.scheme == name) return s;
  throw InputError("study has no scheme '" + name + "'");
}

// ---------------------------------------------------------------------------
// Config

namespace {

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text.front() == '-') throw std::invalid_argument(text);
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
}

Execution parse_execution(const std::string& text) {
  if (text == "serial") return Execution::serial;
  if (text == "parallel") return Execution::parallel;
  throw ConfigError("unknown execution mode '" + text + "'");
}

CsvFormat parse_format(const std::string& text) {
  if (text == "features_label" || text == "csv_features_label") return CsvFormat::features_label;
  if (text == "features_only" || text == "csv_features_only") return CsvFormat::features_only;
  throw ConfigError("unknown data format '" + text + "'");
}

ExperimentConfig from_tree(const boost::property_tree::ptree& tree) {
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' must live inside a [section]");
    for (const auto& [name, node] : body) {
      const std::string key = section + "." + name;
      const std::string v = node.get_value<std::string>();
      if (key == "experiment.study") c.study = v;
      else if (key == "experiment.K") c.K = parse_uint(key, v);
      else if (key == "experiment.runs") c.runs = parse_uint(key, v);
      else if (key == "experiment.base_seed") c.base_seed = parse_uint(key, v);
      else if (key == "experiment.outdir") c.outdir = v;
      else if (key == "experiment.algorithm") c.algorithm = parse_algorithm(v);
      else if (key == "data.path") c.data.path = v;
      else if (key == "data.format") c.data.format = parse_format(v);
      else if (key == "data.standardize") c.data.standardize = parse_bool(key, v);
      else if (key == "data.weight_col") c.data.weight_column = parse_uint(key, v);
      else if (key == "partition.mode") c.partition.mode = parse_partition_mode(v);
      else if (key == "partition.users") c.partition.users = parse_uint(key, v);
      else if (key == "partition.classes_per_user") c.partition.classes_per_user = parse_uint(key, v);
      else if (key == "partition.min_samples_per_user") c.partition.min_samples_per_user = parse_uint(key, v);
      else if (key == "topology.kind") c.topology.kind = parse_topology_kind(v);
      else if (key == "topology.edge_probability") c.topology.edge_probability = parse_double(key, v);
      else if (key == "topology.file") c.topology.file = v;
      else if (key == "loss.kind") c.loss.kind = parse_loss_kind(v);
      else if (key == "loss.huber_delta") c.loss.huber_delta = parse_double(key, v);
      else if (key == "solver.rho") c.solver.rho = parse_double(key, v);
      else if (key == "solver.alpha") c.solver.alpha = v == "auto" ? std::nullopt : std::optional(parse_double(key, v));
      else if (key == "solver.iterations") c.solver.iterations = parse_uint(key, v);
      else if (key == "solver.alpha_safety") c.solver.alpha_safety = parse_double(key, v);
      else if (key == "solver.fixed_point_tol") c.solver.fixed_point_tol = parse_double(key, v);
      else if (key == "solver.early_stop") c.solver.early_stop = parse_bool(key, v);
      else if (key == "solver.execution") c.solver.execution = parse_execution(v);
      else if (key == "init.scheme") c.init.scheme = parse_init_scheme(v);
      else if (key == "init.rounds") c.init.rounds = parse_uint(key, v);
      else if (key == "init.lloyd_max_iters") c.init.lloyd.max_iters = parse_uint(key, v);
      else if (key == "init.lloyd_tol") c.init.lloyd.relative_tol = parse_double(key, v);
      else throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (c.runs < 1) throw ConfigError("runs must be at least 1");
  if (c.K < 1) throw ConfigError("K must be at least 1");
  if (!(c.solver.rho >= 1.0)) throw ConfigError("rho must be at least 1");
  return c;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return from_tree(tree);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

// ---------------------------------------------------------------------------
// Studies

GlobalDataset load_experiment_data(const ExperimentConfig& config) {
  LoadOptions options;
  options.format = config.data.format;
  options.weight_column = config.data.weight_column;
  GlobalDataset data = load_dataset(config.data.path, options);
  if (config.data.standardize) standardize(data);
  return data;
}

Scenario build_scenario(const GlobalDataset& data, const ExperimentConfig& config, std::uint64_t seed) {
  if (config.algorithm == Algorithm::cgc) return {{pooled(data)}, Topology(1, {}), seed};
  PartitionSpec spec = config.partition;
  spec.seed = seed;
  auto locals = partition(data, spec);
  Topology topo = config.topology.file.empty()
                      ? build_topology(config.topology.kind, spec.users, seed, config.topology.edge_probability)
                      : load_topology(config.topology.file, spec.users);
  if (topo.size() != locals.size())
    throw ConfigError("topology file has " + std::to_string(topo.size()) + " users, partition has " +
                      std::to_string(locals.size()));
  return {std::move(locals), std::move(topo), seed};
}

namespace {

SeedResult run_one(const GlobalDataset& data, const Scenario& scenario, const ExperimentConfig& config,
                   const InitConfig& init, const Loss& loss) {
  InitConfig seeded = init;
  seeded.seed = scenario.seed;
  const auto centers = initialize_network(scenario.locals, scenario.topology, config.K, seeded);
  SolverConfig solver = config.solver;
  if (config.algorithm == Algorithm::cgc) solver.rho = 1.0;

  std::span<const int> truth;
  if (data.labels) truth = *data.labels;

  SeedResult result;
  result.seed = scenario.seed;
  result.record = dgc_run(scenario.locals, scenario.topology, loss, centers, solver, truth);
  const NetworkState& fin = result.record.final_state;
  if (!truth.empty()) {
    const auto acc = network_accuracy(fin, scenario.locals, truth);
    result.final_accuracy = acc.mean_user;
    result.final_global_accuracy = acc.global;
  } else {
    result.final_accuracy = result.final_global_accuracy = std::numeric_limits<double>::quiet_NaN();
  }
  result.final_consensus_error = consensus_error(fin.centers);
  return result;
}

void aggregate(SchemeSummary& s) {
  const double runs = static_cast<double>(s.seeds.size());
  std::size_t length = 0;
  for (const auto& r : s.seeds) length = std::max(length, r.record.trace.size());
  s.mean_accuracy_curve.assign(length, 0.0);
  s.std_accuracy_curve.assign(length, 0.0);
  // Runs that stopped early hold their final value.
  auto at = [](const RunTrace& tr, std::size_t t) {
    return tr.mean_user_accuracy.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : tr.mean_user_accuracy[std::min(t, tr.size() - 1)];
  };
  for (std::size_t t = 0; t < length; ++t) {
    double sum = 0.0;
    for (const auto& r : s.seeds) sum += at(r.record.trace, t);
    const double mean = sum / runs;
    double var = 0.0;
    for (const auto& r : s.seeds) var += (at(r.record.trace, t) - mean) * (at(r.record.trace, t) - mean);
    s.mean_accuracy_curve[t] = mean;
    s.std_accuracy_curve[t] = std::sqrt(var / runs);
  }
  double acc = 0.0, cons = 0.0;
  for (const auto& r : s.seeds) {
    acc += r.final_accuracy;
    cons += r.final_consensus_error;
  }
  s.mean_final_accuracy = acc / runs;
  s.mean_final_consensus_error = cons / runs;
  double var = 0.0;
  for (const auto& r : s.seeds) var += (r.final_accuracy - s.mean_final_accuracy) * (r.final_accuracy - s.mean_final_accuracy);
  s.std_final_accuracy = std::sqrt(var / runs);
}

}  // namespace

StudySummary run_init_study(const GlobalDataset& data, const ExperimentConfig& config,
                            const std::vector<InitConfig>& schemes) {
  if (schemes.empty()) throw ConfigError("a study needs at least one init scheme");
  if (config.runs < 1) throw ConfigError("runs must be at least 1");
  const LossModel loss = make_loss(config.loss);

  StudySummary summary;
  summary.study = config.study;
  std::map<std::string, std::size_t> seen;
  for (const auto& init : schemes) {
    SchemeSummary s;
    s.scheme = describe(init);
    // A scheme listed twice gets a distinct output directory.
    if (const auto n = seen[s.scheme]++; n > 0) s.scheme += "_" + std::to_string(n + 1);
    s.init = init;
    summary.schemes.push_back(std::move(s));
  }

  for (std::size_t run = 0; run < config.runs; ++run) {
    const std::uint64_t seed = config.base_seed + run;
    try {
      const Scenario scenario = build_scenario(data, config, seed);
      for (auto& s : summary.schemes) s.seeds.push_back(run_one(data, scenario, config, s.init, *loss));
    } catch (const Error& e) {
      throw Error("study '" + config.study + "', seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  for (auto& s : summary.schemes) aggregate(s);
  if (config.write_outputs) write_study(summary, config);
  return summary;
}

StudySummary run_init_study(const ExperimentConfig& config, const std::vector<InitConfig>& schemes) {
  return run_init_study(load_experiment_data(config), config, schemes);
}

StudySummary run_experiment(const GlobalDataset& data, const ExperimentConfig& config) {
  return run_init_study(data, config, {config.init});
}

StudySummary run_experiment(const ExperimentConfig& config) {
  return run_experiment(load_experiment_data(config), config);
}

StudySummary run_round_sweep(const GlobalDataset& data, const ExperimentConfig& config,
                             const std::vector<std::size_t>& rounds) {
  std::vector<InitConfig> schemes;
  InitConfig random = config.init;
  random.scheme = InitScheme::random;
  schemes.push_back(random);
  for (std::size_t L : rounds) {
    InitConfig dkmc = config.init;
    dkmc.scheme = InitScheme::dkmc;
    dkmc.rounds = L;
    schemes.push_back(dkmc);
  }
  ExperimentConfig quiet = config;
  quiet.write_outputs = false;
  StudySummary summary = run_init_study(data, quiet, schemes);
  for (std::size_t e = 0; e < rounds.size(); ++e)
    summary.round_table.emplace_back(rounds[e], summary.schemes[e + 1].mean_final_accuracy);
  if (config.write_outputs) write_study(summary, config);
  return summary;
}

StudySummary run_round_sweep(const ExperimentConfig& config, const std::vector<std::size_t>& rounds) {
  return run_round_sweep(load_experiment_data(config), config, rounds);
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["study"] = c.study;
  j["algorithm"] = to_string(c.algorithm);
  j["K"] = c.K;
  j["runs"] = c.runs;
  j["base_seed"] = c.base_seed;
  j["data"] = {{"path", c.data.path},
               {"format", c.data.format == CsvFormat::features_label ? "features_label" : "features_only"},
               {"standardize", c.data.standardize},
               {"weight_col", c.data.weight_column ? json(*c.data.weight_column) : json(nullptr)}};
  j["partition"] = {{"mode", to_string(c.partition.mode)},
                    {"users", c.partition.users},
                    {"classes_per_user", c.partition.classes_per_user},
                    {"min_samples_per_user", c.partition.min_samples_per_user}};
  j["topology"] = {{"kind", to_string(c.topology.kind)},
                   {"edge_probability", c.topology.edge_probability},
                   {"file", c.topology.file}};
  j["loss"] = {{"kind", c.loss.kind == LossKind::kmeans ? "kmeans" : "huber"}, {"huber_delta", c.loss.huber_delta}};
  j["solver"] = {{"rho", c.solver.rho},
                 {"alpha", c.solver.alpha ? json(*c.solver.alpha) : json("auto")},
                 {"iterations", c.solver.iterations},
                 {"alpha_safety", c.solver.alpha_safety},
                 {"fixed_point_tol", c.solver.fixed_point_tol},
                 {"early_stop", c.solver.early_stop}};
  j["init"] = {{"scheme", to_string(c.init.scheme)},
               {"rounds", c.init.rounds},
               {"lloyd_max_iters", c.init.lloyd.max_iters},
               {"lloyd_tol", c.init.lloyd.relative_tol}};
  return j;
}

json seed_json(const SeedResult& r, const std::string& scheme) {
  const RunRecord& rec = r.record;
  return {{"seed", r.seed},
          {"trace", scheme + "/seed_" + std::to_string(r.seed) + ".csv"},
          {"final_accuracy", r.final_accuracy},
          {"final_global_accuracy", r.final_global_accuracy},
          {"final_consensus_error", r.final_consensus_error},
          {"t0", rec.t0 ? json(*rec.t0) : json(nullptr)},
          {"iterations", rec.iterations},
          {"stopped_early", rec.stopped_early},
          {"alpha", rec.step.alpha},
          {"alpha_bound", rec.step.bound},
          {"lambda_max", rec.step.spectral.lambda_max},
          {"spectral_method", to_string(rec.step.spectral.method)},
          {"certificate",
           {{"is_fixed", rec.certificate.is_fixed},
            {"assignment_optimal", rec.certificate.assignment_optimal},
            {"residual_norm", rec.certificate.residual_norm}}}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::string trace_csv(const RunTrace& trace) {
  std::string out = "iter,phi_rho,j_rho,global_accuracy,mean_user_accuracy,consensus_error,clusters_changed\n";
  for (std::size_t t = 0; t < trace.size(); ++t) {
    out += std::to_string(t + 1);
    for (double v : {trace.phi_rho[t], trace.j_rho[t], trace.global_accuracy[t], trace.mean_user_accuracy[t],
                     trace.consensus_error[t]}) {
      out += ',';
      out += fmt(v);
    }
    out += trace.clusters_changed[t] ? ",1\n" : ",0\n";
  }
  return out;
}

void write_study(const StudySummary& summary, const ExperimentConfig& config) {
  const auto root = config.outdir / summary.study;
  std::filesystem::create_directories(root);
  json j;
  j["study"] = summary.study;
  j["config"] = config_json(config);
  j["schemes"] = json::array();
  for (const auto& s : summary.schemes) {
    std::filesystem::create_directories(root / s.scheme);
    json sj;
    sj["scheme"] = s.scheme;
    sj["init"] = {{"scheme", to_string(s.init.scheme)}, {"rounds", s.init.rounds}};
    sj["mean_final_accuracy"] = s.mean_final_accuracy;
    sj["std_final_accuracy"] = s.std_final_accuracy;
    sj["mean_final_consensus_error"] = s.mean_final_consensus_error;
    sj["mean_accuracy_curve"] = s.mean_accuracy_curve;
    sj["std_accuracy_curve"] = s.std_accuracy_curve;
    sj["seeds"] = json::array();
    for (const auto& r : s.seeds) {
      write_text(root / s.scheme / ("seed_" + std::to_string(r.seed) + ".csv"), trace_csv(r.record.trace));
      sj["seeds"].push_back(seed_json(r, s.scheme));
    }
    j["schemes"].push_back(std::move(sj));
  }
  if (summary.schemes.size() >= 2) {
    // Paired final accuracies, one row per seed.
    json table = json::array();
    for (std::size_t run = 0; run < summary.schemes.front().seeds.size(); ++run) {
      json row = {{"seed", summary.schemes.front().seeds[run].seed}};
      for (const auto& s : summary.schemes) row[s.scheme] = s.seeds[run].final_accuracy;
      table.push_back(std::move(row));
    }
    j["paired_final_accuracy"] = std::move(table);
  }
  if (!summary.round_table.empty()) {
    json table = json::array();
    table.push_back({{"scheme", "random"}, {"mean_final_accuracy", summary.schemes.front().mean_final_accuracy}});
    for (const auto& [L, acc] : summary.round_table)
      table.push_back({{"scheme", "dkmc"}, {"rounds", L}, {"mean_final_accuracy", acc}});
    j["round_sweep"] = std::move(table);
  }
  write_text(root / "summary.json", j.dump(2) + "\n");
}

}  // namespace dgc
