// Command-line front end: experiments, loss validation and step-size bounds.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dgc/data.hpp"
#include "dgc/errors.hpp"
#include "dgc/harness.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// "random", "kmeanspp", "dkmc:2"
dgc::InitConfig parse_scheme_token(const std::string& token, const dgc::InitConfig& base) {
  dgc::InitConfig init = base;
  const auto colon = token.find(':');
  init.scheme = dgc::parse_init_scheme(token.substr(0, colon));
  if (colon != std::string::npos) init.rounds = std::stoul(token.substr(colon + 1));
  return init;
}

void print_summary(const dgc::StudySummary& summary) {
  for (const auto& s : summary.schemes) {
    std::printf("%-14s mean final accuracy %.4f (sd %.4f)  mean consensus error %.3e\n", s.scheme.c_str(),
                s.mean_final_accuracy, s.std_final_accuracy, s.mean_final_consensus_error);
  }
  if (!summary.round_table.empty()) {
    std::printf("\nrounds  mean final accuracy\n");
    std::printf("random  %.4f\n", summary.schemes.front().mean_final_accuracy);
    for (const auto& [L, acc] : summary.round_table) std::printf("%-6zu  %.4f\n", L, acc);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed gradient clustering simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, data_path, format, loss, init, topology, topology_file, partition_mode, algorithm,
      outdir, alpha;
  std::uint64_t seed = 0;
  std::size_t runs = 0, iters = 0, users = 0, K = 0, dkmc_rounds = 0, weight_col = 0;
  double rho = 0.0, huber_delta = 0.0;
  bool standardize = false, parallel = false;

  app.add_option("--config", config_path, "INI experiment config");
  app.add_option("--data", data_path, "dataset CSV");
  app.add_option("--format", format, "features_label | features_only");
  app.add_option("--weight-col", weight_col, "0-based CSV column holding sample weights");
  app.add_flag("--standardize", standardize, "z-score every feature");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--runs", runs, "number of seeds");
  app.add_option("--outdir", outdir, "output directory");
  app.add_option("--loss", loss, "kmeans | huber");
  app.add_option("--huber-delta", huber_delta, "Huber threshold");
  app.add_option("--init", init, "random | kmeanspp | dkmc");
  app.add_option("--dkmc-rounds", dkmc_rounds, "DKM+C communication rounds");
  app.add_option("--rho", rho, "penalty parameter (>= 1)");
  app.add_option("--alpha", alpha, "step size or 'auto'");
  app.add_option("--iters", iters, "iterations T");
  app.add_option("--topology", topology, "ring | complete | path | star | erdos_renyi");
  app.add_option("--topology-file", topology_file, "edge list, one 'i j' pair per line");
  app.add_option("--users", users, "number of users m");
  app.add_option("--partition", partition_mode, "homogeneous | heterogeneous");
  app.add_option("-K,--clusters", K, "number of centers");
  app.add_option("--algorithm", algorithm, "dgc | cgc");
  app.add_flag("--parallel", parallel, "OpenMP round kernels");

  auto* run_cmd = app.add_subcommand("run", "single experiment over --runs seeds");
  auto* study_cmd = app.add_subcommand("init-study", "paired comparison of init schemes");
  std::string schemes = "random,kmeanspp";
  study_cmd->add_option("--schemes", schemes, "comma list, e.g. random,kmeanspp,dkmc:1");
  auto* sweep_cmd = app.add_subcommand("round-sweep", "random baseline plus DKM+C for each L");
  std::string rounds = "0,1,2,3,4";
  sweep_cmd->add_option("--rounds", rounds, "comma list of L values");
  auto* loss_cmd = app.add_subcommand("validate-loss", "randomized check of the loss assumptions");
  std::size_t dim = 4, trials = 1000;
  loss_cmd->add_option("--dim", dim, "dimension d");
  loss_cmd->add_option("--trials", trials, "random triples per condition");
  auto* spectral_cmd = app.add_subcommand("spectral", "largest Laplacian eigenvalue and step-size bounds");

  CLI11_PARSE(app, argc, argv);

  try {
    dgc::ExperimentConfig config = config_path.empty() ? dgc::ExperimentConfig{} : dgc::load_config(config_path);
    if (app.count("--data")) config.data.path = data_path;
    if (app.count("--format")) config.data.format = format == "features_only" ? dgc::CsvFormat::features_only
                                                                             : dgc::CsvFormat::features_label;
    if (app.count("--weight-col")) config.data.weight_column = weight_col;
    if (standardize) config.data.standardize = true;
    if (app.count("--seed")) config.base_seed = seed;
    if (app.count("--runs")) config.runs = runs;
    if (app.count("--outdir")) config.outdir = outdir;
    if (app.count("--loss")) config.loss.kind = dgc::parse_loss_kind(loss);
    if (app.count("--huber-delta")) config.loss.huber_delta = huber_delta;
    if (app.count("--init")) config.init.scheme = dgc::parse_init_scheme(init);
    if (app.count("--dkmc-rounds")) config.init.rounds = dkmc_rounds;
    if (app.count("--rho")) config.solver.rho = rho;
    if (app.count("--alpha"))
      config.solver.alpha = alpha == "auto" ? std::nullopt : std::optional<double>(std::stod(alpha));
    if (app.count("--iters")) config.solver.iterations = iters;
    if (app.count("--topology")) config.topology.kind = dgc::parse_topology_kind(topology);
    if (app.count("--topology-file")) config.topology.file = topology_file;
    if (app.count("--users")) config.partition.users = users;
    if (app.count("--partition")) config.partition.mode = dgc::parse_partition_mode(partition_mode);
    if (app.count("--clusters")) config.K = K;
    if (app.count("--algorithm")) config.algorithm = dgc::parse_algorithm(algorithm);
    if (parallel) config.solver.execution = dgc::Execution::parallel;
    if (config.runs < 1) throw dgc::ConfigError("--runs must be at least 1");
    if (!(config.solver.rho >= 1.0)) throw dgc::ConfigError("--rho must be at least 1");

    if (*run_cmd) {
      print_summary(dgc::run_experiment(config));
    } else if (*study_cmd) {
      std::vector<dgc::InitConfig> list;
      for (const auto& token : split_list(schemes)) list.push_back(parse_scheme_token(token, config.init));
      if (list.size() < 2) throw dgc::ConfigError("init-study needs at least two schemes");
      if (config.study == "experiment") config.study = "init_study";
      print_summary(dgc::run_init_study(config, list));
    } else if (*sweep_cmd) {
      std::vector<std::size_t> list;
      for (const auto& token : split_list(rounds)) list.push_back(std::stoul(token));
      if (config.study == "experiment") config.study = "round_sweep";
      print_summary(dgc::run_round_sweep(config, list));
    } else if (*loss_cmd) {
      const auto model = dgc::make_loss(config.loss);
      const auto report = dgc::validate_assumption3(*model, dim, trials, config.base_seed);
      std::printf("loss %s, beta = %g, d = %zu, %zu trials\n", model->name().c_str(), model->beta(), dim, trials);
      for (const auto* c : {&report.coercivity, &report.convex_smooth, &report.order_preserving,
                            &report.gradient_consistent})
        std::printf("  [%s] %s\n", c->passed ? "PASS" : "FAIL", c->detail.c_str());
      return report.all_passed() ? 0 : 1;
    } else if (*spectral_cmd) {
      const dgc::Topology topo = config.topology.file.empty()
                                     ? dgc::build_topology(config.topology.kind, config.partition.users,
                                                           config.base_seed, config.topology.edge_probability)
                                     : dgc::load_topology(config.topology.file);
      const auto info = dgc::laplacian_lambda_max(topo);
      const auto model = dgc::make_loss(config.loss);
      const double beta = model->beta();
      std::printf("users %zu, edges %zu, max degree %zu\n", topo.size(), topo.edges().size(), topo.max_degree());
      std::printf("lambda_max(L) = %.12g (%s, residual %.2e)\n", info.lambda_max, dgc::to_string(info.method).c_str(),
                  info.residual);
      std::printf("unit-mass bound 1/(beta/rho + lambda_max) = %.12g  (beta %g, rho %g)\n",
                  1.0 / (beta / config.solver.rho + info.lambda_max), beta, config.solver.rho);
      if (app.count("--data") || !config_path.empty()) {
        const auto data = dgc::load_experiment_data(config);
        dgc::PartitionSpec spec = config.partition;
        spec.seed = config.base_seed;
        const auto locals = dgc::partition(data, spec);
        if (locals.size() == topo.size()) {
          const auto step = dgc::auto_step_size(locals, topo, *model, config.solver.rho, config.solver.alpha_safety);
          std::printf("data-aware bound 1/(beta W_max/rho + lambda_max) = %.12g, auto alpha = %.12g\n", step.bound,
                      step.alpha);
        }
      }
    }
  } catch (const dgc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
