#ifndef DGC_HARNESS_HPP
#define DGC_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dgc/data.hpp"
#include "dgc/engine.hpp"
#include "dgc/init.hpp"
#include "dgc/losses.hpp"
#include "dgc/network.hpp"

namespace dgc {

struct DataSpec {
  std::string path = "data/iris.csv";
  CsvFormat format = CsvFormat::features_label;
  bool standardize = false;
  std::optional<std::size_t> weight_column;
};

struct TopologySpec {
  TopologyKind kind = TopologyKind::ring;
  double edge_probability = 0.5;  // erdos_renyi only
  std::string file;               // non-empty: load the edge list instead
};

enum class LossKind { kmeans, huber };

struct LossSpec {
  LossKind kind = LossKind::kmeans;
  double huber_delta = 1.0;
};

enum class Algorithm { dgc, cgc };

struct ExperimentConfig {
  std::string study = "experiment";
  DataSpec data;
  // partition.seed is replaced by the per-run seed
  PartitionSpec partition = [] {
    PartitionSpec p;
    p.users = 10;
    return p;
  }();
  TopologySpec topology;
  LossSpec loss;
  SolverConfig solver;
  InitConfig init;  // init.seed is replaced by the per-run seed
  Algorithm algorithm = Algorithm::dgc;
  std::size_t K = 3;
  std::size_t runs = 5;
  std::uint64_t base_seed = 42;
  std::filesystem::path outdir = "results";
  bool write_outputs = true;
};

/// Reads an INI-style config ([section] / key = value). Unknown keys are
/// rejected. Missing keys keep their defaults.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

LossModel make_loss(const LossSpec& spec);
std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);
LossKind parse_loss_kind(const std::string& text);

struct SeedResult {
  std::uint64_t seed = 0;
  RunRecord record;
  double final_accuracy = 0.0;         // mean per-user accuracy after the last round
  double final_global_accuracy = 0.0;
  double final_consensus_error = 0.0;
};

struct SchemeSummary {
  std::string scheme;  // e.g. "random", "kmeanspp", "dkmc_L2"
  InitConfig init;
  std::vector<SeedResult> seeds;
  std::vector<double> mean_accuracy_curve;  // over seeds, per iteration
  std::vector<double> std_accuracy_curve;   // population standard deviation
  double mean_final_accuracy = 0.0;
  double std_final_accuracy = 0.0;
  double mean_final_consensus_error = 0.0;
};

struct StudySummary {
  std::string study;
  std::vector<SchemeSummary> schemes;
  // Round sweeps only: (rounds L, mean final accuracy) per DKM+C entry.
  std::vector<std::pair<std::size_t, double>> round_table;

  const SchemeSummary& scheme(const std::string& name) const;
};

/// The network for one seed: users' data and communication graph. Shared by
/// every scheme of a study at that seed.
struct Scenario {
  std::vector<LocalDataset> locals;
  Topology topology;
  std::uint64_t seed;
};

Scenario build_scenario(const GlobalDataset& data, const ExperimentConfig& config, std::uint64_t seed);

/// Single scheme (config.init) over config.runs seeds.
StudySummary run_experiment(const ExperimentConfig& config);
StudySummary run_experiment(const GlobalDataset& data, const ExperimentConfig& config);

/// Paired comparison: at each seed all schemes share partition and topology.
StudySummary run_init_study(const ExperimentConfig& config, const std::vector<InitConfig>& schemes);
StudySummary run_init_study(const GlobalDataset& data, const ExperimentConfig& config,
                            const std::vector<InitConfig>& schemes);

/// Random baseline plus DKM+C at every L in rounds.
StudySummary run_round_sweep(const ExperimentConfig& config, const std::vector<std::size_t>& rounds);
StudySummary run_round_sweep(const GlobalDataset& data, const ExperimentConfig& config,
                             const std::vector<std::size_t>& rounds);

/// Loads and preprocesses the configured dataset.
GlobalDataset load_experiment_data(const ExperimentConfig& config);

/// Per-iteration CSV for one run: iter, phi_rho, j_rho, global_accuracy,
/// mean_user_accuracy, consensus_error, clusters_changed.
std::string trace_csv(const RunTrace& trace);

/// Writes <outdir>/<study>/<scheme>/seed_<s>.csv and <outdir>/<study>/summary.json.
void write_study(const StudySummary& summary, const ExperimentConfig& config);

}  // namespace dgc

#endif  // DGC_HARNESS_HPP
