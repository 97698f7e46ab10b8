#ifndef DGC_ENGINE_HPP
#define DGC_ENGINE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgc/data.hpp"
#include "dgc/losses.hpp"
#include "dgc/matrix.hpp"
#include "dgc/network.hpp"

namespace dgc {

using Assignments = std::vector<std::vector<int>>;  // [user][local sample] -> cluster

/// Centers x_i(k) of every user (one K x d block each) and the clustering C
/// that produced the latest update.
struct NetworkState {
  std::vector<Matrix> centers;
  Assignments assignments;
  std::size_t iteration = 0;

  std::size_t users() const { return centers.size(); }
  std::size_t clusters() const { return centers.empty() ? 0 : centers.front().rows(); }
  std::size_t dim() const { return centers.empty() ? 0 : centers.front().cols(); }
};

enum class Execution { serial, parallel };

struct SolverConfig {
  double rho = 1.0;
  std::optional<double> alpha;  // empty: automatic, alpha_safety times the descent bound
  std::size_t iterations = 1000;
  double alpha_safety = 0.99;
  double fixed_point_tol = 1e-8;
  bool early_stop = false;
  bool record_traces = true;
  Execution execution = Execution::serial;
  double spectral_tol = 1e-10;
};

struct FixedPointCertificate {
  bool is_fixed = false;
  bool assignment_optimal = false;
  double residual_norm = 0.0;
};

/// One entry per executed round; entry t describes the state after round t
/// (centers x^{t+1}, clusters C^{t+1}).
struct RunTrace {
  std::vector<double> phi_rho;
  std::vector<double> j_rho;
  std::vector<double> global_accuracy;     // NaN without ground truth
  std::vector<double> mean_user_accuracy;  // NaN without ground truth
  std::vector<double> consensus_error;
  std::vector<bool> clusters_changed;

  std::size_t size() const { return phi_rho.size(); }
};

struct StepSize {
  double alpha = 0.0;
  double bound = 0.0;       // strict upper limit for a guaranteed descent step
  double smoothness = 0.0;  // beta * max_i W_i / rho + lambda_max(L)
  SpectralInfo spectral;
};

struct RunRecord {
  RunTrace trace;
  // First round index after which the clusters never changed again; empty if
  // they were still changing in the last executed round.
  std::optional<std::size_t> t0;
  NetworkState final_state;
  FixedPointCertificate certificate;
  StepSize step;
  std::size_t iterations = 0;
  bool stopped_early = false;
};

/// Nearest center for every local sample, ties to the smallest index.
/// Throws DivergenceError if any center coordinate is non-finite.
Assignments assign_clusters(const std::vector<Matrix>& centers, const std::vector<LocalDataset>& data,
                            Execution execution = Execution::serial, std::size_t iteration = 0);
inline Assignments assign_clusters(const NetworkState& state, const std::vector<LocalDataset>& data,
                                   Execution execution = Execution::serial) {
  return assign_clusters(state.centers, data, execution, state.iteration);
}

/// Gradient of Phi_rho(., C) at the state's centers:
/// sum_{j in N_i} (x_i(k) - x_j(k)) + (1/rho) sum_{r in C_i(k)} w_{i,r} grad f(x_i(k), y_{i,r}).
std::vector<Matrix> step_direction(const NetworkState& state, const std::vector<Inbox>& inboxes,
                                   const std::vector<LocalDataset>& data, const Loss& loss, double rho,
                                   Execution execution = Execution::serial);

/// x^{t+1} = x^t - alpha * step_direction. Throws DivergenceError on a
/// non-finite result.
std::vector<Matrix> center_update(const NetworkState& state, const std::vector<Inbox>& inboxes,
                                  const std::vector<LocalDataset>& data, const Loss& loss, double alpha,
                                  double rho, Execution execution = Execution::serial);

/// One synchronous round: reassign, exchange, update.
NetworkState dgc_round(const NetworkState& state, const std::vector<LocalDataset>& data, const Topology& topo,
                       const Loss& loss, double alpha, double rho, Execution execution = Execution::serial);

enum class Objective {
  j_rho,     // penalized objective, consensus double sum over ordered neighbor pairs
  phi_rho,   // same with each edge counted once; its gradient is the update direction
  global_eq  // unweighted cost of each sample against the user-averaged center of its cluster
};

double evaluate_objective(const NetworkState& state, const std::vector<LocalDataset>& data, const Topology& topo,
                          const Loss& loss, double rho, Objective which);

/// Max over clusters k and user pairs (i, j) of ||x_i(k) - x_j(k)||.
double consensus_error(const std::vector<Matrix>& centers);

struct AccuracyPair {
  double global = 0.0;
  double mean_user = 0.0;
};

/// truth is indexed by global sample id.
AccuracyPair network_accuracy(const NetworkState& state, const std::vector<LocalDataset>& data,
                              std::span<const int> truth);

FixedPointCertificate fixed_point_check(const NetworkState& state, const std::vector<LocalDataset>& data,
                                        const Topology& topo, const Loss& loss, double rho, double tol);

/// Largest safe step: any alpha below 1 / (beta * W_max / rho + lambda_max(L))
/// makes every round non-increasing in Phi_rho. W_max is the largest total
/// sample weight held by one user.
StepSize auto_step_size(const std::vector<LocalDataset>& data, const Topology& topo, const Loss& loss,
                        double rho, double safety = 0.99, double spectral_tol = 1e-10);

/// Runs the distributed iteration from init_centers. ground_truth (by global
/// sample id) is optional; without it the accuracy traces hold NaN.
RunRecord dgc_run(const std::vector<LocalDataset>& data, const Topology& topo, const Loss& loss,
                  const std::vector<Matrix>& init_centers, const SolverConfig& config,
                  std::span<const int> ground_truth = {});

/// Centralized gradient clustering: the same iteration on the pooled data with
/// one user and rho = 1.
RunRecord cgc_run(const GlobalDataset& data, const Loss& loss, const Matrix& init_centers,
                  std::optional<double> alpha, std::size_t iterations, std::span<const int> ground_truth = {},
                  Execution execution = Execution::serial);

std::string to_string(Execution execution);

}  // namespace dgc

#endif  // DGC_ENGINE_HPP
