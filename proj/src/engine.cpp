#include "dgc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dgc/errors.hpp"
#include "dgc/kernels.hpp"
#include "dgc/metrics.hpp"

namespace dgc {

std::string to_string(Execution execution) {
  return execution == Execution::serial ? "serial" : "parallel";
}

namespace {

void check_finite(const std::vector<Matrix>& centers, std::size_t iteration, const char* where) {
  for (std::size_t i = 0; i < centers.size(); ++i)
    if (!centers[i].all_finite())
      throw DivergenceError(iteration, std::string(where) + ": non-finite center coordinates at user " +
                                           std::to_string(i));
}

void check_shapes(const NetworkState& state, const std::vector<LocalDataset>& data) {
  if (state.centers.size() != data.size())
    throw StateError("state has " + std::to_string(state.centers.size()) + " users, data has " +
                     std::to_string(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Matrix& c = state.centers[i];
    if (c.rows() != state.clusters() || c.cols() != state.dim())
      throw StateError("center block dimensions differ across users");
    if (data[i].size() > 0 && data[i].dim() != c.cols())
      throw StateError("user " + std::to_string(i) + " data dimension does not match centers");
  }
}

void check_assignments(const NetworkState& state, const std::vector<LocalDataset>& data) {
  if (state.assignments.size() != data.size()) throw StateError("assignments missing for some users");
  const int K = static_cast<int>(state.clusters());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (state.assignments[i].size() != data[i].size())
      throw StateError("user " + std::to_string(i) + " has an incomplete assignment");
    for (int k : state.assignments[i])
      if (k < 0 || k >= K) throw StateError("cluster id out of range at user " + std::to_string(i));
  }
}

}  // namespace

Assignments assign_clusters(const std::vector<Matrix>& centers, const std::vector<LocalDataset>& data,
                            Execution execution, std::size_t iteration) {
  if (centers.size() != data.size()) throw StateError("one center block per user required");
  check_finite(centers, iteration, "assignment");
  Assignments out;
  if (execution == Execution::parallel)
    kernels::parallel::assign(centers, data, out);
  else
    kernels::serial::assign(centers, data, out);
  return out;
}

std::vector<Matrix> step_direction(const NetworkState& state, const std::vector<Inbox>& inboxes,
                                   const std::vector<LocalDataset>& data, const Loss& loss, double rho,
                                   Execution execution) {
  check_shapes(state, data);
  check_assignments(state, data);
  std::vector<Matrix> out;
  if (execution == Execution::parallel)
    kernels::parallel::direction(state.centers, inboxes, data, state.assignments, loss, rho, out);
  else
    kernels::serial::direction(state.centers, inboxes, data, state.assignments, loss, rho, out);
  return out;
}

std::vector<Matrix> center_update(const NetworkState& state, const std::vector<Inbox>& inboxes,
                                  const std::vector<LocalDataset>& data, const Loss& loss, double alpha,
                                  double rho, Execution execution) {
  check_shapes(state, data);
  check_assignments(state, data);
  std::vector<Matrix> out;
  if (execution == Execution::parallel)
    kernels::parallel::update(state.centers, inboxes, data, state.assignments, loss, alpha, rho, out);
  else
    kernels::serial::update(state.centers, inboxes, data, state.assignments, loss, alpha, rho, out);
  check_finite(out, state.iteration, "center update");
  return out;
}

NetworkState dgc_round(const NetworkState& state, const std::vector<LocalDataset>& data, const Topology& topo,
                       const Loss& loss, double alpha, double rho, Execution execution) {
  check_shapes(state, data);
  NetworkState next;
  next.assignments = assign_clusters(state.centers, data, execution, state.iteration);
  const auto inboxes = exchange_centers(topo, state.centers);
  // The update uses the current centers with the freshly computed clusters.
  const NetworkState refreshed{state.centers, next.assignments, state.iteration};
  next.centers = center_update(refreshed, inboxes, data, loss, alpha, rho, execution);
  next.iteration = state.iteration + 1;
  return next;
}

double evaluate_objective(const NetworkState& state, const std::vector<LocalDataset>& data, const Topology& topo,
                          const Loss& loss, double rho, Objective which) {
  check_shapes(state, data);
  check_assignments(state, data);
  const std::size_t K = state.clusters();
  const std::size_t d = state.dim();

  if (which == Objective::global_eq) {
    Matrix mean(K, d);
    for (const Matrix& c : state.centers)
      for (std::size_t e = 0; e < mean.values().size(); ++e) mean.values()[e] += c.values()[e];
    for (double& v : mean.values()) v /= static_cast<double>(state.users());
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
      for (std::size_t r = 0; r < data[i].size(); ++r)
        total += loss.value(mean.row(static_cast<std::size_t>(state.assignments[i][r])), data[i].samples.row(r));
    return total;
  }

  double consensus = 0.0;
  for (const auto& [a, b] : topo.edges())
    for (std::size_t k = 0; k < K; ++k) consensus += squared_distance(state.centers[a].row(k), state.centers[b].row(k));

  double fit = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t r = 0; r < data[i].size(); ++r)
      fit += data[i].weights[r] *
             loss.value(state.centers[i].row(static_cast<std::size_t>(state.assignments[i][r])), data[i].samples.row(r));
  fit /= rho;

  // Summing 0.5 * ||x_i - x_j||^2 over ordered neighbor pairs counts every edge twice.
  return which == Objective::j_rho ? consensus + fit : 0.5 * consensus + fit;
}

double consensus_error(const std::vector<Matrix>& centers) {
  double worst = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      for (std::size_t k = 0; k < centers[i].rows(); ++k)
        worst = std::max(worst, squared_distance(centers[i].row(k), centers[j].row(k)));
  return std::sqrt(worst);
}

AccuracyPair network_accuracy(const NetworkState& state, const std::vector<LocalDataset>& data,
                              std::span<const int> truth) {
  const std::size_t K = state.clusters();
  std::vector<int> predicted_all, truth_all;
  std::vector<int> predicted_user, truth_user;
  double user_sum = 0.0;
  std::size_t users_with_data = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    predicted_user.clear();
    truth_user.clear();
    for (std::size_t r = 0; r < data[i].size(); ++r) {
      const std::size_t g = data[i].global_indices[r];
      if (g >= truth.size()) throw InputError("ground truth shorter than the dataset");
      predicted_user.push_back(state.assignments[i][r]);
      truth_user.push_back(truth[g]);
    }
    predicted_all.insert(predicted_all.end(), predicted_user.begin(), predicted_user.end());
    truth_all.insert(truth_all.end(), truth_user.begin(), truth_user.end());
    if (!predicted_user.empty()) {
      user_sum += clustering_accuracy(predicted_user, truth_user, K);
      ++users_with_data;
    }
  }
  AccuracyPair out;
  out.global = clustering_accuracy(predicted_all, truth_all, K);
  out.mean_user = users_with_data ? user_sum / static_cast<double>(users_with_data) : 1.0;
  return out;
}

FixedPointCertificate fixed_point_check(const NetworkState& state, const std::vector<LocalDataset>& data,
                                        const Topology& topo, const Loss& loss, double rho, double tol) {
  check_shapes(state, data);
  check_assignments(state, data);
  FixedPointCertificate cert;
  cert.assignment_optimal = true;
  for (std::size_t i = 0; i < data.size() && cert.assignment_optimal; ++i) {
    for (std::size_t r = 0; r < data[i].size(); ++r) {
      const auto y = data[i].samples.row(r);
      const double current = squared_distance(state.centers[i].row(static_cast<std::size_t>(state.assignments[i][r])), y);
      const double nearest = squared_distance(state.centers[i].row(static_cast<std::size_t>(
                                                  kernels::nearest_center(state.centers[i], y))),
                                              y);
      if (current > nearest) {  // ties are admissible
        cert.assignment_optimal = false;
        break;
      }
    }
  }
  const auto inboxes = exchange_centers(topo, state.centers);
  const auto direction = step_direction(state, inboxes, data, loss, rho);
  double sq = 0.0;
  for (const Matrix& m : direction)
    for (double v : m.values()) sq += v * v;
  cert.residual_norm = std::sqrt(sq);
  cert.is_fixed = cert.assignment_optimal && cert.residual_norm <= tol;
  return cert;
}

StepSize auto_step_size(const std::vector<LocalDataset>& data, const Topology& topo, const Loss& loss,
                        double rho, double safety, double spectral_tol) {
  if (!(safety > 0.0 && safety < 1.0)) throw ConfigError("alpha safety factor must lie in (0, 1)");
  if (!(rho >= 1.0)) throw ConfigError("rho must be at least 1");
  StepSize step;
  step.spectral = laplacian_lambda_max(topo, spectral_tol);
  double heaviest = 0.0;
  for (const auto& local : data) heaviest = std::max(heaviest, local.total_weight());
  step.smoothness = loss.beta() * heaviest / rho + step.spectral.lambda_max;
  if (!(step.smoothness > 0.0)) throw ConfigError("no data and no edges: the step size is unbounded");
  step.bound = 1.0 / step.smoothness;
  step.alpha = safety * step.bound;
  return step;
}

RunRecord dgc_run(const std::vector<LocalDataset>& data, const Topology& topo, const Loss& loss,
                  const std::vector<Matrix>& init_centers, const SolverConfig& config,
                  std::span<const int> ground_truth) {
  if (data.size() != topo.size())
    throw ConfigError("topology has " + std::to_string(topo.size()) + " users, data has " +
                      std::to_string(data.size()));
  if (!(config.rho >= 1.0)) throw ConfigError("rho must be at least 1");
  if (init_centers.size() != data.size()) throw StateError("one initial center block per user required");
  if (init_centers.empty() || init_centers.front().rows() == 0) throw StateError("need at least one center");
  const std::size_t K = init_centers.front().rows();

  {
    Matrix all(0, init_centers.front().cols());
    for (const auto& local : data)
      for (std::size_t r = 0; r < local.size(); ++r) all.append_row(local.samples.row(r));
    if (!validate_k_distinct(all, K))
      throw DataError("the pooled data has fewer than K = " + std::to_string(K) + " distinct samples");
  }

  RunRecord record;
  record.step = auto_step_size(data, topo, loss, config.rho, config.alpha_safety, config.spectral_tol);
  if (config.alpha) {
    if (!(*config.alpha > 0.0) || !std::isfinite(*config.alpha)) throw ConfigError("alpha must be positive");
    record.step.alpha = *config.alpha;
  }
  const double alpha = record.step.alpha;
  const bool with_truth = !ground_truth.empty();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  NetworkState state;
  state.centers = init_centers;
  check_shapes(state, data);
  check_finite(state.centers, 0, "initialization");

  std::optional<std::size_t> last_change;
  for (std::size_t t = 0; t < config.iterations; ++t) {
    NetworkState next = dgc_round(state, data, topo, loss, alpha, config.rho, config.execution);
    const bool changed = t == 0 || next.assignments != state.assignments;
    if (changed) last_change = t;
    state = std::move(next);

    if (config.record_traces) {
      RunTrace& tr = record.trace;
      tr.phi_rho.push_back(evaluate_objective(state, data, topo, loss, config.rho, Objective::phi_rho));
      tr.j_rho.push_back(evaluate_objective(state, data, topo, loss, config.rho, Objective::j_rho));
      if (with_truth) {
        const auto acc = network_accuracy(state, data, ground_truth);
        tr.global_accuracy.push_back(acc.global);
        tr.mean_user_accuracy.push_back(acc.mean_user);
      } else {
        tr.global_accuracy.push_back(nan);
        tr.mean_user_accuracy.push_back(nan);
      }
      tr.consensus_error.push_back(consensus_error(state.centers));
      tr.clusters_changed.push_back(changed);
    }
    record.iterations = t + 1;

    if (config.early_stop &&
        fixed_point_check(state, data, topo, loss, config.rho, config.fixed_point_tol).is_fixed) {
      record.stopped_early = true;
      break;
    }
  }

  if (last_change && *last_change + 1 < record.iterations) record.t0 = *last_change + 1;
  record.certificate = fixed_point_check(state, data, topo, loss, config.rho, config.fixed_point_tol);
  record.final_state = std::move(state);
  return record;
}

RunRecord cgc_run(const GlobalDataset& data, const Loss& loss, const Matrix& init_centers,
                  std::optional<double> alpha, std::size_t iterations, std::span<const int> ground_truth,
                  Execution execution) {
  const std::vector<LocalDataset> local{pooled(data)};
  const Topology single(1, {});
  SolverConfig config;
  config.rho = 1.0;
  config.alpha = alpha;
  config.iterations = iterations;
  config.execution = execution;
  return dgc_run(local, single, loss, {init_centers}, config, ground_truth);
}

}  // namespace dgc
