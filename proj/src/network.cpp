#include "dgc/network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "dgc/errors.hpp"
#include "dgc/rng.hpp"

namespace dgc {

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::ring: return "ring";
    case TopologyKind::complete: return "complete";
    case TopologyKind::path: return "path";
    case TopologyKind::star: return "star";
    case TopologyKind::erdos_renyi: return "erdos_renyi";
  }
  return "?";
}

TopologyKind parse_topology_kind(const std::string& text) {
  if (text == "ring") return TopologyKind::ring;
  if (text == "complete") return TopologyKind::complete;
  if (text == "path") return TopologyKind::path;
  if (text == "star") return TopologyKind::star;
  if (text == "erdos_renyi" || text == "er") return TopologyKind::erdos_renyi;
  throw ConfigError("unknown topology '" + text + "'");
}

std::string to_string(SpectralMethod method) {
  switch (method) {
    case SpectralMethod::exact_dense: return "exact_dense";
    case SpectralMethod::power_iteration: return "power_iteration";
    case SpectralMethod::degree_bound: return "degree_bound";
  }
  return "?";
}

bool is_connected(std::size_t users, const std::vector<Topology::Edge>& edges) {
  if (users <= 1) return true;
  std::vector<std::vector<std::size_t>> adj(users);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(users, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
  }
  return reached == users;
}

Topology::Topology(std::size_t users, const std::vector<Edge>& edges) {
  if (users < 1) throw TopologyError("topology needs at least one user");
  std::set<Edge> unique;
  for (auto [a, b] : edges) {
    if (a >= users || b >= users) throw TopologyError("edge endpoint out of range");
    if (a == b) throw TopologyError("self-loop at user " + std::to_string(a));
    unique.emplace(std::min(a, b), std::max(a, b));
  }
  edges_.assign(unique.begin(), unique.end());
  if (!is_connected(users, edges_)) throw TopologyError("graph is not connected");
  neighbors_.resize(users);
  for (const auto& [a, b] : edges_) {
    neighbors_[a].push_back(b);
    neighbors_[b].push_back(a);
  }
  for (auto& list : neighbors_) std::sort(list.begin(), list.end());
}

std::size_t Topology::max_degree() const {
  std::size_t best = 0;
  for (const auto& list : neighbors_) best = std::max(best, list.size());
  return best;
}

bool Topology::adjacent(std::size_t a, std::size_t b) const {
  const auto& list = neighbors_[a];
  return std::binary_search(list.begin(), list.end(), b);
}

Matrix Topology::laplacian() const {
  const std::size_t m = size();
  Matrix lap(m, m);
  for (std::size_t i = 0; i < m; ++i) lap(i, i) = static_cast<double>(degree(i));
  for (const auto& [a, b] : edges_) {
    lap(a, b) = -1.0;
    lap(b, a) = -1.0;
  }
  return lap;
}

Topology build_topology(TopologyKind kind, std::size_t users, std::uint64_t seed, double edge_probability,
                        std::size_t max_retries) {
  if (users < 1) throw TopologyError("topology needs at least one user");
  std::vector<Topology::Edge> edges;
  switch (kind) {
    case TopologyKind::ring:
      for (std::size_t i = 0; i + 1 < users; ++i) edges.emplace_back(i, i + 1);
      if (users > 2) edges.emplace_back(0, users - 1);
      break;
    case TopologyKind::path:
      for (std::size_t i = 0; i + 1 < users; ++i) edges.emplace_back(i, i + 1);
      break;
    case TopologyKind::complete:
      for (std::size_t i = 0; i < users; ++i)
        for (std::size_t j = i + 1; j < users; ++j) edges.emplace_back(i, j);
      break;
    case TopologyKind::star:
      for (std::size_t i = 1; i < users; ++i) edges.emplace_back(0, i);
      break;
    case TopologyKind::erdos_renyi: {
      if (!(edge_probability > 0.0 && edge_probability <= 1.0))
        throw ConfigError("edge probability must be in (0, 1]");
      Rng rng(derive_seed(seed, seed_tags::topology));
      std::bernoulli_distribution coin(edge_probability);
      for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
        edges.clear();
        for (std::size_t i = 0; i < users; ++i)
          for (std::size_t j = i + 1; j < users; ++j)
            if (coin(rng)) edges.emplace_back(i, j);
        if (is_connected(users, edges)) return Topology(users, edges);
      }
      throw TopologyError("no connected Erdos-Renyi graph after " + std::to_string(max_retries) + " draws");
    }
  }
  return Topology(users, edges);
}

Topology load_topology(const std::filesystem::path& path, std::size_t users) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open topology file '" + path.string() + "'");
  std::vector<Topology::Edge> edges;
  std::size_t max_id = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long a = 0, b = 0;
    if (!(fields >> a)) continue;
    std::string extra;
    if (!(fields >> b) || (fields >> extra) || a < 0 || b < 0)
      throw ParseError(line_no, "expected two non-negative user ids");
    edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    max_id = std::max({max_id, static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
  }
  const std::size_t m = users ? users : (edges.empty() ? 1 : max_id + 1);
  return Topology(m, edges);
}

SpectralInfo laplacian_lambda_max_dense(const Topology& topo) {
  const std::size_t m = topo.size();
  const Matrix lap = topo.laplacian();
  Eigen::MatrixXd dense(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = lap(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  SpectralInfo info;
  info.method = SpectralMethod::exact_dense;
  info.lambda_max = solver.eigenvalues()(static_cast<Eigen::Index>(m) - 1);
  const Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(m) - 1);
  info.residual = (dense * v - info.lambda_max * v).norm();
  return info;
}

namespace {

void apply_laplacian(const Topology& topo, const std::vector<double>& v, std::vector<double>& out) {
  for (std::size_t i = 0; i < topo.size(); ++i) {
    double s = static_cast<double>(topo.degree(i)) * v[i];
    for (std::size_t j : topo.neighbors(i)) s -= v[j];
    out[i] = s;
  }
}

SpectralInfo degree_bound(const Topology& topo) {
  return {2.0 * static_cast<double>(topo.max_degree()), SpectralMethod::degree_bound, 0.0};
}

}  // namespace

SpectralInfo laplacian_lambda_max_power(const Topology& topo, double tol, std::size_t max_iters) {
  const std::size_t m = topo.size();
  if (m == 1) return {0.0, SpectralMethod::power_iteration, 0.0};

  // Fixed-seed start vector, projected off the constant null vector.
  Rng rng(0x5eed);
  std::normal_distribution<double> gauss;
  std::vector<double> v(m), w(m);
  double mean = 0.0;
  for (double& x : v) mean += (x = gauss(rng));
  mean /= static_cast<double>(m);
  double nv = 0.0;
  for (double& x : v) {
    x -= mean;
    nv += x * x;
  }
  nv = std::sqrt(nv);
  for (double& x : v) x /= nv;

  double lambda = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    apply_laplacian(topo, v, w);
    double rq = 0.0;
    for (std::size_t i = 0; i < m; ++i) rq += v[i] * w[i];
    double res = 0.0;
    for (std::size_t i = 0; i < m; ++i) res += (w[i] - rq * v[i]) * (w[i] - rq * v[i]);
    res = std::sqrt(res);
    lambda = rq;
    if (res <= tol * std::max(rq, 1.0)) {
      // Rayleigh quotients never exceed lambda_max <= 2 * max_degree.
      const double cap = 2.0 * static_cast<double>(topo.max_degree());
      return {std::min(lambda, cap), SpectralMethod::power_iteration, res};
    }
    double nw = 0.0;
    for (double x : w) nw += x * x;
    nw = std::sqrt(nw);
    if (!(nw > 0.0)) break;
    for (std::size_t i = 0; i < m; ++i) v[i] = w[i] / nw;
  }
  return degree_bound(topo);
}

SpectralInfo laplacian_lambda_max(const Topology& topo, double tol, std::size_t dense_limit) {
  if (topo.size() == 1) return {0.0, SpectralMethod::exact_dense, 0.0};
  if (topo.size() <= dense_limit) return laplacian_lambda_max_dense(topo);
  return laplacian_lambda_max_power(topo, tol);
}

std::vector<Inbox> exchange_centers(const Topology& topo, const std::vector<Matrix>& all_centers) {
  if (all_centers.size() != topo.size())
    throw StateError("expected one center block per user (" + std::to_string(topo.size()) + "), got " +
                     std::to_string(all_centers.size()));
  for (const Matrix& c : all_centers)
    if (c.rows() != all_centers.front().rows() || c.cols() != all_centers.front().cols())
      throw StateError("center block dimensions differ across users");
  std::vector<Inbox> inboxes(topo.size());
  for (std::size_t i = 0; i < topo.size(); ++i) {
    inboxes[i].reserve(topo.degree(i));
    for (std::size_t j : topo.neighbors(i)) inboxes[i].push_back({j, all_centers[j]});
  }
  return inboxes;
}

}  // namespace dgc
