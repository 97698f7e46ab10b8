#ifndef DGC_NETWORK_HPP
#define DGC_NETWORK_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dgc/matrix.hpp"

namespace dgc {

enum class TopologyKind { ring, complete, path, star, erdos_renyi };

std::string to_string(TopologyKind kind);
TopologyKind parse_topology_kind(const std::string& text);

/// Undirected, connected communication graph over users 0..m-1.
/// Immutable once built; connectivity is checked by every constructor.
class Topology {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;  // first < second

  // Throws TopologyError on self-loops, out-of-range ids or a disconnected graph.
  // Duplicate edges (in either orientation) collapse.
  Topology(std::size_t users, const std::vector<Edge>& edges);

  std::size_t size() const { return neighbors_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& neighbors(std::size_t user) const { return neighbors_[user]; }
  std::size_t degree(std::size_t user) const { return neighbors_[user].size(); }
  std::size_t max_degree() const;
  bool adjacent(std::size_t a, std::size_t b) const;

  /// Dense graph Laplacian D - A, row-major m x m.
  Matrix laplacian() const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;  // sorted ascending
};

bool is_connected(std::size_t users, const std::vector<Topology::Edge>& edges);

/// Builds one of the standard shapes. erdos_renyi resamples (seeded) until
/// connected, at most max_retries times.
Topology build_topology(TopologyKind kind, std::size_t users, std::uint64_t seed = 42,
                        double edge_probability = 0.5, std::size_t max_retries = 1000);

/// Edge-list file: one "i j" pair per line, 0-based; '#' starts a comment.
/// The user count is max id + 1 unless given explicitly.
Topology load_topology(const std::filesystem::path& path, std::size_t users = 0);

enum class SpectralMethod { exact_dense, power_iteration, degree_bound };

struct SpectralInfo {
  double lambda_max = 0.0;
  SpectralMethod method = SpectralMethod::exact_dense;
  double residual = 0.0;  // ||L v - lambda v|| for the returned pair; 0 for the degree bound
};

std::string to_string(SpectralMethod method);

/// Largest Laplacian eigenvalue. Dense symmetric eigensolve up to
/// dense_limit users, power iteration above it; a failed power iteration
/// falls back to the 2 * max_degree bound.
SpectralInfo laplacian_lambda_max(const Topology& topo, double tol = 1e-10, std::size_t dense_limit = 64);

SpectralInfo laplacian_lambda_max_dense(const Topology& topo);
SpectralInfo laplacian_lambda_max_power(const Topology& topo, double tol = 1e-10,
                                        std::size_t max_iters = 200000);

/// A neighbor's centers as received in a synchronous round.
struct NeighborCenters {
  std::size_t user;
  Matrix centers;
};
using Inbox = std::vector<NeighborCenters>;

/// Synchronous exchange: inbox i holds a copy of x_j for every j in N_i,
/// in ascending neighbor order, all taken from the same round.
std::vector<Inbox> exchange_centers(const Topology& topo, const std::vector<Matrix>& all_centers);

}  // namespace dgc

#endif  // DGC_NETWORK_HPP
