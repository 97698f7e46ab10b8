#ifndef DGC_INIT_HPP
#define DGC_INIT_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dgc/data.hpp"
#include "dgc/matrix.hpp"
#include "dgc/network.hpp"

namespace dgc {

enum class InitScheme { random, kmeanspp, dkmc };

struct LloydOptions {
  std::size_t max_iters = 100;
  double relative_tol = 1e-9;  // multiplied by the pooled data's coordinate range
};

struct InitConfig {
  InitScheme scheme = InitScheme::kmeanspp;
  std::size_t rounds = 0;  // DKM+C communication rounds
  std::uint64_t seed = 42;
  LloydOptions lloyd;
};

std::string to_string(InitScheme scheme);
InitScheme parse_init_scheme(const std::string& text);
/// "random", "kmeanspp", "dkmc(L=2)".
std::string describe(const InitConfig& config);

/// K centers drawn uniformly without replacement from the distinct local
/// samples. With fewer distinct samples than K the remainder is drawn with
/// replacement and nudged by 1e-9 times the data range.
Matrix random_init(const Matrix& samples, std::size_t K, std::uint64_t seed);
inline Matrix random_init(const LocalDataset& data, std::size_t K, std::uint64_t seed) {
  return random_init(data.samples, K, seed);
}

/// D^2 seeding: uniform first center, then each next center with probability
/// proportional to the squared distance to the closest chosen one.
Matrix kmeanspp_init(const Matrix& samples, std::size_t K, std::uint64_t seed);
inline Matrix kmeanspp_init(const LocalDataset& data, std::size_t K, std::uint64_t seed) {
  return kmeanspp_init(data.samples, K, seed);
}

struct LloydResult {
  Matrix centers;
  std::vector<int> assignment;
  std::size_t iterations = 0;
};

/// Lloyd's K-means from the given centers. Stops at an assignment fixpoint,
/// when no center moves by tol or more, or after max_iters. Empty clusters
/// keep their previous center.
LloydResult lloyd_kmeans(const Matrix& points, const Matrix& init, std::size_t max_iters, double tol);

/// Distributed K-means++ with clustering rounds: local K-means++ at round 0,
/// then L rounds of neighbor exchange followed by Lloyd on the pooled
/// (|N_i| + 1) K centers, seeded with the user's own previous centers.
std::vector<Matrix> dkmc_init(const std::vector<LocalDataset>& data, const Topology& topo, std::size_t K,
                              std::size_t rounds, std::uint64_t seed, const LloydOptions& lloyd = {});

/// Initial centers for every user according to config. User i draws from the
/// stream user_seed(config.seed, i).
std::vector<Matrix> initialize_network(const std::vector<LocalDataset>& data, const Topology& topo,
                                       std::size_t K, const InitConfig& config);

}  // namespace dgc

#endif  // DGC_INIT_HPP
