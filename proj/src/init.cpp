#include "dgc/init.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "dgc/errors.hpp"
#include "dgc/kernels.hpp"
#include "dgc/rng.hpp"

namespace dgc {

std::string to_string(InitScheme scheme) {
  switch (scheme) {
    case InitScheme::random: return "random";
    case InitScheme::kmeanspp: return "kmeanspp";
    case InitScheme::dkmc: return "dkmc";
  }
  return "?";
}

InitScheme parse_init_scheme(const std::string& text) {
  if (text == "random") return InitScheme::random;
  if (text == "kmeanspp" || text == "kmeans++" || text == "local_kmeanspp") return InitScheme::kmeanspp;
  if (text == "dkmc") return InitScheme::dkmc;
  throw ConfigError("unknown init scheme '" + text + "'");
}

std::string describe(const InitConfig& config) {
  if (config.scheme == InitScheme::dkmc) return "dkmc_L" + std::to_string(config.rounds);
  return to_string(config.scheme);
}

namespace {

double coordinate_range(const Matrix& points) {
  double range = 0.0;
  for (std::size_t c = 0; c < points.cols(); ++c) {
    double lo = points(0, c), hi = points(0, c);
    for (std::size_t r = 1; r < points.rows(); ++r) {
      lo = std::min(lo, points(r, c));
      hi = std::max(hi, points(r, c));
    }
    range = std::max(range, hi - lo);
  }
  return range > 0.0 ? range : 1.0;
}

// Row indices of the first occurrence of each distinct sample, in row order.
std::vector<std::size_t> distinct_rows(const Matrix& samples) {
  std::set<std::vector<double>> seen;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    const auto row = samples.row(r);
    if (seen.emplace(row.begin(), row.end()).second) rows.push_back(r);
  }
  return rows;
}

}  // namespace

Matrix random_init(const Matrix& samples, std::size_t K, std::uint64_t seed) {
  if (samples.rows() == 0) throw InitError("cannot initialize from an empty local dataset");
  if (K == 0) throw InitError("K must be positive");
  Rng rng(seed);
  auto pool = distinct_rows(samples);
  Matrix centers(0, samples.cols());

  // Partial Fisher-Yates over the distinct rows.
  const std::size_t take = std::min(K, pool.size());
  for (std::size_t k = 0; k < take; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
    std::swap(pool[k], pool[pick(rng)]);
    centers.append_row(samples.row(pool[k]));
  }
  if (take < K) {
    const double nudge = 1e-9 * coordinate_range(samples);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<double> row(samples.cols());
    for (std::size_t k = take; k < K; ++k) {
      const auto source = samples.row(pool[pick(rng)]);
      std::copy(source.begin(), source.end(), row.begin());
      for (double& v : row) v += nudge * static_cast<double>(k - take + 1);
      centers.append_row(row);
    }
  }
  return centers;
}

Matrix kmeanspp_init(const Matrix& samples, std::size_t K, std::uint64_t seed) {
  const std::size_t n = samples.rows();
  if (n == 0) throw InitError("cannot initialize from an empty local dataset");
  if (K == 0) throw InitError("K must be positive");
  Rng rng(seed);
  Matrix centers(0, samples.cols());

  std::uniform_int_distribution<std::size_t> uniform(0, n - 1);
  std::size_t chosen = uniform(rng);
  centers.append_row(samples.row(chosen));

  std::vector<double> closest(n);
  for (std::size_t r = 0; r < n; ++r) closest[r] = squared_distance(samples.row(r), samples.row(chosen));

  while (centers.rows() < K) {
    const double total = std::accumulate(closest.begin(), closest.end(), 0.0);
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double running = 0.0;
      chosen = n;
      std::size_t last_positive = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (closest[r] <= 0.0) continue;
        last_positive = r;
        running += closest[r];
        if (target < running) {
          chosen = r;
          break;
        }
      }
      if (chosen == n) chosen = last_positive;  // rounding at the top end
    } else {
      // Every distinct point is already a center.
      chosen = uniform(rng);
    }
    centers.append_row(samples.row(chosen));
    for (std::size_t r = 0; r < n; ++r)
      closest[r] = std::min(closest[r], squared_distance(samples.row(r), samples.row(chosen)));
  }
  return centers;
}

LloydResult lloyd_kmeans(const Matrix& points, const Matrix& init, std::size_t max_iters, double tol) {
  if (points.rows() == 0) throw InitError("Lloyd needs at least one point");
  if (init.rows() == 0 || init.cols() != points.cols()) throw InitError("Lloyd initial centers have the wrong shape");
  const std::size_t K = init.rows();
  const std::size_t d = points.cols();

  LloydResult result;
  result.centers = init;
  result.assignment.assign(points.rows(), -1);
  std::vector<int> next(points.rows());

  for (std::size_t it = 0; it < max_iters; ++it) {
    kernels::assign_user(result.centers, points, next);
    const bool stable = next == result.assignment;
    result.assignment = next;
    if (stable) break;
    ++result.iterations;

    Matrix sums(K, d);
    std::vector<std::size_t> counts(K, 0);
    for (std::size_t r = 0; r < points.rows(); ++r) {
      const auto k = static_cast<std::size_t>(next[r]);
      ++counts[k];
      auto acc = sums.row(k);
      const auto p = points.row(r);
      for (std::size_t c = 0; c < d; ++c) acc[c] += p[c];
    }
    double moved = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (counts[k] == 0) continue;
      auto center = result.centers.row(k);
      double shift = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double updated = sums(k, c) / static_cast<double>(counts[k]);
        shift += (updated - center[c]) * (updated - center[c]);
        center[c] = updated;
      }
      moved = std::max(moved, std::sqrt(shift));
    }
    if (moved < tol) {
      kernels::assign_user(result.centers, points, result.assignment);
      break;
    }
  }
  return result;
}

std::vector<Matrix> dkmc_init(const std::vector<LocalDataset>& data, const Topology& topo, std::size_t K,
                              std::size_t rounds, std::uint64_t seed, const LloydOptions& lloyd) {
  if (data.size() != topo.size()) throw ConfigError("topology and data disagree on the number of users");
  std::vector<Matrix> centers(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) centers[i] = kmeanspp_init(data[i], K, user_seed(seed, i));

  for (std::size_t l = 1; l <= rounds; ++l) {
    const auto inboxes = exchange_centers(topo, centers);
    std::vector<Matrix> next(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      Matrix pool = centers[i];
      for (const auto& neighbor : inboxes[i])
        for (std::size_t k = 0; k < K; ++k) pool.append_row(neighbor.centers.row(k));
      const double tol = lloyd.relative_tol * coordinate_range(pool);
      next[i] = lloyd_kmeans(pool, centers[i], lloyd.max_iters, tol).centers;
    }
    centers = std::move(next);
  }
  return centers;
}

std::vector<Matrix> initialize_network(const std::vector<LocalDataset>& data, const Topology& topo,
                                       std::size_t K, const InitConfig& config) {
  switch (config.scheme) {
    case InitScheme::random: {
      std::vector<Matrix> centers;
      for (std::size_t i = 0; i < data.size(); ++i) centers.push_back(random_init(data[i], K, user_seed(config.seed, i)));
      return centers;
    }
    case InitScheme::kmeanspp:
      return dkmc_init(data, topo, K, 0, config.seed, config.lloyd);
    case InitScheme::dkmc:
      return dkmc_init(data, topo, K, config.rounds, config.seed, config.lloyd);
  }
  throw ConfigError("unknown init scheme");
}

}  // namespace dgc
