#include "dgc/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "dgc/errors.hpp"

namespace dgc {

std::vector<std::size_t> max_weight_assignment(const std::vector<double>& score, std::size_t size) {
  // Hungarian algorithm (potentials form) on cost = -score, 1-based internals.
  const std::size_t n = size;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), way_min(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  auto cost = [&](std::size_t i, std::size_t j) { return -score[(i - 1) * n + (j - 1)]; };
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(way_min.begin(), way_min.end(), inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < way_min[j]) {
          way_min[j] = cur;
          way[j] = j0;
        }
        if (way_min[j] < delta) {
          delta = way_min[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          way_min[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> match(n, 0);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) match[p[j] - 1] = j - 1;
  return match;
}

double clustering_accuracy(std::span<const int> predicted, std::span<const int> truth, std::size_t K) {
  if (predicted.size() != truth.size())
    throw InputError("predicted and true label vectors differ in length");
  if (predicted.empty()) return 1.0;

  std::size_t size = K;
  for (std::size_t r = 0; r < predicted.size(); ++r) {
    if (predicted[r] < 0 || truth[r] < 0) throw InputError("labels must be non-negative");
    size = std::max({size, static_cast<std::size_t>(predicted[r]) + 1, static_cast<std::size_t>(truth[r]) + 1});
  }
  // confusion[p * size + t] = #samples with cluster p and class t
  std::vector<double> confusion(size * size, 0.0);
  for (std::size_t r = 0; r < predicted.size(); ++r)
    confusion[static_cast<std::size_t>(predicted[r]) * size + static_cast<std::size_t>(truth[r])] += 1.0;

  double best = 0.0;
  if (size <= 8) {
    std::vector<std::size_t> perm(size);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double hits = 0.0;
      for (std::size_t p = 0; p < size; ++p) hits += confusion[p * size + perm[p]];
      best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    const auto match = max_weight_assignment(confusion, size);
    for (std::size_t p = 0; p < size; ++p) best += confusion[p * size + match[p]];
  }
  return best / static_cast<double>(predicted.size());
}

}  // namespace dgc
