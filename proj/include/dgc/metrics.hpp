#ifndef DGC_METRICS_HPP
#define DGC_METRICS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace dgc {

/// Fraction of samples whose predicted cluster maps onto the true class under
/// the best one-to-one relabelling. Clusters and classes may differ in count;
/// the matching is over max(K, classes) ids. Exhaustive search for up to 8
/// ids, Hungarian assignment above. Throws InputError on length mismatch or
/// negative ids.
double clustering_accuracy(std::span<const int> predicted, std::span<const int> truth, std::size_t K);

/// Maximum-weight perfect matching on a square score matrix (row-major);
/// returns match[row] = column.
std::vector<std::size_t> max_weight_assignment(const std::vector<double>& score, std::size_t size);

}  // namespace dgc

#endif  // DGC_METRICS_HPP
