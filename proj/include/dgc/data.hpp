#ifndef DGC_DATA_HPP
#define DGC_DATA_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dgc/matrix.hpp"

namespace dgc {

/// The pooled dataset D before it is spread over users.
struct GlobalDataset {
  Matrix samples;                            // n_total x d
  std::optional<std::vector<int>> labels;    // 0-based class ids, first-appearance order
  std::vector<std::string> label_names;      // label_names[id] is the raw CSV token
  std::optional<std::vector<double>> weights;  // per-sample w, only when a weight column was read

  std::size_t size() const { return samples.rows(); }
  std::size_t dim() const { return samples.cols(); }
  std::size_t num_classes() const { return label_names.size(); }
};

/// One user's slice D_i together with its sample weights and the mapping back
/// into the global dataset.
struct LocalDataset {
  std::size_t owner = 0;
  Matrix samples;                          // N_i x d
  std::vector<double> weights;             // w_{i,r} > 0
  std::vector<std::size_t> global_indices;

  std::size_t size() const { return samples.rows(); }
  std::size_t dim() const { return samples.cols(); }
  double total_weight() const;
};

enum class CsvFormat { features_label, features_only };

struct LoadOptions {
  CsvFormat format = CsvFormat::features_label;
  // Column index (0-based, in the raw row) holding per-sample weights.
  std::optional<std::size_t> weight_column;
};

GlobalDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});
GlobalDataset parse_dataset(const std::string& text, const LoadOptions& options = {});

/// Population z-scoring per feature; constant features are only centered.
void standardize(GlobalDataset& data);

/// True iff the samples contain at least K distinct vectors (exact equality).
bool validate_k_distinct(const Matrix& samples, std::size_t K);
inline bool validate_k_distinct(const GlobalDataset& data, std::size_t K) {
  return validate_k_distinct(data.samples, K);
}
std::size_t count_distinct(const Matrix& samples);

enum class PartitionMode { homogeneous, heterogeneous, custom };

struct PartitionSpec {
  PartitionMode mode = PartitionMode::homogeneous;
  std::size_t users = 1;
  std::uint64_t seed = 42;
  std::size_t classes_per_user = 2;
  std::size_t min_samples_per_user = 2;  // per (user, eligible class)
  std::vector<std::size_t> owners;       // custom mode: owner of each global sample
};

/// Spreads the global samples over spec.users users. Local datasets are
/// disjoint and cover every sample; weights come from the dataset's weight
/// column when present, otherwise 1.
std::vector<LocalDataset> partition(const GlobalDataset& data, const PartitionSpec& spec);

/// The whole dataset as a single user's slice.
LocalDataset pooled(const GlobalDataset& data);

std::string to_string(PartitionMode mode);
PartitionMode parse_partition_mode(const std::string& text);

}  // namespace dgc

#endif  // DGC_DATA_HPP
