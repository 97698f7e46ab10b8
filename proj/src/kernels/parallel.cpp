#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dgc/kernels.hpp"

namespace dgc::kernels::parallel {

namespace {

// Assignment is independent per sample, so work is split into fixed-size
// blocks across all users; users with large N_i still spread over threads.
struct Block {
  std::size_t user;
  std::size_t begin;
  std::size_t end;
};

constexpr std::size_t kBlockRows = 512;

std::vector<Block> make_blocks(const std::vector<LocalDataset>& data) {
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t b = 0; b < data[i].size(); b += kBlockRows)
      blocks.push_back({i, b, std::min(b + kBlockRows, data[i].size())});
  return blocks;
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void assign(const std::vector<Matrix>& centers, const std::vector<LocalDataset>& data,
            std::vector<std::vector<int>>& out) {
  out.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i].resize(data[i].size());
  const auto blocks = make_blocks(data);
  const auto count = static_cast<std::ptrdiff_t>(blocks.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t b = 0; b < count; ++b) {
    const Block& block = blocks[static_cast<std::size_t>(b)];
    const Matrix& own = centers[block.user];
    const Matrix& samples = data[block.user].samples;
    auto& labels = out[block.user];
    for (std::size_t r = block.begin; r < block.end; ++r) labels[r] = nearest_center(own, samples.row(r));
  }
}

// Gradient sums stay per user so the floating-point summation order matches
// the serial kernel exactly.
void direction(const std::vector<Matrix>& centers, const std::vector<Inbox>& inboxes,
               const std::vector<LocalDataset>& data, const std::vector<std::vector<int>>& assignments,
               const Loss& loss, double rho, std::vector<Matrix>& out) {
  out.resize(centers.size());
  const auto users = static_cast<std::ptrdiff_t>(centers.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < users; ++i) {
    const auto u = static_cast<std::size_t>(i);
    direction_user(centers[u], inboxes[u], data[u], assignments[u], loss, rho, out[u]);
  }
}

void update(const std::vector<Matrix>& centers, const std::vector<Inbox>& inboxes,
            const std::vector<LocalDataset>& data, const std::vector<std::vector<int>>& assignments,
            const Loss& loss, double alpha, double rho, std::vector<Matrix>& out) {
  out.resize(centers.size());
  const auto users = static_cast<std::ptrdiff_t>(centers.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < users; ++i) {
    const auto u = static_cast<std::size_t>(i);
    update_user(centers[u], inboxes[u], data[u], assignments[u], loss, alpha, rho, out[u]);
  }
}

}  // namespace dgc::kernels::parallel
