#include <cmath>
#include <limits>

#include "dgc/kernels.hpp"

namespace dgc::kernels {

int nearest_center(const Matrix& centers, std::span<const double> y) {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centers.rows(); ++k) {
    const double dist = squared_distance(centers.row(k), y);
    if (dist < best_dist) {  // strict: ties keep the smaller index
      best_dist = dist;
      best = static_cast<int>(k);
    }
  }
  return best;
}

void assign_user(const Matrix& centers, const Matrix& samples, std::span<int> out) {
  for (std::size_t r = 0; r < samples.rows(); ++r) out[r] = nearest_center(centers, samples.row(r));
}

void direction_user(const Matrix& own, const Inbox& inbox, const LocalDataset& local,
                    std::span<const int> assignment, const Loss& loss, double rho, Matrix& out) {
  const std::size_t K = own.rows();
  const std::size_t d = own.cols();
  if (out.rows() != K || out.cols() != d) out = Matrix(K, d);

  Matrix grad_sum(K, d);
  std::vector<double> grad(d);
  for (std::size_t r = 0; r < local.size(); ++r) {
    const auto k = static_cast<std::size_t>(assignment[r]);
    loss.gradient(own.row(k), local.samples.row(r), grad);
    const double w = local.weights[r];
    auto acc = grad_sum.row(k);
    for (std::size_t c = 0; c < d; ++c) acc[c] += w * grad[c];
  }

  for (std::size_t k = 0; k < K; ++k) {
    const auto x = own.row(k);
    auto dir = out.row(k);
    for (std::size_t c = 0; c < d; ++c) dir[c] = 0.0;
    for (const auto& neighbor : inbox) {
      const auto xj = neighbor.centers.row(k);
      for (std::size_t c = 0; c < d; ++c) dir[c] += x[c] - xj[c];
    }
    const auto g = grad_sum.row(k);
    for (std::size_t c = 0; c < d; ++c) dir[c] += g[c] / rho;
  }
}

void update_user(const Matrix& own, const Inbox& inbox, const LocalDataset& local, std::span<const int> assignment,
                 const Loss& loss, double alpha, double rho, Matrix& out) {
  Matrix dir;
  direction_user(own, inbox, local, assignment, loss, rho, dir);
  out = own;
  auto& values = out.values();
  const auto& step = dir.values();
  for (std::size_t e = 0; e < values.size(); ++e) values[e] -= alpha * step[e];
}

}  // namespace dgc::kernels
