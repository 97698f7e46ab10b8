#include "dgc/kernels.hpp"

namespace dgc::kernels::serial {

void assign(const std::vector<Matrix>& centers, const std::vector<LocalDataset>& data,
            std::vector<std::vector<int>>& out) {
  out.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i].resize(data[i].size());
    assign_user(centers[i], data[i].samples, out[i]);
  }
}

void direction(const std::vector<Matrix>& centers, const std::vector<Inbox>& inboxes,
               const std::vector<LocalDataset>& data, const std::vector<std::vector<int>>& assignments,
               const Loss& loss, double rho, std::vector<Matrix>& out) {
  out.resize(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i)
    direction_user(centers[i], inboxes[i], data[i], assignments[i], loss, rho, out[i]);
}

void update(const std::vector<Matrix>& centers, const std::vector<Inbox>& inboxes,
            const std::vector<LocalDataset>& data, const std::vector<std::vector<int>>& assignments,
            const Loss& loss, double alpha, double rho, std::vector<Matrix>& out) {
  out.resize(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i)
    update_user(centers[i], inboxes[i], data[i], assignments[i], loss, alpha, rho, out[i]);
}

}  // namespace dgc::kernels::serial
