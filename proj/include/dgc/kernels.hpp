#ifndef DGC_KERNELS_HPP
#define DGC_KERNELS_HPP

// Per-round compute kernels. Both back ends call the same per-user
// primitives, so results are bit-identical regardless of thread count.

#include <span>
#include <vector>

#include "dgc/data.hpp"
#include "dgc/losses.hpp"
#include "dgc/matrix.hpp"
#include "dgc/network.hpp"

namespace dgc::kernels {

int nearest_center(const Matrix& centers, std::span<const double> y);

void assign_user(const Matrix& centers, const Matrix& samples, std::span<int> out);

/// Consensus plus scaled gradient for one user, written into out (K x d).
void direction_user(const Matrix& own, const Inbox& inbox, const LocalDataset& local,
                    std::span<const int> assignment, const Loss& loss, double rho, Matrix& out);

/// own - alpha * direction.
void update_user(const Matrix& own, const Inbox& inbox, const LocalDataset& local, std::span<const int> assignment,
                 const Loss& loss, double alpha, double rho, Matrix& out);

namespace serial {
void assign(const std::vector<Matrix>& centers, const std::vector<LocalDataset>& data,
            std::vector<std::vector<int>>& out);
void direction(const std::vector<Matrix>& centers, const std::vector<Inbox>& inboxes,
               const std::vector<LocalDataset>& data, const std::vector<std::vector<int>>& assignments,
               const Loss& loss, double rho, std::vector<Matrix>& out);
void update(const std::vector<Matrix>& centers, const std::vector<Inbox>& inboxes,
            const std::vector<LocalDataset>& data, const std::vector<std::vector<int>>& assignments,
            const Loss& loss, double alpha, double rho, std::vector<Matrix>& out);
}  // namespace serial

namespace parallel {
void assign(const std::vector<Matrix>& centers, const std::vector<LocalDataset>& data,
            std::vector<std::vector<int>>& out);
void direction(const std::vector<Matrix>& centers, const std::vector<Inbox>& inboxes,
               const std::vector<LocalDataset>& data, const std::vector<std::vector<int>>& assignments,
               const Loss& loss, double rho, std::vector<Matrix>& out);
void update(const std::vector<Matrix>& centers, const std::vector<Inbox>& inboxes,
            const std::vector<LocalDataset>& data, const std::vector<std::vector<int>>& assignments,
            const Loss& loss, double alpha, double rho, std::vector<Matrix>& out);
int max_threads();
}  // namespace parallel

}  // namespace dgc::kernels

#endif  // DGC_KERNELS_HPP
