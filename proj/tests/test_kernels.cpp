#include <omp.h>

#include <random>

#include "doctest.h"
#include "dgc/engine.hpp"
#include "dgc/init.hpp"
#include "dgc/kernels.hpp"
#include "test_support.hpp"

using namespace dgc;

namespace {

struct Instance {
  std::vector<LocalDataset> data;
  Topology topo;
  std::vector<Matrix> centers;
};

Instance make_instance(std::mt19937_64& rng, std::size_t users, std::size_t per_user, std::size_t d, std::size_t K) {
  std::vector<LocalDataset> data;
  for (std::size_t i = 0; i < users; ++i)
    data.push_back(test::local_from(test::random_matrix(rng, per_user + rng() % 7, d, 2.0), i, i * 1000));
  std::vector<Matrix> centers;
  for (std::size_t i = 0; i < users; ++i) centers.push_back(test::random_matrix(rng, K, d, 2.0));
  return {std::move(data), build_topology(TopologyKind::ring, users), std::move(centers)};
}

}  // namespace

TEST_CASE("nearest center breaks ties toward the smaller index") {
  Matrix centers(2, 1);
  centers(0, 0) = -1.0;
  centers(1, 0) = 1.0;
  const std::vector<double> zero{0.0};
  CHECK(kernels::nearest_center(centers, zero) == 0);
  const std::vector<double> right{0.5};
  CHECK(kernels::nearest_center(centers, right) == 1);
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  std::mt19937_64 rng(77);
  const auto loss = huber_loss(0.8);
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    for (int trial = 0; trial < 5; ++trial) {
      // Large enough users to span several assignment blocks.
      auto inst = make_instance(rng, 2 + rng() % 9, 50 + rng() % 1200, 3, 4);
      std::vector<std::vector<int>> a_serial, a_parallel;
      kernels::serial::assign(inst.centers, inst.data, a_serial);
      kernels::parallel::assign(inst.centers, inst.data, a_parallel);
      CHECK(a_serial == a_parallel);

      const auto inboxes = exchange_centers(inst.topo, inst.centers);
      std::vector<Matrix> d_serial, d_parallel, u_serial, u_parallel;
      kernels::serial::direction(inst.centers, inboxes, inst.data, a_serial, *loss, 7.0, d_serial);
      kernels::parallel::direction(inst.centers, inboxes, inst.data, a_serial, *loss, 7.0, d_parallel);
      CHECK(d_serial == d_parallel);
      kernels::serial::update(inst.centers, inboxes, inst.data, a_serial, *loss, 0.01, 7.0, u_serial);
      kernels::parallel::update(inst.centers, inboxes, inst.data, a_serial, *loss, 0.01, 7.0, u_parallel);
      CHECK(u_serial == u_parallel);
    }
  }
}

TEST_CASE("whole runs agree between serial and parallel execution") {
  std::mt19937_64 rng(3);
  auto inst = make_instance(rng, 6, 40, 2, 3);
  SolverConfig config;
  config.rho = 5.0;
  config.iterations = 200;
  const auto serial = dgc_run(inst.data, inst.topo, *kmeans_loss(), inst.centers, config);
  config.execution = Execution::parallel;
  omp_set_num_threads(4);
  const auto parallel = dgc_run(inst.data, inst.topo, *kmeans_loss(), inst.centers, config);
  CHECK(serial.final_state.centers == parallel.final_state.centers);
  CHECK(serial.final_state.assignments == parallel.final_state.assignments);
  CHECK(serial.trace.phi_rho == parallel.trace.phi_rho);
}
