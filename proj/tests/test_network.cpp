#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "dgc/errors.hpp"
#include "dgc/network.hpp"
#include "test_support.hpp"

using namespace dgc;

TEST_CASE("standard shapes") {
  const auto ring = build_topology(TopologyKind::ring, 10);
  CHECK(ring.edges().size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(ring.degree(i) == 2);
  CHECK(ring.neighbors(0) == std::vector<std::size_t>{1, 9});

  const auto triangle = build_topology(TopologyKind::complete, 3);
  CHECK(triangle.edges().size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(triangle.degree(i) == 2);

  const auto pair = build_topology(TopologyKind::ring, 2);
  CHECK(pair.edges() == std::vector<Topology::Edge>{{0, 1}});

  const auto single = build_topology(TopologyKind::ring, 1);
  CHECK(single.size() == 1);
  CHECK(single.edges().empty());

  const auto star = build_topology(TopologyKind::star, 6);
  CHECK(star.degree(0) == 5);
  CHECK(star.degree(3) == 1);

  const auto path = build_topology(TopologyKind::path, 5);
  CHECK(path.edges().size() == 4);
  CHECK(path.degree(0) == 1);
  CHECK(path.degree(2) == 2);
}

TEST_CASE("Erdos-Renyi graphs are connected and seed-determined") {
  const auto a = build_topology(TopologyKind::erdos_renyi, 15, 3, 0.2);
  const auto b = build_topology(TopologyKind::erdos_renyi, 15, 3, 0.2);
  CHECK(a.edges() == b.edges());
  CHECK(is_connected(a.size(), a.edges()));
  CHECK_THROWS_AS(build_topology(TopologyKind::erdos_renyi, 30, 1, 0.001, 5), TopologyError);
}

TEST_CASE("invalid graphs are rejected") {
  CHECK_THROWS_AS(Topology(3, {{0, 1}}), TopologyError);
  CHECK_THROWS_AS(Topology(2, {{0, 0}, {0, 1}}), TopologyError);
  CHECK_THROWS_AS(Topology(2, {{0, 2}}), TopologyError);
  const Topology dup(2, {{0, 1}, {1, 0}, {0, 1}});
  CHECK(dup.edges().size() == 1);
}

TEST_CASE("edge-list file") {
  const auto path = std::filesystem::temp_directory_path() / "dgc_test_edges.txt";
  {
    std::ofstream out(path);
    out << "# square\n0 1\n1 2\n\n2 3\n3 0  # closing edge\n";
  }
  const auto topo = load_topology(path);
  CHECK(topo.size() == 4);
  CHECK(topo.edges().size() == 4);
  CHECK(topo.adjacent(0, 3));
  {
    std::ofstream out(path);
    out << "0 1 2\n";
  }
  CHECK_THROWS_AS(load_topology(path), ParseError);
  {
    std::ofstream out(path);
    out << "0 1\n2 3\n";
  }
  CHECK_THROWS_AS(load_topology(path), TopologyError);
  std::filesystem::remove(path);
}

TEST_CASE("lambda_max examples") {
  CHECK(laplacian_lambda_max(build_topology(TopologyKind::path, 2)).lambda_max == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(laplacian_lambda_max(build_topology(TopologyKind::ring, 10)).lambda_max ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(laplacian_lambda_max(build_topology(TopologyKind::complete, 5)).lambda_max ==
        doctest::Approx(5.0).epsilon(1e-12));
  CHECK(laplacian_lambda_max(build_topology(TopologyKind::ring, 1)).lambda_max == 0.0);

  // Jacobi oracle on the ring of 10 agrees with the closed-form cycle spectrum.
  const auto eig = test::jacobi_eigenvalues(build_topology(TopologyKind::ring, 10).laplacian());
  CHECK(eig.back() == doctest::Approx(2.0 - 2.0 * std::cos(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("property: dense and power iteration agree with the Jacobi oracle and the degree sandwich") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 2 + rng() % 19;
    const double p = 0.15 + 0.7 * std::uniform_real_distribution<double>()(rng);
    const auto topo = build_topology(TopologyKind::erdos_renyi, m, rng(), p);
    const double oracle = test::jacobi_eigenvalues(topo.laplacian()).back();
    const auto dense = laplacian_lambda_max_dense(topo);
    CHECK(dense.method == SpectralMethod::exact_dense);
    CHECK(std::abs(dense.lambda_max - oracle) <= 1e-8 * oracle);

    const auto power = laplacian_lambda_max_power(topo, 1e-12);
    if (power.method == SpectralMethod::power_iteration)
      CHECK(std::abs(power.lambda_max - oracle) <= 1e-8 * oracle);
    else
      CHECK(power.lambda_max >= oracle);

    const double dmax = static_cast<double>(topo.max_degree());
    CHECK(oracle >= dmax + 1.0 - 1e-9);
    CHECK(oracle <= 2.0 * dmax + 1e-9);
  }
}

TEST_CASE("large graphs use power iteration or the safe degree bound") {
  const auto topo = build_topology(TopologyKind::star, 100);
  const auto info = laplacian_lambda_max(topo);
  CHECK(info.method != SpectralMethod::exact_dense);
  CHECK(info.lambda_max == doctest::Approx(100.0).epsilon(1e-8));
}

TEST_CASE("exchange_centers") {
  Matrix a(1, 1, 1.0), b(1, 1, 2.0), c(1, 1, 3.0), d(1, 1, 4.0);

  CHECK(exchange_centers(build_topology(TopologyKind::ring, 1), {a})[0].empty());

  const auto three = exchange_centers(build_topology(TopologyKind::ring, 3), {a, b, c});
  REQUIRE(three[0].size() == 2);
  CHECK(three[0][0].user == 1);
  CHECK(three[0][0].centers == b);
  CHECK(three[0][1].user == 2);
  CHECK(three[0][1].centers == c);

  const auto ring4 = build_topology(TopologyKind::ring, 4);
  const auto four = exchange_centers(ring4, {a, b, c, d});
  std::set<std::size_t> keys;
  for (const auto& msg : four[0]) keys.insert(msg.user);
  CHECK(keys == std::set<std::size_t>(ring4.neighbors(0).begin(), ring4.neighbors(0).end()));
  CHECK(keys == std::set<std::size_t>{1, 3});

  CHECK_THROWS_AS(exchange_centers(ring4, {a, b, c}), StateError);
  CHECK_THROWS_AS(exchange_centers(ring4, {a, b, c, Matrix(2, 1)}), StateError);
}

TEST_CASE("property: symmetric neighbor sets and inbox locality") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 1 + rng() % 12;
    const auto kind = static_cast<TopologyKind>(rng() % 5);
    const auto topo = build_topology(kind, m, rng(), 0.4);
    std::vector<Matrix> centers;
    for (std::size_t i = 0; i < m; ++i) centers.emplace_back(2, 3, static_cast<double>(i));
    const auto inboxes = exchange_centers(topo, centers);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j : topo.neighbors(i)) CHECK(topo.adjacent(j, i));
      CHECK_FALSE(topo.adjacent(i, i));
      CHECK(inboxes[i].size() == topo.degree(i));
      for (const auto& msg : inboxes[i]) {
        CHECK(topo.adjacent(i, msg.user));
        CHECK(msg.centers == centers[msg.user]);
      }
    }
  }
}
