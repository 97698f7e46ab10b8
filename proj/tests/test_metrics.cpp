#include <random>

#include "doctest.h"
#include "dgc/errors.hpp"
#include "dgc/metrics.hpp"
#include "test_support.hpp"

using namespace dgc;

namespace {

std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, std::size_t K) {
  std::vector<int> v(n);
  for (int& x : v) x = static_cast<int>(rng() % K);
  return v;
}

}  // namespace

TEST_CASE("identity and relabelled predictions score 1") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2, 2};
  CHECK(clustering_accuracy(truth, truth, 3) == 1.0);
  const std::vector<int> relabelled{2, 2, 0, 0, 1, 1, 1};
  CHECK(clustering_accuracy(relabelled, truth, 3) == 1.0);
}

TEST_CASE("n = 6, K = 3 agrees with the 3! search") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_labels(rng, 6, 3);
    const auto t = random_labels(rng, 6, 3);
    CHECK(clustering_accuracy(p, t, 3) == test::brute_force_accuracy(p, t, 3));
  }
}

TEST_CASE("hand example") {
  // Best map 0->1, 1->0 gets 4 of 5.
  CHECK(clustering_accuracy(std::vector<int>{0, 0, 1, 1, 1}, std::vector<int>{1, 1, 0, 0, 1}, 2) ==
        doctest::Approx(0.8));
}

TEST_CASE("more clusters than classes") {
  // Best matching sends cluster 2 to class 1 and leaves cluster 1 on an unused class.
  CHECK(clustering_accuracy(std::vector<int>{0, 1, 2, 2}, std::vector<int>{0, 1, 1, 1}, 3) == doctest::Approx(0.75));
}

TEST_CASE("Hungarian path agrees with exhaustive search at K = 9") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    const auto p = random_labels(rng, 40, 9);
    const auto t = random_labels(rng, 40, 9);
    CHECK(clustering_accuracy(p, t, 9) == test::brute_force_accuracy(p, t, 9));
  }
}

TEST_CASE("max_weight_assignment matches brute force on random score matrices") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<double> score(n * n);
    for (double& s : score) s = std::round(u(rng));
    const auto match = max_weight_assignment(score, n);
    double got = 0.0;
    for (std::size_t r = 0; r < n; ++r) got += score[r * n + match[r]];
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += score[r * n + perm[r]];
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == best);
  }
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(clustering_accuracy(std::vector<int>{0, 1}, std::vector<int>{0}, 2), InputError);
  CHECK_THROWS_AS(clustering_accuracy(std::vector<int>{-1}, std::vector<int>{0}, 2), InputError);
}
