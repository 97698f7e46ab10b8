#include <cmath>
#include <random>

#include "doctest.h"
#include "dgc/errors.hpp"
#include "dgc/losses.hpp"
#include "test_support.hpp"

using namespace dgc;

namespace {

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    diff = std::max(diff, std::abs(a[c] - b[c]));
    scale = std::max(scale, std::abs(b[c]));
  }
  return diff / std::max(1.0, scale);
}

// Random orthogonal matrix by Gram-Schmidt on a Gaussian matrix.
Matrix random_rotation(std::mt19937_64& rng, std::size_t d) {
  Matrix q = test::random_matrix(rng, d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += q(i, c) * q(j, c);
      for (std::size_t c = 0; c < d; ++c) q(i, c) -= dot * q(j, c);
    }
    const double n = norm(q.row(i));
    for (std::size_t c = 0; c < d; ++c) q(i, c) /= n;
  }
  return q;
}

std::vector<double> rotate(const Matrix& q, std::span<const double> v) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t c = 0; c < v.size(); ++c) out[i] += q(i, c) * v[c];
  return out;
}

}  // namespace

TEST_CASE("K-means loss examples") {
  const auto loss = kmeans_loss();
  CHECK(loss->beta() == 2.0);
  std::vector<double> g(2);
  const std::vector<double> y{0.0, 0.0}, x{1.0, 0.0};
  CHECK(loss->value(y, y) == 0.0);
  loss->gradient(y, y, g);
  CHECK(g == std::vector<double>{0.0, 0.0});
  CHECK(loss->value(x, y) == 1.0);
  loss->gradient(x, y, g);
  CHECK(g == std::vector<double>{2.0, 0.0});
}

TEST_CASE("K-means gradient matches central differences in R^4") {
  const auto loss = kmeans_loss();
  std::mt19937_64 rng(11);
  std::vector<double> g(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix xy = test::random_matrix(rng, 2, 4, 3.0);
    loss->gradient(xy.row(0), xy.row(1), g);
    CHECK(max_rel_diff(g, finite_difference_gradient(*loss, xy.row(0), xy.row(1))) <= 1e-6);
  }
}

TEST_CASE("Huber loss examples") {
  const auto loss = huber_loss(1.0);
  CHECK(loss->beta() == 1.0);
  std::vector<double> g(2);
  const std::vector<double> y{0.5, -1.0};
  CHECK(loss->value(y, y) == 0.0);
  loss->gradient(y, y, g);
  CHECK(g == std::vector<double>{0.0, 0.0});

  // distance 2 along a 3-4-5 direction: 1 * 2 - 1/2 = 1.5
  const std::vector<double> x{y[0] + 1.2, y[1] + 1.6};
  CHECK(loss->value(x, y) == doctest::Approx(1.5).epsilon(1e-14));
  loss->gradient(x, y, g);
  CHECK(norm(g) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(max_rel_diff(g, finite_difference_gradient(*loss, x, y)) <= 1e-8);

  CHECK_THROWS_AS(huber_loss(0.0), ConfigError);
  CHECK_THROWS_AS(huber_loss(-1.0), ConfigError);
}

TEST_CASE("Huber value and gradient are continuous across the threshold") {
  const auto loss = huber_loss(1.0);
  const std::vector<double> y{0.0, 0.0, 0.0};
  const std::vector<double> u{2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0};
  std::vector<double> x(3), g(3), g_prev(3);
  double prev = -1.0;
  bool first = true;
  for (int s = -50; s <= 50; ++s) {
    const double r = 1.0 + static_cast<double>(s) * 1e-14;
    for (std::size_t c = 0; c < 3; ++c) x[c] = r * u[c];
    const double v = loss->value(x, y);
    loss->gradient(x, y, g);
    if (!first) {
      CHECK(std::abs(v - prev) <= 1e-12);
      CHECK(max_rel_diff(g, g_prev) <= 1e-12);
    }
    prev = v;
    g_prev = g;
    first = false;
  }
  CHECK(prev == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("validator accepts the built-in losses") {
  for (const auto& loss : {kmeans_loss(), huber_loss(1.0)}) {
    const auto report = validate_assumption3(*loss, 4, 1000, 7);
    CHECK_MESSAGE(report.coercivity.passed, report.coercivity.detail);
    CHECK_MESSAGE(report.convex_smooth.passed, report.convex_smooth.detail);
    CHECK_MESSAGE(report.order_preserving.passed, report.order_preserving.detail);
    CHECK_MESSAGE(report.gradient_consistent.passed, report.gradient_consistent.detail);
    CHECK(report.convex_smooth.checks == 1000);
  }
}

TEST_CASE("validator rejects the non-smooth Euclidean norm") {
  const auto norm_loss = custom_loss(
      "norm", 2.0, [](auto x, auto y) { return std::sqrt(squared_distance(x, y)); },
      [](auto x, auto y, auto out) {
        const double n = std::sqrt(squared_distance(x, y));
        for (std::size_t c = 0; c < x.size(); ++c) out[c] = n > 0.0 ? (x[c] - y[c]) / n : 0.0;
      });
  const auto report = validate_assumption3(*norm_loss, 2, 1000, 3);
  CHECK_FALSE(report.convex_smooth.passed);
  CHECK_FALSE(report.all_passed());
  CHECK(report.coercivity.passed);
  CHECK(report.order_preserving.passed);
}

TEST_CASE("validator rejects an understated beta") {
  const auto cheat = custom_loss(
      "kmeans-beta-1", 1.0, [](auto x, auto y) { return squared_distance(x, y); },
      [](auto x, auto y, auto out) {
        for (std::size_t c = 0; c < x.size(); ++c) out[c] = 2.0 * (x[c] - y[c]);
      });
  CHECK_FALSE(validate_assumption3(*cheat, 3, 200, 1).convex_smooth.passed);
}

TEST_CASE("property: seed-swept validation across dimensions") {
  for (std::size_t d : {1u, 2u, 4u, 8u})
    for (std::uint64_t seed = 100; seed < 103; ++seed) {
      CHECK(validate_assumption3(*kmeans_loss(), d, 1000, seed).all_passed());
      CHECK(validate_assumption3(*huber_loss(0.7), d, 1000, seed).all_passed());
    }
}

TEST_CASE("property: losses are invariant under rotations") {
  std::mt19937_64 rng(8);
  for (const auto& loss : {kmeans_loss(), huber_loss(1.5)}) {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t d = 1 + rng() % 6;
      const Matrix q = random_rotation(rng, d);
      const Matrix xy = test::random_matrix(rng, 2, d, 2.0);
      const double plain = loss->value(xy.row(0), xy.row(1));
      const double turned = loss->value(rotate(q, xy.row(0)), rotate(q, xy.row(1)));
      CHECK(turned == doctest::Approx(plain).epsilon(1e-12));
    }
  }
}
