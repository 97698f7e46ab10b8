#include "dgc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dgc/errors.hpp"
#include "dgc/matrix.hpp"
#include "dgc/rng.hpp"

namespace dgc {

namespace {

class KMeansLoss final : public Loss {
 public:
  std::string name() const override { return "kmeans"; }
  double beta() const override { return 2.0; }
  double value(std::span<const double> x, std::span<const double> y) const override {
    return squared_distance(x, y);
  }
  void gradient(std::span<const double> x, std::span<const double> y, std::span<double> out) const override {
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = 2.0 * (x[c] - y[c]);
  }
};

class HuberLoss final : public Loss {
 public:
  explicit HuberLoss(double delta) : delta_(delta) {}
  std::string name() const override {
    std::ostringstream s;
    s << "huber(" << delta_ << ")";
    return s.str();
  }
  double beta() const override { return 1.0; }
  double value(std::span<const double> x, std::span<const double> y) const override {
    const double sq = squared_distance(x, y);
    if (sq <= delta_ * delta_) return 0.5 * sq;
    return delta_ * std::sqrt(sq) - 0.5 * delta_ * delta_;
  }
  void gradient(std::span<const double> x, std::span<const double> y, std::span<double> out) const override {
    const double sq = squared_distance(x, y);
    const double scale = sq <= delta_ * delta_ ? 1.0 : delta_ / std::sqrt(sq);
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = scale * (x[c] - y[c]);
  }

 private:
  double delta_;
};

class CallableLoss final : public Loss {
 public:
  CallableLoss(std::string name, double beta, LossValueFn value, LossGradientFn gradient)
      : name_(std::move(name)), beta_(beta), value_(std::move(value)), gradient_(std::move(gradient)) {}
  std::string name() const override { return name_; }
  double beta() const override { return beta_; }
  double value(std::span<const double> x, std::span<const double> y) const override { return value_(x, y); }
  void gradient(std::span<const double> x, std::span<const double> y, std::span<double> out) const override {
    gradient_(x, y, out);
  }

 private:
  std::string name_;
  double beta_;
  LossValueFn value_;
  LossGradientFn gradient_;
};

std::vector<double> random_vector(Rng& rng, std::size_t d, double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  std::vector<double> v(d);
  for (double& x : v) x = gauss(rng);
  return v;
}

std::vector<double> random_unit(Rng& rng, std::size_t d) {
  std::vector<double> v;
  double n = 0.0;
  do {
    v = random_vector(rng, d, 1.0);
    n = norm(v);
  } while (n < 1e-12);
  for (double& x : v) x /= n;
  return v;
}

void record(ConditionResult& result, bool ok, double violation) {
  ++result.checks;
  if (!ok) {
    ++result.failures;
    result.passed = false;
    result.worst = std::max(result.worst, violation);
  }
}

}  // namespace

LossModel kmeans_loss() { return std::make_shared<KMeansLoss>(); }

LossModel huber_loss(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("Huber delta must be positive");
  return std::make_shared<HuberLoss>(delta);
}

LossModel custom_loss(std::string name, double beta, LossValueFn value, LossGradientFn gradient) {
  if (!(beta > 0.0)) throw ConfigError("loss smoothness constant must be positive");
  return std::make_shared<CallableLoss>(std::move(name), beta, std::move(value), std::move(gradient));
}

std::vector<double> finite_difference_gradient(const Loss& loss, std::span<const double> x,
                                               std::span<const double> y) {
  const double h = 1e-6 * std::max(1.0, norm(x));
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double keep = probe[c];
    probe[c] = keep + h;
    const double up = loss.value(probe, y);
    probe[c] = keep - h;
    const double down = loss.value(probe, y);
    probe[c] = keep;
    grad[c] = (up - down) / (2.0 * h);
  }
  return grad;
}

Assumption3Report validate_assumption3(const Loss& loss, std::size_t d, std::size_t trials, std::uint64_t seed) {
  if (d == 0 || trials == 0) throw ConfigError("validator needs d >= 1 and trials >= 1");
  Rng rng(seed);
  Assumption3Report report;
  const double beta = loss.beta();
  constexpr double slack = 1e-9;
  // Triples are drawn at several scales so that behaviour near x = y is probed.
  constexpr double scales[] = {1e-3, 1e-1, 1.0, 10.0};
  std::vector<double> grad(d);

  for (std::size_t t = 0; t < trials; ++t) {
    const double scale = scales[t % std::size(scales)];
    const auto y = random_vector(rng, d, 1.0);

    // Coercivity: strictly increasing along a ray from the origin, radii 1e2..1e6.
    {
      const auto u = random_unit(rng, d);
      std::vector<double> x(d);
      double previous = -1.0;
      bool ok = true;
      for (double radius = 1e2; radius <= 1e6 * 1.0001; radius *= 10.0) {
        for (std::size_t c = 0; c < d; ++c) x[c] = radius * u[c];
        const double v = loss.value(x, y);
        if (!(v > previous) || !std::isfinite(v)) ok = false;
        previous = v;
      }
      record(report.coercivity, ok, ok ? 0.0 : 1.0);
    }

    // Convexity and the beta quadratic upper bound on a random triple.
    {
      auto x = random_vector(rng, d, scale);
      auto z = random_vector(rng, d, scale);
      for (std::size_t c = 0; c < d; ++c) {
        x[c] += y[c];
        z[c] += y[c];
      }
      loss.gradient(z, y, grad);
      double inner = 0.0;
      for (std::size_t c = 0; c < d; ++c) inner += grad[c] * (x[c] - z[c]);
      const double gap = loss.value(x, y) - loss.value(z, y) - inner;
      const double upper = 0.5 * beta * squared_distance(x, z);
      const bool ok = gap >= -slack && gap <= upper + slack;
      record(report.convex_smooth, ok, ok ? 0.0 : std::max(-gap, gap - upper));
    }

    // Order preservation: equal distances give equal values, nested distances
    // strictly increasing values.
    {
      const auto u = random_unit(rng, d);
      const auto v = random_unit(rng, d);
      std::uniform_real_distribution<double> radius_dist(0.0, 3.0 * scale);
      const double r = radius_dist(rng);
      std::vector<double> a(d), b(d), far(d);
      for (std::size_t c = 0; c < d; ++c) {
        a[c] = y[c] + r * u[c];
        b[c] = y[c] + r * v[c];
        far[c] = y[c] + (1.5 * r + 1e-3) * v[c];
      }
      const double fa = loss.value(a, y);
      const double fb = loss.value(b, y);
      const double ff = loss.value(far, y);
      const double tol = 1e-9 * (1.0 + std::abs(fa));
      const bool equal_ok = std::abs(fa - fb) <= tol;
      const bool nested_ok = fb < ff;
      record(report.order_preserving, equal_ok && nested_ok,
             equal_ok ? (nested_ok ? 0.0 : fb - ff) : std::abs(fa - fb));
    }

    // Gradient against central differences.
    {
      auto x = random_vector(rng, d, scale);
      for (std::size_t c = 0; c < d; ++c) x[c] += y[c];
      loss.gradient(x, y, grad);
      const auto fd = finite_difference_gradient(loss, x, y);
      double diff = 0.0;
      for (std::size_t c = 0; c < d; ++c) diff += (grad[c] - fd[c]) * (grad[c] - fd[c]);
      diff = std::sqrt(diff);
      const double rel = diff / std::max(1.0, norm(grad));
      const bool ok = rel <= 1e-5;
      record(report.gradient_consistent, ok, rel);
    }
  }

  auto describe = [](ConditionResult& r, const char* what) {
    std::ostringstream s;
    s << what << ": " << (r.checks - r.failures) << "/" << r.checks << " passed";
    if (!r.passed) s << ", worst violation " << r.worst;
    r.detail = s.str();
  };
  describe(report.coercivity, "coercivity");
  describe(report.convex_smooth, "convexity + beta-smoothness");
  describe(report.order_preserving, "order preservation");
  describe(report.gradient_consistent, "gradient consistency");
  return report;
}

}  // namespace dgc
