#ifndef DGC_LOSSES_HPP
#define DGC_LOSSES_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dgc {

/// Clustering loss f(x, y) with its gradient in the first argument.
///
/// Implementations must be coercive and convex in x, beta-smooth, and rank
/// candidate centers exactly as Euclidean distance to y does. The assignment
/// step relies on that ordering; validate_assumption3 checks it numerically.
class Loss {
 public:
  virtual ~Loss() = default;

  virtual std::string name() const = 0;
  virtual double beta() const = 0;
  virtual double value(std::span<const double> x, std::span<const double> y) const = 0;
  // out = grad_x f(x, y); out has the same length as x.
  virtual void gradient(std::span<const double> x, std::span<const double> y, std::span<double> out) const = 0;
};

using LossModel = std::shared_ptr<const Loss>;

/// f = ||x - y||^2, beta = 2.
LossModel kmeans_loss();

/// Huber on the residual norm: 0.5 r^2 for r <= delta, delta r - delta^2 / 2
/// beyond. beta = 1. Throws ConfigError unless delta > 0.
LossModel huber_loss(double delta);

using LossValueFn = std::function<double(std::span<const double>, std::span<const double>)>;
using LossGradientFn = std::function<void(std::span<const double>, std::span<const double>, std::span<double>)>;

/// Wraps user-supplied callables, e.g. to plug in a loss not shipped here.
LossModel custom_loss(std::string name, double beta, LossValueFn value, LossGradientFn gradient);

/// Central-difference gradient with step h = 1e-6 * max(1, ||x||).
std::vector<double> finite_difference_gradient(const Loss& loss, std::span<const double> x,
                                               std::span<const double> y);

struct ConditionResult {
  bool passed = true;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest violation seen, in the condition's own units
  std::string detail;
};

struct Assumption3Report {
  ConditionResult coercivity;
  ConditionResult convex_smooth;
  ConditionResult order_preserving;
  ConditionResult gradient_consistent;

  bool all_passed() const {
    return coercivity.passed && convex_smooth.passed && order_preserving.passed && gradient_consistent.passed;
  }
};

/// Randomized check of coercivity, convexity with the beta quadratic upper
/// bound, order preservation, and gradient/value agreement.
Assumption3Report validate_assumption3(const Loss& loss, std::size_t d, std::size_t trials, std::uint64_t seed);

}  // namespace dgc

#endif  // DGC_LOSSES_HPP
