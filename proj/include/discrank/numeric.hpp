#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace discrank {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// Binary cross entropy of target p against the prediction sigmoid(x),
/// written in logit form so that p in {0, 1} and large |x| stay finite.
inline double bce_logits(double p, double x) { return softplus(x) - p * x; }

inline double clamp_probability(double p, double eps) {
  return std::clamp(p, eps, 1.0 - eps);
}

/// Normal(0, stddev) draws from a seeded engine.
inline Vector random_normal(std::size_t n, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Vector out(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = dist(rng);
  return out;
}

/// Fisher-Yates shuffle driven only by raw engine output, so that a seed
/// yields the same permutation on every standard library.
template <typename T>
void stable_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace discrank
