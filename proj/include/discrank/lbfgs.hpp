#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>

#include "discrank/numeric.hpp"

namespace discrank {

struct LbfgsOptions {
  double grad_tol = 1e-8;  // stop when ||g||_inf <= grad_tol
  std::size_t max_iter = 1000;
  std::size_t history = 10;
  double armijo = 1e-4;
  double curvature = 0.9;
  std::size_t max_line_search = 60;
};

enum class LbfgsStatus { Converged, MaxIterations, LineSearchFailed };

struct LbfgsResult {
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  double value = 0.0;
  double grad_inf_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;

  bool converged() const { return status == LbfgsStatus::Converged; }
};

/// Limited-memory BFGS with a weak-Wolfe bisection line search.
///
/// `objective(x, grad)` returns f(x) and writes the gradient into `grad`
/// (already sized like x). `x` holds the starting point on entry and the
/// last accepted iterate on return.
template <typename Objective>
LbfgsResult minimize_lbfgs(Objective&& objective, Vector& x,
                           const LbfgsOptions& options = {}) {
  LbfgsResult result;
  const Eigen::Index n = x.size();
  Vector g(n);
  double f = objective(x, g);
  ++result.evaluations;

  std::deque<Vector> s_hist;
  std::deque<Vector> y_hist;
  std::deque<double> rho_hist;
  Vector alpha_buf(static_cast<Eigen::Index>(options.history));

  Vector x_new(n);
  Vector g_new(n);
  for (result.iterations = 0; result.iterations < options.max_iter;
       ++result.iterations) {
    result.grad_inf_norm = n > 0 ? g.lpNorm<Eigen::Infinity>() : 0.0;
    if (result.grad_inf_norm <= options.grad_tol) {
      result.status = LbfgsStatus::Converged;
      result.value = f;
      return result;
    }

    // Two-loop recursion.
    Vector d = -g;
    const std::size_t m = s_hist.size();
    for (std::size_t k = m; k-- > 0;) {
      const double a = rho_hist[k] * s_hist[k].dot(d);
      alpha_buf[static_cast<Eigen::Index>(k)] = a;
      d -= a * y_hist[k];
    }
    if (m > 0) {
      d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    } else {
      d /= std::max(1.0, g.norm());
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double b = rho_hist[k] * y_hist[k].dot(d);
      d += (alpha_buf[static_cast<Eigen::Index>(k)] - b) * s_hist[k];
    }

    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      // Lost descent; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g / std::max(1.0, g.norm());
      slope = g.dot(d);
    }

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double t = 1.0;
    bool accepted = false;
    double f_new = f;
    for (std::size_t ls = 0; ls < options.max_line_search; ++ls) {
      x_new = x + t * d;
      f_new = objective(x_new, g_new);
      ++result.evaluations;
      const double dslope = g_new.dot(d);
      // Approximate Wolfe conditions (Hager-Zhang): near the minimum the
      // Armijo test is lost in rounding, so trust the slope instead.
      if (std::isfinite(f_new) && f_new <= f + 1e-12 * std::abs(f) &&
          dslope >= options.curvature * slope &&
          dslope <= (2.0 * options.armijo - 1.0) * slope) {
        accepted = true;
        break;
      }
      if (!std::isfinite(f_new) || f_new > f + options.armijo * t * slope) {
        hi = t;
      } else if (dslope < options.curvature * slope) {
        lo = t;
      } else {
        accepted = true;
        break;
      }
      t = std::isinf(hi) ? 2.0 * t : 0.5 * (lo + hi);
    }
    if (!accepted) {
      // Accept any strict decrease found at the low end of the bracket.
      if (lo > 0.0) {
        x_new = x + lo * d;
        f_new = objective(x_new, g_new);
        ++result.evaluations;
        accepted = f_new < f;
      }
      if (!accepted) {
        result.status = LbfgsStatus::LineSearchFailed;
        result.value = f;
        return result;
      }
    }

    Vector s = x_new - x;
    Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      if (s_hist.size() == options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
  }
  result.grad_inf_norm = n > 0 ? g.lpNorm<Eigen::Infinity>() : 0.0;
  result.status = result.grad_inf_norm <= options.grad_tol
                      ? LbfgsStatus::Converged
                      : LbfgsStatus::MaxIterations;
  result.value = f;
  return result;
}

}  // namespace discrank
