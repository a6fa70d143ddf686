#pragma once

#include <chrono>
#include <numeric>
#include <string>
#include <vector>

#include "discrank/errors.hpp"
#include "discrank/fit_report.hpp"
#include "discrank/lbfgs.hpp"
#include "discrank/payoff.hpp"

namespace discrank {

/// Stationary Elo scores (alpha = 1), mean-centered.
struct EloRating {
  std::vector<std::string> players;
  Vector u;
  std::string model = "elo";  // or "elopp"

  std::size_t n_players() const { return static_cast<std::size_t>(u.size()); }
};

enum class EloLoss {
  Bce,        // classical Elo
  Quadratic,  // Elo++ without the temporal part
};

inline const char* to_string(EloLoss loss) { return loss == EloLoss::Bce ? "bce" : "quadratic"; }

struct EloOptions {
  EloLoss loss = EloLoss::Bce;
  double tol = 1e-8;
  std::size_t max_iter = 1000;
  bool weight_by_count = false;
};

struct EloFit {
  EloRating rating;
  FitReport report;
};

namespace detail {

/// Number of connected components of the matchup graph.
inline std::size_t matchup_components(const ObservedPayoff& obs) {
  std::vector<std::size_t> parent(obs.n_players());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = obs.n_players();
  for (const auto& e : obs.entries()) {
    const auto a = find(e.i);
    const auto b = find(e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

inline void require_coverage(const ObservedPayoff& obs) {
  const auto deg = obs.degrees();
  for (std::size_t k = 0; k < deg.size(); ++k) {
    if (deg[k] == 0) {
      throw DegenerateGame("player '" + obs.players()[k] + "' has no observed matchup");
    }
  }
}

}  // namespace detail

/// Elo objective over observed pairs (each unordered pair once) and its
/// gradient with respect to u.
inline double elo_objective(const ObservedPayoff& obs, const Vector& u, EloLoss loss,
                            bool weight_by_count, Vector& grad) {
  grad.setZero(u.size());
  double f = 0.0;
  for (const auto& e : obs.entries()) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    const double w = weight_by_count ? static_cast<double>(e.count) : 1.0;
    const double x = u[i] - u[j];
    double dx = 0.0;
    if (loss == EloLoss::Bce) {
      f += w * bce_logits(e.p, x);
      dx = w * (sigmoid(x) - e.p);
    } else {
      const double s = sigmoid(x);
      f += w * 0.5 * (e.p - s) * (e.p - s);
      dx = w * (s - e.p) * s * (1.0 - s);
    }
    grad[i] += dx;
    grad[j] -= dx;
  }
  return f;
}

/// Fits Elo scores by quasi-Newton minimization of the stationary objective
/// from u = 0. Throws ConvergenceFailure if ||grad||_inf > tol at the end.
inline EloFit fit_elo(const ObservedPayoff& obs, const EloOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (obs.n_players() < 2) throw DegenerateGame("Elo needs at least 2 players");
  detail::require_coverage(obs);

  FitReport report;
  report.model = options.loss == EloLoss::Bce ? "elo" : "elopp";
  report.parameter_count = obs.n_players();
  report.config = {{"loss", to_string(options.loss)},
                   {"tol", options.tol},
                   {"max_iter", options.max_iter},
                   {"weight_by_count", options.weight_by_count}};
  if (detail::matchup_components(obs) > 1) {
    report.warnings.push_back(
        "matchup graph is disconnected; offsets between components are unidentified");
  }

  auto objective = [&](const Vector& u, Vector& g) {
    return elo_objective(obs, u, options.loss, options.weight_by_count, g);
  };
  Vector u = Vector::Zero(static_cast<Eigen::Index>(obs.n_players()));
  LbfgsOptions lopts;
  lopts.grad_tol = options.tol;
  lopts.max_iter = options.max_iter;
  auto res = minimize_lbfgs(objective, u, lopts);
  std::size_t iterations = res.iterations;

  if (res.status == LbfgsStatus::LineSearchFailed) {
    // Gradient-descent fallback with backtracking.
    Vector g(u.size());
    double f = objective(u, g);
    for (std::size_t it = iterations; it < options.max_iter; ++it, ++iterations) {
      if (g.lpNorm<Eigen::Infinity>() <= options.tol) break;
      double step = 1.0;
      Vector trial(u.size());
      Vector g_trial(u.size());
      double f_trial = f;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        trial = u - step * g;
        f_trial = objective(trial, g_trial);
        if (f_trial <= f - 1e-4 * step * g.squaredNorm()) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
      u = trial;
      g = g_trial;
      f = f_trial;
    }
    res.value = f;
    res.grad_inf_norm = g.lpNorm<Eigen::Infinity>();
  }

  u.array() -= u.mean();
  report.objective_trace = {res.value};
  report.iterations = iterations;
  report.converged = res.grad_inf_norm <= options.tol;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!report.converged) {
    throw ConvergenceFailure("Elo fit did not reach gradient tolerance (||g||_inf = " +
                                 std::to_string(res.grad_inf_norm) + ")",
                             report, {u});
  }
  EloRating rating{obs.players(), std::move(u), report.model};
  return {std::move(rating), std::move(report)};
}

inline double predict_elo(const EloRating& r, std::size_t i, std::size_t j) {
  if (i >= r.n_players() || j >= r.n_players()) {
    throw UnknownPlayer("player index out of range");
  }
  return sigmoid(r.u[static_cast<Eigen::Index>(i)] - r.u[static_cast<Eigen::Index>(j)]);
}

inline std::size_t player_index(const std::vector<std::string>& players, const std::string& name) {
  for (std::size_t k = 0; k < players.size(); ++k) {
    if (players[k] == name) return k;
  }
  throw UnknownPlayer("unknown player '" + name + "'");
}

inline double predict_elo(const EloRating& r, const std::string& a, const std::string& b) {
  return predict_elo(r, player_index(r.players, a), player_index(r.players, b));
}

/// Single Elo step after a game between i and j with outcome S for i.
inline EloRating update_elo_online(const EloRating& r, std::size_t i, std::size_t j, double outcome,
                                   double eta) {
  if (!(eta > 0.0)) throw InvalidConfig("step size must be positive");
  const double delta = eta * (outcome - predict_elo(r, i, j));
  EloRating out = r;
  out.u[static_cast<Eigen::Index>(i)] += delta;
  out.u[static_cast<Eigen::Index>(j)] -= delta;
  return out;
}

}  // namespace discrank
