#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <variant>

#include "discrank/errors.hpp"
#include "discrank/payoff.hpp"

namespace discrank {

struct GameSpec;

/// P_ij = sigmoid(u_i - u_j).
struct EloGame {
  Vector u;
};

/// P_ij = sigmoid(u_i v_j - v_i u_j).
struct DiscGame {
  Vector u;
  Vector v;
};

/// logit(P) = ratio * logit(P_elo) + (1 - ratio) * logit(P_disc).
struct Interpolated {
  std::shared_ptr<const GameSpec> elo;
  std::shared_ptr<const GameSpec> disc;
  double ratio = 0.5;
};

/// Three-player transitive game on which Elo can misrank players 1 and 2.
struct ExampleThree {
  double gamma = 0.75;
  double delta = 0.75;
};

struct GameSpec {
  std::variant<EloGame, DiscGame, Interpolated, ExampleThree> kind;

  std::size_t n_players() const {
    return std::visit(
        [](const auto& g) -> std::size_t {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, EloGame>) {
            return static_cast<std::size_t>(g.u.size());
          } else if constexpr (std::is_same_v<T, DiscGame>) {
            return static_cast<std::size_t>(g.u.size());
          } else if constexpr (std::is_same_v<T, Interpolated>) {
            return g.elo ? g.elo->n_players() : 0;
          } else {
            return 3;
          }
        },
        kind);
  }

  void validate() const {
    std::visit(
        [](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, DiscGame>) {
            if (g.u.size() != g.v.size()) throw InvalidConfig("disc game needs |u| == |v|");
          } else if constexpr (std::is_same_v<T, Interpolated>) {
            if (!g.elo || !g.disc) throw InvalidConfig("interpolated game needs both endpoints");
            if (!(g.ratio >= 0.0 && g.ratio <= 1.0)) {
              throw InvalidConfig("interpolation ratio must lie in [0, 1]");
            }
            g.elo->validate();
            g.disc->validate();
            if (g.elo->n_players() != g.disc->n_players()) {
              throw InvalidConfig("interpolated endpoints differ in player count");
            }
          } else if constexpr (std::is_same_v<T, ExampleThree>) {
            if (!(g.gamma > 0.5 && g.gamma <= 1.0) || !(g.delta > 0.5 && g.delta <= 1.0)) {
              throw InvalidConfig("example-three parameters must lie in (0.5, 1]");
            }
          }
        },
        kind);
    if (n_players() < 2) throw DegenerateGame("a game needs at least 2 players");
  }
};

namespace detail {

inline Matrix disc_logits(const Vector& u, const Vector& v) {
  return u * v.transpose() - v * u.transpose();
}

inline Matrix elo_logits(const Vector& u) {
  const auto n = u.size();
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = u[i] - u[j];
  }
  return out;
}

inline Matrix example_three_matrix(double gamma, double delta) {
  Matrix p(3, 3);
  p << 0.5, gamma, gamma,
       1.0 - gamma, 0.5, delta,
       1.0 - gamma, 1.0 - delta, 0.5;
  return p;
}

}  // namespace detail

/// Skew-symmetric logit matrix of a spec. ExampleThree may contain +-inf.
inline Matrix realize_logits(const GameSpec& spec) {
  return std::visit(
      [](const auto& g) -> Matrix {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, EloGame>) {
          return detail::elo_logits(g.u);
        } else if constexpr (std::is_same_v<T, DiscGame>) {
          return detail::disc_logits(g.u, g.v);
        } else if constexpr (std::is_same_v<T, Interpolated>) {
          return g.ratio * realize_logits(*g.elo) + (1.0 - g.ratio) * realize_logits(*g.disc);
        } else {
          Matrix p = detail::example_three_matrix(g.gamma, g.delta);
          return p.unaryExpr([](double x) { return logit(x); });
        }
      },
      spec.kind);
}

/// Fully observed payoff of a synthetic game.
inline DensePayoff realize(const GameSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n_players());
  DensePayoff out{Matrix::Constant(n, n, 0.5), BoolMatrix::Constant(n, n, true)};
  if (const auto* e3 = std::get_if<ExampleThree>(&spec.kind)) {
    out.matrix = detail::example_three_matrix(e3->gamma, e3->delta);
    return out;
  }
  const Matrix a = realize_logits(spec);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double p = sigmoid(a(i, j));
      out.matrix(i, j) = p;
      out.matrix(j, i) = 1.0 - p;
    }
  }
  return out;
}

/// n players evenly spaced on the unit circle (fully cyclic).
inline GameSpec canonical_cyclic_disc(std::size_t n) {
  if (n < 3) throw DegenerateGame("cyclic disc game needs n >= 3");
  Vector u(static_cast<Eigen::Index>(n));
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i <= n; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    u[static_cast<Eigen::Index>(i - 1)] = std::cos(angle);
    v[static_cast<Eigen::Index>(i - 1)] = std::sin(angle);
  }
  return GameSpec{DiscGame{std::move(u), std::move(v)}};
}

/// Elo game with i.i.d. standard normal scores.
inline GameSpec random_elo_game(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return GameSpec{EloGame{random_normal(n, 1.0, rng)}};
}

/// Disc game with i.i.d. standard normal (u, v).
inline GameSpec random_disc_game(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Vector u = random_normal(n, 1.0, rng);
  Vector v = random_normal(n, 1.0, rng);
  return GameSpec{DiscGame{std::move(u), std::move(v)}};
}

/// Interpolation between random_elo_game(n, seed) and random_disc_game(n, seed).
inline GameSpec interpolated_game(std::size_t n, double ratio, std::uint64_t seed) {
  return GameSpec{Interpolated{std::make_shared<const GameSpec>(random_elo_game(n, seed)),
                               std::make_shared<const GameSpec>(random_disc_game(n, seed)),
                               ratio}};
}

}  // namespace discrank
