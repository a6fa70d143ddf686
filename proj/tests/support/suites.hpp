#pragma once

// Seeded property suites shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "discrank/discrank.hpp"

namespace suites {

using namespace discrank;

inline ObservedPayoff payoff_from_logits(const Matrix& a) {
  const auto n = a.rows();
  DensePayoff p{Matrix::Constant(n, n, 0.5), BoolMatrix::Constant(n, n, true)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      p.matrix(i, j) = sigmoid(a(i, j));
      p.matrix(j, i) = 1.0 - p.matrix(i, j);
    }
  }
  return to_observed(p);
}

inline Matrix reconstruct(const DiscEmbedding& emb) {
  const auto n = static_cast<Eigen::Index>(emb.n_players());
  Matrix a = Matrix::Zero(n, n);
  for (const auto& c : emb.components) a += c.u * c.v.transpose() - c.v * c.u.transpose();
  return a;
}

// ---------------------------------------------------------------------------

struct HullCycleResult {
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  std::size_t cyclic = 0;
  std::size_t transitive = 0;
  std::size_t rejected = 0;
};

/// Hull verdict vs brute-force 3-cycle search on random disc games.
inline HullCycleResult hull_vs_cycles(std::size_t cases, std::uint64_t seed) {
  HullCycleResult r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  while (r.cases < cases) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng() % 6);
    PlanarPointSet pts(n);
    Vector u(static_cast<Eigen::Index>(n));
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      pts[k] = {unit(rng), unit(rng)};
      u[static_cast<Eigen::Index>(k)] = pts[k].u;
      v[static_cast<Eigen::Index>(k)] = pts[k].v;
    }
    if (std::abs(origin_hull_margin(pts)) < 1e-6) {
      ++r.rejected;
      continue;
    }
    ++r.cases;
    const auto cls = classify_disc(pts);
    const auto p = realize(GameSpec{DiscGame{u, v}});
    const auto cycle = find_cycle(p);
    const bool cyclic = cls.verdict == Verdict::FullyCyclic;
    (cyclic ? r.cyclic : r.transitive) += 1;
    bool ok = cyclic == cycle.has_value() && cyclic == oracle::tournament_has_cycle(p.matrix);
    if (cyclic) {
      ok = ok && cls.witness.has_value();
      if (cls.witness) {
        const auto w = *cls.witness;
        ok = ok && p.matrix(w.i, w.j) > 0.5 && p.matrix(w.j, w.k) > 0.5 && p.matrix(w.k, w.i) > 0.5;
      }
    }
    if (!ok) ++r.mismatches;
  }
  return r;
}

// ---------------------------------------------------------------------------

struct ReparametrizeResult {
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst_payoff_change = 0.0;
};

/// Random embeddings inside an open half-plane through the origin, rotated
/// at random; reparametrize_positive must make every v positive and keep
/// all payoffs.
inline ReparametrizeResult reparametrize_positive_suite(std::size_t cases, std::uint64_t seed) {
  ReparametrizeResult r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (; r.cases < cases; ++r.cases) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng() % 8);
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    const double spread = 0.5 * std::numbers::pi - 0.05;
    PlanarPointSet pts(n);
    for (auto& p : pts) {
      const double phi = theta + spread * (2.0 * unit(rng) - 1.0);
      const double rad = 0.1 + 1.9 * unit(rng);
      p = {rad * std::cos(phi), rad * std::sin(phi)};
    }
    bool ok = classify_disc(pts).verdict == Verdict::FullyTransitive;
    PlanarPointSet out;
    try {
      out = reparametrize_positive(pts);
    } catch (const Error&) {
      ++r.failures;
      continue;
    }
    for (const auto& p : out) ok = ok && p.v > 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = std::abs(sigmoid(cross(out[i], out[j])) - sigmoid(cross(pts[i], pts[j])));
        r.worst_payoff_change = std::max(r.worst_payoff_change, d);
      }
    }
    if (!ok) ++r.failures;
  }
  return r;
}

// ---------------------------------------------------------------------------

struct ReconstructionResult {
  std::size_t cases = 0;
  double worst_relative_error = 0.0;
  double worst_orthogonality = 0.0;
  double worst_oracle_magnitude_error = 0.0;
  double worst_oracle_reconstruction = 0.0;
  double seconds = 0.0;
  std::size_t not_converged = 0;
};

/// Full-rank logit-mse fits of random skew matrices, checked against the
/// matrix and against its real Schur form.
inline ReconstructionResult reconstruction(std::size_t cases, std::uint64_t seed) {
  ReconstructionResult r;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  for (; r.cases < cases; ++r.cases) {
    const auto n = static_cast<Eigen::Index>(3 + rng() % 8);
    const Matrix a = oracle::random_skew(n, rng);
    FitConfig config;
    config.loss_space = LossSpace::LogitMse;
    config.k = static_cast<std::size_t>(n / 2);
    config.seed = r.cases;
    config.throw_on_nonconvergence = false;
    const auto fit = fit_disc(payoff_from_logits(a), config);
    if (!fit.report.converged) ++r.not_converged;
    const Matrix ahat = reconstruct(fit.embedding);
    r.worst_relative_error = std::max(r.worst_relative_error, (ahat - a).norm() / a.norm());
    for (double res : fit.report.orthogonality_residuals) {
      r.worst_orthogonality = std::max(r.worst_orthogonality, res);
    }
    const auto blocks = oracle::skew_block_magnitudes(a);
    for (std::size_t l = 0; l < fit.embedding.k(); ++l) {
      const double expected = l < blocks.size() ? blocks[l] : 0.0;
      const double got = fit.embedding.components[l].magnitude();
      r.worst_oracle_magnitude_error =
          std::max(r.worst_oracle_magnitude_error, std::abs(got - expected) / blocks.front());
    }
    r.worst_oracle_reconstruction = std::max(
        r.worst_oracle_reconstruction, (oracle::schur_reconstruct(a) - ahat).norm() / a.norm());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---------------------------------------------------------------------------

struct TransitiveCountResult {
  std::size_t cases = 0;
  std::size_t violations = 0;
  std::size_t max_transitive = 0;
  std::size_t matrices_with_one = 0;
};

/// Counts transitive components in full decompositions of random 8x8 skew
/// matrices.
inline TransitiveCountResult transitive_components(std::size_t cases, std::uint64_t seed) {
  TransitiveCountResult r;
  std::mt19937_64 rng(seed);
  for (; r.cases < cases; ++r.cases) {
    const Matrix a = oracle::random_skew(8, rng);
    FitConfig config;
    config.loss_space = LossSpace::LogitMse;
    config.k = 4;
    config.seed = r.cases;
    config.throw_on_nonconvergence = false;
    const auto fit = fit_disc(payoff_from_logits(a), config);
    std::size_t transitive = 0;
    for (const auto& c : fit.embedding.components) {
      if (classify_disc(c.points()).verdict == Verdict::FullyTransitive) ++transitive;
    }
    r.max_transitive = std::max(r.max_transitive, transitive);
    if (transitive == 1) ++r.matrices_with_one;
    if (transitive > 1) ++r.violations;
  }
  return r;
}

// ---------------------------------------------------------------------------

struct GradientResult {
  std::size_t points = 0;
  double worst = 0.0;
};

inline ObservedPayoff random_partial_payoff(std::size_t n, double keep, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PayoffEntry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (unit(rng) < keep) {
        entries.push_back({i, j, 0.02 + 0.96 * unit(rng), 1 + static_cast<std::size_t>(rng() % 5)});
      }
    }
  }
  return ObservedPayoff(default_player_names(n), std::move(entries));
}

/// Analytic gradient of the full penalized objective vs central differences.
inline GradientResult loss_gradients(LossSpace space, std::size_t points, std::uint64_t seed) {
  GradientResult r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (; r.points < points; ++r.points) {
    const std::size_t n = 4 + static_cast<std::size_t>(rng() % 5);
    const std::size_t k = 1 + static_cast<std::size_t>(rng() % 2);
    const auto obs = random_partial_payoff(n, 0.7, rng);
    FitConfig config;
    config.loss_space = space;
    config.k = k;
    config.penalty_weight = 0.1 + 2.0 * unit(rng);
    config.ridge_weight = unit(rng) < 0.5 ? 0.0 : unit(rng);
    config.weight_by_count = unit(rng) < 0.5;
    DiscEmbedding emb;
    emb.players = obs.players();
    emb.loss_space = space;
    for (std::size_t l = 0; l < k; ++l) {
      emb.components.push_back({random_normal(n, 0.7, rng), random_normal(n, 0.7, rng)});
    }
    if (space == LossSpace::ProbMse && unit(rng) < 0.5) {
      emb.transitive_base = melo_transitive_base(obs);
    }
    auto pack = [&](const DiscEmbedding& e) {
      Vector x(static_cast<Eigen::Index>(2 * k * n));
      for (std::size_t l = 0; l < k; ++l) {
        x.segment(static_cast<Eigen::Index>(2 * l * n), static_cast<Eigen::Index>(n)) =
            e.components[l].u;
        x.segment(static_cast<Eigen::Index>((2 * l + 1) * n), static_cast<Eigen::Index>(n)) =
            e.components[l].v;
      }
      return x;
    };
    auto unpack = [&](const Vector& x) {
      DiscEmbedding e = emb;
      for (std::size_t l = 0; l < k; ++l) {
        e.components[l].u =
            x.segment(static_cast<Eigen::Index>(2 * l * n), static_cast<Eigen::Index>(n));
        e.components[l].v =
            x.segment(static_cast<Eigen::Index>((2 * l + 1) * n), static_cast<Eigen::Index>(n));
      }
      return e;
    };
    DiscGradient g;
    objective_and_gradient(obs, emb, config, &g);
    DiscEmbedding ge = emb;
    for (std::size_t l = 0; l < k; ++l) {
      ge.components[l].u = g.du[l];
      ge.components[l].v = g.dv[l];
    }
    const Vector fd = oracle::central_gradient(
        [&](const Vector& x) { return objective_and_gradient(obs, unpack(x), config); }, pack(emb));
    r.worst = std::max(r.worst, oracle::relative_error(pack(ge), fd));
  }
  return r;
}

/// Online update direction vs minus the gradient of the single-game bce.
inline GradientResult online_direction(std::size_t points, std::uint64_t seed) {
  GradientResult r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (; r.points < points; ++r.points) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 4);
    StrengthConsistency sc{random_normal(n, 1.0, rng),
                           (random_normal(n, 0.3, rng).array() + 1.0).abs() + 0.05};
    const std::size_t i = rng() % n;
    const std::size_t j = (i + 1 + rng() % (n - 1)) % n;
    const double outcome = static_cast<double>(rng() % 3) / 2.0;
    const double eta = 1e-3;
    const auto next = update_disc_online(sc, i, j, outcome, eta);
    Vector step(4);
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    step << next.strength[a] - sc.strength[a], next.consistency[a] - sc.consistency[a],
        next.strength[b] - sc.strength[b], next.consistency[b] - sc.consistency[b];
    step /= -eta;
    Vector x(4);
    x << sc.strength[a], sc.consistency[a], sc.strength[b], sc.consistency[b];
    auto bce = [&](const Vector& y) {
      const double z = y[1] * y[3] * (y[0] - y[2]);
      const double p = oracle::sig(z);
      return -(outcome * std::log(p) + (1.0 - outcome) * std::log(1.0 - p));
    };
    r.worst = std::max(r.worst, oracle::relative_error(step, oracle::central_gradient(bce, x)));
  }
  return r;
}

// ---------------------------------------------------------------------------

struct EloFailureResult {
  Vector elo_u;
  Vector oracle_u;
  double disc_logit_12 = 0.0;
  double seconds = 0.0;
};

inline EloFailureResult elo_failure_region(double gamma, double delta) {
  EloFailureResult r;
  const auto start = std::chrono::steady_clock::now();
  const auto dense = realize(GameSpec{ExampleThree{gamma, delta}});
  const auto obs = to_observed(dense);
  r.elo_u = fit_elo(obs).rating.u;
  r.oracle_u = oracle::bradley_terry_mm(dense.matrix);
  FitConfig config;
  config.k = 1;
  const auto fit = fit_disc(obs, config);
  r.disc_logit_12 = fit.embedding.score(0, 1);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace suites
