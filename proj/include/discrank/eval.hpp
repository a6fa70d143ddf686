#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "discrank/disc.hpp"
#include "discrank/elo.hpp"
#include "discrank/errors.hpp"
#include "discrank/payoff.hpp"

namespace discrank {

// ---------------------------------------------------------------------------
// Splits

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
      throw InvalidConfig("test_fraction must lie in (0, 1)");
    }
  }
};

struct TrainTest {
  ObservedPayoff train;
  ObservedPayoff test;
};

/// Hides round(test_fraction * m) unordered pairs. Both sides keep the full
/// player list so indices agree with the input. The hidden set is redrawn
/// (up to 100 times) until every player keeps a training entry.
inline TrainTest split(const ObservedPayoff& obs, const SplitSpec& spec) {
  spec.validate();
  const std::size_t m = obs.n_entries();
  const auto hidden =
      static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(m)));
  if (hidden == 0 || hidden >= m) {
    throw SplitInfeasible("cannot hide " + std::to_string(hidden) + " of " + std::to_string(m) +
                          " entries and keep both sides non-empty");
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> order(m);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    stable_shuffle(order, rng);
    std::vector<bool> is_test(m, false);
    for (std::size_t k = 0; k < hidden; ++k) is_test[order[k]] = true;

    std::vector<std::size_t> deg(obs.n_players(), 0);
    std::vector<PayoffEntry> train;
    std::vector<PayoffEntry> test;
    for (std::size_t e = 0; e < m; ++e) {
      const auto& entry = obs.entries()[e];
      if (is_test[e]) {
        test.push_back(entry);
      } else {
        train.push_back(entry);
        ++deg[entry.i];
        ++deg[entry.j];
      }
    }
    if (std::find(deg.begin(), deg.end(), std::size_t{0}) != deg.end()) continue;
    return {ObservedPayoff(obs.players(), std::move(train)),
            ObservedPayoff(obs.players(), std::move(test))};
  }
  throw SplitInfeasible("no hidden set of " + std::to_string(hidden) +
                        " entries leaves every player a training entry (100 draws)");
}

// ---------------------------------------------------------------------------
// Fitted models

using Model = std::variant<EloRating, DiscEmbedding>;

inline const std::vector<std::string>& model_players(const Model& m) {
  return std::visit([](const auto& x) -> const std::vector<std::string>& { return x.players; }, m);
}

inline const std::string& model_name(const Model& m) {
  return std::visit([](const auto& x) -> const std::string& { return x.model; }, m);
}

inline double predict(const Model& m, std::size_t i, std::size_t j) {
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, EloRating>) {
          return predict_elo(x, i, j);
        } else {
          return predict_disc(x, i, j);
        }
      },
      m);
}

inline double predict(const Model& m, const std::string& a, const std::string& b) {
  const auto& players = model_players(m);
  return predict(m, player_index(players, a), player_index(players, b));
}

/// Mean of (P_hat_ij - P_ij)^2 over the test entries, each unordered pair once.
/// `predictor(i, j)` is indexed like `test`.
template <typename Predictor>
double mse(const Predictor& predictor, const ObservedPayoff& test) {
  if (test.n_entries() == 0) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const auto& e : test.entries()) {
    const double d = predictor(e.i, e.j) - e.p;
    s += d * d;
  }
  return s / static_cast<double>(test.n_entries());
}

/// MSE of a fitted model; test players are matched by name.
inline double mse(const Model& model, const ObservedPayoff& test) {
  const auto& players = model_players(model);
  std::vector<std::size_t> remap(test.n_players());
  std::vector<std::string> missing;
  std::vector<bool> used(test.n_players(), false);
  for (const auto& e : test.entries()) used[e.i] = used[e.j] = true;
  for (std::size_t k = 0; k < test.n_players(); ++k) {
    if (!used[k]) continue;
    bool found = false;
    for (std::size_t q = 0; q < players.size(); ++q) {
      if (players[q] == test.players()[k]) {
        remap[k] = q;
        found = true;
        break;
      }
    }
    if (!found) missing.push_back(test.players()[k]);
  }
  if (!missing.empty()) {
    std::string msg = "model does not know player(s):";
    for (const auto& name : missing) msg += " " + name;
    throw UnknownPlayer(msg);
  }
  return mse([&](std::size_t i, std::size_t j) { return predict(model, remap[i], remap[j]); },
             test);
}

// ---------------------------------------------------------------------------
// Model selection

enum class ModelKind { Elo, EloPP, Disc, Melo, SchurProb };

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "elo") return ModelKind::Elo;
  if (s == "elopp") return ModelKind::EloPP;
  if (s == "disc") return ModelKind::Disc;
  if (s == "melo") return ModelKind::Melo;
  if (s == "schur-prob") return ModelKind::SchurProb;
  throw InvalidConfig("unknown model '" + s + "'");
}

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Elo: return "elo";
    case ModelKind::EloPP: return "elopp";
    case ModelKind::Disc: return "disc";
    case ModelKind::Melo: return "melo";
    case ModelKind::SchurProb: return "schur-prob";
  }
  return "?";
}

struct ModelSpec {
  ModelKind kind = ModelKind::Elo;
  FitConfig config;
  EloOptions elo;

  bool is_elo() const { return kind == ModelKind::Elo || kind == ModelKind::EloPP; }

  /// "elo", "elopp", or e.g. "disc-k2".
  std::string label() const {
    if (is_elo()) return to_string(kind);
    return std::string(to_string(kind)) + "-k" + std::to_string(config.k);
  }

  void validate() const {
    switch (kind) {
      case ModelKind::Disc:
        if (config.loss_space == LossSpace::ProbMse) {
          throw InvalidConfig("disc takes logit-mse or bce-sigmoid; use schur-prob for prob-mse");
        }
        break;
      case ModelKind::Melo:
      case ModelKind::SchurProb:
        if (config.loss_space != LossSpace::ProbMse) {
          throw InvalidConfig(std::string(to_string(kind)) + " requires the prob-mse loss");
        }
        break;
      case ModelKind::Elo:
        if (elo.loss != EloLoss::Bce) throw InvalidConfig("elo requires the bce loss");
        break;
      case ModelKind::EloPP:
        if (elo.loss != EloLoss::Quadratic) throw InvalidConfig("elopp requires the quadratic loss");
        break;
    }
    if (!is_elo()) config.validate();
  }
};

/// Spec with the loss each model family requires.
inline ModelSpec make_model_spec(ModelKind kind, std::size_t k = 1) {
  ModelSpec s;
  s.kind = kind;
  s.config.k = k;
  if (kind == ModelKind::Melo || kind == ModelKind::SchurProb) {
    s.config.loss_space = LossSpace::ProbMse;
  }
  if (kind == ModelKind::EloPP) s.elo.loss = EloLoss::Quadratic;
  return s;
}

struct FittedModel {
  Model model;
  FitReport report;
};

inline FittedModel fit_model(const ModelSpec& spec, const ObservedPayoff& train) {
  spec.validate();
  switch (spec.kind) {
    case ModelKind::Elo:
    case ModelKind::EloPP: {
      auto fit = fit_elo(train, spec.elo);
      return {std::move(fit.rating), std::move(fit.report)};
    }
    case ModelKind::Disc:
    case ModelKind::SchurProb: {
      auto fit = fit_disc(train, spec.config);
      return {std::move(fit.embedding), std::move(fit.report)};
    }
    case ModelKind::Melo: {
      auto fit = fit_melo(train, spec.config);
      return {std::move(fit.embedding), std::move(fit.report)};
    }
  }
  throw InvalidConfig("unknown model");
}

/// Like fit_model but keeps the last iterate of a non-converged fit and
/// flags it in the report instead of throwing.
inline FittedModel fit_model_lenient(const ModelSpec& spec, const ObservedPayoff& train) {
  ModelSpec s = spec;
  s.config.throw_on_nonconvergence = false;
  try {
    return fit_model(s, train);
  } catch (const ConvergenceFailure& e) {
    // Only Elo fits throw here.
    EloRating r{train.players(), e.last_iterate().front(), e.report().model};
    FitReport report = e.report();
    report.warnings.push_back(e.what());
    return {std::move(r), std::move(report)};
  }
}

// ---------------------------------------------------------------------------
// Benchmark

/// A payoff to benchmark on. `seed` drives the split and the model seeds.
struct BenchmarkGame {
  std::string name;
  std::uint64_t seed = 0;
  ObservedPayoff payoff;
};

struct BenchmarkRow {
  std::string game;
  std::string model;
  std::size_t params = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  double elo_ratio = 0.0;  // Elo test MSE / this model's test MSE
  std::uint64_t seed = 0;
  FitReport report;
};

struct BenchmarkOptions {
  double test_fraction = 0.2;
  std::uint64_t split_seed = 0;  // added to each game's seed
  std::size_t threads = 1;
};

namespace detail {

inline double elo_ratio(double elo_mse, double model_mse) {
  if (elo_mse == model_mse) return 1.0;
  if (model_mse == 0.0) return std::numeric_limits<double>::infinity();
  return elo_mse / model_mse;
}

inline std::vector<BenchmarkRow> benchmark_cell(const BenchmarkGame& game,
                                                const std::vector<ModelSpec>& models,
                                                const BenchmarkOptions& options) {
  const auto parts = split(game.payoff, {options.test_fraction, options.split_seed + game.seed});
  auto run = [&](ModelSpec spec) {
    spec.config.seed += game.seed;
    auto fitted = fit_model_lenient(spec, parts.train);
    BenchmarkRow row;
    row.game = game.name;
    row.model = spec.label();
    row.params = fitted.report.parameter_count;
    row.train_mse = mse(fitted.model, parts.train);
    row.test_mse = mse(fitted.model, parts.test);
    row.seed = game.seed;
    row.report = std::move(fitted.report);
    row.report.train_mse = row.train_mse;
    row.report.test_mse = row.test_mse;
    return row;
  };
  std::vector<BenchmarkRow> rows;
  rows.push_back(run(make_model_spec(ModelKind::Elo)));
  const double reference = rows.front().test_mse;
  rows.front().elo_ratio = 1.0;
  for (const auto& spec : models) {
    if (spec.kind == ModelKind::Elo) continue;  // already the reference
    rows.push_back(run(spec));
    rows.back().elo_ratio = elo_ratio(reference, rows.back().test_mse);
  }
  return rows;
}

}  // namespace detail

/// Fits Elo plus every model on one split per game. Games are independent
/// cells and may run on several threads; rows come back in game order, Elo
/// first, then `models` in order.
inline std::vector<BenchmarkRow> benchmark(const std::vector<BenchmarkGame>& games,
                                           const std::vector<ModelSpec>& models,
                                           const BenchmarkOptions& options = {}) {
  for (const auto& m : models) m.validate();
  std::vector<std::vector<BenchmarkRow>> cells(games.size());
  std::vector<std::exception_ptr> errors(games.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < games.size(); c = next++) {
      try {
        cells[c] = detail::benchmark_cell(games[c], models, options);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, games.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<BenchmarkRow> rows;
  for (auto& cell : cells) {
    for (auto& r : cell) rows.push_back(std::move(r));
  }
  return rows;
}

/// Per (game, model) means over seeds, in first-appearance order. The ratio
/// column is the ratio of mean test MSEs.
struct BenchmarkMean {
  std::string game;
  std::string model;
  std::size_t params = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  double elo_ratio = 0.0;
  std::size_t seeds = 0;
};

inline std::vector<BenchmarkMean> benchmark_means(const std::vector<BenchmarkRow>& rows) {
  std::vector<BenchmarkMean> out;
  auto find = [&](const std::string& game, const std::string& model) -> BenchmarkMean* {
    for (auto& m : out) {
      if (m.game == game && m.model == model) return &m;
    }
    return nullptr;
  };
  for (const auto& r : rows) {
    auto* m = find(r.game, r.model);
    if (m == nullptr) {
      out.push_back({r.game, r.model, r.params, 0.0, 0.0, 0.0, 0});
      m = &out.back();
    }
    m->train_mse += r.train_mse;
    m->test_mse += r.test_mse;
    ++m->seeds;
  }
  for (auto& m : out) {
    m.train_mse /= static_cast<double>(m.seeds);
    m.test_mse /= static_cast<double>(m.seeds);
  }
  for (auto& m : out) {
    const auto* elo = find(m.game, "elo");
    m.elo_ratio = elo != nullptr ? detail::elo_ratio(elo->test_mse, m.test_mse) : 0.0;
  }
  return out;
}

}  // namespace discrank
