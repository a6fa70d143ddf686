#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "discrank/errors.hpp"
#include "discrank/numeric.hpp"

namespace discrank {

/// One game between two players; score_a is 1 (a wins), 0.5 (draw) or 0.
struct MatchRecord {
  std::string player_a;
  std::string player_b;
  double score_a = 0.0;
};

/// Aggregated result for an unordered pair, stored with i < j. `p` is the
/// empirical probability that player i beats player j.
struct PayoffEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double p = 0.5;
  std::size_t count = 1;
};

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Sparse empirical win-probability matrix. Only i < j entries are stored;
/// P_ji is 1 - P_ij and the diagonal is 0.5.
class ObservedPayoff {
 public:
  ObservedPayoff() = default;

  ObservedPayoff(std::vector<std::string> players, std::vector<PayoffEntry> entries)
      : players_(std::move(players)), entries_(std::move(entries)) {
    if (players_.size() < 2) {
      throw DegenerateGame("a game needs at least 2 players, got " +
                           std::to_string(players_.size()));
    }
    for (std::size_t k = 0; k < players_.size(); ++k) {
      if (!index_.emplace(players_[k], k).second) {
        throw InvalidRecord("duplicate player id '" + players_[k] + "'");
      }
    }
    for (auto& e : entries_) {
      if (e.i == e.j) throw InvalidRecord("self-match entry for player " + std::to_string(e.i));
      if (e.i > e.j) {
        std::swap(e.i, e.j);
        e.p = 1.0 - e.p;
      }
      if (e.j >= players_.size()) throw InvalidRecord("entry references unknown player index");
      if (!(e.p >= 0.0 && e.p <= 1.0)) throw InvalidRecord("probability outside [0, 1]");
      if (e.count < 1) throw InvalidRecord("entry count must be >= 1");
    }
    std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
      return std::pair(a.i, a.j) < std::pair(b.i, b.j);
    });
    for (std::size_t k = 1; k < entries_.size(); ++k) {
      if (entries_[k].i == entries_[k - 1].i && entries_[k].j == entries_[k - 1].j) {
        throw InvalidRecord("duplicate entry for pair (" + std::to_string(entries_[k].i) +
                            ", " + std::to_string(entries_[k].j) + ")");
      }
    }
  }

  std::size_t n_players() const { return players_.size(); }
  const std::vector<std::string>& players() const { return players_; }
  const std::vector<PayoffEntry>& entries() const { return entries_; }
  std::size_t n_entries() const { return entries_.size(); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_index(const std::string& name) const {
    if (auto idx = index_of(name)) return *idx;
    throw UnknownPlayer("unknown player '" + name + "'");
  }

  /// Probability that i beats j if the pair is observed.
  std::optional<double> probability(std::size_t i, std::size_t j) const {
    if (i == j) return 0.5;
    const bool flip = i > j;
    const auto lo = flip ? j : i;
    const auto hi = flip ? i : j;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair(lo, hi),
                               [](const PayoffEntry& e, const std::pair<std::size_t, std::size_t>& key) {
                                 return std::pair(e.i, e.j) < key;
                               });
    if (it == entries_.end() || it->i != lo || it->j != hi) return std::nullopt;
    return flip ? 1.0 - it->p : it->p;
  }

  /// Number of observed entries each player takes part in.
  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> deg(players_.size(), 0);
    for (const auto& e : entries_) {
      ++deg[e.i];
      ++deg[e.j];
    }
    return deg;
  }

 private:
  std::vector<std::string> players_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<PayoffEntry> entries_;
};

/// Dense payoff with an observation mask; the diagonal is observed at 0.5.
struct DensePayoff {
  Matrix matrix;
  BoolMatrix mask;

  std::size_t n_players() const { return static_cast<std::size_t>(matrix.rows()); }

  bool fully_observed() const { return mask.all(); }

  /// Throws InvalidRecord if the zero-sum or mask invariants are broken.
  void validate(double tol = 1e-12) const {
    const auto n = matrix.rows();
    if (matrix.cols() != n || mask.rows() != n || mask.cols() != n) {
      throw InvalidRecord("payoff matrix and mask must be square and equally sized");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!mask(i, i) || std::abs(matrix(i, i) - 0.5) > tol) {
        throw InvalidRecord("payoff diagonal must be observed at 0.5");
      }
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (mask(i, j) != mask(j, i)) throw InvalidRecord("payoff mask must be symmetric");
        if (!mask(i, j)) continue;
        if (!(matrix(i, j) >= 0.0 && matrix(i, j) <= 1.0)) {
          throw InvalidRecord("payoff probability outside [0, 1]");
        }
        if (std::abs(matrix(i, j) + matrix(j, i) - 1.0) > tol) {
          throw InvalidRecord("payoff violates P_ij + P_ji = 1");
        }
      }
    }
  }
};

/// Skew-symmetric logit matrix with the mask it is defined on.
struct LogitPayoff {
  Matrix values;
  BoolMatrix mask;
};

/// Aggregates game records into empirical probabilities. Player indices
/// follow first appearance in `records`.
inline ObservedPayoff aggregate(const std::vector<MatchRecord>& records) {
  if (records.empty()) throw EmptyInput();
  std::vector<std::string> players;
  std::unordered_map<std::string, std::size_t> index;
  auto lookup = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, players.size());
    if (inserted) players.push_back(name);
    return it->second;
  };
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> sums;
  for (const auto& r : records) {
    if (r.score_a != 0.0 && r.score_a != 0.5 && r.score_a != 1.0) {
      throw InvalidRecord("score must be 0, 0.5 or 1 (got " + std::to_string(r.score_a) + ")");
    }
    if (r.player_a == r.player_b) {
      throw InvalidRecord("player '" + r.player_a + "' matched against itself");
    }
    const auto a = lookup(r.player_a);
    const auto b = lookup(r.player_b);
    auto& cell = a < b ? sums[{a, b}] : sums[{b, a}];
    cell.first += a < b ? r.score_a : 1.0 - r.score_a;
    cell.second += 1;
  }
  std::vector<PayoffEntry> entries;
  entries.reserve(sums.size());
  for (const auto& [key, cell] : sums) {
    entries.push_back({key.first, key.second, cell.first / static_cast<double>(cell.second),
                       cell.second});
  }
  if (players.size() < 2) throw DegenerateGame("records mention fewer than 2 players");
  return ObservedPayoff(std::move(players), std::move(entries));
}

/// Keeps entries backed by at least `min_games` games, then drops players
/// left without any entry and compacts indices (relative order preserved).
inline ObservedPayoff filter_min_count(const ObservedPayoff& obs, std::size_t min_games) {
  if (min_games < 1) throw InvalidConfig("min_games must be >= 1");
  std::vector<PayoffEntry> kept;
  std::vector<bool> used(obs.n_players(), false);
  for (const auto& e : obs.entries()) {
    if (e.count >= min_games) {
      kept.push_back(e);
      used[e.i] = used[e.j] = true;
    }
  }
  std::vector<std::size_t> remap(obs.n_players(), 0);
  std::vector<std::string> players;
  for (std::size_t k = 0; k < obs.n_players(); ++k) {
    if (used[k]) {
      remap[k] = players.size();
      players.push_back(obs.players()[k]);
    }
  }
  if (players.size() < 2) {
    throw DegenerateGame("fewer than 2 players have pairs with >= " +
                         std::to_string(min_games) + " games");
  }
  for (auto& e : kept) {
    e.i = remap[e.i];
    e.j = remap[e.j];
  }
  return ObservedPayoff(std::move(players), std::move(kept));
}

inline DensePayoff to_dense(const ObservedPayoff& obs) {
  const auto n = static_cast<Eigen::Index>(obs.n_players());
  DensePayoff out{Matrix::Constant(n, n, 0.5), BoolMatrix::Constant(n, n, false)};
  for (Eigen::Index i = 0; i < n; ++i) out.mask(i, i) = true;
  for (const auto& e : obs.entries()) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    out.matrix(i, j) = e.p;
    out.matrix(j, i) = 1.0 - e.p;
    out.mask(i, j) = out.mask(j, i) = true;
  }
  return out;
}

/// Default player names "p1", "p2", ... for generated games.
inline std::vector<std::string> default_player_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t k = 0; k < n; ++k) names.push_back("p" + std::to_string(k + 1));
  return names;
}

/// Observed entries of a dense payoff, each with count 1.
inline ObservedPayoff to_observed(const DensePayoff& dense, std::vector<std::string> names = {}) {
  const auto n = dense.n_players();
  if (names.empty()) names = default_player_names(n);
  if (names.size() != n) throw InvalidRecord("player name count does not match payoff size");
  std::vector<PayoffEntry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (dense.mask(ii, jj)) entries.push_back({i, j, dense.matrix(ii, jj), 1});
    }
  }
  return ObservedPayoff(std::move(names), std::move(entries));
}

/// A_ij = logit(clamp(P_ij, eps, 1 - eps)) on the observed mask, 0 elsewhere.
inline LogitPayoff logit_transform(const DensePayoff& p, double clip_eps = 1e-3) {
  if (!(clip_eps > 0.0 && clip_eps < 0.5)) {
    throw InvalidConfig("clip_eps must lie in (0, 0.5)");
  }
  const auto n = p.matrix.rows();
  LogitPayoff out{Matrix::Zero(n, n), p.mask};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!p.mask(i, j)) continue;
      // Computed once per pair so that A = -A^T holds exactly.
      const double a = logit(clamp_probability(p.matrix(i, j), clip_eps));
      out.values(i, j) = a;
      out.values(j, i) = -a;
    }
  }
  return out;
}

}  // namespace discrank
