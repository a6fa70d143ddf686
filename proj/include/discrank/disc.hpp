#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "discrank/errors.hpp"
#include "discrank/fit_report.hpp"
#include "discrank/geometry.hpp"
#include "discrank/lbfgs.hpp"
#include "discrank/payoff.hpp"

namespace discrank {

enum class LossSpace {
  LogitMse,    // (logit(p) - a)^2 on clipped probabilities
  BceSigmoid,  // bce(p, sigmoid(a)); never clips
  ProbMse,     // 1/2 (p - 1/2 - a)^2, model output used without a sigmoid
};

inline const char* to_string(LossSpace s) {
  switch (s) {
    case LossSpace::LogitMse: return "logit-mse";
    case LossSpace::BceSigmoid: return "bce-sigmoid";
    case LossSpace::ProbMse: return "prob-mse";
  }
  return "?";
}

inline LossSpace parse_loss_space(const std::string& s) {
  if (s == "logit-mse" || s == "logit") return LossSpace::LogitMse;
  if (s == "bce-sigmoid" || s == "bce") return LossSpace::BceSigmoid;
  if (s == "prob-mse" || s == "prob") return LossSpace::ProbMse;
  throw InvalidConfig("unknown loss space '" + s + "'");
}

/// One rank-2 term u v^T - v u^T.
struct DiscComponent {
  Vector u;
  Vector v;

  /// lambda = ||u|| ||v||; equals the singular value when u is orthogonal to v.
  double magnitude() const { return u.norm() * v.norm(); }

  PlanarPointSet points() const {
    PlanarPointSet pts(static_cast<std::size_t>(u.size()));
    for (Eigen::Index i = 0; i < u.size(); ++i) pts[static_cast<std::size_t>(i)] = {u[i], v[i]};
    return pts;
  }
};

/// Truncated normal decomposition of a game. `transitive_base` is only set
/// for m-Elo, whose prediction adds base_i - base_j in probability space.
struct DiscEmbedding {
  std::string model = "disc";
  std::vector<std::string> players;
  LossSpace loss_space = LossSpace::BceSigmoid;
  std::vector<DiscComponent> components;
  Vector transitive_base;
  double ridge = 0.0;
  std::uint64_t seed = 0;

  std::size_t n_players() const { return players.size(); }
  std::size_t k() const { return components.size(); }

  std::size_t parameter_count() const {
    return (2 * k() + (transitive_base.size() > 0 ? 1 : 0)) * n_players();
  }

  /// Summed model score for the pair (skew-symmetric in i, j).
  double score(std::size_t i, std::size_t j) const {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    double x = 0.0;
    for (const auto& c : components) x += c.u[a] * c.v[b] - c.v[a] * c.u[b];
    if (transitive_base.size() > 0) x += transitive_base[a] - transitive_base[b];
    return x;
  }
};

struct FitConfig {
  std::size_t k = 1;
  LossSpace loss_space = LossSpace::BceSigmoid;
  double tol = 1e-8;        // inner quasi-Newton gradient tolerance
  double outer_tol = 1e-6;  // stationarity of the alternation
  std::size_t max_outer = 5000;
  std::size_t max_inner = 200;
  double penalty_weight = 1.0;
  double ridge_weight = 0.0;
  double tol_orth = 1e-4;
  std::size_t max_penalty_escalations = 5;
  double clip_eps = 1e-3;
  bool weight_by_count = false;
  bool throw_on_nonconvergence = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 1) throw InvalidConfig("k must be >= 1");
    if (!(tol > 0.0) || !(outer_tol > 0.0)) throw InvalidConfig("tolerances must be positive");
    if (!(penalty_weight > 0.0)) throw InvalidConfig("penalty_weight must be positive");
    if (!(ridge_weight >= 0.0)) throw InvalidConfig("ridge weight must be >= 0");
    if (!(clip_eps > 0.0 && clip_eps < 0.5)) throw InvalidConfig("clip_eps must lie in (0, 0.5)");
    if (max_outer < 1 || max_inner < 1) throw InvalidConfig("iteration budgets must be >= 1");
  }

  nlohmann::json to_json() const {
    return {{"k", k},
            {"loss_space", to_string(loss_space)},
            {"tol", tol},
            {"outer_tol", outer_tol},
            {"max_outer", max_outer},
            {"max_inner", max_inner},
            {"penalty_weight", penalty_weight},
            {"ridge", ridge_weight},
            {"tol_orth", tol_orth},
            {"clip_eps", clip_eps},
            {"weight_by_count", weight_by_count},
            {"seed", seed}};
  }
};

// ---------------------------------------------------------------------------
// Losses

/// Loss of one observation p against the model score a_hat.
inline double loss_value(LossSpace space, double p, double a_hat) {
  switch (space) {
    case LossSpace::LogitMse: {
      const double r = logit(p) - a_hat;
      return r * r;
    }
    case LossSpace::BceSigmoid: return bce_logits(p, a_hat);
    case LossSpace::ProbMse: {
      const double r = p - 0.5 - a_hat;
      return 0.5 * r * r;
    }
  }
  return 0.0;
}

namespace detail {

/// Observation prepared for a loss space: `target` is logit(clipped p) for
/// logit-mse, p for bce and p - 1/2 (minus any fixed base) for prob-mse.
struct Observation {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double target = 0.0;
  double weight = 1.0;
};

inline double entry_loss(LossSpace space, double target, double x, double& dx) {
  switch (space) {
    case LossSpace::LogitMse: {
      const double r = x - target;
      dx = 2.0 * r;
      return r * r;
    }
    case LossSpace::BceSigmoid:
      dx = sigmoid(x) - target;
      return bce_logits(target, x);
    case LossSpace::ProbMse: {
      const double r = x - target;
      dx = r;
      return 0.5 * r * r;
    }
  }
  dx = 0.0;
  return 0.0;
}

inline std::vector<Observation> prepare_observations(const ObservedPayoff& obs,
                                                     const FitConfig& config,
                                                     const Vector* base = nullptr) {
  std::vector<Observation> out;
  out.reserve(obs.n_entries());
  for (const auto& e : obs.entries()) {
    Observation o;
    o.i = static_cast<Eigen::Index>(e.i);
    o.j = static_cast<Eigen::Index>(e.j);
    o.weight = config.weight_by_count ? static_cast<double>(e.count) : 1.0;
    switch (config.loss_space) {
      case LossSpace::LogitMse: o.target = logit(clamp_probability(e.p, config.clip_eps)); break;
      case LossSpace::BceSigmoid: o.target = e.p; break;
      case LossSpace::ProbMse:
        o.target = e.p - 0.5;
        if (base != nullptr) o.target -= (*base)[o.i] - (*base)[o.j];
        break;
    }
    out.push_back(o);
  }
  return out;
}

/// w <a, b>^2 / ||b||^2 and its gradients in a and b (either may be null).
inline double projection_penalty(const Vector& a, const Vector& b, double w, Vector* grad_a,
                                 Vector* grad_b) {
  const double bb = b.squaredNorm();
  if (!(bb > 0.0)) return 0.0;
  const double ab = a.dot(b);
  if (grad_a != nullptr) *grad_a += (2.0 * w * ab / bb) * b;
  if (grad_b != nullptr) *grad_b += (2.0 * w * ab / bb) * a - (2.0 * w * ab * ab / (bb * bb)) * b;
  return w * ab * ab / bb;
}

inline double normalized_inner(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

}  // namespace detail

/// Largest normalized inner product of component l with itself (u vs v) and
/// with every earlier component (u-u, v-v and u-v cross terms).
inline double orthogonality_residual(const std::vector<DiscComponent>& comps, std::size_t l) {
  const auto& c = comps[l];
  double r = detail::normalized_inner(c.u, c.v);
  for (std::size_t m = 0; m < l; ++m) {
    const auto& p = comps[m];
    r = std::max({r, detail::normalized_inner(c.u, p.u), detail::normalized_inner(c.v, p.v),
                  detail::normalized_inner(c.u, p.v), detail::normalized_inner(c.v, p.u)});
  }
  return r;
}

/// Gradient of the full objective with respect to every component.
struct DiscGradient {
  std::vector<Vector> du;
  std::vector<Vector> dv;
};

/// Full penalized objective of an embedding on the observed entries:
/// sum of losses of the summed model, the orthogonality penalties of every
/// component against itself and its predecessors, and the ridge term
/// ridge/2 sum_i (v_i - 1)^2 on the first component.
inline double objective_and_gradient(const ObservedPayoff& obs, const DiscEmbedding& emb,
                                     const FitConfig& config, DiscGradient* grad = nullptr) {
  const auto base = emb.transitive_base.size() > 0 ? &emb.transitive_base : nullptr;
  const auto data = detail::prepare_observations(obs, config, base);
  const std::size_t k = emb.components.size();
  const auto n = static_cast<Eigen::Index>(emb.n_players());
  if (grad != nullptr) {
    grad->du.assign(k, Vector::Zero(n));
    grad->dv.assign(k, Vector::Zero(n));
  }
  double f = 0.0;
  for (const auto& o : data) {
    double x = 0.0;
    for (const auto& c : emb.components) x += c.u[o.i] * c.v[o.j] - c.v[o.i] * c.u[o.j];
    double dx = 0.0;
    f += o.weight * detail::entry_loss(config.loss_space, o.target, x, dx);
    if (grad == nullptr) continue;
    dx *= o.weight;
    for (std::size_t l = 0; l < k; ++l) {
      const auto& c = emb.components[l];
      grad->du[l][o.i] += dx * c.v[o.j];
      grad->du[l][o.j] -= dx * c.v[o.i];
      grad->dv[l][o.j] += dx * c.u[o.i];
      grad->dv[l][o.i] -= dx * c.u[o.j];
    }
  }
  const double w = config.penalty_weight;
  for (std::size_t l = 0; l < k; ++l) {
    const auto& c = emb.components[l];
    Vector* gu = grad ? &grad->du[l] : nullptr;
    Vector* gv = grad ? &grad->dv[l] : nullptr;
    // <u, v>^2 / ||u||^2
    f += detail::projection_penalty(c.v, c.u, w, gv, gu);
    for (std::size_t m = 0; m < l; ++m) {
      const auto& p = emb.components[m];
      Vector* pu = grad ? &grad->du[m] : nullptr;
      Vector* pv = grad ? &grad->dv[m] : nullptr;
      f += detail::projection_penalty(c.u, p.v, w, gu, pv);
      f += detail::projection_penalty(c.u, p.u, w, gu, pu);
      f += detail::projection_penalty(c.v, p.v, w, gv, pv);
      f += detail::projection_penalty(c.v, p.u, w, gv, pu);
    }
  }
  if (config.ridge_weight > 0.0 && k > 0) {
    const Vector r = emb.components[0].v.array() - 1.0;
    f += 0.5 * config.ridge_weight * r.squaredNorm();
    if (grad != nullptr) grad->dv[0] += config.ridge_weight * r;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Alternating minimization

struct ComponentFit {
  Vector u;
  Vector v;
  /// Penalized objective after every full (u, v) alternation.
  std::vector<double> objective_trace;
  /// Penalty weight in force at each entry of objective_trace.
  std::vector<double> penalty_trace;
  double orthogonality_residual = 0.0;
  double penalty_weight = 1.0;
  std::size_t alternations = 0;
  bool converged = false;
};

namespace detail {

/// Objective of one alternation step for component l. Holds the fitted
/// offsets of earlier components per observation.
class ComponentProblem {
 public:
  ComponentProblem(const std::vector<Observation>& data, const std::vector<double>& offsets,
                   const std::vector<DiscComponent>& prior, LossSpace space, double penalty,
                   double ridge)
      : data_(data), offsets_(offsets), prior_(prior), space_(space), penalty_(penalty),
        ridge_(ridge) {}

  void set_penalty(double w) { penalty_ = w; }
  bool has_ridge() const { return ridge_ > 0.0; }
  double penalty() const { return penalty_; }

  double loss(const Vector& u, const Vector& v, Vector* gu, Vector* gv) const {
    double f = 0.0;
    for (std::size_t e = 0; e < data_.size(); ++e) {
      const auto& o = data_[e];
      const double x = offsets_[e] + u[o.i] * v[o.j] - v[o.i] * u[o.j];
      double dx = 0.0;
      f += o.weight * entry_loss(space_, o.target, x, dx);
      dx *= o.weight;
      if (gu != nullptr) {
        (*gu)[o.i] += dx * v[o.j];
        (*gu)[o.j] -= dx * v[o.i];
      }
      if (gv != nullptr) {
        (*gv)[o.j] += dx * u[o.i];
        (*gv)[o.i] -= dx * u[o.j];
      }
    }
    return f;
  }

  double prior_penalty(const Vector& x, Vector* gx) const {
    double f = 0.0;
    for (const auto& p : prior_) {
      f += projection_penalty(x, p.v, penalty_, gx, nullptr);
      f += projection_penalty(x, p.u, penalty_, gx, nullptr);
    }
    return f;
  }

  double ridge(const Vector& v, Vector* gv) const {
    if (!(ridge_ > 0.0)) return 0.0;
    const Vector r = v.array() - 1.0;
    if (gv != nullptr) *gv += ridge_ * r;
    return 0.5 * ridge_ * r.squaredNorm();
  }

  /// u-step objective: loss + penalties of u against earlier components.
  double u_step(const Vector& u, const Vector& v, Vector& g) const {
    g.setZero(u.size());
    return loss(u, v, &g, nullptr) + prior_penalty(u, &g);
  }

  /// v-step objective: loss + <u, v>^2/||u||^2 + penalties of v + ridge.
  double v_step(const Vector& u, const Vector& v, Vector& g) const {
    g.setZero(v.size());
    double f = loss(u, v, nullptr, &g);
    f += projection_penalty(v, u, penalty_, &g, nullptr);
    f += prior_penalty(v, &g);
    f += ridge(v, &g);
    return f;
  }

  /// Penalized objective tracked across alternations.
  double tracked(const Vector& u, const Vector& v) const {
    return loss(u, v, nullptr, nullptr) + projection_penalty(v, u, penalty_, nullptr, nullptr) +
           prior_penalty(u, nullptr) + prior_penalty(v, nullptr) + ridge(v, nullptr);
  }

 private:
  const std::vector<Observation>& data_;
  const std::vector<double>& offsets_;
  const std::vector<DiscComponent>& prior_;
  LossSpace space_;
  double penalty_;
  double ridge_;
};

/// Rescales (u, v) -> (a u, v / a) so that ||u|| = ||v||. The loss is
/// invariant along this orbit; without fixing it the penalties can be made
/// to vanish by shrinking one vector, which leaves the other unconstrained.
inline void balance(Vector& u, Vector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) return;
  const double a = std::sqrt(nv / nu);
  u *= a;
  v /= a;
}

enum class RoundOutcome { Converged, Stalled, BudgetExhausted };

/// Alternation rounds for one penalty weight. A round stalls when the
/// stationarity measure has not halved over `kStallWindow` alternations.
inline RoundOutcome alternate(const ComponentProblem& problem, const FitConfig& config,
                              std::size_t budget, Vector& u, Vector& v, ComponentFit& out) {
  constexpr std::size_t kStallWindow = 30;
  LbfgsOptions inner;
  inner.grad_tol = config.tol;
  inner.max_iter = config.max_inner;
  Vector g(u.size());
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_at = 0;
  for (std::size_t it = 0; it < budget; ++it) {
    minimize_lbfgs([&](const Vector& x, Vector& gx) { return problem.u_step(x, v, gx); }, u,
                   inner);
    minimize_lbfgs([&](const Vector& x, Vector& gx) { return problem.v_step(u, x, gx); }, v,
                   inner);
    if (!problem.has_ridge()) balance(u, v);
    out.objective_trace.push_back(problem.tracked(u, v));
    out.penalty_trace.push_back(problem.penalty());
    ++out.alternations;
    problem.u_step(u, v, g);
    const double gu = g.lpNorm<Eigen::Infinity>();
    problem.v_step(u, v, g);
    const double gv = g.lpNorm<Eigen::Infinity>();
    const double stationarity = std::max(gu, gv);
    if (stationarity <= config.outer_tol) return RoundOutcome::Converged;
    if (stationarity < 0.5 * best) {
      best = stationarity;
      best_at = it;
    } else if (it - best_at >= kStallWindow) {
      return RoundOutcome::Stalled;
    }
  }
  return RoundOutcome::BudgetExhausted;
}

}  // namespace detail

/// Fits the l-th pair of components (0-based `prior.size()`) against the
/// offsets of the earlier ones by alternating minimization over u and v.
/// If a round stalls or ends with an orthogonality residual above
/// config.tol_orth the fit is resumed with a 10x penalty weight, up to
/// max_penalty_escalations times; max_outer bounds all rounds together.
inline ComponentFit fit_component(const std::vector<detail::Observation>& data,
                                  const std::vector<double>& offsets,
                                  const std::vector<DiscComponent>& prior, Vector u0, Vector v0,
                                  const FitConfig& config) {
  if (!(u0.norm() > 0.0) || !(v0.norm() > 0.0)) {
    throw InvalidConfig("component initialization must be nonzero");
  }
  const double ridge = prior.empty() ? config.ridge_weight : 0.0;
  detail::ComponentProblem problem(data, offsets, prior, config.loss_space, config.penalty_weight,
                                   ridge);
  ComponentFit out;
  out.u = std::move(u0);
  out.v = std::move(v0);
  std::vector<DiscComponent> all = prior;
  all.push_back({});
  std::size_t remaining = config.max_outer;
  for (std::size_t round = 0;; ++round) {
    const auto outcome = detail::alternate(problem, config, remaining, out.u, out.v, out);
    remaining = config.max_outer > out.alternations ? config.max_outer - out.alternations : 0;
    out.converged = outcome == detail::RoundOutcome::Converged;
    all.back() = {out.u, out.v};
    out.orthogonality_residual = orthogonality_residual(all, prior.size());
    out.penalty_weight = problem.penalty();
    const bool orthogonal = out.orthogonality_residual <= config.tol_orth;
    if ((out.converged && orthogonal) || remaining == 0 ||
        round >= config.max_penalty_escalations) {
      break;
    }
    problem.set_penalty(problem.penalty() * 10.0);
  }
  return out;
}

/// Convenience overload: fit a component of a dense skew-symmetric logit
/// matrix (logit-mse, fully observed) given earlier components.
inline ComponentFit fit_component(const ObservedPayoff& obs, const std::vector<DiscComponent>& prior,
                                  const FitConfig& config) {
  const auto data = detail::prepare_observations(obs, config);
  std::vector<double> offsets(data.size(), 0.0);
  for (std::size_t e = 0; e < data.size(); ++e) {
    for (const auto& c : prior) {
      offsets[e] += c.u[data[e].i] * c.v[data[e].j] - c.v[data[e].i] * c.u[data[e].j];
    }
  }
  const auto n = obs.n_players();
  std::mt19937_64 rng(config.seed + 7919 * (prior.size() + 1));
  const double sd = 0.1 / std::sqrt(static_cast<double>(n));
  return fit_component(data, offsets, prior, random_normal(n, sd, rng), random_normal(n, sd, rng),
                       config);
}

/// Balances ||u|| = ||v|| and rotates the pair so that the mean player sits
/// on the positive v axis (flip to sum(v) >= 0 if the mean is the origin).
/// Predictions are unchanged.
inline void canonicalize(DiscComponent& c) {
  const double nu = c.u.norm();
  const double nv = c.v.norm();
  if (nu > 0.0 && nv > 0.0) {
    const double a = std::sqrt(nv / nu);
    c.u *= a;
    c.v /= a;
  }
  const double mu = c.u.mean();
  const double mv = c.v.mean();
  const double r = std::hypot(mu, mv);
  const double scale = std::max(c.u.lpNorm<Eigen::Infinity>(), c.v.lpNorm<Eigen::Infinity>());
  if (r > 1e-12 * std::max(scale, 1e-300)) {
    const Vector u = (mv * c.u - mu * c.v) / r;
    const Vector v = (mu * c.u + mv * c.v) / r;
    c.u = u;
    c.v = v;
  } else if (c.v.sum() < 0.0 || (c.v.sum() == 0.0 && c.u.sum() < 0.0)) {
    c.u = -c.u;
    c.v = -c.v;
  }
}

struct DiscFit {
  DiscEmbedding embedding;
  FitReport report;
};

namespace detail {

inline DiscFit fit_components(const ObservedPayoff& obs, const FitConfig& config,
                              const std::vector<Observation>& data, DiscEmbedding emb) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const std::size_t n = obs.n_players();
  if (n < 2) throw DegenerateGame("a game needs at least 2 players");
  if (config.k > n / 2) {
    throw InvalidConfig("k = " + std::to_string(config.k) + " exceeds floor(n/2) = " +
                        std::to_string(n / 2));
  }
  FitReport report;
  report.model = emb.model;
  report.config = config.to_json();
  report.seed = config.seed;

  std::vector<double> offsets(data.size(), 0.0);
  std::vector<DiscComponent> comps;
  std::vector<double> objectives;
  std::vector<double> residuals;
  bool converged = true;
  const double sd = 0.1 / std::sqrt(static_cast<double>(n));
  for (std::size_t l = 0; l < config.k; ++l) {
    std::mt19937_64 rng(config.seed + 7919 * (l + 1));
    Vector u0 = random_normal(n, sd, rng);
    Vector v0 = random_normal(n, sd, rng);
    auto fit = fit_component(data, offsets, comps, std::move(u0), std::move(v0), config);
    report.iterations += fit.alternations;
    objectives.push_back(fit.objective_trace.empty() ? 0.0 : fit.objective_trace.back());
    if (!fit.converged) {
      converged = false;
      report.warnings.push_back("component " + std::to_string(l + 1) + " hit max_outer = " +
                                std::to_string(config.max_outer));
    } else if (fit.orthogonality_residual > config.tol_orth) {
      report.warnings.push_back("component " + std::to_string(l + 1) +
                                " orthogonality residual " +
                                std::to_string(fit.orthogonality_residual) + " > tol_orth");
    }
    for (std::size_t e = 0; e < data.size(); ++e) {
      const auto& o = data[e];
      offsets[e] += fit.u[o.i] * fit.v[o.j] - fit.v[o.i] * fit.u[o.j];
    }
    comps.push_back({std::move(fit.u), std::move(fit.v)});
  }

  std::vector<std::size_t> order(comps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return comps[a].magnitude() > comps[b].magnitude();
  });
  for (std::size_t idx : order) {
    emb.components.push_back(comps[idx]);
    canonicalize(emb.components.back());
    report.objective_trace.push_back(objectives[idx]);
  }
  for (std::size_t l = 0; l < emb.components.size(); ++l) {
    residuals.push_back(orthogonality_residual(emb.components, l));
  }
  report.orthogonality_residuals = std::move(residuals);
  report.parameter_count = emb.parameter_count();
  report.converged = converged;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!converged && config.throw_on_nonconvergence) {
    std::vector<Vector> last;
    for (const auto& c : emb.components) {
      last.push_back(c.u);
      last.push_back(c.v);
    }
    throw ConvergenceFailure("disc decomposition did not converge", report, std::move(last));
  }
  return {std::move(emb), std::move(report)};
}

}  // namespace detail

/// Greedy disc decomposition: components are fitted one after another
/// against the accumulated model, then sorted by magnitude and put in
/// canonical orientation.
inline DiscFit fit_disc(const ObservedPayoff& obs, const FitConfig& config) {
  DiscEmbedding emb;
  emb.model = config.loss_space == LossSpace::ProbMse ? "schur-prob" : "disc";
  emb.players = obs.players();
  emb.loss_space = config.loss_space;
  emb.ridge = config.ridge_weight;
  emb.seed = config.seed;
  const auto data = detail::prepare_observations(obs, config);
  return detail::fit_components(obs, config, data, std::move(emb));
}

/// Row means of P - 1/2 over the observed entries plus the diagonal; the
/// transitive part of m-Elo. Equals (1/n) sum_j P_ij - 1/2 when fully observed.
inline Vector melo_transitive_base(const ObservedPayoff& obs) {
  const auto n = static_cast<Eigen::Index>(obs.n_players());
  Vector sum = Vector::Zero(n);
  Vector cnt = Vector::Ones(n);
  for (const auto& e : obs.entries()) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    sum[i] += e.p - 0.5;
    sum[j] += 0.5 - e.p;
    cnt[i] += 1.0;
    cnt[j] += 1.0;
  }
  return sum.cwiseQuotient(cnt);
}

/// m-Elo: fixed transitive part plus a prob-mse decomposition of the residual.
inline DiscFit fit_melo(const ObservedPayoff& obs, FitConfig config) {
  config.loss_space = LossSpace::ProbMse;
  DiscEmbedding emb;
  emb.model = "melo";
  emb.players = obs.players();
  emb.loss_space = LossSpace::ProbMse;
  emb.ridge = config.ridge_weight;
  emb.seed = config.seed;
  emb.transitive_base = melo_transitive_base(obs);
  const auto data = detail::prepare_observations(obs, config, &emb.transitive_base);
  return detail::fit_components(obs, config, data, std::move(emb));
}

// ---------------------------------------------------------------------------
// Prediction and interpretation

inline double predict_disc(const DiscEmbedding& emb, std::size_t i, std::size_t j) {
  if (i >= emb.n_players() || j >= emb.n_players()) {
    throw UnknownPlayer("player index out of range");
  }
  const double x = emb.score(i, j);
  if (emb.loss_space == LossSpace::ProbMse) return std::clamp(0.5 + x, 0.0, 1.0);
  return sigmoid(x);
}

inline double predict_disc(const DiscEmbedding& emb, const std::string& a, const std::string& b) {
  auto index = [&](const std::string& name) {
    for (std::size_t k = 0; k < emb.players.size(); ++k) {
      if (emb.players[k] == name) return k;
    }
    throw UnknownPlayer("unknown player '" + name + "'");
  };
  return predict_disc(emb, index(a), index(b));
}

/// Verdict of the game from its largest component.
inline GameClassification classify_main_component(const DiscEmbedding& emb,
                                                  double perturb_eps = 1e-6) {
  if (emb.components.empty()) throw InvalidConfig("embedding has no components");
  return classify_disc(emb.components.front().points(), perturb_eps);
}

/// Strength u/v and consistency v of a transitive main component.
struct StrengthConsistency {
  Vector strength;
  Vector consistency;

  std::size_t n_players() const { return static_cast<std::size_t>(strength.size()); }
};

inline StrengthConsistency to_strength_consistency(const DiscEmbedding& emb) {
  if (emb.components.empty()) throw InvalidConfig("embedding has no components");
  const auto pts = reparametrize_positive(emb.components.front().points());
  StrengthConsistency sc{Vector(static_cast<Eigen::Index>(pts.size())),
                         Vector(static_cast<Eigen::Index>(pts.size()))};
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    sc.consistency[i] = pts[k].v;
    sc.strength[i] = pts[k].u / pts[k].v;
  }
  return sc;
}

/// sigmoid(v_i v_j (s_i - s_j)).
inline double predict_strength(const StrengthConsistency& sc, std::size_t i, std::size_t j) {
  if (i >= sc.n_players() || j >= sc.n_players()) throw UnknownPlayer("player index out of range");
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  return sigmoid(sc.consistency[a] * sc.consistency[b] * (sc.strength[a] - sc.strength[b]));
}

inline constexpr double kConsistencyFloor = 1e-6;

struct OnlineDiagnostics {
  bool clamped = false;
};

/// One online step after a game between i and j with outcome S for i. Both
/// players are updated from the pre-update state; consistencies that would
/// drop below kConsistencyFloor are clamped and reported.
inline StrengthConsistency update_disc_online(const StrengthConsistency& sc, std::size_t i,
                                              std::size_t j, double outcome, double eta,
                                              OnlineDiagnostics* diag = nullptr) {
  if (!(eta > 0.0)) throw InvalidConfig("step size must be positive");
  if (i >= sc.n_players() || j >= sc.n_players()) throw UnknownPlayer("player index out of range");
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  const double si = sc.strength[a];
  const double sj = sc.strength[b];
  const double vi = sc.consistency[a];
  const double vj = sc.consistency[b];
  const double innovation = eta * (outcome - predict_strength(sc, i, j));

  StrengthConsistency out = sc;
  out.strength[a] = si + innovation * vi * vj;
  out.consistency[a] = vi + innovation * vj * (si - sj);
  // Player j sees outcome 1 - S and prediction 1 - P_hat.
  out.strength[b] = sj - innovation * vj * vi;
  out.consistency[b] = vj - innovation * vi * (sj - si);
  bool clamped = false;
  for (auto idx : {a, b}) {
    if (out.consistency[idx] < kConsistencyFloor) {
      out.consistency[idx] = kConsistencyFloor;
      clamped = true;
    }
  }
  if (diag != nullptr) diag->clamped = clamped;
  return out;
}

// ---------------------------------------------------------------------------
// Ridge selection

namespace detail {

inline double embedding_mse(const DiscEmbedding& emb, const ObservedPayoff& test) {
  if (test.n_entries() == 0) return 0.0;
  double s = 0.0;
  for (const auto& e : test.entries()) {
    const double d = predict_disc(emb, e.i, e.j) - e.p;
    s += d * d;
  }
  return s / static_cast<double>(test.n_entries());
}

}  // namespace detail

/// Picks the ridge weight with the lowest mean held-out MSE over entry-wise
/// folds. Ties go to the smaller weight.
inline double cross_validate_ridge(const ObservedPayoff& obs, const FitConfig& config,
                                   std::vector<double> lambda_grid, std::size_t folds) {
  if (lambda_grid.empty()) throw InvalidConfig("ridge grid is empty");
  if (folds < 2) throw InvalidConfig("cross-validation needs at least 2 folds");
  if (obs.n_entries() < folds) throw InvalidConfig("fewer observed entries than folds");
  for (double l : lambda_grid) {
    if (!(l >= 0.0)) throw InvalidConfig("ridge weights must be >= 0");
  }
  std::sort(lambda_grid.begin(), lambda_grid.end());
  if (lambda_grid.size() == 1) return lambda_grid.front();

  std::vector<std::size_t> order(obs.n_entries());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed ^ 0xc0ffee);
  stable_shuffle(order, rng);
  std::vector<std::size_t> fold_of(obs.n_entries());
  for (std::size_t k = 0; k < order.size(); ++k) fold_of[order[k]] = k % folds;

  std::vector<ObservedPayoff> train_sets;
  std::vector<ObservedPayoff> test_sets;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<PayoffEntry> train;
    std::vector<PayoffEntry> test;
    for (std::size_t e = 0; e < obs.n_entries(); ++e) {
      (fold_of[e] == f ? test : train).push_back(obs.entries()[e]);
    }
    train_sets.emplace_back(obs.players(), std::move(train));
    test_sets.emplace_back(obs.players(), std::move(test));
  }

  double best_lambda = lambda_grid.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (double lambda : lambda_grid) {
    FitConfig c = config;
    c.ridge_weight = lambda;
    c.throw_on_nonconvergence = false;
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      const auto fit = fit_disc(train_sets[f], c);
      total += detail::embedding_mse(fit.embedding, test_sets[f]);
    }
    const double score = total / static_cast<double>(folds);
    if (score < best_score) {
      best_score = score;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

}  // namespace discrank
