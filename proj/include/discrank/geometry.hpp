#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "discrank/errors.hpp"
#include "discrank/payoff.hpp"

namespace discrank {

/// Coordinates (u_i, v_i) of one player in a disc game.
struct Point2 {
  double u = 0.0;
  double v = 0.0;
};

using PlanarPointSet = std::vector<Point2>;

enum class Verdict { FullyTransitive, FullyCyclic };
enum class OriginLocation { Interior, Exterior, OnBorderPerturbed };

/// Players (i, j, k) with i beating j, j beating k and k beating i.
struct Triple {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct GameClassification {
  Verdict verdict = Verdict::FullyTransitive;
  OriginLocation origin_location = OriginLocation::Exterior;
  std::optional<Triple> witness;
  /// Signed distance from the origin to the hull boundary (positive inside),
  /// measured on the points the verdict was taken from.
  double origin_margin = 0.0;
};

inline const char* to_string(Verdict v) {
  return v == Verdict::FullyCyclic ? "FullyCyclic" : "FullyTransitive";
}

inline const char* to_string(OriginLocation loc) {
  switch (loc) {
    case OriginLocation::Interior: return "Interior";
    case OriginLocation::Exterior: return "Exterior";
    case OriginLocation::OnBorderPerturbed: return "OnBorder-perturbed";
  }
  return "?";
}

/// u_a v_b - v_a u_b; positive iff player a beats player b in the disc game.
inline double cross(const Point2& a, const Point2& b) { return a.u * b.v - a.v * b.u; }

namespace detail {

inline double orient(const Point2& o, const Point2& a, const Point2& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

inline double distance_to_segment(const Point2& a, const Point2& b) {
  const double du = b.u - a.u;
  const double dv = b.v - a.v;
  const double len2 = du * du + dv * dv;
  double t = len2 > 0.0 ? -(a.u * du + a.v * dv) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(a.u + t * du, a.v + t * dv);
}

inline Point2 closest_on_segment(const Point2& a, const Point2& b) {
  const double du = b.u - a.u;
  const double dv = b.v - a.v;
  const double len2 = du * du + dv * dv;
  double t = len2 > 0.0 ? -(a.u * du + a.v * dv) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return {a.u + t * du, a.v + t * dv};
}

inline double scale_of(const PlanarPointSet& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, std::hypot(p.u, p.v));
  return std::max(s, 1.0);
}

}  // namespace detail

/// Andrew's monotone chain. Returns hull vertex indices in counter-clockwise
/// order without collinear vertices.
inline std::vector<std::size_t> convex_hull(const PlanarPointSet& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].u < pts[b].u || (pts[a].u == pts[b].u && pts[a].v < pts[b].v);
  });
  order.erase(std::unique(order.begin(), order.end(),
                          [&](std::size_t a, std::size_t b) {
                            return pts[a].u == pts[b].u && pts[a].v == pts[b].v;
                          }),
              order.end());
  if (order.size() < 3) return order;

  std::vector<std::size_t> hull(2 * order.size());
  std::size_t k = 0;
  for (std::size_t idx : order) {
    while (k >= 2 && detail::orient(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx]) <= 0.0) --k;
    hull[k++] = idx;
  }
  for (std::size_t t = order.size() - 1, lower = k + 1; t-- > 0;) {
    const std::size_t idx = order[t];
    while (k >= lower && detail::orient(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx]) <= 0.0) --k;
    hull[k++] = idx;
  }
  hull.resize(k - 1);
  return hull;
}

/// Signed distance from the origin to the boundary of hull(pts): positive
/// when the origin is strictly inside, negative outside, ~0 on the border.
inline double origin_hull_margin(const PlanarPointSet& pts) {
  const auto hull = convex_hull(pts);
  if (hull.empty()) return -std::numeric_limits<double>::infinity();
  if (hull.size() == 1) return -std::hypot(pts[hull[0]].u, pts[hull[0]].v);
  if (hull.size() == 2) return -detail::distance_to_segment(pts[hull[0]], pts[hull[1]]);

  bool inside = true;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const auto& a = pts[hull[e]];
    const auto& b = pts[hull[(e + 1) % hull.size()]];
    // Origin left of a CCW edge <=> orient(a, b, 0) > 0.
    if (detail::orient(a, b, Point2{}) <= 0.0) inside = false;
    dist = std::min(dist, detail::distance_to_segment(a, b));
  }
  return inside ? dist : -dist;
}

namespace detail {

/// 3-cycle among points whose hull strictly contains the origin. Walks the
/// hull in angular order: from a, jump to the last vertex a beats, then again;
/// the third vertex beats a unless ties get in the way.
inline std::optional<Triple> angular_witness(const PlanarPointSet& pts) {
  const auto hull = convex_hull(pts);
  const std::size_t h = hull.size();
  auto beats = [&](std::size_t a, std::size_t b) { return cross(pts[a], pts[b]) > 0.0; };
  auto farthest_beaten = [&](std::size_t pos) -> std::optional<std::size_t> {
    std::optional<std::size_t> last;
    for (std::size_t step = 1; step < h; ++step) {
      const std::size_t q = (pos + step) % h;
      if (!beats(hull[pos], hull[q])) break;
      last = q;
    }
    return last;
  };
  std::optional<Triple> best;
  auto consider = [&](Triple t) {
    // Rotate so the smallest index comes first.
    std::array<std::size_t, 3> c{t.i, t.j, t.k};
    const auto m = static_cast<std::size_t>(std::min_element(c.begin(), c.end()) - c.begin());
    Triple r{c[m], c[(m + 1) % 3], c[(m + 2) % 3]};
    if (!best || std::tie(r.i, r.j, r.k) < std::tie(best->i, best->j, best->k)) best = r;
  };
  for (std::size_t s = 0; s < h; ++s) {
    const auto b = farthest_beaten(s);
    if (!b) continue;
    const auto c = farthest_beaten(*b);
    if (!c || *c == s) continue;
    if (beats(hull[*c], hull[s])) consider({hull[s], hull[*b], hull[*c]});
  }
  if (best) return best;
  // Ties on the hull: fall back to scanning every triple.
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !beats(i, j)) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (beats(j, k) && beats(k, i)) return Triple{i, j, k};
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Fully transitive / fully cyclic verdict of a disc game from the position
/// of the origin relative to the convex hull of the players.
///
/// When the origin sits on the hull border the game has ties; each point is
/// then rotated about the origin by perturb_eps * (index + 1) radians and the
/// test is repeated once on the perturbed set.
inline GameClassification classify_disc(const PlanarPointSet& points, double perturb_eps = 1e-6) {
  if (points.size() < 3) {
    throw DegenerateGame("hull classification needs at least 3 players, got " +
                         std::to_string(points.size()));
  }
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (std::hypot(points[k].u, points[k].v) <= 1e-300) {
      throw OriginPlayer("player " + std::to_string(k) + " sits at the origin");
    }
  }
  const double border_tol = 1e-9 * detail::scale_of(points);

  GameClassification out;
  PlanarPointSet tested = points;
  double margin = origin_hull_margin(tested);
  if (std::abs(margin) <= border_tol) {
    for (std::size_t k = 0; k < tested.size(); ++k) {
      const double angle = perturb_eps * static_cast<double>(k + 1);
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      const Point2 p = points[k];
      tested[k] = {c * p.u - s * p.v, s * p.u + c * p.v};
    }
    margin = origin_hull_margin(tested);
    out.origin_location = OriginLocation::OnBorderPerturbed;
    out.verdict = margin > border_tol ? Verdict::FullyCyclic : Verdict::FullyTransitive;
  } else if (margin > 0.0) {
    out.origin_location = OriginLocation::Interior;
    out.verdict = Verdict::FullyCyclic;
  } else {
    out.origin_location = OriginLocation::Exterior;
    out.verdict = Verdict::FullyTransitive;
  }
  out.origin_margin = margin;
  if (out.verdict == Verdict::FullyCyclic) out.witness = detail::angular_witness(tested);
  return out;
}

namespace detail {

inline void require_fully_observed(const DensePayoff& p) {
  if (!p.fully_observed()) {
    throw InvalidConfig("transitivity checks need a fully observed payoff");
  }
}

}  // namespace detail

/// Lexicographically smallest (i, j, k) with P_ij, P_jk, P_ki > 0.5.
inline std::optional<Triple> find_cycle(const DensePayoff& p) {
  detail::require_fully_observed(p);
  const auto n = static_cast<std::size_t>(p.matrix.rows());
  auto beats = [&](std::size_t a, std::size_t b) {
    return p.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) > 0.5;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !beats(i, j)) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (beats(j, k) && beats(k, i)) return Triple{i, j, k};
      }
    }
  }
  return std::nullopt;
}

/// True iff P_ij > 0.5 and P_jk > 0.5 imply P_ik > 0.5 for every triple.
inline bool is_fully_transitive(const DensePayoff& p) {
  detail::require_fully_observed(p);
  const auto n = p.matrix.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || !(p.matrix(i, j) > 0.5)) continue;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (p.matrix(j, k) > 0.5 && !(p.matrix(i, k) > 0.5)) return false;
      }
    }
  }
  return true;
}

/// Rotates a transitive disc embedding so that every v is positive. Points
/// already in the upper half-plane are returned unchanged; otherwise the
/// separating direction is the hull point closest to the origin.
inline PlanarPointSet reparametrize_positive(const PlanarPointSet& points) {
  if (std::all_of(points.begin(), points.end(), [](const Point2& p) { return p.v > 0.0; })) {
    return points;
  }
  if (points.size() >= 3) {
    const auto cls = classify_disc(points);
    if (cls.verdict == Verdict::FullyCyclic) {
      throw NotTransitive("embedding is fully cyclic; no positive reparametrization exists");
    }
    if (cls.origin_location == OriginLocation::OnBorderPerturbed) {
      throw NotTransitive("origin lies on the hull border; consistencies cannot all be positive");
    }
  }
  const auto hull = convex_hull(points);
  if (hull.empty()) throw DegenerateGame("no players to reparametrize");
  Point2 closest = points[hull[0]];
  double best = std::hypot(closest.u, closest.v);
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const Point2 c = detail::closest_on_segment(points[hull[e]], points[hull[(e + 1) % hull.size()]]);
    const double d = std::hypot(c.u, c.v);
    if (d < best) {
      best = d;
      closest = c;
    }
  }
  if (!(best > 0.0) || origin_hull_margin(points) >= 0.0) {
    throw NotTransitive("origin is not separated from the players");
  }
  const double a1 = closest.u / best;
  const double a2 = closest.v / best;
  PlanarPointSet out;
  out.reserve(points.size());
  // Rotation taking (a1, a2) to (0, 1); determinant +1 keeps cross products.
  for (const auto& p : points) out.push_back({a2 * p.u - a1 * p.v, a1 * p.u + a2 * p.v});
  return out;
}

}  // namespace discrank
