#pragma once

// 2D geometric optics over line-segment surfaces: exact ray tracing for the
// reachability question "does the ray ever pass through the target disc",
// and a finite-precision "ball" trace that carries positional and angular
// uncertainty and answers UNKNOWN whenever the uncertainty set could split.
//
// Both traces run on one stepping engine so a ball with zero radii follows
// exactly the same arithmetic as the exact trace.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace precray::optics {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) {
  const double l = norm(a);
  return {a.x / l, a.y / l};
}
/// Counter-clockwise perpendicular.
constexpr Vec2 left_of(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 from_angle(double radians) { return {std::cos(radians), std::sin(radians)}; }

/// Distance from p to the closed segment [a, b].
inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double s = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return norm(p - (a + s * ab));
}

inline double segment_segment_distance(Vec2 a1, Vec2 a2, Vec2 b1, Vec2 b2) {
  const Vec2 da = a2 - a1;
  const Vec2 db = b2 - b1;
  const double denom = cross(da, db);
  if (denom != 0.0) {
    const double s = cross(b1 - a1, db) / denom;
    const double u = cross(b1 - a1, da) / denom;
    if (s >= 0.0 && s <= 1.0 && u >= 0.0 && u <= 1.0) return 0.0;
  }
  return std::min({point_segment_distance(a1, b1, b2), point_segment_distance(a2, b1, b2),
                   point_segment_distance(b1, a1, a2), point_segment_distance(b2, a1, a2)});
}

enum class SurfaceKind { Mirror, Refract, Absorb };

/// A directed segment p1 -> p2. For refracting surfaces `eta` is the index on
/// the left of p1 -> p2 divided by the index on the right.
struct Surface {
  SurfaceKind kind = SurfaceKind::Mirror;
  Vec2 p1;
  Vec2 p2;
  double eta = 1.0;

  double length() const { return norm(p2 - p1); }
  Vec2 tangent() const { return normalized(p2 - p1); }
  /// Unit normal on the left of p1 -> p2.
  Vec2 normal() const { return left_of(tangent()); }
};

struct Source {
  Vec2 origin;
  double angle = 0.0;  // radians, counter-clockwise from +x

  Vec2 direction() const { return from_angle(angle); }
};

struct Target {
  Vec2 centre;
  double radius = 0.0;
};

struct Scene {
  std::vector<Surface> surfaces;
  Source source;
  Target target;
};

/// Throws std::invalid_argument describing the first malformed element.
inline void validate(const Scene& scene) {
  auto finite = [](Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); };
  for (std::size_t i = 0; i < scene.surfaces.size(); ++i) {
    const auto& s = scene.surfaces[i];
    if (!finite(s.p1) || !finite(s.p2))
      throw std::invalid_argument("surface " + std::to_string(i) + ": non-finite coordinate");
    if (!(s.length() > 0.0)) throw std::invalid_argument("surface " + std::to_string(i) + ": zero length");
    if (s.kind == SurfaceKind::Refract && !(std::isfinite(s.eta) && s.eta > 0.0))
      throw std::invalid_argument("surface " + std::to_string(i) + ": eta must be positive");
  }
  if (!finite(scene.source.origin) || !std::isfinite(scene.source.angle))
    throw std::invalid_argument("source: non-finite value");
  if (!finite(scene.target.centre) || !(std::isfinite(scene.target.radius) && scene.target.radius > 0.0))
    throw std::invalid_argument("target: radius must be positive");
}

struct Ray {
  Vec2 origin;
  Vec2 dir;  // unit
};

/// Parameter below which an intersection is ignored, so a ray leaving a
/// surface does not re-hit it at its own origin.
inline constexpr double kMinHitDistance = 1e-9;
/// |d . n| below this is grazing incidence.
inline constexpr double kGrazing = 1e-12;

struct Intersection {
  std::size_t surface;
  Vec2 point;       // on the segment
  double distance;  // ray parameter, > kMinHitDistance
};

/// First surface hit strictly ahead of the ray; ties go to the earlier surface.
inline std::optional<Intersection> nearest_intersection(const Ray& ray, std::span<const Surface> surfaces) {
  std::optional<Intersection> best;
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const Vec2 e = surfaces[i].p2 - surfaces[i].p1;
    const double denom = cross(ray.dir, e);
    if (denom == 0.0) continue;  // parallel
    const Vec2 w = surfaces[i].p1 - ray.origin;
    const double t = cross(w, e) / denom;
    const double u = cross(w, ray.dir) / denom;
    if (!(t > kMinHitDistance) || u < 0.0 || u > 1.0) continue;
    if (!best || t < best->distance) best = Intersection{i, surfaces[i].p1 + u * e, t};
  }
  return best;
}
inline std::optional<Intersection> nearest_intersection(const Ray& ray, const Scene& scene) {
  return nearest_intersection(ray, std::span<const Surface>(scene.surfaces));
}

/// Mirror reflection d - 2 (d . n) n. Either orientation of n gives the same result.
inline Vec2 reflect(Vec2 dir, Vec2 normal) {
  const double k = 2.0 * dot(dir, normal);
  return {dir.x - k * normal.x, dir.y - k * normal.y};
}

/// Snell refraction with eta_ratio = n_incident / n_transmitted. The
/// tangential component is scaled by eta_ratio; when that exceeds unit
/// length the result is total internal reflection, reflect(dir, normal).
inline Vec2 refract(Vec2 dir, Vec2 normal, double eta_ratio) {
  const Vec2 facing = dot(dir, normal) > 0.0 ? -normal : normal;
  const double cos_i = -dot(dir, facing);
  const Vec2 tangential = dir + cos_i * facing;
  const Vec2 scaled = eta_ratio * tangential;
  const double sin2 = dot(scaled, scaled);
  if (sin2 > 1.0) return reflect(dir, normal);
  const double cos_t = std::sqrt(1.0 - sin2);
  return scaled - cos_t * facing;
}

/// eta_ratio seen by a ray travelling along `dir` into surface `s`.
inline double incident_eta_ratio(const Surface& s, Vec2 dir) {
  // Arriving from the left means travelling against the left normal.
  return dot(dir, s.normal()) < 0.0 ? s.eta : 1.0 / s.eta;
}

struct Budget {
  std::size_t max_bounces = 10000;
  double max_path_length = 1e6;
};

enum class Outcome { Hit, MissEscaped, BudgetExhausted, Unknown };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Hit: return "HIT";
    case Outcome::MissEscaped: return "MISS_ESCAPED";
    case Outcome::BudgetExhausted: return "BUDGET_EXHAUSTED";
    case Outcome::Unknown: return "UNKNOWN";
  }
  return "?";
}

struct Verdict {
  Outcome outcome = Outcome::Unknown;
  std::vector<Vec2> path;  // source first, then every vertex
  std::size_t bounces = 0;
  double path_length = 0.0;
  Vec2 final_dir;
};

/// Uncertainty carried by a ball ray: every perturbed ray starts within
/// `position` of the centre ray's point and points within `angle` radians of it.
struct Radii {
  double position = 0.0;
  double angle = 0.0;
};

/// Extra angular spread added at each surface interaction:
/// angle += position * min(1 / (distance to nearer endpoint), curvature_cap).
struct InflationRule {
  bool enabled = true;
  double curvature_cap = 1e6;
};

struct BallVerdict {
  Verdict verdict;
  std::vector<Radii> radii;  // one per path vertex
  std::string reason;        // why the trace stopped, for UNKNOWN
};

namespace detail {

/// max |p' - p| between points at equal parameter along two unit rays whose
/// directions differ by at most `angle`.
inline double chord(double angle) {
  return angle >= std::numbers::pi ? 2.0 : 2.0 * std::sin(0.5 * angle);
}

/// Lower bound on |d' . n| for d' within `spread` of a direction with |d . n| = c.
inline double min_normal_cos(double c, double spread) {
  const double theta = std::acos(std::clamp(c, 0.0, 1.0)) + spread;
  return theta >= 0.5 * std::numbers::pi ? 0.0 : std::cos(theta);
}

inline double wrap_pi(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

/// Angular half-width and centre of the direction set from `o` to the disc
/// (c, radius); nullopt when o is inside.
struct Arc {
  double centre;
  double half;
};
inline std::optional<Arc> disc_arc(Vec2 o, Vec2 c, double radius) {
  const Vec2 v = c - o;
  const double dist = norm(v);
  if (dist <= radius) return std::nullopt;
  return Arc{std::atan2(v.y, v.x), std::asin(radius / dist)};
}

/// Could a ray from `o` within `spread` of `dir` meet the disc (c, radius)?
inline bool cone_meets_disc(Vec2 o, Vec2 dir, double spread, Vec2 c, double radius) {
  const auto arc = disc_arc(o, c, radius);
  if (!arc) return true;
  const double heading = std::atan2(dir.y, dir.x);
  return std::abs(wrap_pi(heading - arc->centre)) <= arc->half + spread;
}

/// Could a ray from `o` within `spread` of `dir` meet the capsule of radius
/// `radius` around segment [p1, p2]? Extreme directions to a capsule are
/// tangents to its end discs.
inline bool cone_meets_capsule(Vec2 o, Vec2 dir, double spread, Vec2 p1, Vec2 p2, double radius) {
  if (point_segment_distance(o, p1, p2) <= radius) return true;
  const auto a1 = disc_arc(o, p1, radius);
  const auto a2 = disc_arc(o, p2, radius);
  // Both exist since o is farther than radius from every point of the segment.
  const double c2 = a1->centre + wrap_pi(a2->centre - a1->centre);
  const double lo = std::min(a1->centre - a1->half, c2 - a2->half);
  const double hi = std::max(a1->centre + a1->half, c2 + a2->half);
  const double heading = std::atan2(dir.y, dir.x);
  return std::abs(wrap_pi(heading - 0.5 * (lo + hi))) <= 0.5 * (hi - lo) + spread;
}

struct Box {
  Vec2 lo;
  Vec2 hi;
};

inline Box scene_box(const Scene& scene) {
  const Vec2 r{scene.target.radius, scene.target.radius};
  Box b{scene.target.centre - r, scene.target.centre + r};
  auto grow = [&b](Vec2 p) {
    b.lo = {std::min(b.lo.x, p.x), std::min(b.lo.y, p.y)};
    b.hi = {std::max(b.hi.x, p.x), std::max(b.hi.y, p.y)};
  };
  for (const auto& s : scene.surfaces) {
    grow(s.p1);
    grow(s.p2);
  }
  return b;
}

/// Ray parameter at which the ray is last inside the box (0 if never).
inline double box_exit(const Box& b, const Ray& ray) {
  double far = std::numeric_limits<double>::infinity();
  const double o[2] = {ray.origin.x, ray.origin.y};
  const double d[2] = {ray.dir.x, ray.dir.y};
  const double lo[2] = {b.lo.x, b.lo.y};
  const double hi[2] = {b.hi.x, b.hi.y};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (o[k] < lo[k] || o[k] > hi[k]) return 0.0;
      continue;
    }
    const double t1 = (lo[k] - o[k]) / d[k];
    const double t2 = (hi[k] - o[k]) / d[k];
    far = std::min(far, std::max(t1, t2));
  }
  return std::max(0.0, far);
}

struct Engine {
  const Scene& scene;
  Budget budget;
  bool ball;
  InflationRule inflation;

  BallVerdict run(Radii initial) const {
    validate(scene);
    if (budget.max_bounces < 1 || !(budget.max_path_length > 0.0))
      throw std::invalid_argument("budget must be positive");
    if (!(initial.position >= 0.0 && initial.angle >= 0.0))
      throw std::invalid_argument("ball radii must be non-negative");

    const auto& surfaces = scene.surfaces;
    const Vec2 target = scene.target.centre;
    const double delta = scene.target.radius;
    const Box box = scene_box(scene);

    BallVerdict out;
    Verdict& v = out.verdict;
    Vec2 o = scene.source.origin;
    Vec2 d = scene.source.direction();
    double r = initial.position;
    double a = initial.angle;
    std::optional<std::size_t> departed;
    v.path.push_back(o);
    out.radii.push_back({r, a});

    auto finish = [&](Outcome outcome, Vec2 end, double travelled, std::string why = {}) {
      v.outcome = outcome;
      v.path.push_back(end);
      v.path_length += travelled;
      v.final_dir = d;
      out.radii.push_back({r + travelled * chord(a), a});
      out.reason = std::move(why);
      return out;
    };
    auto unknown = [&](std::string why) {
      v.outcome = Outcome::Unknown;
      v.final_dir = d;
      out.reason = std::move(why);
      return out;
    };
    // Could some perturbed ray be stopped by a surface before reaching `end`?
    auto blocked = [&](Vec2 end, double radius) {
      for (std::size_t q = 0; q < surfaces.size(); ++q) {
        if (departed && q == *departed) continue;
        if (segment_segment_distance(surfaces[q].p1, surfaces[q].p2, o, end) < radius) return true;
      }
      return false;
    };

    for (;;) {
      const double remaining = budget.max_path_length - v.path_length;
      const Ray ray{o, d};
      const auto hit = nearest_intersection(ray, surfaces);
      const double leg = hit ? hit->distance : std::numeric_limits<double>::infinity();
      const double clipped = std::min(leg, remaining);

      // Closest approach to the target along the reachable part of this leg.
      const double s_c = std::clamp(dot(target - o, d), 0.0, clipped);
      const Vec2 c = o + s_c * d;
      const double miss = norm(target - c);
      if (!ball) {
        if (miss <= delta) return finish(Outcome::Hit, c, s_c);
      } else {
        const double rho_c = r + s_c * chord(a);
        if (miss + rho_c <= delta && !blocked(c, rho_c)) return finish(Outcome::Hit, c, s_c);
      }

      if (!hit) {
        if (ball && (r > 0.0 || a > 0.0)) {
          for (std::size_t q = 0; q < surfaces.size(); ++q) {
            if (departed && q == *departed) continue;
            if (cone_meets_capsule(o, d, a, surfaces[q].p1, surfaces[q].p2, r))
              return unknown("perturbed rays may still meet surface " + std::to_string(q));
          }
          if (cone_meets_disc(o, d, a, target, delta + r)) return unknown("perturbed rays may reach the target");
        }
        const double exit = box_exit(box, ray);
        if (exit > remaining) return finish(Outcome::BudgetExhausted, o + remaining * d, remaining);
        return finish(Outcome::MissEscaped, o + exit * d, exit);
      }

      if (leg > remaining) {
        if (ball) {
          const Vec2 end = o + remaining * d;
          const double rho = r + remaining * chord(a);
          if (point_segment_distance(target, o, end) - rho <= delta)
            return unknown("ball partially overlaps the target");
        }
        return finish(Outcome::BudgetExhausted, o + remaining * d, remaining);
      }

      const Surface& s = surfaces[hit->surface];
      const Vec2 h = hit->point;
      const double t = hit->distance;
      const Vec2 n = s.normal();
      const double c_in = std::abs(dot(d, n));
      double r_s = 0.0;  // bound on |perturbed hit point - h|
      double endpoint_gap = std::min(norm(h - s.p1), norm(h - s.p2));

      if (ball) {
        // A zero-radius ball is a single ray and passes grazing hits exactly as trace() does.
        if (r > 0.0 || a > 0.0) {
          const double c_min = min_normal_cos(c_in, a);
          if (c_min <= kGrazing) return unknown("incidence within the ball may graze the surface");
          const double dist_to_line = t * c_in;
          if (dist_to_line < r) return unknown("ball straddles the surface line");
          const double c_max = std::cos(std::max(0.0, std::acos(std::min(c_in, 1.0)) - a));
          const double longest = (dist_to_line + r) / c_min;
          const double shortest = (dist_to_line - r) / c_max;
          r_s = r + std::max(longest - t, t - shortest) + t * chord(a);
        }
        if (endpoint_gap < r_s) return unknown("ball straddles a surface endpoint");
        const double rho = std::max(r, r_s);
        if (point_segment_distance(target, o, h) - rho <= delta && rho > 0.0)
          return unknown("ball partially overlaps the target");
        for (std::size_t q = 0; q < surfaces.size(); ++q) {
          if (q == hit->surface || (departed && q == *departed)) continue;
          if (segment_segment_distance(surfaces[q].p1, surfaces[q].p2, o, h) < rho)
            return unknown("ball covers surfaces " + std::to_string(hit->surface) + " and " + std::to_string(q));
        }
      }

      if (s.kind == SurfaceKind::Absorb) {
        r = std::max(r, r_s);
        return finish(Outcome::MissEscaped, h, t);
      }
      if (v.bounces >= budget.max_bounces) {
        r = std::max(r, r_s);
        return finish(Outcome::BudgetExhausted, h, t);
      }

      Vec2 next = d;
      double a_out = a;
      if (c_in >= kGrazing) {
        if (s.kind == SurfaceKind::Mirror) {
          next = reflect(d, n);
        } else {
          const double eta = incident_eta_ratio(s, d);
          next = refract(d, n, eta);
          if (ball) {
            // Signed incidence angle, measured from the inward normal.
            const double theta = std::atan2(dot(d, s.tangent()), c_in);
            const double s_lo = std::abs(std::sin(theta - a));
            const double s_hi = std::abs(std::sin(theta + a));
            const double max_sin = std::max(s_lo, s_hi);
            const double min_sin = (theta - a <= 0.0 && theta + a >= 0.0) ? 0.0 : std::min(s_lo, s_hi);
            const bool centre_tir = eta * std::abs(std::sin(theta)) > 1.0;
            if (centre_tir && !(eta * min_sin > 1.0)) return unknown("incidence within the ball is TIR-critical");
            if (!centre_tir) {
              if (!(eta * max_sin < 1.0) && (a > 0.0 || eta * max_sin > 1.0))
                return unknown("incidence within the ball is TIR-critical");
              const double theta_t = std::asin(std::clamp(eta * std::sin(theta), -1.0, 1.0));
              const double lo_t = std::asin(std::clamp(eta * std::sin(theta - a), -1.0, 1.0));
              const double hi_t = std::asin(std::clamp(eta * std::sin(theta + a), -1.0, 1.0));
              a_out = std::max({a, std::abs(hi_t - theta_t), std::abs(theta_t - lo_t)});
            }
          }
        }
        next = normalized(next);
      }

      if (ball) {
        if (inflation.enabled && r_s > 0.0)
          a_out += r_s * std::min(1.0 / endpoint_gap, inflation.curvature_cap);
        a_out = std::min(a_out, std::numbers::pi);
        if (r > 0.0 || a > 0.0) {
          if (min_normal_cos(std::abs(dot(next, n)), a_out) <= kGrazing)
            return unknown("outgoing directions may graze the surface");
        }
        r = std::max(r, r_s);
        a = a_out;
      }

      if (c_in >= kGrazing) ++v.bounces;
      departed = hit->surface;
      o = h;
      d = next;
      v.path_length += t;
      v.path.push_back(h);
      out.radii.push_back({r, a});
    }
  }
};

}  // namespace detail

/// Exact trace. Terminates within the budget; never returns UNKNOWN.
inline Verdict trace(const Scene& scene, Budget budget = {}) {
  return detail::Engine{scene, budget, false, {}}.run({0.0, 0.0}).verdict;
}

/// Finite-precision trace. HIT means every ray in the initial ball passes
/// through the target; MISS_ESCAPED means none does.
inline BallVerdict trace_ball(const Scene& scene, Radii initial, Budget budget = {}, InflationRule inflation = {}) {
  return detail::Engine{scene, budget, true, inflation}.run(initial);
}

}  // namespace precray::optics
