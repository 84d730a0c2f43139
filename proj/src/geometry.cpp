#include "retailopt/geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "retailopt/rng.hpp"

namespace retailopt {

bool point_in_valid_space(const DomainPoint& p, const Environment& env) {
    for (const auto& r : env.obstacles) {
        if (r.contains_interior(p.x, p.y)) return false;
    }
    return true;
}

bool point_in_valid_space(const PlanePoint& p, const Environment& env) {
    for (const auto& r : env.obstacles) {
        if (r.contains_interior(p.x, p.y)) return false;
    }
    return true;
}

bool segment_intersects_rect_interior(const PlanePoint& a, const PlanePoint& b,
                                      const ObstacleRect& r) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;

    if (dx == 0.0 && dy == 0.0) return r.contains_interior(a.x, a.y);

    // Clip [0,1] parameter range against the closed rectangle (Liang-Barsky).
    double t0 = 0.0, t1 = 1.0;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - r.min_corner.x, r.max_corner.x - a.x, a.y - r.min_corner.y,
                         r.max_corner.y - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;  // parallel and outside the slab
        } else {
            const double t = q[i] / p[i];
            if (p[i] < 0.0) {
                t0 = std::max(t0, t);
            } else {
                t1 = std::min(t1, t);
            }
        }
    }
    if (t0 >= t1) return false;

    // The clipped sub-segment lies in the closed rect; it touches the interior
    // iff its midpoint is strictly inside (rules out edge-grazing segments).
    const double tm = 0.5 * (t0 + t1);
    return r.contains_interior(a.x + tm * dx, a.y + tm * dy);
}

bool segment_collides(const Segment& s, const Environment& env) {
    for (const auto& r : env.obstacles) {
        if (segment_intersects_rect_interior(s.a, s.b, r)) return true;
    }
    return false;
}

std::vector<DomainPoint> sample_valid_points(std::size_t n, const Environment& env,
                                             std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    std::vector<DomainPoint> out;
    out.reserve(n);
    // 1e4 attempts per point bounds runtime when obstacles cover >= 99.99% of the domain.
    const std::size_t max_attempts = n * 10000 + 10000;
    std::size_t attempts = 0;
    while (out.size() < n) {
        if (++attempts > max_attempts)
            throw InfeasibleError(
                "sample_valid_points: rejection sampling failed; obstacles cover nearly the whole "
                "domain");
        DomainPoint p{rng.uniform(), rng.uniform()};
        if (point_in_valid_space(p, env)) out.push_back(p);
    }
    return out;
}

}  // namespace retailopt
