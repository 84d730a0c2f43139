#pragma once

#include <cstdint>
#include <vector>

#include "retailopt/types.hpp"

namespace retailopt {

struct Segment {
    PlanePoint a;
    PlanePoint b;
};

// True iff p is not strictly inside any obstacle (obstacle boundaries count as valid).
bool point_in_valid_space(const DomainPoint& p, const Environment& env);
bool point_in_valid_space(const PlanePoint& p, const Environment& env);

// True iff the segment intersects the interior of any obstacle rectangle.
// Boundary grazing does not collide. Zero-length segments collide iff the
// point lies inside an obstacle interior.
bool segment_collides(const Segment& s, const Environment& env);

// Liang-Barsky style clip of a segment against one rectangle interior.
bool segment_intersects_rect_interior(const PlanePoint& a, const PlanePoint& b,
                                      const ObstacleRect& r);

// Rejection sampling of n points uniform over the valid space. Deterministic
// given the seed. Throws std::runtime_error if obstacles cover nearly all of
// the domain (acceptance rate below 1e-4).
std::vector<DomainPoint> sample_valid_points(std::size_t n, const Environment& env,
                                             std::uint64_t rng_seed);

}  // namespace retailopt
