#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace retailopt {

// A computation that cannot proceed on the given data (unreachable Viterbi
// states, disconnected environments, diverged optimization). Distinguished
// from malformed input so callers can exit with a dedicated status.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point on the unbounded plane (relative-trajectory frame).
struct PlanePoint {
    double x = 0.0;
    double y = 0.0;

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }

    PlanePoint operator+(const PlanePoint& o) const { return {x + o.x, y + o.y}; }
    PlanePoint operator-(const PlanePoint& o) const { return {x - o.x, y - o.y}; }
    PlanePoint operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const PlanePoint& o) const { return x == o.x && y == o.y; }

    double norm() const { return std::hypot(x, y); }
    double dist(const PlanePoint& o) const { return std::hypot(x - o.x, y - o.y); }
    double sqdist(const PlanePoint& o) const {
        const double dx = x - o.x, dy = y - o.y;
        return dx * dx + dy * dy;
    }
};

// Point inside the normalized domain [0,1]^2.
struct DomainPoint {
    double x = 0.0;
    double y = 0.0;

    bool valid() const {
        return std::isfinite(x) && std::isfinite(y) && x >= 0.0 && x <= 1.0 && y >= 0.0 &&
               y <= 1.0;
    }
    PlanePoint as_plane() const { return {x, y}; }
    bool operator==(const DomainPoint& o) const { return x == o.x && y == o.y; }
    double dist(const DomainPoint& o) const { return std::hypot(x - o.x, y - o.y); }
};

struct RelativeTrajectory {
    std::vector<PlanePoint> points;  // length T >= 2
    double dt = 0.5;                 // seconds per step

    std::size_t length() const { return points.size(); }
};

struct AbsoluteTrajectory {
    std::vector<DomainPoint> points;
    double dt = 0.5;

    std::size_t length() const { return points.size(); }
};

struct TimeUnknownAnchor {
    DomainPoint location;
};

// Timesteps are 1-based, matching trajectory indices in [1, T].
struct TimeKnownAnchor {
    DomainPoint location;
    int timestep = 1;
};

struct ObstacleRect {
    DomainPoint min_corner;
    DomainPoint max_corner;

    bool contains_interior(double x, double y) const {
        return x > min_corner.x && x < max_corner.x && y > min_corner.y && y < max_corner.y;
    }
    bool well_formed() const {
        return min_corner.valid() && max_corner.valid() && min_corner.x < max_corner.x &&
               min_corner.y < max_corner.y;
    }
};

struct Environment {
    std::vector<ObstacleRect> obstacles;
    double scale_m = 10.0;  // meters per normalized unit
    std::string name;
};

struct Session {
    Environment environment;
    RelativeTrajectory relative;
    std::vector<TimeUnknownAnchor> anchors_tu;
    std::vector<TimeKnownAnchor> anchors_tk;
    std::optional<AbsoluteTrajectory> ground_truth;
};

// Returns a human-readable description per violated invariant; empty means valid.
std::vector<std::string> validate_session(const Session& session);

}  // namespace retailopt
