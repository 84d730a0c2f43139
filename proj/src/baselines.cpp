#include "retailopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace retailopt {

TspTour solve_path_tsp(const DomainPoint& start, const DomainPoint& end,
                       const std::vector<DomainPoint>& waypoints) {
    const int n = static_cast<int>(waypoints.size());
    if (n > 15) throw std::invalid_argument("solve_path_tsp: more than 15 waypoints");

    TspTour tour;
    tour.route.push_back(start);
    if (n == 0) {
        tour.route.push_back(end);
        tour.length = start.dist(end);
        return tour;
    }

    const auto dist = [&](int i, int j) { return waypoints[i].dist(waypoints[j]); };

    // Suffix DP: best[mask][i] = cheapest completion standing at waypoint i
    // with `mask` already visited. Forward reconstruction picks the smallest
    // waypoint index among optimal continuations, making the visit order
    // lexicographically minimal among shortest tours.
    const int full = (1 << n) - 1;
    std::vector<std::vector<double>> best(full + 1,
                                          std::vector<double>(n, std::numeric_limits<double>::infinity()));
    for (int i = 0; i < n; ++i) best[full][i] = waypoints[i].dist(end);
    for (int mask = full - 1; mask >= 0; --mask) {
        for (int i = 0; i < n; ++i) {
            if (!(mask & (1 << i))) continue;
            double b = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) {
                if (mask & (1 << j)) continue;
                b = std::min(b, dist(i, j) + best[mask | (1 << j)][j]);
            }
            best[mask][i] = b;
        }
    }

    double total = std::numeric_limits<double>::infinity();
    int first = -1;
    for (int j = 0; j < n; ++j) {
        const double c = start.dist(waypoints[j]) + best[1 << j][j];
        if (c < total) {
            total = c;
            first = j;
        }
    }

    tour.length = total;
    int at = first;
    int mask = 1 << first;
    tour.route.push_back(waypoints[first]);
    while (mask != full) {
        const double remaining = best[mask][at];
        for (int j = 0; j < n; ++j) {
            if (mask & (1 << j)) continue;
            const double via = dist(at, j) + best[mask | (1 << j)][j];
            if (via <= remaining + 1e-12) {
                at = j;
                mask |= 1 << j;
                tour.route.push_back(waypoints[j]);
                break;
            }
        }
    }
    tour.route.push_back(end);
    return tour;
}

std::vector<DomainPoint> resample_polyline(const std::vector<DomainPoint>& polyline,
                                           std::size_t n) {
    if (polyline.empty() || n == 0) return {};
    std::vector<double> cum{0.0};
    for (std::size_t i = 1; i < polyline.size(); ++i)
        cum.push_back(cum.back() + polyline[i - 1].dist(polyline[i]));
    const double total = cum.back();

    std::vector<DomainPoint> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (total == 0.0 || n == 1) {
            out.push_back(polyline[k == 0 ? 0 : polyline.size() - 1]);
            continue;
        }
        const double s = total * static_cast<double>(k) / static_cast<double>(n - 1);
        auto it = std::upper_bound(cum.begin(), cum.end(), s);
        std::size_t seg = std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
        if (seg == 0) seg = 1;
        const double seg_len = cum[seg] - cum[seg - 1];
        const double f = seg_len > 0.0 ? (s - cum[seg - 1]) / seg_len : 0.0;
        const DomainPoint& a = polyline[seg - 1];
        const DomainPoint& b = polyline[seg];
        out.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
    }
    return out;
}

AbsoluteTrajectory tsp_baseline(const Session& session, const ViterbiConfig& cfg) {
    if (session.anchors_tk.size() < 2)
        throw std::invalid_argument("tsp_baseline: needs at least 2 time-known anchors");

    const DomainPoint start = session.anchors_tk.front().location;
    const DomainPoint end = session.anchors_tk.back().location;
    std::vector<DomainPoint> waypoints;
    for (const auto& a : session.anchors_tu) waypoints.push_back(a.location);

    const TspTour tour = solve_path_tsp(start, end, waypoints);
    const auto dense = resample_polyline(tour.route, session.relative.length());

    std::vector<PlanePoint> as_plane;
    as_plane.reserve(dense.size());
    for (const auto& p : dense) as_plane.push_back(p.as_plane());
    return project(as_plane, session.environment, session.relative.dt, cfg);
}

AbsoluteTrajectory anchored_raw_baseline(const Session& session) {
    if (session.anchors_tk.empty())
        throw std::invalid_argument("anchored_raw_baseline: needs a time-known anchor");

    const auto earliest = std::min_element(
        session.anchors_tk.begin(), session.anchors_tk.end(),
        [](const TimeKnownAnchor& a, const TimeKnownAnchor& b) { return a.timestep < b.timestep; });
    const PlanePoint offset = earliest->location.as_plane() - session.relative.points.front();

    AbsoluteTrajectory out;
    out.dt = session.relative.dt;
    out.points.reserve(session.relative.length());
    for (const auto& q : session.relative.points) {
        const PlanePoint p = q + offset;
        out.points.push_back({std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)});
    }
    return out;
}

}  // namespace retailopt
