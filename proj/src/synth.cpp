#include "retailopt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "retailopt/geometry.hpp"
#include "retailopt/rng.hpp"

namespace retailopt {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Dijkstra over a visibility graph of sampled points plus the two endpoints.
std::vector<DomainPoint> shortest_polyline(const DomainPoint& from, const DomainPoint& to,
                                           const std::vector<DomainPoint>& support,
                                           const Environment& env) {
    if (!segment_collides({from.as_plane(), to.as_plane()}, env)) return {from, to};

    std::vector<DomainPoint> verts{from, to};
    verts.insert(verts.end(), support.begin(), support.end());
    const int n = static_cast<int>(verts.size());

    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!segment_collides({verts[i].as_plane(), verts[j].as_plane()}, env)) {
                const double d = verts[i].dist(verts[j]);
                adj[i].push_back({j, d});
                adj[j].push_back({i, d});
            }

    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> prev(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[0] = 0.0;
    pq.push({0.0, 0});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (u == 1) break;
        for (auto [v, w] : adj[u]) {
            if (d + w < dist[v]) {
                dist[v] = d + w;
                prev[v] = u;
                pq.push({dist[v], v});
            }
        }
    }
    if (!std::isfinite(dist[1]))
        throw InfeasibleError("synth: no collision-free path between waypoints");

    std::vector<DomainPoint> path;
    for (int at = 1; at != -1; at = prev[at]) path.push_back(verts[at]);
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

Environment generate_environment(const ScenarioConfig& cfg) {
    if (cfg.shelf_rows < 1 || cfg.shelf_cols < 1 || cfg.corridor_width <= 0.0)
        throw std::invalid_argument("generate_environment: bad grid configuration");
    const double w = cfg.corridor_width;
    const double sw = (1.0 - (cfg.shelf_cols + 1) * w) / cfg.shelf_cols;
    const double sh = (1.0 - (cfg.shelf_rows + 1) * w) / cfg.shelf_rows;
    if (sw <= 0.0 || sh <= 0.0)
        throw std::invalid_argument("generate_environment: corridors leave no room for shelves");

    Environment env;
    env.scale_m = cfg.scale_m;
    env.name = "grid-" + std::to_string(cfg.shelf_rows) + "x" + std::to_string(cfg.shelf_cols);
    for (int r = 0; r < cfg.shelf_rows; ++r) {
        for (int c = 0; c < cfg.shelf_cols; ++c) {
            const double x0 = w + c * (sw + w);
            const double y0 = w + r * (sh + w);
            env.obstacles.push_back({{x0, y0}, {x0 + sw, y0 + sh}});
        }
    }

    // Connectivity of the valid space via union-find on a sampled visibility graph.
    const auto pts = sample_valid_points(300, env, 12345);
    UnionFind uf(static_cast<int>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (!segment_collides({pts[i].as_plane(), pts[j].as_plane()}, env))
                uf.unite(static_cast<int>(i), static_cast<int>(j));
    const int root = uf.find(0);
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (uf.find(static_cast<int>(i)) != root)
            throw InfeasibleError("generate_environment: valid space is not connected");
    return env;
}

GroundTruthScenario generate_ground_truth(const Environment& env, const ScenarioConfig& cfg,
                                          std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    const double w = cfg.corridor_width;
    const int n_shelves = static_cast<int>(env.obstacles.size());
    if (cfg.n_tu_anchors < 1 || cfg.n_tu_anchors > n_shelves)
        throw std::invalid_argument("generate_ground_truth: n_tu_anchors out of range");

    // Distinct shelves, visited in draw order.
    std::vector<int> shelves(n_shelves);
    std::iota(shelves.begin(), shelves.end(), 0);
    for (int i = 0; i < cfg.n_tu_anchors; ++i) {
        const int j = i + static_cast<int>(rng.uniform_index(n_shelves - i));
        std::swap(shelves[i], shelves[j]);
    }

    // Shelf-front anchor: midpoint of a random side, nudged into the corridor.
    std::vector<TimeUnknownAnchor> anchors_tu;
    const double nudge = 0.35 * w;
    for (int i = 0; i < cfg.n_tu_anchors; ++i) {
        const ObstacleRect& r = env.obstacles[shelves[i]];
        const double cx = 0.5 * (r.min_corner.x + r.max_corner.x);
        const double cy = 0.5 * (r.min_corner.y + r.max_corner.y);
        DomainPoint a;
        switch (rng.uniform_index(4)) {
            case 0: a = {cx, r.max_corner.y + nudge}; break;
            case 1: a = {cx, r.min_corner.y - nudge}; break;
            case 2: a = {r.max_corner.x + nudge, cy}; break;
            default: a = {r.min_corner.x - nudge, cy}; break;
        }
        a.x = std::clamp(a.x, 0.001, 0.999);
        a.y = std::clamp(a.y, 0.001, 0.999);
        anchors_tu.push_back({a});
    }

    const DomainPoint start{0.5 * w, 0.5 * w};

    std::vector<DomainPoint> waypoints{start};
    std::vector<bool> is_anchor{false};
    const auto support = sample_valid_points(250, env, rng.next_u64());
    std::vector<DomainPoint> detours;
    for (int i = 0; i < cfg.n_detours; ++i)
        detours.push_back(support[rng.uniform_index(support.size())]);

    // Interleave detours between anchor visits to mimic wandering.
    std::size_t detour_at = 0;
    for (int i = 0; i < cfg.n_tu_anchors; ++i) {
        if (detour_at < detours.size() && rng.uniform() < 0.7) {
            waypoints.push_back(detours[detour_at++]);
            is_anchor.push_back(false);
        }
        waypoints.push_back(anchors_tu[i].location);
        is_anchor.push_back(true);
    }
    while (detour_at < detours.size()) {
        waypoints.push_back(detours[detour_at++]);
        is_anchor.push_back(false);
    }
    waypoints.push_back(start);  // return to the starting point
    is_anchor.push_back(false);

    // Dense trajectory: constant walk speed along collision-free legs, with a
    // pause after each anchor visit.
    const double step_len = cfg.walk_speed_mps / cfg.scale_m * cfg.dt;
    const int pause_steps = static_cast<int>(std::lround(cfg.pause_seconds / cfg.dt));
    AbsoluteTrajectory gt;
    gt.dt = cfg.dt;
    gt.points.push_back(start);
    for (std::size_t leg = 1; leg < waypoints.size(); ++leg) {
        const auto poly = shortest_polyline(waypoints[leg - 1], waypoints[leg], support, env);
        double length = 0.0;
        for (std::size_t i = 1; i < poly.size(); ++i) length += poly[i - 1].dist(poly[i]);
        const int steps = std::max(1, static_cast<int>(std::lround(length / step_len)));
        // Interpolate along the polyline, skipping the shared first point.
        std::vector<double> cum{0.0};
        for (std::size_t i = 1; i < poly.size(); ++i)
            cum.push_back(cum.back() + poly[i - 1].dist(poly[i]));
        for (int s = 1; s <= steps; ++s) {
            const double want = length * s / steps;
            std::size_t seg = 1;
            while (seg + 1 < cum.size() && cum[seg] < want) ++seg;
            const double seg_len = cum[seg] - cum[seg - 1];
            const double f = seg_len > 0.0 ? (want - cum[seg - 1]) / seg_len : 1.0;
            const DomainPoint& a = poly[seg - 1];
            const DomainPoint& b = poly[seg];
            gt.points.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
        }
        if (is_anchor[leg]) {
            for (int s = 0; s < pause_steps; ++s) gt.points.push_back(gt.points.back());
        }
    }

    GroundTruthScenario out;
    out.anchors_tu = std::move(anchors_tu);
    out.anchors_tk.push_back({gt.points.front(), 1});
    out.anchors_tk.push_back({gt.points.back(), static_cast<int>(gt.points.size())});
    out.trajectory = std::move(gt);
    return out;
}

RelativeTrajectory corrupt_to_relative(const AbsoluteTrajectory& gt, const DriftModel& drift,
                                       std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    RelativeTrajectory q;
    q.dt = gt.dt;
    q.points.push_back({0.0, 0.0});

    double heading_bias = 0.0;
    double scale = 1.0;
    for (std::size_t t = 1; t < gt.length(); ++t) {
        if ((t - 1) % static_cast<std::size_t>(std::max(1, drift.scale_segment_steps)) == 0)
            scale = std::exp(drift.scale_sigma * rng.normal());
        heading_bias += drift.heading_drift_rate * rng.normal();

        const double dx = gt.points[t].x - gt.points[t - 1].x;
        const double dy = gt.points[t].y - gt.points[t - 1].y;
        const double c = std::cos(heading_bias), s = std::sin(heading_bias);
        PlanePoint step{scale * (c * dx - s * dy), scale * (s * dx + c * dy)};
        step.x += drift.white_noise_sigma * rng.normal();
        step.y += drift.white_noise_sigma * rng.normal();
        q.points.push_back(q.points.back() + step);
    }
    return q;
}

Session generate_session(const ScenarioConfig& cfg, std::uint64_t rng_seed) {
    Session s;
    s.environment = generate_environment(cfg);
    auto scenario = generate_ground_truth(s.environment, cfg, rng_seed);
    s.relative = corrupt_to_relative(scenario.trajectory, cfg.drift, rng_seed ^ 0x9e3779b97f4a7c15ULL);
    s.anchors_tu = std::move(scenario.anchors_tu);
    s.anchors_tk = std::move(scenario.anchors_tk);
    s.ground_truth = std::move(scenario.trajectory);
    return s;
}

}  // namespace retailopt
