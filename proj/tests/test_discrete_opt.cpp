#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "retailopt/discrete_opt.hpp"
#include "retailopt/rng.hpp"
#include "test_util.hpp"

using namespace retailopt;
using namespace retailopt::testutil;

namespace {

ProjectionGraph csr_from_adjacency(const std::vector<PlanePoint>& vertices,
                                   const std::vector<std::vector<int>>& rows) {
    ProjectionGraph g;
    g.vertices = vertices;
    g.row_offsets.push_back(0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j : rows[i]) {
            g.neighbors.push_back(j);
            g.edge_dist.push_back(vertices[i].dist(vertices[j]));
        }
        g.row_offsets.push_back(static_cast<int>(g.neighbors.size()));
    }
    return g;
}

// Exhaustive minimum of the projection cost over all adjacency-valid
// sequences; mirrors the Eq-style unary + pairwise objective directly.
double brute_force_cost(const std::vector<PlanePoint>& q_prime, const ProjectionGraph& g,
                        double beta) {
    const int n = g.num_vertices();
    const int t_len = static_cast<int>(q_prime.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> seq(t_len, 0);
    const std::function<void(int, double)> rec = [&](int t, double cost) {
        if (t == t_len) {
            best = std::min(best, cost);
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (t > 0) {
                // Only consecutive pairs are constrained; v_1 is free.
                bool connected = false;
                const int u = seq[t - 1];
                for (int k = g.row_offsets[u]; k < g.row_offsets[u + 1]; ++k)
                    connected |= g.neighbors[k] == v;
                if (!connected) continue;
            }
            seq[t] = v;
            double step = g.vertices[v].dist(q_prime[t]);
            if (t > 0) step += beta * g.vertices[v].dist(g.vertices[seq[t - 1]]);
            rec(t + 1, cost + step);
        }
    };
    rec(0, 0.0);
    return best;
}

std::vector<PlanePoint> random_points(int n, Rng& rng) {
    std::vector<PlanePoint> pts;
    for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(), rng.uniform()});
    return pts;
}

}  // namespace

TEST_CASE("empty obstacle list yields a complete graph") {
    std::vector<PlanePoint> qp = {{0.1, 0.1}, {0.9, 0.9}};
    ViterbiConfig cfg;
    cfg.n_samples = 10;
    const ProjectionGraph g = build_graph(qp, open_env(), cfg);
    REQUIRE(g.num_vertices() == 12);
    for (int v = 0; v < g.num_vertices(); ++v)
        CHECK(g.row_offsets[v + 1] - g.row_offsets[v] == g.num_vertices());
}

TEST_CASE("a wall separates opposite vertices") {
    Environment env = open_env();
    env.obstacles.push_back({{0.45, 0.0}, {0.55, 1.0}});  // full-height wall
    std::vector<PlanePoint> qp = {{0.2, 0.5}, {0.8, 0.5}};
    ViterbiConfig cfg;
    cfg.n_samples = 1;
    cfg.rng_seed = 3;
    const ProjectionGraph g = build_graph(qp, env, cfg);
    bool linked = false;
    for (int k = g.row_offsets[0]; k < g.row_offsets[1]; ++k) linked |= g.neighbors[k] == 1;
    CHECK(!linked);
}

TEST_CASE("graph construction is deterministic and symmetric") {
    const Environment env = one_box_env();
    std::vector<PlanePoint> qp = {{0.1, 0.2}, {0.9, 0.8}, {0.5, 0.1}};
    ViterbiConfig cfg;
    cfg.n_samples = 50;
    cfg.rng_seed = 12;
    const ProjectionGraph a = build_graph(qp, env, cfg);
    const ProjectionGraph b = build_graph(qp, env, cfg);
    CHECK(a.neighbors == b.neighbors);
    CHECK(a.row_offsets == b.row_offsets);
    for (int u = 0; u < a.num_vertices(); ++u) {
        for (int k = a.row_offsets[u]; k < a.row_offsets[u + 1]; ++k) {
            const int v = a.neighbors[k];
            bool back = false;
            for (int k2 = a.row_offsets[v]; k2 < a.row_offsets[v + 1]; ++k2)
                back |= a.neighbors[k2] == u;
            CHECK(back);
        }
    }
}

TEST_CASE("self-edges exist exactly for valid-space vertices") {
    const Environment env = one_box_env();
    std::vector<PlanePoint> qp = {{0.5, 0.5}, {0.1, 0.1}};  // first is inside the box
    ViterbiConfig cfg;
    cfg.n_samples = 5;
    const ProjectionGraph g = build_graph(qp, env, cfg);
    for (int v = 0; v < g.num_vertices(); ++v) {
        bool self = false;
        for (int k = g.row_offsets[v]; k < g.row_offsets[v + 1]; ++k)
            self |= g.neighbors[k] == v;
        CHECK(self == point_in_valid_space(g.vertices[v], env));
    }
}

TEST_CASE("valid Q' with beta 0 projects to itself at zero cost") {
    Rng rng(4);
    const std::vector<PlanePoint> qp = random_points(6, rng);
    ViterbiConfig cfg;
    cfg.n_samples = 20;
    cfg.beta = 0.0;
    const ProjectionGraph g = build_graph(qp, open_env(), cfg);
    const ViterbiPath path = viterbi_project(qp, g, cfg);
    REQUIRE(path.vertex_indices.size() == qp.size());
    for (std::size_t t = 0; t < qp.size(); ++t)
        CHECK(path.vertex_indices[t] == static_cast<int>(t));
    CHECK(path.total_cost == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("hand-built T=3 instance matches exhaustive search") {
    const std::vector<PlanePoint> vertices = {{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {0.5, 0.5}};
    const std::vector<std::vector<int>> rows = {{0, 1}, {0, 1, 2, 3}, {1, 2}, {1, 3}};
    const ProjectionGraph g = csr_from_adjacency(vertices, rows);
    const std::vector<PlanePoint> qp = {{0.1, 0.0}, {0.45, 0.2}, {0.9, 0.1}};
    ViterbiConfig cfg;
    cfg.beta = 0.3;
    const ViterbiPath path = viterbi_project(qp, g, cfg);
    CHECK(path.total_cost == doctest::Approx(brute_force_cost(qp, g, cfg.beta)).epsilon(1e-12));
}

TEST_CASE("random small instances match exhaustive search exactly") {
    Rng rng(99);
    for (int inst = 0; inst < 20; ++inst) {
        const int n = 3 + static_cast<int>(rng.uniform_index(6));   // |V| <= 8
        const int t_len = 2 + static_cast<int>(rng.uniform_index(4));  // T <= 5
        const std::vector<PlanePoint> vertices = random_points(n, rng);
        std::vector<std::vector<int>> rows(n);
        for (int u = 0; u < n; ++u)
            for (int v = u; v < n; ++v) {
                if (u != v && rng.uniform() < 0.4) continue;  // drop some edges
                rows[u].push_back(v);
                if (u != v) rows[v].push_back(u);
            }
        for (auto& r : rows) std::sort(r.begin(), r.end());
        const ProjectionGraph g = csr_from_adjacency(vertices, rows);
        const std::vector<PlanePoint> qp = random_points(t_len, rng);
        ViterbiConfig cfg;
        cfg.beta = rng.uniform() * 0.5;
        const ViterbiPath path = viterbi_project(qp, g, cfg);
        CHECK(path.total_cost ==
              doctest::Approx(brute_force_cost(qp, g, cfg.beta)).epsilon(1e-10));
    }
}

TEST_CASE("cost ties break to the lower vertex index") {
    // Two vertices equidistant from every query point.
    const std::vector<PlanePoint> vertices = {{0.5, 0.6}, {0.5, 0.4}};
    const std::vector<std::vector<int>> rows = {{0, 1}, {0, 1}};
    const ProjectionGraph g = csr_from_adjacency(vertices, rows);
    const std::vector<PlanePoint> qp = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
    ViterbiConfig cfg;
    cfg.beta = 0.0;
    const ViterbiPath path = viterbi_project(qp, g, cfg);
    for (int v : path.vertex_indices) CHECK(v == 0);
}

TEST_CASE("projection detours around an obstacle, collision-free") {
    Environment env = open_env();
    env.obstacles.push_back({{0.4, 0.3}, {0.6, 0.7}});
    std::vector<PlanePoint> qp;
    for (int t = 0; t < 15; ++t) qp.push_back({0.1 + 0.8 * t / 14.0, 0.5});  // cuts the box
    ViterbiConfig cfg;
    cfg.n_samples = 300;
    cfg.rng_seed = 8;
    const AbsoluteTrajectory out = project(qp, env, 0.5, cfg);
    REQUIRE(out.length() == qp.size());
    for (const auto& p : out.points) {
        CHECK(p.valid());
        CHECK(point_in_valid_space(p, env));
    }
    for (std::size_t t = 1; t < out.length(); ++t) {
        CHECK(!segment_collides({out.points[t - 1].as_plane(), out.points[t].as_plane()}, env));
    }
}

TEST_CASE("total infeasibility raises InfeasibleError with a hint") {
    // No edges at all: every transition at t=2 is blocked.
    const std::vector<PlanePoint> vertices = {{0.5, 0.5}, {0.55, 0.5}};
    const std::vector<std::vector<int>> rows = {{}, {}};
    const ProjectionGraph g = csr_from_adjacency(vertices, rows);
    const std::vector<PlanePoint> qp = {{0.5, 0.5}, {0.5, 0.5}};
    ViterbiConfig cfg;
    try {
        viterbi_project(qp, g, cfg);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(std::string(e.what()).find("n_samples") != std::string::npos);
    }
}

TEST_CASE("parallel kernels are bit-identical to the serial references") {
    Rng rng(55);
    const Environment env = one_box_env(0.3, 0.7);
    const std::vector<PlanePoint> vertices = random_points(120, rng);
    CHECK(adjacency_rows_serial(vertices, env) == adjacency_rows_parallel(vertices, env));

    ViterbiConfig cfg;
    cfg.n_samples = 80;
    cfg.rng_seed = 2;
    const std::vector<PlanePoint> qp = random_points(10, rng);
    const ProjectionGraph g = build_graph(qp, env, cfg);
    std::vector<double> prev(g.num_vertices());
    for (auto& c : prev) c = rng.uniform();
    std::vector<double> cost_s(g.num_vertices()), cost_p(g.num_vertices());
    std::vector<int> bp_s(g.num_vertices()), bp_p(g.num_vertices());
    viterbi_relax_serial(g, prev, cost_s, bp_s);
    viterbi_relax_parallel(g, prev, cost_p, bp_p);
    CHECK(cost_s == cost_p);
    CHECK(bp_s == bp_p);
}
