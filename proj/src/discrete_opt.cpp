#include "retailopt/discrete_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace retailopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> adjacency_row(int i, const std::vector<PlanePoint>& vertices,
                               const Environment& env) {
    std::vector<int> row;
    const PlanePoint& vi = vertices[i];
    const bool vi_valid = point_in_valid_space(vi, env);
    for (int j = 0; j < static_cast<int>(vertices.size()); ++j) {
        if (j == i) {
            if (vi_valid) row.push_back(i);
            continue;
        }
        if (!segment_collides({vi, vertices[j]}, env)) row.push_back(j);
    }
    return row;
}

}  // namespace

std::vector<std::vector<int>> adjacency_rows_serial(const std::vector<PlanePoint>& vertices,
                                                    const Environment& env) {
    std::vector<std::vector<int>> rows(vertices.size());
    for (int i = 0; i < static_cast<int>(vertices.size()); ++i)
        rows[i] = adjacency_row(i, vertices, env);
    return rows;
}

std::vector<std::vector<int>> adjacency_rows_parallel(const std::vector<PlanePoint>& vertices,
                                                      const Environment& env) {
    std::vector<std::vector<int>> rows(vertices.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < static_cast<int>(vertices.size()); ++i)
        rows[i] = adjacency_row(i, vertices, env);
    return rows;
}

ProjectionGraph build_graph(const std::vector<PlanePoint>& q_prime, const Environment& env,
                            const ViterbiConfig& cfg) {
    ProjectionGraph g;
    g.vertices = q_prime;
    for (const DomainPoint& p :
         sample_valid_points(static_cast<std::size_t>(cfg.n_samples), env, cfg.rng_seed))
        g.vertices.push_back(p.as_plane());

    const auto rows = adjacency_rows_parallel(g.vertices, env);

    g.row_offsets.reserve(g.vertices.size() + 1);
    g.row_offsets.push_back(0);
    for (const auto& row : rows) {
        for (int j : row) {
            g.neighbors.push_back(j);
            g.edge_dist.push_back(g.vertices[g.row_offsets.size() - 1].dist(g.vertices[j]));
        }
        g.row_offsets.push_back(static_cast<int>(g.neighbors.size()));
    }
    return g;
}

void viterbi_relax_serial(const ProjectionGraph& graph, const std::vector<double>& prev_cost,
                          std::vector<double>& cost, std::vector<int>& backptr) {
    const int nv = graph.num_vertices();
    for (int v = 0; v < nv; ++v) {
        double best = kInf;
        int best_u = -1;
        for (int e = graph.row_offsets[v]; e < graph.row_offsets[v + 1]; ++e) {
            const int u = graph.neighbors[e];
            const double c = prev_cost[u] + graph.edge_dist[e];
            if (c < best) {  // neighbors ascend, so ties keep the lower index
                best = c;
                best_u = u;
            }
        }
        cost[v] = best;
        backptr[v] = best_u;
    }
}

void viterbi_relax_parallel(const ProjectionGraph& graph, const std::vector<double>& prev_cost,
                            std::vector<double>& cost, std::vector<int>& backptr) {
    const int nv = graph.num_vertices();
#pragma omp parallel for schedule(static)
    for (int v = 0; v < nv; ++v) {
        double best = kInf;
        int best_u = -1;
        for (int e = graph.row_offsets[v]; e < graph.row_offsets[v + 1]; ++e) {
            const int u = graph.neighbors[e];
            const double c = prev_cost[u] + graph.edge_dist[e];
            if (c < best) {
                best = c;
                best_u = u;
            }
        }
        cost[v] = best;
        backptr[v] = best_u;
    }
}

ViterbiPath viterbi_project(const std::vector<PlanePoint>& q_prime, const ProjectionGraph& graph,
                            const ViterbiConfig& cfg) {
    const int t_len = static_cast<int>(q_prime.size());
    const int nv = graph.num_vertices();
    if (t_len < 1) throw std::invalid_argument("viterbi_project: empty trajectory");

    // Pairwise distances enter scaled by beta; scale the CSR weights once.
    ProjectionGraph scaled;
    const ProjectionGraph* gp = &graph;
    if (cfg.beta != 1.0) {
        scaled = graph;
        for (double& d : scaled.edge_dist) d *= cfg.beta;
        gp = &scaled;
    }

    std::vector<double> prev(nv), cur(nv);
    std::vector<std::vector<int>> backptr(t_len, std::vector<int>(nv, -1));

    for (int v = 0; v < nv; ++v) prev[v] = q_prime[0].dist(graph.vertices[v]);

    for (int t = 1; t < t_len; ++t) {
        viterbi_relax_parallel(*gp, prev, cur, backptr[t]);
        bool any = false;
        for (int v = 0; v < nv; ++v) {
            if (std::isfinite(cur[v])) {
                cur[v] += q_prime[t].dist(graph.vertices[v]);
                any = true;
            }
        }
        if (!any)
            throw InfeasibleError(
                "viterbi_project: no feasible vertex sequence at step " + std::to_string(t + 1) +
                "; try a larger n_samples");
        std::swap(prev, cur);
    }

    int best = -1;
    double best_cost = kInf;
    for (int v = 0; v < nv; ++v) {
        if (prev[v] < best_cost) {
            best_cost = prev[v];
            best = v;
        }
    }
    if (best < 0) throw InfeasibleError("viterbi_project: no feasible vertex sequence");

    ViterbiPath path;
    path.total_cost = best_cost;
    path.vertex_indices.assign(t_len, -1);
    int v = best;
    for (int t = t_len - 1; t >= 0; --t) {
        path.vertex_indices[t] = v;
        if (t > 0) v = backptr[t][v];
    }
    return path;
}

AbsoluteTrajectory project(const std::vector<PlanePoint>& q_prime, const Environment& env,
                           double dt, const ViterbiConfig& cfg) {
    const ProjectionGraph graph = build_graph(q_prime, env, cfg);
    const ViterbiPath path = viterbi_project(q_prime, graph, cfg);

    AbsoluteTrajectory out;
    out.dt = dt;
    out.points.reserve(path.vertex_indices.size());
    for (int idx : path.vertex_indices) {
        const PlanePoint& p = graph.vertices[idx];
        out.points.push_back(
            {std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)});
    }
    return out;
}

}  // namespace retailopt
