#pragma once

#include <cstdint>
#include <vector>

#include "retailopt/geometry.hpp"
#include "retailopt/types.hpp"

namespace retailopt {

struct ViterbiConfig {
    int n_samples = 1000;
    double beta = 0.01;
    std::uint64_t rng_seed = 0;
};

// Undirected visibility graph over Q' points followed by uniformly sampled
// valid positions. Adjacency is CSR, neighbor lists ascending, with the
// self-edge present for every vertex in valid space.
struct ProjectionGraph {
    std::vector<PlanePoint> vertices;
    std::vector<int> row_offsets;    // size |V|+1
    std::vector<int> neighbors;
    std::vector<double> edge_dist;   // Euclidean length per CSR entry

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    std::size_t num_edges() const { return neighbors.size(); }
};

// Kernels: one adjacency row per vertex (ascending, self included when valid).
// The OpenMP variant computes rows independently and is bit-identical to the
// serial reference.
std::vector<std::vector<int>> adjacency_rows_serial(const std::vector<PlanePoint>& vertices,
                                                    const Environment& env);
std::vector<std::vector<int>> adjacency_rows_parallel(const std::vector<PlanePoint>& vertices,
                                                      const Environment& env);

ProjectionGraph build_graph(const std::vector<PlanePoint>& q_prime, const Environment& env,
                            const ViterbiConfig& cfg);

struct ViterbiPath {
    std::vector<int> vertex_indices;  // length T
    double total_cost = 0.0;
};

// Minimum of sum_t ||v_t - q'_t|| + beta * sum_t ||v_t - v_{t-1}|| over
// adjacency-connected vertex sequences, by dynamic programming. Ties break to
// the lower vertex index. Throws std::runtime_error when no feasible sequence
// exists.
ViterbiPath viterbi_project(const std::vector<PlanePoint>& q_prime, const ProjectionGraph& graph,
                            const ViterbiConfig& cfg);

// Per-timestep state relaxation kernels used by viterbi_project.
void viterbi_relax_serial(const ProjectionGraph& graph, const std::vector<double>& prev_cost,
                          std::vector<double>& cost, std::vector<int>& backptr);
void viterbi_relax_parallel(const ProjectionGraph& graph, const std::vector<double>& prev_cost,
                            std::vector<double>& cost, std::vector<int>& backptr);

// build_graph + viterbi_project; output points are clamped to the domain and
// are collision-free against the obstacle set.
AbsoluteTrajectory project(const std::vector<PlanePoint>& q_prime, const Environment& env,
                           double dt, const ViterbiConfig& cfg);

}  // namespace retailopt
