#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "stemvine/bounds.hpp"
#include "stemvine/dataset.hpp"
#include "stemvine/errors.hpp"
#include "stemvine/eval.hpp"
#include "stemvine/graph.hpp"
#include "stemvine/matrix.hpp"
#include "stemvine/rng.hpp"

namespace stemvine {

// Finite point set under the Frobenius metric; all points share one shape.
struct PointCloud {
    std::vector<Matrix> points;
};

inline void check_cloud(const PointCloud& cloud) {
    if (cloud.points.empty()) throw ParamError("point cloud must be nonempty");
    const auto& first = cloud.points.front();
    for (const auto& p : cloud.points)
        if (p.rows() != first.rows() || p.cols() != first.cols())
            throw DimensionError("point cloud has mixed shapes");
}

struct CoverResult {
    std::size_t count = 0;
    std::vector<std::size_t> centers;
};

// Deterministic eps-net whose size upper-bounds the minimal covering number.
// First-fit: walk points in insertion order and open a new center whenever a
// point is not yet covered. With farthest_point the centers are instead grown
// greedily at the point currently farthest from the net.
inline CoverResult greedy_cover(const PointCloud& cloud, double eps, bool farthest_point = false) {
    check_cloud(cloud);
    if (!(eps > 0.0)) throw ParamError("cover radius must be positive");
    CoverResult result;
    const auto covered_by = [&](std::size_t p, std::size_t c) {
        return frobenius_distance(cloud.points[p], cloud.points[c]) <= eps;
    };
    if (!farthest_point) {
        for (std::size_t p = 0; p < cloud.points.size(); ++p) {
            bool covered = false;
            for (std::size_t c : result.centers)
                if (covered_by(p, c)) {
                    covered = true;
                    break;
                }
            if (!covered) result.centers.push_back(p);
        }
    } else {
        std::vector<double> dist(cloud.points.size(), std::numeric_limits<double>::infinity());
        std::size_t next = 0;
        while (true) {
            result.centers.push_back(next);
            double worst = 0.0;
            std::size_t worst_at = next;
            for (std::size_t p = 0; p < cloud.points.size(); ++p) {
                dist[p] = std::min(dist[p], frobenius_distance(cloud.points[p], cloud.points[next]));
                if (dist[p] > worst) {
                    worst = dist[p];
                    worst_at = p;
                }
            }
            if (worst <= eps) break;
            next = worst_at;
        }
    }
    result.count = result.centers.size();
    return result;
}

// Minimal number of eps-balls centered at cloud points covering the cloud,
// by branch-and-bound set cover. Exponential; capped at 20 points.
inline std::size_t exact_cover(const PointCloud& cloud, double eps) {
    check_cloud(cloud);
    if (!(eps > 0.0)) throw ParamError("cover radius must be positive");
    const std::size_t n = cloud.points.size();
    if (n > 20) throw SizeError("exact_cover is limited to 20 points, got " + std::to_string(n));

    std::vector<std::uint32_t> covers(n, 0);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t p = 0; p < n; ++p)
            if (frobenius_distance(cloud.points[p], cloud.points[c]) <= eps)
                covers[c] |= (1u << p);
    const std::uint32_t all = (1u << n) - 1;

    std::size_t best = greedy_cover(cloud, eps).count;
    const auto dfs = [&](auto&& self, std::uint32_t covered, std::size_t used) -> void {
        if (covered == all) {
            best = std::min(best, used);
            return;
        }
        if (used + 1 >= best) return;
        std::size_t p = 0;
        while (covered & (1u << p)) ++p;  // lowest uncovered point
        for (std::size_t c = 0; c < n; ++c)
            if (covers[c] & (1u << p)) self(self, covered | covers[c], used + 1);
    };
    dfs(dfs, 0, 0);
    return best;
}

// Every output XA for A on the symmetric grid {-a, ..., -step, 0, step, ..., a}
// (entrywise) whose rows' Euclidean norms sum to at most a.
inline PointCloud grid_single_matrix_class(const Matrix& X, double a, double grid_step,
                                           std::size_t d, std::size_t m) {
    if (d == 0 || m == 0) throw ParamError("grid dimensions must be positive");
    if (d * m > 6) throw SizeError("grid class limited to d*m <= 6, got " + std::to_string(d * m));
    if (!(grid_step > 0.0)) throw ParamError("grid step must be positive");
    if (a < 0.0) throw ParamError("norm budget must be nonnegative");
    if (X.cols() != d)
        throw DimensionError("X has " + std::to_string(X.cols()) + " columns, expected " +
                             std::to_string(d));

    const long kmax = a == 0.0 ? 0 : static_cast<long>(std::floor(a / grid_step + 1e-12));
    const long per_entry = 2 * kmax + 1;
    double combos = 1.0;
    for (std::size_t i = 0; i < d * m; ++i) combos *= static_cast<double>(per_entry);
    if (combos > 2e6) throw SizeError("grid too large: " + std::to_string(combos) + " candidates");

    PointCloud cloud;
    std::vector<long> idx(d * m, -kmax);
    const double tol = a + 1e-12 * std::max(1.0, a);
    while (true) {
        Matrix A(d, m);
        for (std::size_t i = 0; i < d * m; ++i) A.data()[i] = static_cast<double>(idx[i]) * grid_step;
        if (norm_2_1_of_transpose(A) <= tol) cloud.points.push_back(matmul(X, A));
        std::size_t pos = 0;
        while (pos < idx.size() && idx[pos] == kmax) idx[pos++] = -kmax;
        if (pos == idx.size()) break;
        ++idx[pos];
    }
    return cloud;
}

// Monte-Carlo estimate of the empirical Rademacher complexity of a finite
// hypothesis list: mean over trials of sup_h (1/n) sum_i eps_i values[h][i],
// signs drawn from a counter-based stream keyed by (seed, trial).
inline double monte_carlo_rademacher(const std::vector<std::vector<double>>& values,
                                     std::size_t trials, std::uint64_t seed) {
    if (values.empty()) throw ParamError("hypothesis list must be nonempty");
    if (trials < 1) throw ParamError("need at least one trial");
    const std::size_t n = values.front().size();
    if (n == 0) throw ParamError("hypotheses must score at least one point");
    for (const auto& row : values)
        if (row.size() != n) throw DimensionError("ragged hypothesis score table");

    const CounterRng base(seed);
    double total = 0.0;
    std::vector<double> signs(n);
    for (std::size_t t = 0; t < trials; ++t) {
        CounterRng rng = base.derive(t);
        for (std::size_t i = 0; i < n; ++i) signs[i] = rng.sign();
        double sup = -std::numeric_limits<double>::infinity();
        for (const auto& row : values) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += signs[i] * row[i];
            sup = std::max(sup, acc / static_cast<double>(n));
        }
        total += sup;
    }
    return total / static_cast<double>(trials);
}

// Largest observed ratio ||F(x) - F(x')|| / ||x - x'|| over seeded random
// pairs; never exceeds the product-form factor from propagate_norms.
inline double lipschitz_probe(const StemVineNetwork& net, const WeightMap& weights,
                              std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw ParamError("need at least one probe pair");
    const std::size_t n0 = vertex_dim(net, 1);
    const CounterRng base(seed);
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        CounterRng rng = base.derive(t);
        Matrix x(1, n0), y(1, n0);
        for (std::size_t j = 0; j < n0; ++j) x(0, j) = rng.gaussian();
        for (std::size_t j = 0; j < n0; ++j) y(0, j) = rng.gaussian();
        const double dx = frobenius_distance(x, y);
        if (dx == 0.0) continue;
        const Matrix fx = forward(net, weights, x).output();
        const Matrix fy = forward(net, weights, y).output();
        worst = std::max(worst, frobenius_distance(fx, fy) / dx);
    }
    return worst;
}

// Balanced synthetic classification data: class c sits at a distinct corner
// of the unit hypercube and points scatter around it with Gaussian noise of
// scale `spread`.
inline LabeledDataset make_blobs(std::size_t n, std::size_t n0, std::size_t k, double spread,
                                 std::uint64_t seed) {
    if (n == 0 || n0 == 0 || k == 0) throw ParamError("make_blobs sizes must be positive");
    if (!(spread >= 0.0)) throw ParamError("spread must be nonnegative");
    if (n0 < 64 && k > (std::size_t{1} << n0))
        throw ParamError("cannot place " + std::to_string(k) + " distinct centers in " +
                         std::to_string(n0) + " dimensions");

    const auto center_coord = [](std::size_t label, std::size_t dim) {
        return ((label - 1) >> dim) & 1u ? 1.0 : -1.0;
    };
    LabeledDataset d;
    d.X = Matrix(n, n0);
    d.labels.resize(n);
    d.k = static_cast<std::uint32_t>(k);
    const CounterRng base(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t label = (i % k) + 1;
        d.labels[i] = static_cast<std::uint32_t>(label);
        CounterRng rng = base.derive(i);
        for (std::size_t j = 0; j < n0; ++j)
            d.X(i, j) = center_coord(label, j < 64 ? j : 63) + spread * rng.gaussian();
    }
    return d;
}

}  // namespace stemvine
