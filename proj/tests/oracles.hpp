#pragma once

// Independent reference implementations used only to check the library.
// Nothing here may call the code path it verifies.

#include <cmath>
#include <cstddef>
#include <vector>

#include "stemvine/eval.hpp"
#include "stemvine/graph.hpp"
#include "stemvine/matrix.hpp"

namespace oracles {

// Plain triple loop, accumulation order fixed by definition.
inline stemvine::Matrix naive_matmul(const stemvine::Matrix& a, const stemvine::Matrix& b) {
    stemvine::Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            long double acc = 0.0L;
            for (std::size_t k = 0; k < a.cols(); ++k)
                acc += static_cast<long double>(a(i, k)) * static_cast<long double>(b(k, j));
            c(i, j) = static_cast<double>(acc);
        }
    return c;
}

// Largest singular value through cyclic Jacobi on A^T A. Small matrices only.
inline double jacobi_sigma_max(const stemvine::Matrix& a) {
    const std::size_t n = a.cols();
    std::vector<std::vector<long double>> s(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            long double acc = 0.0L;
            for (std::size_t k = 0; k < a.rows(); ++k)
                acc += static_cast<long double>(a(k, i)) * static_cast<long double>(a(k, j));
            s[i][j] = acc;
        }
    for (int sweep = 0; sweep < 100; ++sweep) {
        long double off = 0.0L;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += s[p][q] * s[p][q];
        if (off < 1e-36L) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (s[p][q] == 0.0L) continue;
                const long double theta = (s[q][q] - s[p][p]) / (2.0L * s[p][q]);
                const long double t =
                    (theta >= 0 ? 1.0L : -1.0L) / (std::abs(theta) + std::sqrt(theta * theta + 1.0L));
                const long double c = 1.0L / std::sqrt(t * t + 1.0L);
                const long double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const long double skp = s[k][p], skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const long double spk = s[p][k], sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
    }
    long double top = 0.0L;
    for (std::size_t i = 0; i < n; ++i) top = std::max(top, s[i][i]);
    return static_cast<double>(std::sqrt(std::max(top, 0.0L)));
}

// Recursive network evaluation straight from the definition: the value at a
// vertex is the previous element applied to the previous vertex plus every
// incoming vine body applied to its source vertex.
inline stemvine::Matrix naive_apply_nonlin(const stemvine::Nonlinearity& nl,
                                           stemvine::Matrix m) {
    for (double& x : m.data()) x = nl.apply(x);
    return m;
}

inline stemvine::Matrix naive_vertex_value(const stemvine::StemVineNetwork& net,
                                           const stemvine::WeightMap& weights,
                                           const stemvine::Matrix& X, std::size_t vertex) {
    if (vertex == 1) return X;
    const stemvine::StemElement& e = net.stem[vertex - 2];
    stemvine::Matrix value;
    const stemvine::Matrix prev = naive_vertex_value(net, weights, X, vertex - 1);
    if (stemvine::is_weight(e)) {
        std::size_t ordinal = 0;
        for (std::size_t k = 0; k + 1 < vertex; ++k)
            if (stemvine::is_weight(net.stem[k])) ++ordinal;
        value = naive_matmul(prev, weights.at("s" + std::to_string(ordinal)));
    } else {
        value = naive_apply_nonlin(std::get<stemvine::NonlinSlot>(e).nonlinearity, prev);
    }
    for (const auto& vine : net.vines) {
        if (vine.v != vertex) continue;
        stemvine::Matrix through = naive_vertex_value(net, weights, X, vine.u);
        std::size_t ordinal = 0;
        for (const auto& be : vine.body) {
            if (stemvine::is_weight(be)) {
                ++ordinal;
                through = naive_matmul(
                    through, weights.at("v" + std::to_string(vine.u) + "_" +
                                        std::to_string(vine.v) + "_" + std::to_string(vine.copy) +
                                        "_" + std::to_string(ordinal)));
            } else {
                through = naive_apply_nonlin(std::get<stemvine::NonlinSlot>(be).nonlinearity,
                                             through);
            }
        }
        value = stemvine::add(value, through);
    }
    return value;
}

// Closed-form products for the 34-layer residual template, written from the
// per-span factors: a plain span contributes rho_{2i} s_{2i} rho_{2i+1}
// s_{2i+1} (+1 for its identity vine), the three projection spans add the
// vine's spectral bound instead, and radii use (s+1) in place of s.
struct Resnet34Constants {
    std::vector<double> s;       // s[1..34]
    std::vector<double> rho;     // rho[1..35]
    std::vector<double> s_vine;  // by block index 4, 8, 14
    double vine_s(std::size_t block) const {
        if (block == 4) return s_vine[0];
        if (block == 8) return s_vine[1];
        return s_vine[2];
    }
};

inline bool is_projection_block(std::size_t i) { return i == 4 || i == 8 || i == 14; }

inline double closed_form_alpha_bar(const Resnet34Constants& c) {
    double alpha = (c.s[1] + 1.0) * c.rho[1] * c.rho[34] * (c.s[34] + 1.0) * c.rho[35];
    for (std::size_t i = 1; i <= 16; ++i) {
        const double span =
            c.rho[2 * i] * (c.s[2 * i] + 1.0) * c.rho[2 * i + 1] * (c.s[2 * i + 1] + 1.0);
        alpha *= span + (is_projection_block(i) ? c.vine_s(i) + 1.0 : 1.0);
    }
    return alpha;
}

// ||F_{4j+1}||: head factors, then full spans up to block j-1, then the first
// half of block j.
inline double closed_form_norm_4j_plus_1(const Resnet34Constants& c, double x_norm,
                                         std::size_t j) {
    double value = x_norm * c.rho[1] * c.s[1] * c.rho[2 * j] * c.s[2 * j];
    for (std::size_t i = 1; i + 1 <= j; ++i) {
        const double span = c.rho[2 * i] * c.s[2 * i] * c.rho[2 * i + 1] * c.s[2 * i + 1];
        value *= span + (is_projection_block(i) ? c.vine_s(i) : 1.0);
    }
    return value;
}

inline double closed_form_norm_4j_plus_3(const Resnet34Constants& c, double x_norm,
                                         std::size_t j) {
    double value = x_norm * c.rho[1] * c.s[1];
    for (std::size_t i = 1; i <= j; ++i) {
        const double span = c.rho[2 * i] * c.s[2 * i] * c.rho[2 * i + 1] * c.s[2 * i + 1];
        value *= span + (is_projection_block(i) ? c.vine_s(i) : 1.0);
    }
    return value;
}

inline double closed_form_norm_68(const Resnet34Constants& c, double x_norm) {
    return closed_form_norm_4j_plus_3(c, x_norm, 16) * c.rho[34];
}

// Cover radius expansion up to a vertex, same product structure with (s+1)
// in place of s and the vine spans adding (s_vine + 1).
inline double closed_form_radius_4j_plus_1(const Resnet34Constants& c, std::size_t j) {
    double value = (1.0 + c.s[1]) * c.rho[1] * (1.0 + c.s[2 * j]) * c.rho[2 * j];
    for (std::size_t i = 1; i + 1 <= j; ++i) {
        const double span =
            c.rho[2 * i] * (c.s[2 * i] + 1.0) * c.rho[2 * i + 1] * (c.s[2 * i + 1] + 1.0);
        value *= span + (is_projection_block(i) ? c.vine_s(i) + 1.0 : 1.0);
    }
    return value;
}

inline double closed_form_radius_4j_plus_3(const Resnet34Constants& c, std::size_t j) {
    double value = (1.0 + c.s[1]) * c.rho[1];
    for (std::size_t i = 1; i <= j; ++i) {
        const double span =
            c.rho[2 * i] * (c.s[2 * i] + 1.0) * c.rho[2 * i + 1] * (c.s[2 * i + 1] + 1.0);
        value *= span + (is_projection_block(i) ? c.vine_s(i) + 1.0 : 1.0);
    }
    return value;
}

// Radius at the odd stem vertex 2j+1 (the share used by the j-th stem
// matrix), j = 1..33.
inline double closed_form_radius_odd_vertex(const Resnet34Constants& c, std::size_t vertex) {
    if (vertex == 3) return closed_form_radius_4j_plus_3(c, 0);
    if (vertex % 4 == 1) return closed_form_radius_4j_plus_1(c, (vertex - 1) / 4);
    return closed_form_radius_4j_plus_3(c, (vertex - 3) / 4);
}

}  // namespace oracles
