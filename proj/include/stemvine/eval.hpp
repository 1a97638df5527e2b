#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stemvine/dataset.hpp"
#include "stemvine/errors.hpp"
#include "stemvine/graph.hpp"
#include "stemvine/matrix.hpp"

namespace stemvine {

using WeightMap = std::map<std::string, Matrix>;

// Activations at every vertex, input included; trace[j-1] is vertex j.
struct VertexTrace {
    std::vector<Matrix> vertices;

    const Matrix& at_vertex(std::size_t j) const { return vertices[j - 1]; }
    const Matrix& output() const { return vertices.back(); }
};

namespace detail {

inline Matrix apply_nonlinearity(const Nonlinearity& nl, const Matrix& m) {
    Matrix out = m;
    for (double& x : out.data()) x = nl.apply(x);
    return out;
}

inline const Matrix& bound_weight(const WeightMap& weights, const std::string& slot_id,
                                  const WeightSlot& slot) {
    auto it = weights.find(slot_id);
    if (it == weights.end()) throw EvalError("no weight bound to slot " + slot_id);
    if (it->second.rows() != slot.in_dim || it->second.cols() != slot.out_dim)
        throw DimensionError("weight for slot " + slot_id + " is " +
                             std::to_string(it->second.rows()) + "x" +
                             std::to_string(it->second.cols()) + ", slot wants " +
                             std::to_string(slot.in_dim) + "x" + std::to_string(slot.out_dim));
    return it->second;
}

}  // namespace detail

// Evaluate the network on X (one instance per row). Each vine's output is
// added elementwise at its target vertex, and vines read the post-addition
// value at their source vertex.
inline VertexTrace forward(const StemVineNetwork& net, const WeightMap& weights, const Matrix& X) {
    {
        const auto violations = validate(net);
        if (!violations.empty())
            throw SemanticError("forward on invalid network: " + violations.front().rule + ": " +
                                violations.front().detail);
    }
    if (X.cols() != vertex_dim(net, 1))
        throw DimensionError("input has " + std::to_string(X.cols()) + " columns, network expects " +
                             std::to_string(vertex_dim(net, 1)));

    const auto slots = weight_slots(net);
    auto slot_at = [&](bool in_vine, std::size_t key_a, std::size_t key_b) -> const SlotRef& {
        for (const auto& s : slots) {
            if (s.in_vine != in_vine) continue;
            if (!in_vine && s.stem_element == key_a) return s;
            if (in_vine && s.vine_index == key_a && s.body_element == key_b) return s;
        }
        throw EvalError("internal slot lookup failure");
    };

    VertexTrace trace;
    trace.vertices.reserve(vertex_count(net));
    trace.vertices.push_back(X);
    for (std::size_t k = 0; k < net.stem.size(); ++k) {
        Matrix value;
        const StemElement& e = net.stem[k];
        if (is_weight(e)) {
            const SlotRef& ref = slot_at(false, k + 1, 0);
            value = matmul(trace.vertices.back(),
                           detail::bound_weight(weights, ref.id, *ref.slot));
        } else {
            value = detail::apply_nonlinearity(std::get<NonlinSlot>(e).nonlinearity,
                                               trace.vertices.back());
        }
        const std::size_t target_vertex = k + 2;
        for (std::size_t vi = 0; vi < net.vines.size(); ++vi) {
            const Vine& vine = net.vines[vi];
            if (vine.v != target_vertex) continue;
            Matrix contribution = trace.vertices[vine.u - 1];
            for (std::size_t bk = 0; bk < vine.body.size(); ++bk) {
                const StemElement& be = vine.body[bk];
                if (is_weight(be)) {
                    const SlotRef& ref = slot_at(true, vi, bk + 1);
                    contribution =
                        matmul(contribution, detail::bound_weight(weights, ref.id, *ref.slot));
                } else {
                    contribution = detail::apply_nonlinearity(
                        std::get<NonlinSlot>(be).nonlinearity, contribution);
                }
            }
            value = add(value, contribution);
        }
        trace.vertices.push_back(std::move(value));
    }
    return trace;
}

// Confidence of the labelled class: v[y] - max over other coordinates.
inline double margin(std::span<const double> v, std::uint32_t y) {
    if (y < 1 || y > v.size())
        throw LabelError("label " + std::to_string(y) + " outside {1.." +
                         std::to_string(v.size()) + "}");
    if (v.size() < 2) throw ParamError("margin needs at least two classes");
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 == y) continue;
        best_other = std::max(best_other, v[i]);
    }
    return v[y - 1] - best_other;
}

// Piecewise-linear surrogate for the 0-1 indicator over the window
// [-lambda, 0].
inline double ramp_loss(double r, double lambda) {
    if (!(lambda > 0.0)) throw ParamError("ramp_loss lambda must be positive");
    if (r < -lambda) return 0.0;
    if (r > 0.0) return 1.0;
    return 1.0 + r / lambda;
}

namespace detail {

inline std::vector<double> output_row(const Matrix& out, std::size_t i) {
    std::vector<double> row(out.cols());
    for (std::size_t j = 0; j < out.cols(); ++j) row[j] = out(i, j);
    return row;
}

}  // namespace detail

inline double empirical_ramp_risk(const StemVineNetwork& net, const WeightMap& weights,
                                  const LabeledDataset& D, double lambda) {
    if (!(lambda > 0.0)) throw ParamError("lambda must be positive");
    check_dataset(D);
    if (D.k != vertex_dim(net, vertex_count(net)))
        throw DimensionError("dataset has " + std::to_string(D.k) + " classes, network outputs " +
                             std::to_string(vertex_dim(net, vertex_count(net))));
    const Matrix out = forward(net, weights, D.X).output();
    double total = 0.0;
    for (std::size_t i = 0; i < D.size(); ++i) {
        const auto row = detail::output_row(out, i);
        total += ramp_loss(-margin(row, D.labels[i]), lambda);
    }
    return total / static_cast<double>(D.size());
}

// Fraction of rows whose argmax (ties broken toward the smallest index)
// differs from the label.
inline double zero_one_error(const StemVineNetwork& net, const WeightMap& weights,
                             const LabeledDataset& D) {
    check_dataset(D);
    if (D.k != vertex_dim(net, vertex_count(net)))
        throw DimensionError("dataset has " + std::to_string(D.k) + " classes, network outputs " +
                             std::to_string(vertex_dim(net, vertex_count(net))));
    const Matrix out = forward(net, weights, D.X).output();
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < D.size(); ++i) {
        std::size_t arg = 0;
        for (std::size_t j = 1; j < out.cols(); ++j)
            if (out(i, j) > out(i, arg)) arg = j;
        if (arg + 1 != D.labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(D.size());
}

}  // namespace stemvine
