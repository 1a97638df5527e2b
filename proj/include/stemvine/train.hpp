#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "stemvine/bounds.hpp"
#include "stemvine/dataset.hpp"
#include "stemvine/errors.hpp"
#include "stemvine/eval.hpp"
#include "stemvine/graph.hpp"
#include "stemvine/matrix.hpp"
#include "stemvine/rng.hpp"

namespace stemvine {

struct TrainConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 200;
    std::size_t batch = 32;
    double weight_decay = 0.0;
    std::uint64_t seed = 0;
};

struct TrainResult {
    StemVineNetwork net;  // template with measured profiles and references bound
    WeightMap weights;
    WeightMap references;  // initialization, one per slot
    double final_loss = 0.0;
};

namespace detail {

struct SlotInfo {
    std::string id;
    std::size_t in_dim, out_dim;
};

// Forward pass that also keeps the intermediate values inside vine bodies,
// needed to backpropagate through them.
struct TrainTrace {
    std::vector<Matrix> vertices;                 // stem vertices, input first
    std::vector<std::vector<Matrix>> vine_steps;  // per vine: body values, source first
};

inline Matrix nonlin_apply(const Nonlinearity& nl, const Matrix& m) {
    Matrix out = m;
    for (double& x : out.data()) x = nl.apply(x);
    return out;
}

// Elementwise derivative evaluated at the pre-activation input.
inline Matrix nonlin_backward(const Nonlinearity& nl, const Matrix& input, const Matrix& grad) {
    Matrix out = grad;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        const double x = input.data()[i];
        double slope = 1.0;
        switch (nl.kind) {
            case NonlinKind::relu: slope = x > 0.0 ? 1.0 : 0.0; break;
            case NonlinKind::leaky_relu: slope = x > 0.0 ? 1.0 : nl.slope; break;
            case NonlinKind::identity: slope = 1.0; break;
            case NonlinKind::tanh: {
                const double t = std::tanh(x);
                slope = 1.0 - t * t;
                break;
            }
        }
        out.data()[i] *= slope;
    }
    return out;
}

}  // namespace detail

// Mean cross-entropy of softmax(F(X)) against the labels, plus
// (weight_decay / 2) * sum of squared weight entries.
inline double training_loss(const StemVineNetwork& net, const WeightMap& weights,
                            const LabeledDataset& D, double weight_decay) {
    const Matrix out = forward(net, weights, D.X).output();
    double loss = 0.0;
    for (std::size_t i = 0; i < D.size(); ++i) {
        double peak = out(i, 0);
        for (std::size_t j = 1; j < out.cols(); ++j) peak = std::max(peak, out(i, j));
        double denom = 0.0;
        for (std::size_t j = 0; j < out.cols(); ++j) denom += std::exp(out(i, j) - peak);
        loss += -(out(i, D.labels[i] - 1) - peak - std::log(denom));
    }
    loss /= static_cast<double>(D.size());
    double decay = 0.0;
    for (const auto& [id, W] : weights)
        for (double x : W.data()) decay += x * x;
    return loss + 0.5 * weight_decay * decay;
}

// Gradient of training_loss with respect to every bound weight.
inline WeightMap training_gradient(const StemVineNetwork& net, const WeightMap& weights,
                                   const LabeledDataset& D, double weight_decay) {
    const auto slots = weight_slots(net);

    detail::TrainTrace trace;
    trace.vertices.push_back(D.X);
    trace.vine_steps.resize(net.vines.size());
    auto weight_of = [&](bool in_vine, std::size_t a, std::size_t b) -> const SlotRef& {
        for (const auto& s : slots) {
            if (s.in_vine != in_vine) continue;
            if (!in_vine && s.stem_element == a) return s;
            if (in_vine && s.vine_index == a && s.body_element == b) return s;
        }
        throw EvalError("internal slot lookup failure");
    };

    for (std::size_t k = 0; k < net.stem.size(); ++k) {
        Matrix value;
        if (is_weight(net.stem[k]))
            value = matmul(trace.vertices.back(), weights.at(weight_of(false, k + 1, 0).id));
        else
            value = detail::nonlin_apply(std::get<NonlinSlot>(net.stem[k]).nonlinearity,
                                         trace.vertices.back());
        for (std::size_t vi = 0; vi < net.vines.size(); ++vi) {
            const Vine& vine = net.vines[vi];
            if (vine.v != k + 2) continue;
            auto& steps = trace.vine_steps[vi];
            steps.clear();
            steps.push_back(trace.vertices[vine.u - 1]);
            for (std::size_t bk = 0; bk < vine.body.size(); ++bk) {
                if (is_weight(vine.body[bk]))
                    steps.push_back(
                        matmul(steps.back(), weights.at(weight_of(true, vi, bk + 1).id)));
                else
                    steps.push_back(detail::nonlin_apply(
                        std::get<NonlinSlot>(vine.body[bk]).nonlinearity, steps.back()));
            }
            value = add(value, steps.back());
        }
        trace.vertices.push_back(std::move(value));
    }

    // dL/dlogits for mean softmax cross-entropy.
    const Matrix& out = trace.vertices.back();
    Matrix grad_out(out.rows(), out.cols());
    const double inv_n = 1.0 / static_cast<double>(D.size());
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double peak = out(i, 0);
        for (std::size_t j = 1; j < out.cols(); ++j) peak = std::max(peak, out(i, j));
        double denom = 0.0;
        for (std::size_t j = 0; j < out.cols(); ++j) denom += std::exp(out(i, j) - peak);
        for (std::size_t j = 0; j < out.cols(); ++j) {
            const double p = std::exp(out(i, j) - peak) / denom;
            grad_out(i, j) = (p - (j + 1 == D.labels[i] ? 1.0 : 0.0)) * inv_n;
        }
    }

    WeightMap grads;
    for (const auto& [id, W] : weights) grads[id] = Matrix(W.rows(), W.cols(), 0.0);

    std::vector<Matrix> vertex_grad(trace.vertices.size());
    vertex_grad.back() = grad_out;
    for (std::size_t j = trace.vertices.size(); j-- > 1;) {
        if (vertex_grad[j].empty()) continue;  // no gradient reaches this vertex
        const Matrix& g = vertex_grad[j];
        // Vines ending at vertex j+1 (1-based) push gradient to their source.
        for (std::size_t vi = 0; vi < net.vines.size(); ++vi) {
            const Vine& vine = net.vines[vi];
            if (vine.v != j + 1) continue;
            const auto& steps = trace.vine_steps[vi];
            Matrix bg = g;
            for (std::size_t bk = vine.body.size(); bk-- > 0;) {
                if (is_weight(vine.body[bk])) {
                    const std::string id = weight_of(true, vi, bk + 1).id;
                    grads[id] = add(grads[id], matmul(transpose(steps[bk]), bg));
                    bg = matmul(bg, transpose(weights.at(id)));
                } else {
                    bg = detail::nonlin_backward(std::get<NonlinSlot>(vine.body[bk]).nonlinearity,
                                                 steps[bk], bg);
                }
            }
            Matrix& target = vertex_grad[vine.u - 1];
            target = target.empty() ? bg : add(target, bg);
        }
        // Stem element j (1-based) maps vertex j to j+1.
        const StemElement& e = net.stem[j - 1];
        Matrix back;
        if (is_weight(e)) {
            const std::string id = weight_of(false, j, 0).id;
            grads[id] = add(grads[id], matmul(transpose(trace.vertices[j - 1]), g));
            back = matmul(g, transpose(weights.at(id)));
        } else {
            back = detail::nonlin_backward(std::get<NonlinSlot>(e).nonlinearity,
                                           trace.vertices[j - 1], g);
        }
        Matrix& target = vertex_grad[j - 1];
        target = target.empty() ? back : add(target, back);
    }

    if (weight_decay != 0.0)
        for (auto& [id, G] : grads) {
            const Matrix& W = weights.at(id);
            for (std::size_t i = 0; i < G.data().size(); ++i)
                G.data()[i] += weight_decay * W.data()[i];
        }
    return grads;
}

// Minibatch SGD on cross-entropy with weight decay. Deterministic given the
// seed: initialization, shuffling and every update come from counter-based
// streams. Restricted to small relu/identity networks; the returned profiles
// carry the measured spectral norms and distances to the initialization,
// which doubles as the reference.
inline TrainResult train_tiny(const StemVineNetwork& tmpl, const LabeledDataset& D,
                              const TrainConfig& cfg) {
    detail::require_valid(tmpl, "train_tiny");
    check_dataset(D);
    const auto slots = weight_slots(tmpl);
    if (slots.size() > 6)
        throw TrainError("train_tiny supports at most 6 weight matrices, got " +
                         std::to_string(slots.size()));
    if (max_width(tmpl) > 32)
        throw TrainError("train_tiny supports widths up to 32, got " +
                         std::to_string(max_width(tmpl)));
    const auto check_nonlins = [](const std::vector<StemElement>& chain) {
        for (const auto& e : chain)
            if (is_nonlin(e)) {
                const auto kind = std::get<NonlinSlot>(e).nonlinearity.kind;
                if (kind != NonlinKind::relu && kind != NonlinKind::identity)
                    throw UnsupportedError("train_tiny backward pass supports relu and identity only");
            }
    };
    check_nonlins(tmpl.stem);
    for (const auto& vine : tmpl.vines) check_nonlins(vine.body);
    if (!(cfg.learning_rate > 0.0)) throw ParamError("learning rate must be positive");
    if (cfg.batch < 1) throw ParamError("batch size must be positive");
    if (!(cfg.weight_decay >= 0.0)) throw ParamError("weight decay must be nonnegative");
    if (D.X.cols() != vertex_dim(tmpl, 1) || D.k != vertex_dim(tmpl, vertex_count(tmpl)))
        throw DimensionError("dataset shape does not match the template");

    const CounterRng base(cfg.seed);
    TrainResult result;
    result.net = tmpl;

    // He-style initialization, deterministic per slot.
    for (std::size_t s = 0; s < slots.size(); ++s) {
        CounterRng rng = base.derive(0x1717 + s);
        Matrix W(slots[s].slot->in_dim, slots[s].slot->out_dim);
        const double scale = std::sqrt(2.0 / static_cast<double>(slots[s].slot->in_dim));
        for (double& x : W.data()) x = scale * rng.gaussian();
        result.weights[slots[s].id] = W;
        result.references[slots[s].id] = W;
    }

    std::vector<std::size_t> order(D.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        CounterRng shuffle = base.derive(0x5affe + epoch);
        for (std::size_t i = order.size(); i-- > 1;)
            std::swap(order[i], order[shuffle.below(i + 1)]);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch);
            LabeledDataset batch;
            batch.X = Matrix(stop - start, D.X.cols());
            batch.labels.resize(stop - start);
            batch.k = D.k;
            for (std::size_t i = start; i < stop; ++i) {
                for (std::size_t j = 0; j < D.X.cols(); ++j)
                    batch.X(i - start, j) = D.X(order[i], j);
                batch.labels[i - start] = D.labels[order[i]];
            }
            const WeightMap grads =
                training_gradient(result.net, result.weights, batch, cfg.weight_decay);
            for (auto& [id, W] : result.weights) {
                const Matrix& G = grads.at(id);
                for (std::size_t i = 0; i < W.data().size(); ++i)
                    W.data()[i] -= cfg.learning_rate * G.data()[i];
                if (!W.is_finite()) throw TrainError("training diverged: non-finite weights");
            }
        }
        result.final_loss = training_loss(result.net, result.weights, D, cfg.weight_decay);
        if (!std::isfinite(result.final_loss)) throw TrainError("training diverged: loss is NaN");
    }
    if (cfg.epochs == 0)
        result.final_loss = training_loss(result.net, result.weights, D, cfg.weight_decay);

    // Attach measured profiles: s from power iteration, b as the distance to
    // the initialization, which becomes the reference matrix.
    const auto measure = [&](WeightSlot& slot, const std::string& id) {
        slot.profile.s = std::max(spectral_norm(result.weights.at(id)), 1e-300);
        slot.profile.b =
            norm_2_1_of_transpose(sub(result.weights.at(id), result.references.at(id)));
        slot.profile.reference = result.references.at(id);
    };
    std::size_t stem_ordinal = 0;
    for (auto& e : result.net.stem) {
        if (!is_weight(e)) continue;
        ++stem_ordinal;
        measure(std::get<WeightSlot>(e), "s" + std::to_string(stem_ordinal));
    }
    for (auto& vine : result.net.vines) {
        std::size_t body_ordinal = 0;
        for (auto& e : vine.body) {
            if (!is_weight(e)) continue;
            ++body_ordinal;
            measure(std::get<WeightSlot>(e), "v" + std::to_string(vine.u) + "_" +
                                                 std::to_string(vine.v) + "_" +
                                                 std::to_string(vine.copy) + "_" +
                                                 std::to_string(body_ordinal));
        }
    }
    return result;
}

}  // namespace stemvine
