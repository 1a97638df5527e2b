#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stemvine/errors.hpp"
#include "stemvine/graph.hpp"

namespace stemvine {

// Log covering number of {XA : sum of row norms of A <= a} at radius eps,
// where A is d x m and ||X||_F <= B: ceil(a^2 B^2 / eps^2) * log(2dm).
inline double maurey_log_cover(double a, double B, std::size_t d, std::size_t m, double eps) {
    if (!(eps > 0.0)) throw ParamError("maurey_log_cover radius must be positive");
    if (d == 0 || m == 0) throw ParamError("maurey_log_cover dimensions must be positive");
    if (a < 0.0 || B < 0.0) throw ParamError("maurey_log_cover norms must be nonnegative");
    const double terms = std::ceil((a * a) * (B * B) / (eps * eps));
    return terms * std::log(2.0 * static_cast<double>(d) * static_cast<double>(m));
}

// Composed cover radius of an L-stage chain from per-stage radii:
// sum_j eps_j rho_j prod_{l>j} rho_l s_l.
inline double chain_radius(std::span<const double> eps, std::span<const double> rho,
                           std::span<const double> s) {
    if (eps.size() != rho.size() || eps.size() != s.size())
        throw ParamError("chain_radius needs equal-length sequences");
    if (eps.empty()) throw ParamError("chain_radius needs at least one stage");
    double total = 0.0;
    for (std::size_t j = 0; j < eps.size(); ++j) {
        double term = eps[j] * rho[j];
        for (std::size_t l = j + 1; l < eps.size(); ++l) term *= rho[l] * s[l];
        total += term;
    }
    return total;
}

namespace detail {

// Per-element multipliers along a chain. A weight slot scales an existing
// radius by (s+1) and a norm bound by s; a nonlinearity scales both by rho.
inline double radius_factor(const StemElement& e) {
    return is_weight(e) ? std::get<WeightSlot>(e).profile.s + 1.0
                        : std::get<NonlinSlot>(e).nonlinearity.lipschitz;
}

inline double norm_factor(const StemElement& e) {
    return is_weight(e) ? std::get<WeightSlot>(e).profile.s
                        : std::get<NonlinSlot>(e).nonlinearity.lipschitz;
}

inline void require_valid(const StemVineNetwork& net, const char* who) {
    const auto violations = validate(net);
    if (!violations.empty())
        throw SemanticError(std::string(who) + " on invalid network: " + violations.front().rule +
                            ": " + violations.front().detail);
}

}  // namespace detail

// Worst-case Frobenius norm bound at every vertex for inputs with
// ||X||_F <= input_norm. A stem step multiplies by its norm factor; a vine
// adds its own chain product taken from the source vertex. Requires every
// nonlinearity to map 0 to 0.
inline std::vector<double> propagate_norms(const StemVineNetwork& net, double input_norm) {
    detail::require_valid(net, "propagate_norms");
    if (!(input_norm >= 0.0)) throw ParamError("input_norm must be nonnegative");
    for (const auto& e : net.stem)
        if (is_nonlin(e) && !std::get<NonlinSlot>(e).nonlinearity.zero_preserving)
            throw UnsupportedError("norm propagation needs zero-preserving nonlinearities");
    for (const auto& vine : net.vines)
        for (const auto& e : vine.body)
            if (is_nonlin(e) && !std::get<NonlinSlot>(e).nonlinearity.zero_preserving)
                throw UnsupportedError("norm propagation needs zero-preserving nonlinearities");

    std::vector<double> bound(vertex_count(net));
    bound[0] = input_norm;
    for (std::size_t k = 0; k < net.stem.size(); ++k) {
        double value = bound[k] * detail::norm_factor(net.stem[k]);
        for (const Vine& vine : net.vines) {
            if (vine.v != k + 2) continue;
            double through = bound[vine.u - 1];
            for (const auto& e : vine.body) through *= detail::norm_factor(e);
            value += through;
        }
        bound[k + 1] = value;
    }
    return bound;
}

struct VineKey {
    std::size_t u = 0;
    std::size_t v = 0;
    std::size_t copy = 0;

    auto operator<=>(const VineKey&) const = default;
};

// Normalized cover radii: the radius at the output vertex is 1 and the input
// vertex holds 1/alpha_bar, where alpha_bar is the total head-to-tail
// expansion factor.
struct PropagationTable {
    std::vector<double> vertex_norm;    // filled by propagation_table()
    std::vector<double> vertex_radius;  // normalized, one per vertex
    std::map<VineKey, double> vine_radius;
    double alpha_bar = 0.0;
};

inline PropagationTable propagate_radii(const StemVineNetwork& net) {
    detail::require_valid(net, "propagate_radii");
    std::vector<double> factor(vertex_count(net));
    std::map<VineKey, double> vine_factor;
    factor[0] = 1.0;
    for (std::size_t k = 0; k < net.stem.size(); ++k) {
        double value = factor[k] * detail::radius_factor(net.stem[k]);
        for (const Vine& vine : net.vines) {
            if (vine.v != k + 2) continue;
            double through = factor[vine.u - 1];
            for (const auto& e : vine.body) through *= detail::radius_factor(e);
            vine_factor[{vine.u, vine.v, vine.copy}] = through;
            value += through;
        }
        factor[k + 1] = value;
    }
    PropagationTable table;
    table.alpha_bar = factor.back();
    table.vertex_radius.resize(factor.size());
    for (std::size_t j = 0; j < factor.size(); ++j)
        table.vertex_radius[j] = factor[j] / table.alpha_bar;
    for (const auto& [key, f] : vine_factor) table.vine_radius[key] = f / table.alpha_bar;
    return table;
}

inline PropagationTable propagation_table(const StemVineNetwork& net, double input_norm) {
    PropagationTable table = propagate_radii(net);
    table.vertex_norm = propagate_norms(net, input_norm);
    return table;
}

// One covering contribution per weight matrix. Identity vines contribute no
// term: their covering factor is 1.
struct LayerTerm {
    std::string slot;
    bool in_vine = false;
    VineKey location;  // meaningful when in_vine
    double b = 0.0;
    double input_norm_bound = 0.0;
    double radius_share = 0.0;
    double log_width_factor = 0.0;  // log(2 W^2)
    double log_term = 0.0;          // b^2 inb^2 / share^2 * log(2 W^2)
};

namespace detail {

// Radius share of a weight inside a chain: the normalized radius after the
// weight and, when one directly follows, its trailing nonlinearity.
inline std::size_t share_vertex(const std::vector<StemElement>& chain, std::size_t element_index) {
    // element_index is 1-based; the element maps vertex e to e+1.
    std::size_t v = element_index + 1;
    if (element_index < chain.size() && is_nonlin(chain[element_index])) ++v;
    return v;
}

}  // namespace detail

inline std::vector<LayerTerm> covering_terms(const StemVineNetwork& net, double input_norm) {
    detail::require_valid(net, "covering_terms");
    const PropagationTable table = propagation_table(net, input_norm);
    const double log_width = std::log(2.0 * static_cast<double>(max_width(net)) *
                                      static_cast<double>(max_width(net)));

    // Unnormalized radius factors are needed inside vine bodies.
    std::vector<double> vertex_factor(table.vertex_radius.size());
    for (std::size_t j = 0; j < vertex_factor.size(); ++j)
        vertex_factor[j] = table.vertex_radius[j] * table.alpha_bar;

    std::vector<LayerTerm> terms;
    const auto slots = weight_slots(net);
    for (const auto& ref : slots) {
        LayerTerm term;
        term.slot = ref.id;
        term.in_vine = ref.in_vine;
        term.b = ref.slot->profile.b;
        term.log_width_factor = log_width;
        if (!ref.in_vine) {
            const std::size_t k = ref.stem_element;  // 1-based
            term.input_norm_bound = table.vertex_norm[k - 1];
            term.radius_share = table.vertex_radius[detail::share_vertex(net.stem, k) - 1];
        } else {
            const Vine& vine = net.vines[ref.vine_index];
            term.location = {vine.u, vine.v, vine.copy};
            // Walk the body tracking local norm and radius factor.
            double norm = table.vertex_norm[vine.u - 1];
            double factor = vertex_factor[vine.u - 1];
            std::vector<double> body_factor(vine.body.size() + 1);
            body_factor[0] = factor;
            for (std::size_t k = 0; k < vine.body.size(); ++k)
                body_factor[k + 1] = body_factor[k] * detail::radius_factor(vine.body[k]);
            for (std::size_t k = 0; k + 1 < ref.body_element; ++k)
                norm *= detail::norm_factor(vine.body[k]);
            term.input_norm_bound = norm;
            term.radius_share =
                body_factor[detail::share_vertex(vine.body, ref.body_element) - 1] /
                table.alpha_bar;
        }
        const double ratio = term.b * term.input_norm_bound / term.radius_share;
        term.log_term = ratio * ratio * log_width;
        terms.push_back(std::move(term));
    }
    return terms;
}

// Aggregate covering quantity: log N(H, eps) <= R / eps^2 for every eps > 0.
inline double total_r(const StemVineNetwork& net, double input_norm) {
    double r = 0.0;
    for (const auto& term : covering_terms(net, input_norm)) r += term.log_term;
    return r;
}

}  // namespace stemvine
