#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stemvine/errors.hpp"
#include "stemvine/matrix.hpp"

namespace stemvine {

enum class NonlinKind { relu, leaky_relu, tanh, identity };

inline const char* to_string(NonlinKind k) {
    switch (k) {
        case NonlinKind::relu: return "relu";
        case NonlinKind::leaky_relu: return "leaky_relu";
        case NonlinKind::tanh: return "tanh";
        case NonlinKind::identity: return "identity";
    }
    return "?";
}

// Elementwise nonlinearity with its Lipschitz constant. Every built-in kind
// maps 0 to 0, which the norm propagation relies on.
struct Nonlinearity {
    NonlinKind kind = NonlinKind::relu;
    double slope = 0.0;  // leaky_relu only, in (0,1)
    double lipschitz = 1.0;
    bool zero_preserving = true;

    static Nonlinearity relu() { return {NonlinKind::relu, 0.0, 1.0, true}; }
    static Nonlinearity leaky_relu(double slope) {
        if (!(slope > 0.0 && slope < 1.0)) throw ParamError("leaky_relu slope must be in (0,1)");
        return {NonlinKind::leaky_relu, slope, 1.0, true};
    }
    static Nonlinearity tanh() { return {NonlinKind::tanh, 0.0, 1.0, true}; }
    static Nonlinearity identity() { return {NonlinKind::identity, 0.0, 1.0, true}; }

    double apply(double x) const {
        switch (kind) {
            case NonlinKind::relu: return x > 0.0 ? x : 0.0;
            case NonlinKind::leaky_relu: return x > 0.0 ? x : slope * x;
            case NonlinKind::tanh: return std::tanh(x);
            case NonlinKind::identity: return x;
        }
        return x;
    }

    bool operator==(const Nonlinearity&) const = default;
};

// Declared bounds for one weight slot: spectral bound s, distance bound b to
// the reference matrix (zero when absent).
struct NormProfile {
    double s = 1.0;
    double b = 0.0;
    std::optional<Matrix> reference;

    bool operator==(const NormProfile&) const = default;
};

struct WeightSlot {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    NormProfile profile;

    bool operator==(const WeightSlot&) const = default;
};

struct NonlinSlot {
    std::size_t dim = 0;
    Nonlinearity nonlinearity;

    bool operator==(const NonlinSlot&) const = default;
};

using StemElement = std::variant<WeightSlot, NonlinSlot>;

inline bool is_weight(const StemElement& e) { return std::holds_alternative<WeightSlot>(e); }
inline bool is_nonlin(const StemElement& e) { return std::holds_alternative<NonlinSlot>(e); }

inline std::size_t element_in_dim(const StemElement& e) {
    return is_weight(e) ? std::get<WeightSlot>(e).in_dim : std::get<NonlinSlot>(e).dim;
}
inline std::size_t element_out_dim(const StemElement& e) {
    return is_weight(e) ? std::get<WeightSlot>(e).out_dim : std::get<NonlinSlot>(e).dim;
}

// Residual connection from vertex u to vertex v (1-based, u < v). An empty
// body is the identity mapping; otherwise the body is a chain of elements.
struct Vine {
    std::size_t u = 0;
    std::size_t v = 0;
    std::size_t copy = 1;
    std::vector<StemElement> body;

    bool is_identity() const { return body.empty(); }

    bool operator==(const Vine&) const = default;
};

struct StemVineNetwork {
    std::vector<StemElement> stem;
    std::vector<Vine> vines;

    bool operator==(const StemVineNetwork&) const = default;
};

// Number of stem elements + 1; vertex j sits between elements j-1 and j,
// vertex 1 receives the input.
inline std::size_t vertex_count(const StemVineNetwork& net) { return net.stem.size() + 1; }

// Feature dimension at a 1-based stem vertex. Only meaningful on a network
// whose stem chain is dimension-compatible.
inline std::size_t vertex_dim(const StemVineNetwork& net, std::size_t vertex) {
    if (vertex == 1) return element_in_dim(net.stem.front());
    return element_out_dim(net.stem[vertex - 2]);
}

// Maximum feature dimension over all stem vertices and vine body interiors.
inline std::size_t max_width(const StemVineNetwork& net) {
    std::size_t w = 0;
    if (net.stem.empty()) return 0;
    w = element_in_dim(net.stem.front());
    for (const auto& e : net.stem) w = std::max(w, element_out_dim(e));
    for (const auto& vine : net.vines)
        for (const auto& e : vine.body) {
            w = std::max(w, element_in_dim(e));
            w = std::max(w, element_out_dim(e));
        }
    return w;
}

// --- weight slot enumeration ------------------------------------------------

// Stable handle for one weight matrix. Stem slots are named s1, s2, ... in
// stem order; vine slots v<u>_<v>_<copy>_<k> in body order.
struct SlotRef {
    bool in_vine = false;
    std::size_t stem_element = 0;  // 1-based element index (stem slots)
    std::size_t vine_index = 0;    // index into net.vines (vine slots)
    std::size_t body_element = 0;  // 1-based element index within the body
    std::string id;
    const WeightSlot* slot = nullptr;
};

inline std::vector<SlotRef> weight_slots(const StemVineNetwork& net) {
    std::vector<SlotRef> out;
    std::size_t stem_ordinal = 0;
    for (std::size_t k = 0; k < net.stem.size(); ++k) {
        if (!is_weight(net.stem[k])) continue;
        ++stem_ordinal;
        SlotRef r;
        r.in_vine = false;
        r.stem_element = k + 1;
        r.id = "s" + std::to_string(stem_ordinal);
        r.slot = &std::get<WeightSlot>(net.stem[k]);
        out.push_back(std::move(r));
    }
    for (std::size_t vi = 0; vi < net.vines.size(); ++vi) {
        const Vine& vine = net.vines[vi];
        std::size_t body_ordinal = 0;
        for (std::size_t k = 0; k < vine.body.size(); ++k) {
            if (!is_weight(vine.body[k])) continue;
            ++body_ordinal;
            SlotRef r;
            r.in_vine = true;
            r.vine_index = vi;
            r.body_element = k + 1;
            r.id = "v" + std::to_string(vine.u) + "_" + std::to_string(vine.v) + "_" +
                   std::to_string(vine.copy) + "_" + std::to_string(body_ordinal);
            r.slot = &std::get<WeightSlot>(vine.body[k]);
            out.push_back(std::move(r));
        }
    }
    return out;
}

// --- validation ---------------------------------------------------------------

struct Violation {
    std::string rule;
    std::string detail;
};

namespace detail {

inline bool chain_compatible(const std::vector<StemElement>& chain, std::string* msg) {
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        if (element_out_dim(chain[k]) != element_in_dim(chain[k + 1])) {
            if (msg)
                *msg = "element " + std::to_string(k + 1) + " outputs " +
                       std::to_string(element_out_dim(chain[k])) + " but element " +
                       std::to_string(k + 2) + " expects " +
                       std::to_string(element_in_dim(chain[k + 1]));
            return false;
        }
    }
    return true;
}

inline void check_elements(const std::vector<StemElement>& chain, const std::string& where,
                           std::vector<Violation>& out) {
    for (std::size_t k = 0; k < chain.size(); ++k) {
        const std::string at = where + " element " + std::to_string(k + 1);
        if (element_in_dim(chain[k]) == 0 || element_out_dim(chain[k]) == 0)
            out.push_back({"nonpositive_dim", at + ": dimension must be positive"});
        if (is_weight(chain[k])) {
            const auto& w = std::get<WeightSlot>(chain[k]);
            if (!(w.profile.s > 0.0))
                out.push_back({"profile_bounds", at + ": spectral bound s must be positive"});
            if (!(w.profile.b >= 0.0))
                out.push_back({"profile_bounds", at + ": distance bound b must be nonnegative"});
            if (w.profile.reference &&
                (w.profile.reference->rows() != w.in_dim || w.profile.reference->cols() != w.out_dim))
                out.push_back({"profile_bounds", at + ": reference matrix shape mismatch"});
        } else {
            const auto& n = std::get<NonlinSlot>(chain[k]);
            if (n.nonlinearity.kind == NonlinKind::leaky_relu &&
                !(n.nonlinearity.slope > 0.0 && n.nonlinearity.slope < 1.0))
                out.push_back({"nonlinearity_constant", at + ": leaky_relu slope outside (0,1)"});
            if (n.nonlinearity.lipschitz != 1.0)
                out.push_back(
                    {"nonlinearity_constant", at + ": built-in kinds have Lipschitz constant 1"});
            if (!n.nonlinearity.zero_preserving)
                out.push_back({"nonlinearity_constant", at + ": built-in kinds preserve zero"});
        }
    }
}

}  // namespace detail

// True when the 1-based vertex is the input vertex or directly follows a
// nonlinearity element.
inline bool is_post_nonlinearity(const StemVineNetwork& net, std::size_t vertex) {
    return vertex >= 2 && vertex <= vertex_count(net) && is_nonlin(net.stem[vertex - 2]);
}

inline std::vector<Violation> validate(const StemVineNetwork& net) {
    std::vector<Violation> out;
    if (net.stem.empty()) {
        out.push_back({"empty_stem", "network has no stem elements"});
        return out;
    }
    detail::check_elements(net.stem, "stem", out);
    std::string msg;
    if (!detail::chain_compatible(net.stem, &msg)) out.push_back({"stem_dim_mismatch", msg});

    const std::size_t last_vertex = vertex_count(net);
    std::vector<Vine> seen;
    for (const Vine& vine : net.vines) {
        const std::string at = "vine (" + std::to_string(vine.u) + "," + std::to_string(vine.v) +
                               "," + std::to_string(vine.copy) + ")";
        if (!(vine.u >= 1 && vine.u < vine.v && vine.v <= last_vertex)) {
            out.push_back({"vine_order", at + ": requires 1 <= u < v <= " +
                                             std::to_string(last_vertex)});
            continue;
        }
        if (vine.copy < 1) out.push_back({"vine_order", at + ": copy index must be >= 1"});
        for (const Vine& other : seen)
            if (other.u == vine.u && other.v == vine.v && other.copy == vine.copy)
                out.push_back({"vine_duplicate", at + ": duplicate (u,v,copy) triple"});
        seen.push_back(vine);

        if (!(vine.u == 1 || is_post_nonlinearity(net, vine.u)))
            out.push_back({"vine_attachment",
                           at + ": source must be the input vertex or follow a nonlinearity"});
        if (!is_post_nonlinearity(net, vine.v))
            out.push_back({"vine_attachment", at + ": target must follow a nonlinearity"});

        detail::check_elements(vine.body, at, out);
        if (!detail::chain_compatible(vine.body, &msg))
            out.push_back({"vine_body_dim_mismatch", at + ": " + msg});
        const std::size_t want_in = vertex_dim(net, vine.u);
        const std::size_t want_out = vertex_dim(net, vine.v);
        if (vine.is_identity()) {
            if (want_in != want_out)
                out.push_back({"vine_body_dim_mismatch",
                               at + ": identity body between widths " + std::to_string(want_in) +
                                   " and " + std::to_string(want_out)});
        } else {
            if (element_in_dim(vine.body.front()) != want_in)
                out.push_back({"vine_body_dim_mismatch",
                               at + ": body input dim " +
                                   std::to_string(element_in_dim(vine.body.front())) +
                                   " != stem width " + std::to_string(want_in)});
            if (element_out_dim(vine.body.back()) != want_out)
                out.push_back({"vine_body_dim_mismatch",
                               at + ": body output dim " +
                                   std::to_string(element_out_dim(vine.body.back())) +
                                   " != stem width " + std::to_string(want_out)});
        }
    }
    return out;
}

// --- the 34-layer residual template ----------------------------------------

struct Resnet34Widths {
    std::size_t input = 4;
    std::size_t stage1 = 4;
    std::size_t stage2 = 4;
    std::size_t stage3 = 4;
    std::size_t stage4 = 4;
    std::size_t classes = 4;
};

// 34 stem weight matrices and 35 nonlinearities arranged as
// (A1, r1, A2, r2, ..., A33, r33, r34, A34, r35), with 16 vines spanning
// (4i-1, 4i+3); the vines at blocks 4, 8 and 14 carry one projection matrix
// each (where the stage width changes) and all others are identities.
inline StemVineNetwork resnet34_template(const std::vector<NormProfile>& stem_profiles,
                                         const std::vector<NormProfile>& vine_profiles,
                                         const Resnet34Widths& widths = {}) {
    if (stem_profiles.size() != 34)
        throw TemplateError("resnet34 template needs 34 stem profiles, got " +
                            std::to_string(stem_profiles.size()));
    if (vine_profiles.size() != 3)
        throw TemplateError("resnet34 template needs 3 vine profiles, got " +
                            std::to_string(vine_profiles.size()));
    for (std::size_t dim : {widths.input, widths.stage1, widths.stage2, widths.stage3,
                            widths.stage4, widths.classes})
        if (dim == 0) throw TemplateError("resnet34 template widths must be positive");

    const auto stage_of_block = [&](std::size_t block) -> std::size_t {
        // Width after the given block (block 0 = the initial weight).
        if (block < 4) return widths.stage1;
        if (block < 8) return widths.stage2;
        if (block < 14) return widths.stage3;
        return widths.stage4;
    };

    StemVineNetwork net;
    auto weight = [&](std::size_t in, std::size_t out, const NormProfile& p) {
        net.stem.push_back(WeightSlot{in, out, p});
    };
    auto relu = [&](std::size_t dim) { net.stem.push_back(NonlinSlot{dim, Nonlinearity::relu()}); };

    weight(widths.input, widths.stage1, stem_profiles[0]);  // A1
    relu(widths.stage1);                                    // r1
    for (std::size_t block = 1; block <= 16; ++block) {
        const std::size_t in = stage_of_block(block - 1);
        const std::size_t out = stage_of_block(block);
        weight(in, out, stem_profiles[2 * block - 1]);  // A_{2i}
        relu(out);                                      // r_{2i}
        weight(out, out, stem_profiles[2 * block]);     // A_{2i+1}
        relu(out);                                      // r_{2i+1}
    }
    relu(widths.stage4);                                          // r34
    weight(widths.stage4, widths.classes, stem_profiles[33]);     // A34
    net.stem.push_back(NonlinSlot{widths.classes, Nonlinearity::identity()});  // r35

    std::size_t proj = 0;
    for (std::size_t block = 1; block <= 16; ++block) {
        Vine vine;
        vine.u = 4 * block - 1;
        vine.v = 4 * block + 3;
        vine.copy = 1;
        if (block == 4 || block == 8 || block == 14) {
            vine.body.push_back(
                WeightSlot{stage_of_block(block - 1), stage_of_block(block), vine_profiles[proj++]});
        }
        net.vines.push_back(std::move(vine));
    }
    return net;
}

}  // namespace stemvine
