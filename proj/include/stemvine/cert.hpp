#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "stemvine/bounds.hpp"
#include "stemvine/dataset.hpp"
#include "stemvine/errors.hpp"
#include "stemvine/eval.hpp"
#include "stemvine/format.hpp"
#include "stemvine/version.hpp"

namespace stemvine {

// Rademacher complexity bound from the entropy integral with the fixed cut
// alpha = 1/n: 4/n^{3/2} + (18/n) sqrt(R) log n.
inline double dudley_bound(double R, std::size_t n) {
    if (n < 2) throw ParamError("dudley_bound needs n >= 2");
    if (!(R >= 0.0)) throw ParamError("dudley_bound needs R >= 0");
    const double nd = static_cast<double>(n);
    return 4.0 / std::pow(nd, 1.5) + 18.0 / nd * std::sqrt(R) * std::log(nd);
}

// Same integral evaluated at the optimal cut alpha = 3 sqrt(R/n); returns 0
// at R = 0 by continuity.
inline double dudley_bound_optimal_alpha(double R, std::size_t n) {
    if (n < 2) throw ParamError("dudley_bound_optimal_alpha needs n >= 2");
    if (!(R >= 0.0)) throw ParamError("dudley_bound_optimal_alpha needs R >= 0");
    if (R == 0.0) return 0.0;
    const double nd = static_cast<double>(n);
    const double alpha = 3.0 * std::sqrt(R / nd);
    return 4.0 * alpha / std::sqrt(nd) + 12.0 / nd * std::sqrt(R) * std::log(std::sqrt(nd) / alpha);
}

// High-probability risk bound: ramp_risk + 8/n^{3/2} + (36/n) sqrt(R) log n
// + 3 sqrt(log(1/delta) / (2n)).
inline double generalization_bound(double ramp_risk, double R, std::size_t n, double delta) {
    if (n < 2) throw ParamError("generalization_bound needs n >= 2");
    if (!(delta > 0.0 && delta < 1.0)) throw ParamError("delta must be in (0,1)");
    if (!(R >= 0.0)) throw ParamError("generalization_bound needs R >= 0");
    if (!(ramp_risk >= 0.0 && ramp_risk <= 1.0)) throw ParamError("ramp_risk must be in [0,1]");
    const double nd = static_cast<double>(n);
    return ramp_risk + 8.0 / std::pow(nd, 1.5) + 36.0 / nd * std::sqrt(R) * std::log(nd) +
           3.0 * std::sqrt(std::log(1.0 / delta) / (2.0 * nd));
}

// Full certificate: structure summary, per-matrix covering terms, and the
// assembled bounds.
struct BoundReport {
    std::string tool_version;
    std::size_t stem_elements = 0;
    std::size_t vertices = 0;
    std::size_t vine_count = 0;
    std::size_t weight_count = 0;
    std::size_t max_width = 0;
    std::size_t n = 0;
    std::size_t input_dim = 0;
    std::size_t classes = 0;
    double lambda = 0.0;
    double delta = 0.0;
    double input_norm = 0.0;
    double alpha_bar = 0.0;
    double R = 0.0;
    double empirical_ramp_risk = 0.0;
    double rademacher_bound = 0.0;
    double generalization_bound = 0.0;
    std::vector<LayerTerm> terms;
};

// Certify the bound for concrete weights. Every bound weight must satisfy its
// declared profile (a certificate computed from violated premises would be
// unsound); measured spectral norms replace declared ones when smaller.
inline BoundReport certify(const StemVineNetwork& net, const WeightMap& weights,
                           const WeightMap& references, const LabeledDataset& D, double lambda,
                           double delta) {
    detail::require_valid(net, "certify");
    check_dataset(D);
    if (!(lambda > 0.0)) throw ParamError("lambda must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ParamError("delta must be in (0,1)");
    if (D.X.cols() != vertex_dim(net, 1))
        throw DimensionError("dataset feature dim " + std::to_string(D.X.cols()) +
                             " != network input dim " + std::to_string(vertex_dim(net, 1)));
    if (D.k != vertex_dim(net, vertex_count(net)))
        throw DimensionError("dataset classes " + std::to_string(D.k) + " != network output dim " +
                             std::to_string(vertex_dim(net, vertex_count(net))));
    if (D.size() < 2) throw ParamError("certify needs at least 2 samples");

    constexpr double kSlack = 1.0 + 1e-9;

    // Check profiles and tighten spectral bounds to the measured values.
    StemVineNetwork tightened = net;
    auto tighten = [&](WeightSlot& slot, const std::string& id) {
        auto it = weights.find(id);
        if (it == weights.end()) throw EvalError("no weight bound to slot " + id);
        const Matrix& W = it->second;
        if (W.rows() != slot.in_dim || W.cols() != slot.out_dim)
            throw DimensionError("weight for slot " + id + " has wrong shape");
        if (!W.is_finite()) throw ParamError("weight for slot " + id + " has non-finite entries");
        const double sigma = spectral_norm(W);
        if (sigma > slot.profile.s * kSlack)
            throw ProfileViolation("slot " + id + ": measured spectral norm " +
                                   std::to_string(sigma) + " exceeds declared bound " +
                                   std::to_string(slot.profile.s));
        Matrix ref;
        auto rit = references.find(id);
        if (rit != references.end())
            ref = rit->second;
        else if (slot.profile.reference)
            ref = *slot.profile.reference;
        else
            ref = Matrix(slot.in_dim, slot.out_dim, 0.0);
        if (ref.rows() != slot.in_dim || ref.cols() != slot.out_dim)
            throw DimensionError("reference for slot " + id + " has wrong shape");
        const double dist = norm_2_1_of_transpose(sub(W, ref));
        if (dist > slot.profile.b * kSlack)
            throw ProfileViolation("slot " + id + ": measured reference distance " +
                                   std::to_string(dist) + " exceeds declared bound " +
                                   std::to_string(slot.profile.b));
        // Floor keeps the profile's s strictly positive for all-zero weights.
        slot.profile.s = std::max(std::min(slot.profile.s, sigma), 1e-300);
    };
    {
        std::size_t stem_ordinal = 0;
        for (auto& e : tightened.stem) {
            if (!is_weight(e)) continue;
            ++stem_ordinal;
            tighten(std::get<WeightSlot>(e), "s" + std::to_string(stem_ordinal));
        }
        for (auto& vine : tightened.vines) {
            std::size_t body_ordinal = 0;
            for (auto& e : vine.body) {
                if (!is_weight(e)) continue;
                ++body_ordinal;
                tighten(std::get<WeightSlot>(e),
                        "v" + std::to_string(vine.u) + "_" + std::to_string(vine.v) + "_" +
                            std::to_string(vine.copy) + "_" + std::to_string(body_ordinal));
            }
        }
    }

    BoundReport report;
    report.tool_version = std::string(kToolVersion);
    report.stem_elements = net.stem.size();
    report.vertices = vertex_count(net);
    report.vine_count = net.vines.size();
    report.weight_count = weight_slots(net).size();
    report.max_width = max_width(net);
    report.n = D.size();
    report.input_dim = D.X.cols();
    report.classes = D.k;
    report.lambda = lambda;
    report.delta = delta;
    report.input_norm = frobenius_norm(D.X);
    report.terms = covering_terms(tightened, report.input_norm);
    report.alpha_bar = propagate_radii(tightened).alpha_bar;
    report.R = 0.0;
    for (const auto& t : report.terms) report.R += t.log_term;
    report.empirical_ramp_risk = empirical_ramp_risk(net, weights, D, lambda);
    report.rademacher_bound = dudley_bound(report.R, report.n);
    report.generalization_bound =
        stemvine::generalization_bound(report.empirical_ramp_risk, report.R, report.n, delta);
    return report;
}

inline BoundReport certify(const StemVineNetwork& net, const WeightMap& weights,
                           const LabeledDataset& D, double lambda, double delta) {
    return certify(net, weights, WeightMap{}, D, lambda, delta);
}

// --- report emission ---------------------------------------------------------

namespace detail {

inline std::string term_location(const LayerTerm& t) {
    if (!t.in_vine) return "stem";
    return "vine(" + std::to_string(t.location.u) + "," + std::to_string(t.location.v) + "," +
           std::to_string(t.location.copy) + ")";
}

}  // namespace detail

// Machine-readable key-value report, schema version "svcert/1".
inline std::string format_report(const BoundReport& r) {
    std::ostringstream out;
    const auto d = [](double x) { return detail::format_double(x); };
    out << "svcert/1\n";
    out << "tool_version: " << r.tool_version << "\n";
    out << "network:\n";
    out << "  stem_elements: " << r.stem_elements << "\n";
    out << "  vertices: " << r.vertices << "\n";
    out << "  vines: " << r.vine_count << "\n";
    out << "  weight_matrices: " << r.weight_count << "\n";
    out << "  max_width: " << r.max_width << "\n";
    out << "data:\n";
    out << "  n: " << r.n << "\n";
    out << "  input_dim: " << r.input_dim << "\n";
    out << "  classes: " << r.classes << "\n";
    out << "params:\n";
    out << "  lambda: " << d(r.lambda) << "\n";
    out << "  delta: " << d(r.delta) << "\n";
    out << "  input_norm: " << d(r.input_norm) << "\n";
    out << "alpha_bar: " << d(r.alpha_bar) << "\n";
    out << "R: " << d(r.R) << "\n";
    out << "empirical_ramp_risk: " << d(r.empirical_ramp_risk) << "\n";
    out << "rademacher_bound: " << d(r.rademacher_bound) << "\n";
    out << "generalization_bound: " << d(r.generalization_bound) << "\n";
    out << "terms:\n";
    out << "  # slot location b input_norm_bound radius_share log_term\n";
    for (const auto& t : r.terms)
        out << "  " << t.slot << " " << detail::term_location(t) << " " << d(t.b) << " "
            << d(t.input_norm_bound) << " " << d(t.radius_share) << " " << d(t.log_term) << "\n";
    return out.str();
}

// Per-term table as CSV, schema version "svterms/1".
inline std::string format_terms_csv(const BoundReport& r) {
    std::ostringstream out;
    const auto d = [](double x) { return detail::format_double(x); };
    out << "# svterms/1\n";
    out << "slot,location,b,input_norm_bound,radius_share,log_term\n";
    for (const auto& t : r.terms)
        out << t.slot << "," << detail::term_location(t) << "," << d(t.b) << ","
            << d(t.input_norm_bound) << "," << d(t.radius_share) << "," << d(t.log_term) << "\n";
    return out.str();
}

}  // namespace stemvine
