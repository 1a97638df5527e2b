#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stemvine/arch_io.hpp"
#include "stemvine/bounds.hpp"
#include "stemvine/cert.hpp"
#include "stemvine/dataset.hpp"
#include "stemvine/errors.hpp"
#include "stemvine/eval.hpp"
#include "stemvine/format.hpp"
#include "stemvine/graph.hpp"
#include "stemvine/matrix.hpp"
#include "stemvine/oracle.hpp"
#include "stemvine/train.hpp"
#include "stemvine/version.hpp"

namespace stemvine::cli {

namespace fs = std::filesystem;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// "-" writes to stdout; files are written to a temporary and renamed so a
// crash never leaves a partial file behind.
inline void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, target);
}

inline void write_matrix_file(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_matrix(out, m);
}

inline Matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return read_matrix(in);
}

struct LoadedModel {
    StemVineNetwork net;
    WeightMap weights;
    WeightMap references;
};

// Resolve weights for an architecture: slot files named in the arch file are
// read relative to its directory; a weights directory supplies <slot>.svm and
// <slot>.ref.svm and overrides arch entries.
inline LoadedModel load_model(const std::string& arch_path, const std::string& weights_dir) {
    LoadedModel model;
    const ArchFile arch = parse_arch_file(read_file(arch_path));
    model.net = arch.network;
    const auto violations = validate(model.net);
    if (!violations.empty())
        throw SemanticError("architecture " + arch_path + " is invalid: [" +
                            violations.front().rule + "] " + violations.front().detail);

    const fs::path base = fs::path(arch_path).parent_path();
    for (const auto& [slot, rel] : arch.weight_files)
        model.weights[slot] = read_matrix_file((base / rel).string());
    for (const auto& [slot, rel] : arch.reference_files)
        model.references[slot] = read_matrix_file((base / rel).string());

    if (!weights_dir.empty()) {
        for (const auto& ref : weight_slots(model.net)) {
            const fs::path wpath = fs::path(weights_dir) / (ref.id + ".svm");
            if (fs::exists(wpath)) model.weights[ref.id] = read_matrix_file(wpath.string());
            const fs::path rpath = fs::path(weights_dir) / (ref.id + ".ref.svm");
            if (fs::exists(rpath)) model.references[ref.id] = read_matrix_file(rpath.string());
        }
    }
    return model;
}

inline LabeledDataset read_dataset_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return read_dataset(in);
}

inline void write_dataset_file(const std::string& path, const LabeledDataset& d) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_dataset(out, d);
}

// --- oracle comparison runners ----------------------------------------------

namespace detail {

inline StemVineNetwork single_weight_net(std::size_t d, std::size_t m, double s, double b) {
    StemVineNetwork net;
    net.stem.push_back(WeightSlot{d, m, NormProfile{s, b, std::nullopt}});
    return net;
}

inline Matrix seeded_inputs(std::size_t n, std::size_t d, std::uint64_t seed) {
    CounterRng rng = CounterRng(seed).derive(0xda7a);
    Matrix X(n, d);
    for (double& x : X.data()) x = rng.uniform(-1.0, 1.0);
    return X;
}

struct OracleLine {
    bool pass = false;
    std::string text;
};

inline std::vector<OracleLine> run_maurey_domination(std::uint64_t seed) {
    std::vector<OracleLine> lines;
    const std::pair<std::size_t, std::size_t> shapes[] = {{1, 1}, {2, 1}, {2, 2}};
    for (const auto& [d, m] : shapes)
        for (double a : {0.5, 1.0})
            for (double eps : {0.25, 0.5, 1.0})
                for (std::uint64_t s = 0; s < 3; ++s) {
                    const Matrix X = seeded_inputs(4, d, seed + s);
                    const PointCloud cloud = grid_single_matrix_class(X, a, a / 2.0, d, m);
                    const auto cover = greedy_cover(cloud, eps);
                    const double bound =
                        maurey_log_cover(a, frobenius_norm(X), d, m, eps);
                    const bool ok =
                        std::log(static_cast<double>(cover.count)) <= bound + 1e-9;
                    std::ostringstream line;
                    line << (ok ? "PASS" : "FAIL") << " maurey d=" << d << " m=" << m
                         << " a=" << a << " eps=" << eps << " seed=" << seed + s
                         << " greedy=" << cover.count
                         << " log_bound=" << stemvine::detail::format_double(bound);
                    lines.push_back({ok, line.str()});
                }
    return lines;
}

inline std::vector<OracleLine> run_chain_domination(std::uint64_t seed) {
    std::vector<OracleLine> lines;
    struct Instance {
        std::size_t d, m, p;
        double a1, a2, eps1, eps2;
    };
    const Instance instances[] = {
        {2, 2, 1, 1.0, 1.0, 0.5, 0.5},  {1, 2, 2, 1.0, 0.5, 0.5, 0.25},
        {2, 1, 2, 0.5, 1.0, 0.25, 0.5}, {2, 2, 1, 0.5, 0.5, 0.25, 0.25},
        {1, 2, 1, 1.0, 1.0, 1.0, 0.5},  {2, 1, 1, 1.0, 0.5, 0.5, 0.5},
    };
    std::uint64_t s = seed;
    for (const auto& inst : instances) {
        const Matrix X = seeded_inputs(4, inst.d, s++);
        const PointCloud stage1 = grid_single_matrix_class(X, inst.a1, inst.a1 / 2.0, inst.d, inst.m);
        PointCloud composed;
        // Apply every stage-2 grid matrix to every stage-1 output.
        const PointCloud stage2_grid =
            grid_single_matrix_class(Matrix::identity(inst.m), inst.a2, inst.a2 / 2.0, inst.m,
                                     inst.p);
        for (const auto& y : stage1.points)
            for (const auto& A2 : stage2_grid.points)  // A2 = I * A2
                composed.points.push_back(matmul(y, A2));
        // Composed radius for two linear stages: eps1 * s2 + eps2, with the
        // stage-2 spectral bound at most a2.
        const double radius = inst.eps1 * inst.a2 + inst.eps2;
        const auto cover = greedy_cover(composed, radius);
        const double B1 = frobenius_norm(X);
        const double log_bound = maurey_log_cover(inst.a1, B1, inst.d, inst.m, inst.eps1) +
                                 maurey_log_cover(inst.a2, B1 * inst.a1, inst.m, inst.p, inst.eps2);
        const bool ok = std::log(static_cast<double>(cover.count)) <= log_bound + 1e-9;
        std::ostringstream line;
        line << (ok ? "PASS" : "FAIL") << " chain d=" << inst.d << " m=" << inst.m
             << " p=" << inst.p << " a1=" << inst.a1 << " a2=" << inst.a2
             << " radius=" << stemvine::detail::format_double(radius) << " greedy=" << cover.count
             << " log_bound=" << stemvine::detail::format_double(log_bound);
        lines.push_back({ok, line.str()});
    }
    return lines;
}

inline std::vector<OracleLine> run_rademacher_vs_dudley(std::uint64_t seed, std::size_t trials) {
    std::vector<OracleLine> lines;
    const std::size_t n = 8, d = 2;
    for (double a : {0.5, 1.0})
        for (std::uint64_t s = 0; s < 2; ++s) {
            const Matrix X = seeded_inputs(n, d, seed + s);
            const PointCloud cloud = grid_single_matrix_class(X, a, a / 2.0, d, 1);
            std::vector<std::vector<double>> values;
            for (const auto& point : cloud.points) {
                std::vector<double> row(n);
                for (std::size_t i = 0; i < n; ++i) row[i] = point(i, 0);
                values.push_back(std::move(row));
            }
            const double estimate = monte_carlo_rademacher(values, trials, seed + s);
            const double R = total_r(single_weight_net(d, 1, a, a), frobenius_norm(X));
            const double bound = dudley_bound(R, n);
            const double margin = 3.0 / std::sqrt(static_cast<double>(trials));
            const bool ok = estimate <= bound + margin;
            std::ostringstream line;
            line << (ok ? "PASS" : "FAIL") << " rademacher a=" << a << " seed=" << seed + s
                 << " estimate=" << stemvine::detail::format_double(estimate)
                 << " dudley=" << stemvine::detail::format_double(bound)
                 << " mc_margin=" << stemvine::detail::format_double(margin);
            lines.push_back({ok, line.str()});
        }
    return lines;
}

// Matched pair with identical weight-profile multisets: a pure chain versus a
// stem with two single-weight vines.
inline std::pair<StemVineNetwork, StemVineNetwork> matched_placement_pair(std::uint64_t seed,
                                                                          std::size_t width) {
    CounterRng rng = CounterRng(seed).derive(0x91ace);
    std::vector<NormProfile> profiles;
    for (int i = 0; i < 6; ++i)
        profiles.push_back(NormProfile{rng.uniform(0.5, 2.0), rng.uniform(0.0, 1.0), std::nullopt});

    StemVineNetwork chain;
    for (int i = 0; i < 6; ++i) {
        chain.stem.push_back(WeightSlot{width, width, profiles[i]});
        chain.stem.push_back(NonlinSlot{width, Nonlinearity::relu()});
    }

    StemVineNetwork vined;
    for (int i = 0; i < 4; ++i) {
        vined.stem.push_back(WeightSlot{width, width, profiles[i]});
        vined.stem.push_back(NonlinSlot{width, Nonlinearity::relu()});
    }
    Vine v1;
    v1.u = 1;
    v1.v = 5;
    v1.copy = 1;
    v1.body.push_back(WeightSlot{width, width, profiles[4]});
    Vine v2;
    v2.u = 5;
    v2.v = 9;
    v2.copy = 1;
    v2.body.push_back(WeightSlot{width, width, profiles[5]});
    vined.vines.push_back(v1);
    vined.vines.push_back(v2);
    return {chain, vined};
}

}  // namespace detail

// --- subcommands ---------------------------------------------------------------

inline int cmd_validate(const std::string& arch_path) {
    ArchFile arch;
    try {
        arch = parse_arch_file(read_file(arch_path));
    } catch (const SyntaxError& e) {
        std::cerr << "syntax error: " << e.what() << "\n";
        return 1;
    }
    const auto violations = validate(arch.network);
    for (const auto& v : violations) std::cout << "[" << v.rule << "] " << v.detail << "\n";
    if (violations.empty()) {
        std::cout << "ok: " << arch.network.stem.size() << " stem elements, "
                  << arch.network.vines.size() << " vines, "
                  << weight_slots(arch.network).size() << " weight matrices\n";
        return 0;
    }
    return 1;
}

inline int cmd_template(const std::string& which, const std::string& out, std::size_t dim,
                        std::size_t classes, double s, double b) {
    if (which != "resnet34") {
        std::cerr << "unknown template '" << which << "' (supported: resnet34)\n";
        return 2;
    }
    Resnet34Widths widths;
    widths.input = dim;
    widths.stage1 = widths.stage2 = widths.stage3 = widths.stage4 = dim;
    widths.classes = classes;
    const std::vector<NormProfile> stem_profiles(34, NormProfile{s, b, std::nullopt});
    const std::vector<NormProfile> vine_profiles(3, NormProfile{s, b, std::nullopt});
    const StemVineNetwork net = resnet34_template(stem_profiles, vine_profiles, widths);
    write_output(out, serialize_network(net));
    return 0;
}

inline int cmd_certify(const std::string& arch_path, const std::string& weights_dir,
                       const std::string& data_path, double lambda, double delta,
                       const std::string& out, const std::string& format) {
    const LoadedModel model = load_model(arch_path, weights_dir);
    const LabeledDataset data = read_dataset_file(data_path);
    const BoundReport report =
        certify(model.net, model.weights, model.references, data, lambda, delta);
    write_output(out, format == "csv" ? format_terms_csv(report) : format_report(report));
    return 0;
}

inline int cmd_oracle_cover(std::uint64_t seed, const std::string& out) {
    std::ostringstream table;
    bool all_pass = true;
    for (const auto& line : detail::run_maurey_domination(seed)) {
        table << line.text << "\n";
        all_pass = all_pass && line.pass;
    }
    for (const auto& line : detail::run_chain_domination(seed)) {
        table << line.text << "\n";
        all_pass = all_pass && line.pass;
    }
    table << (all_pass ? "ALL PASS" : "FAILURES PRESENT") << "\n";
    write_output(out, table.str());
    return all_pass ? 0 : 1;
}

inline int cmd_oracle_rademacher(std::uint64_t seed, std::size_t trials, const std::string& out) {
    std::ostringstream table;
    bool all_pass = true;
    for (const auto& line : detail::run_rademacher_vs_dudley(seed, trials)) {
        table << line.text << "\n";
        all_pass = all_pass && line.pass;
    }
    table << (all_pass ? "ALL PASS" : "FAILURES PRESENT") << "\n";
    write_output(out, table.str());
    return all_pass ? 0 : 1;
}

inline int cmd_sweep_norms(const std::string& arch_path, const std::string& weights_dir,
                           const std::string& data_path, const std::string& factors_csv,
                           const std::string& what, double lambda, double delta,
                           const std::string& out) {
    const LoadedModel model = load_model(arch_path, weights_dir);
    const LabeledDataset data = read_dataset_file(data_path);
    const double input_norm = frobenius_norm(data.X);

    std::vector<double> factors;
    std::stringstream fs_in(factors_csv);
    std::string item;
    while (std::getline(fs_in, item, ',')) {
        char* end = nullptr;
        const double f = std::strtod(item.c_str(), &end);
        if (end != item.c_str() + item.size() || !(f > 0.0))
            throw ParamError("bad factor '" + item + "'");
        factors.push_back(f);
    }
    if (factors.empty()) throw ParamError("no scale factors given");

    double ramp = 0.0;
    if (!model.weights.empty())
        ramp = empirical_ramp_risk(model.net, model.weights, data, lambda);

    std::ostringstream csv;
    csv << "# svsweep/1\n";
    csv << "factor,R,generalization_bound\n";
    for (double f : factors) {
        StemVineNetwork scaled = model.net;
        const auto apply = [&](std::vector<StemElement>& chain) {
            for (auto& e : chain) {
                if (!is_weight(e)) continue;
                auto& p = std::get<WeightSlot>(e).profile;
                if (what == "b" || what == "both") p.b *= f;
                if (what == "s" || what == "both") p.s *= f;
            }
        };
        apply(scaled.stem);
        for (auto& vine : scaled.vines) apply(vine.body);
        const double R = total_r(scaled, input_norm);
        const double bound = generalization_bound(ramp, R, data.size(), delta);
        csv << stemvine::detail::format_double(f) << "," << stemvine::detail::format_double(R)
            << "," << stemvine::detail::format_double(bound) << "\n";
    }
    write_output(out, csv.str());
    return 0;
}

inline int cmd_sweep_placement(std::uint64_t seed, const std::string& out) {
    std::ostringstream table;
    bool all_pass = true;
    for (std::uint64_t s = seed; s < seed + 5; ++s) {
        const auto [chain, vined] = detail::matched_placement_pair(s, 3);
        const auto chain_terms = covering_terms(chain, 1.0);
        const auto vined_terms = covering_terms(vined, 1.0);
        std::vector<double> cb, vb;
        for (const auto& t : chain_terms) cb.push_back(t.b);
        for (const auto& t : vined_terms) vb.push_back(t.b);
        std::sort(cb.begin(), cb.end());
        std::sort(vb.begin(), vb.end());
        const bool ok = chain_terms.size() == vined_terms.size() && cb == vb &&
                        chain_terms.front().log_width_factor == vined_terms.front().log_width_factor;
        all_pass = all_pass && ok;
        table << (ok ? "PASS" : "FAIL") << " seed=" << s << " chain_terms=" << chain_terms.size()
              << " vine_terms=" << vined_terms.size() << "\n";
    }
    table << (all_pass ? "ALL PASS" : "FAILURES PRESENT") << "\n";
    write_output(out, table.str());
    return all_pass ? 0 : 1;
}

inline int cmd_train_demo(std::uint64_t seed, double lambda, double delta, double weight_decay,
                          std::size_t epochs, const std::string& out, const std::string& out_arch,
                          const std::string& out_weights, const std::string& out_data) {
    // Separable blobs and a small residual network.
    const LabeledDataset train = make_blobs(200, 2, 2, 0.25, seed);
    StemVineNetwork tmpl;
    tmpl.stem.push_back(WeightSlot{2, 8, NormProfile{1.0, 1.0, std::nullopt}});
    tmpl.stem.push_back(NonlinSlot{8, Nonlinearity::relu()});
    tmpl.stem.push_back(WeightSlot{8, 8, NormProfile{1.0, 1.0, std::nullopt}});
    tmpl.stem.push_back(NonlinSlot{8, Nonlinearity::relu()});
    tmpl.stem.push_back(WeightSlot{8, 2, NormProfile{1.0, 1.0, std::nullopt}});
    tmpl.stem.push_back(NonlinSlot{2, Nonlinearity::identity()});
    Vine skip;
    skip.u = 3;
    skip.v = 5;
    skip.copy = 1;
    tmpl.vines.push_back(skip);

    TrainConfig cfg;
    cfg.seed = seed;
    cfg.epochs = epochs;
    cfg.weight_decay = weight_decay;
    const TrainResult trained = train_tiny(tmpl, train, cfg);
    const BoundReport report =
        certify(trained.net, trained.weights, trained.references, train, lambda, delta);

    if (!out_data.empty()) write_dataset_file(out_data, train);
    if (!out_weights.empty()) {
        fs::create_directories(out_weights);
        for (const auto& [slot, W] : trained.weights)
            write_matrix_file((fs::path(out_weights) / (slot + ".svm")).string(), W);
        for (const auto& [slot, W] : trained.references)
            write_matrix_file((fs::path(out_weights) / (slot + ".ref.svm")).string(), W);
    }
    if (!out_arch.empty()) {
        ArchFile arch;
        arch.network = trained.net;
        // Strip embedded references; they are exported as files instead.
        for (auto& e : arch.network.stem)
            if (is_weight(e)) std::get<WeightSlot>(e).profile.reference.reset();
        for (auto& vine : arch.network.vines)
            for (auto& e : vine.body)
                if (is_weight(e)) std::get<WeightSlot>(e).profile.reference.reset();
        if (!out_weights.empty()) {
            fs::path base = fs::path(out_arch).parent_path();
            if (base.empty()) base = ".";
            for (const auto& ref : weight_slots(arch.network)) {
                arch.weight_files[ref.id] =
                    fs::relative(fs::path(out_weights) / (ref.id + ".svm"), base).string();
                arch.reference_files[ref.id] =
                    fs::relative(fs::path(out_weights) / (ref.id + ".ref.svm"), base).string();
            }
        }
        write_output(out_arch, serialize_arch_file(arch));
    }
    write_output(out, format_report(report));
    return 0;
}

// --- entry point ---------------------------------------------------------------

inline int run(const std::vector<std::string>& args) {
    CLI::App app{"stem-vine covering-number and generalization bound certifier"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "check an architecture file");
    std::string v_arch;
    validate_cmd->add_option("arch", v_arch, "architecture file")->required();

    // template
    auto* template_cmd = app.add_subcommand("template", "emit a built-in architecture");
    std::string t_which, t_out = "-";
    std::size_t t_dim = 4, t_classes = 4;
    double t_s = 1.0, t_b = 0.1;
    template_cmd->add_option("which", t_which, "template name (resnet34)")->required();
    template_cmd->add_option("--out", t_out, "output path or -");
    template_cmd->add_option("--dim", t_dim, "feature width for every stage");
    template_cmd->add_option("--classes", t_classes, "output dimension");
    template_cmd->add_option("--s", t_s, "spectral bound for every slot");
    template_cmd->add_option("--b", t_b, "reference-distance bound for every slot");

    // certify
    auto* certify_cmd = app.add_subcommand("certify", "compute a bound certificate");
    std::string c_arch, c_weights, c_data, c_out = "-", c_format = "report";
    double c_lambda = 1.0, c_delta = 0.05;
    certify_cmd->add_option("--arch", c_arch, "architecture file")->required();
    certify_cmd->add_option("--weights", c_weights, "directory with <slot>.svm files");
    certify_cmd->add_option("--data", c_data, "dataset file")->required();
    certify_cmd->add_option("--lambda", c_lambda, "margin parameter");
    certify_cmd->add_option("--delta", c_delta, "confidence parameter");
    certify_cmd->add_option("--out", c_out, "output path or -");
    certify_cmd->add_option("--format", c_format, "report or csv")
        ->check(CLI::IsMember({"report", "csv"}));

    // oracle-cover
    auto* cover_cmd = app.add_subcommand("oracle-cover", "covering-number oracle comparisons");
    std::uint64_t oc_seed = 0;
    std::string oc_out = "-";
    cover_cmd->add_option("--seed", oc_seed, "base seed");
    cover_cmd->add_option("--out", oc_out, "output path or -");

    // oracle-rademacher
    auto* rad_cmd = app.add_subcommand("oracle-rademacher", "Rademacher oracle comparisons");
    std::uint64_t or_seed = 0;
    std::size_t or_trials = 10000;
    std::string or_out = "-";
    rad_cmd->add_option("--seed", or_seed, "base seed");
    rad_cmd->add_option("--trials", or_trials, "Monte-Carlo trials");
    rad_cmd->add_option("--out", or_out, "output path or -");

    // sweep-norms
    auto* sweep_cmd = app.add_subcommand("sweep-norms", "R and bound across norm scalings");
    std::string s_arch, s_weights, s_data, s_factors = "0.5,1,2,4", s_what = "both",
                s_out = "-";
    double s_lambda = 1.0, s_delta = 0.05;
    sweep_cmd->add_option("--arch", s_arch, "architecture file")->required();
    sweep_cmd->add_option("--weights", s_weights, "directory with <slot>.svm files");
    sweep_cmd->add_option("--data", s_data, "dataset file")->required();
    sweep_cmd->add_option("--factors", s_factors, "comma-separated scale factors");
    sweep_cmd->add_option("--what", s_what, "which bounds to scale: b, s, or both")
        ->check(CLI::IsMember({"b", "s", "both"}));
    sweep_cmd->add_option("--lambda", s_lambda, "margin parameter");
    sweep_cmd->add_option("--delta", s_delta, "confidence parameter");
    sweep_cmd->add_option("--out", s_out, "output path or -");

    // sweep-placement
    auto* place_cmd = app.add_subcommand("sweep-placement", "chain versus vine term counts");
    std::uint64_t p_seed = 0;
    std::string p_out = "-";
    place_cmd->add_option("--seed", p_seed, "base seed");
    place_cmd->add_option("--out", p_out, "output path or -");

    // train-demo
    auto* demo_cmd = app.add_subcommand("train-demo", "blobs + tiny trainer + certificate");
    std::uint64_t d_seed = 0;
    double d_lambda = 1.0, d_delta = 0.05, d_wd = 0.001;
    std::size_t d_epochs = 200;
    std::string d_out = "-", d_out_arch, d_out_weights, d_out_data;
    demo_cmd->add_option("--seed", d_seed, "seed for data and training");
    demo_cmd->add_option("--lambda", d_lambda, "margin parameter");
    demo_cmd->add_option("--delta", d_delta, "confidence parameter");
    demo_cmd->add_option("--weight-decay", d_wd, "L2 penalty coefficient");
    demo_cmd->add_option("--epochs", d_epochs, "training epochs");
    demo_cmd->add_option("--out", d_out, "report output path or -");
    demo_cmd->add_option("--out-arch", d_out_arch, "also write the trained architecture");
    demo_cmd->add_option("--out-weights", d_out_weights, "also write weight files to a directory");
    demo_cmd->add_option("--out-data", d_out_data, "also write the training set");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(v_arch);
        if (template_cmd->parsed())
            return cmd_template(t_which, t_out, t_dim, t_classes, t_s, t_b);
        if (certify_cmd->parsed())
            return cmd_certify(c_arch, c_weights, c_data, c_lambda, c_delta, c_out, c_format);
        if (cover_cmd->parsed()) return cmd_oracle_cover(oc_seed, oc_out);
        if (rad_cmd->parsed()) return cmd_oracle_rademacher(or_seed, or_trials, or_out);
        if (sweep_cmd->parsed())
            return cmd_sweep_norms(s_arch, s_weights, s_data, s_factors, s_what, s_lambda, s_delta,
                                   s_out);
        if (place_cmd->parsed()) return cmd_sweep_placement(p_seed, p_out);
        if (demo_cmd->parsed())
            return cmd_train_demo(d_seed, d_lambda, d_delta, d_wd, d_epochs, d_out, d_out_arch,
                                  d_out_weights, d_out_data);
    } catch (const ProfileViolation& e) {
        std::cerr << "certificate refused: " << e.what() << "\n";
        return 1;
    } catch (const SemanticError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const SyntaxError& e) {
        std::cerr << "syntax error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace stemvine::cli
