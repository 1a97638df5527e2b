#pragma once

#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "stemvine/errors.hpp"
#include "stemvine/matrix.hpp"

namespace stemvine {

// Instances as rows of X (n x n0), labels 1-based in {1..k}.
struct LabeledDataset {
    Matrix X;
    std::vector<std::uint32_t> labels;
    std::uint32_t k = 0;

    std::size_t size() const { return labels.size(); }
};

inline void check_dataset(const LabeledDataset& d) {
    if (d.X.empty()) throw DimensionError("dataset has no instances");
    if (d.labels.size() != d.X.rows())
        throw DimensionError("dataset has " + std::to_string(d.X.rows()) + " rows but " +
                             std::to_string(d.labels.size()) + " labels");
    if (d.k == 0) throw LabelError("dataset class count must be positive");
    for (std::size_t i = 0; i < d.labels.size(); ++i)
        if (d.labels[i] < 1 || d.labels[i] > d.k)
            throw LabelError("label " + std::to_string(d.labels[i]) + " at row " +
                             std::to_string(i) + " outside {1.." + std::to_string(d.k) + "}");
    if (!d.X.is_finite()) throw ParamError("dataset contains non-finite features");
}

// Binary dataset format: magic "SVD1"; n, n0, k as little-endian u32; X
// row-major little-endian doubles; labels as little-endian u32.
inline void write_dataset(std::ostream& out, const LabeledDataset& d) {
    check_dataset(d);
    out.write("SVD1", 4);
    detail::put_u32le(out, static_cast<std::uint32_t>(d.X.rows()));
    detail::put_u32le(out, static_cast<std::uint32_t>(d.X.cols()));
    detail::put_u32le(out, d.k);
    for (double x : d.X.data()) detail::put_f64le(out, x);
    for (std::uint32_t y : d.labels) detail::put_u32le(out, y);
    if (!out) throw IoError("dataset write failed");
}

inline LabeledDataset read_dataset(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SVD1", 4) != 0) throw IoError("bad dataset magic, want SVD1");
    const std::uint32_t n = detail::get_u32le(in);
    const std::uint32_t n0 = detail::get_u32le(in);
    const std::uint32_t k = detail::get_u32le(in);
    if (n == 0 || n0 == 0) throw IoError("dataset file with zero dimension");
    LabeledDataset d;
    d.X = Matrix(n, n0);
    d.k = k;
    for (double& x : d.X.data()) x = detail::get_f64le(in);
    d.labels.resize(n);
    for (auto& y : d.labels) y = detail::get_u32le(in);
    check_dataset(d);
    return d;
}

}  // namespace stemvine
