#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "stemvine/errors.hpp"

namespace stemvine {

// Dense real matrix, row-major. Dimensions are strictly positive once
// constructed; a default-constructed Matrix is an empty placeholder.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), entries_(rows * cols, fill) {
        if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        if (rows.size() == 0) throw DimensionError("matrix needs at least one row");
        const std::size_t cols = rows.begin()->size();
        Matrix m(rows.size(), cols);
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != cols) throw DimensionError("ragged row list");
            std::size_t j = 0;
            for (double x : row) m(i, j++) = x;
            ++i;
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return entries_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    std::vector<double>& data() { return entries_; }
    const std::vector<double>& data() const { return entries_; }

    bool is_finite() const {
        for (double x : entries_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.empty() || b.empty()) throw DimensionError("matmul on empty matrix");
    if (a.cols() != b.rows())
        throw DimensionError("matmul shape mismatch: " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

inline Matrix transpose(const Matrix& m) {
    if (m.empty()) throw DimensionError("transpose of empty matrix");
    Matrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

inline Matrix add(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("add shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

inline Matrix sub(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("sub shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

inline Matrix scale(const Matrix& a, double c) {
    Matrix r = a;
    for (double& x : r.data()) x *= c;
    return r;
}

inline double frobenius_norm(const Matrix& m) {
    if (m.empty()) throw DimensionError("frobenius_norm of empty matrix");
    double s = 0.0;
    for (double x : m.data()) s += x * x;
    return std::sqrt(s);
}

// Sum over rows of the Euclidean norm of each row; equals the (2,1) group
// norm of the transpose.
inline double norm_2_1_of_transpose(const Matrix& m) {
    if (m.empty()) throw DimensionError("norm_2_1_of_transpose of empty matrix");
    double total = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) row += m(i, j) * m(i, j);
        total += std::sqrt(row);
    }
    return total;
}

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("frobenius_distance shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        s += d * d;
    }
    return std::sqrt(s);
}

namespace detail {

// One alternating step v -> A^T (A v) with intermediate normalization.
inline double power_step(const Matrix& m, std::vector<double>& v) {
    const std::size_t r = m.rows(), c = m.cols();
    std::vector<double> w(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < c; ++j) acc += m(i, j) * v[j];
        w[i] = acc;
    }
    double wn = 0.0;
    for (double x : w) wn += x * x;
    wn = std::sqrt(wn);
    if (wn == 0.0) return 0.0;
    for (double& x : w) x /= wn;
    std::vector<double> z(c, 0.0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) z[j] += m(i, j) * w[i];
    double zn = 0.0;
    for (double x : z) zn += x * x;
    zn = std::sqrt(zn);
    if (zn > 0.0)
        for (double& x : z) x /= zn;
    v = z;
    return zn;
}

}  // namespace detail

// Largest singular value by alternating power iteration. The start vector is
// the normalized all-ones vector so repeated runs are bit-identical; if that
// vector happens to lie in the null space, basis vectors are tried in order.
inline double spectral_norm(const Matrix& m, double tol = 1e-10, std::size_t max_iter = 10000) {
    if (m.empty()) throw DimensionError("spectral_norm of empty matrix");
    if (!(tol > 0.0 && tol < 1.0)) throw ParamError("spectral_norm tol must be in (0,1)");
    if (max_iter < 1) throw ParamError("spectral_norm max_iter must be >= 1");

    bool all_zero = true;
    for (double x : m.data())
        if (x != 0.0) {
            all_zero = false;
            break;
        }
    if (all_zero) return 0.0;

    const std::size_t c = m.cols();
    std::vector<double> v(c, 1.0 / std::sqrt(static_cast<double>(c)));
    std::size_t fallback = 0;
    double sigma_prev = -1.0;
    double sigma = 0.0;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        sigma = detail::power_step(m, v);
        if (sigma == 0.0) {
            // Start vector was annihilated; restart from a basis vector.
            if (fallback >= c) break;
            v.assign(c, 0.0);
            v[fallback++] = 1.0;
            sigma_prev = -1.0;
            continue;
        }
        if (sigma_prev >= 0.0 && std::abs(sigma - sigma_prev) <= tol * std::max(1.0, sigma))
            return sigma;
        sigma_prev = sigma;
    }
    throw ConvergenceError("spectral_norm did not converge within " + std::to_string(max_iter) +
                               " iterations (last estimate " + std::to_string(sigma) + ")",
                           sigma);
}

// --- binary matrix file format --------------------------------------------
//
// Magic "SVM1", then rows and cols as little-endian u32, then the row-major
// entries as little-endian IEEE-754 doubles.

namespace detail {

inline void put_u32le(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw IoError("unexpected end of file reading u32");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64le(std::ostream& out, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw IoError("unexpected end of file reading f64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double x;
    std::memcpy(&x, &v, 8);
    return x;
}

}  // namespace detail

inline void write_matrix(std::ostream& out, const Matrix& m) {
    if (m.empty()) throw DimensionError("cannot write empty matrix");
    out.write("SVM1", 4);
    detail::put_u32le(out, static_cast<std::uint32_t>(m.rows()));
    detail::put_u32le(out, static_cast<std::uint32_t>(m.cols()));
    for (double x : m.data()) detail::put_f64le(out, x);
    if (!out) throw IoError("matrix write failed");
}

inline Matrix read_matrix(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SVM1", 4) != 0) throw IoError("bad matrix magic, want SVM1");
    const std::uint32_t rows = detail::get_u32le(in);
    const std::uint32_t cols = detail::get_u32le(in);
    if (rows == 0 || cols == 0) throw IoError("matrix file with zero dimension");
    Matrix m(rows, cols);
    for (double& x : m.data()) x = detail::get_f64le(in);
    if (!m.is_finite()) throw IoError("matrix file contains non-finite entries");
    return m;
}

}  // namespace stemvine
