#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "svident/matrix.hpp"

namespace svident {

// Scalar traits ------------------------------------------------------------

template <typename T>
struct scalar_traits;

template <>
struct scalar_traits<mpq_class> {
    static constexpr bool exact = true;
    static bool is_zero(const mpq_class& x) { return sgn(x) == 0; }
    static double magnitude(const mpq_class& x) { return std::abs(x.get_d()); }
    static mpq_class from_ratio(long num, long den) {
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }
};

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static bool is_zero(double x) { return x == 0.0; }
    static double magnitude(double x) { return std::abs(x); }
    static double from_ratio(long num, long den) { return static_cast<double>(num) / static_cast<double>(den); }
};

template <>
struct scalar_traits<long double> {
    static constexpr bool exact = false;
    static bool is_zero(long double x) { return x == 0.0L; }
    static double magnitude(long double x) { return static_cast<double>(x < 0 ? -x : x); }
    static long double from_ratio(long num, long den) { return static_cast<long double>(num) / static_cast<long double>(den); }
};

template <>
struct scalar_traits<std::complex<double>> {
    static constexpr bool exact = false;
    static bool is_zero(const std::complex<double>& x) { return x == 0.0; }
    static double magnitude(const std::complex<double>& x) { return std::abs(x); }
    static std::complex<double> from_ratio(long num, long den) {
        return static_cast<double>(num) / static_cast<double>(den);
    }
};

template <typename T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

// Exact routines -------------------------------------------------------------

/// Rank by fraction-free (Bareiss) elimination. Every division is exact:
/// after step k each entry is a (k+1)-minor of the input.
inline std::size_t rank(Matrix<mpz_class> a) {
    const std::size_t rows = a.rows(), cols = a.cols();
    mpz_class prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && sgn(a(p, c)) == 0) ++p;
        if (p == rows) continue;
        a.swap_rows(r, p);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                a(i, j) = a(r, c) * a(i, j) - a(i, c) * a(r, j);
                mpz_divexact(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), prev.get_mpz_t());
            }
            a(i, c) = 0;
        }
        prev = a(r, c);
        ++r;
    }
    return r;
}

/// Clears denominators row by row; the row space is unchanged.
inline Matrix<mpz_class> integer_rows(const Matrix<mpq_class>& a) {
    Matrix<mpz_class> out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        mpz_class den = 1;
        for (std::size_t j = 0; j < a.cols(); ++j) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), a(i, j).get_den_mpz_t());
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j).get_num() * (den / a(i, j).get_den());
    }
    return out;
}

inline std::size_t rank(const Matrix<mpq_class>& a) { return rank(integer_rows(a)); }

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
inline void make_primitive(std::vector<mpq_class>& v) {
    mpz_class den = 1, num = 0;
    for (const auto& x : v) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
    for (auto& x : v) {
        x *= den;
        mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), x.get_num_mpz_t());
    }
    if (num == 0) return;
    auto first = std::find_if(v.begin(), v.end(), [](const mpq_class& x) { return sgn(x) != 0; });
    if (sgn(*first) < 0) num = -num;
    for (auto& x : v) x /= num;
}

/// Basis (as rows) of the right null space {v : a v = 0}, from the reduced
/// row echelon form; one primitive integer vector per free column.
inline Matrix<mpq_class> null_space(const Matrix<mpq_class>& input) {
    Matrix<mpq_class> a = input;
    const std::size_t rows = a.rows(), cols = a.cols();
    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && sgn(a(p, c)) == 0) ++p;
        if (p == rows) continue;
        a.swap_rows(r, p);
        const mpq_class inv = 1 / a(r, c);
        for (std::size_t j = c; j < cols; ++j) a(r, j) *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || sgn(a(i, c)) == 0) continue;
            const mpq_class f = a(i, c);
            for (std::size_t j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
        }
        pivot_cols.push_back(c);
        ++r;
    }

    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : pivot_cols) is_pivot[c] = true;

    Matrix<mpq_class> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<mpq_class> v(cols, mpq_class(0));
        v[f] = 1;
        for (std::size_t k = 0; k < pivot_cols.size(); ++k) v[pivot_cols[k]] = -a(k, f);
        make_primitive(v);
        basis.append_row(std::span<const mpq_class>(v));
    }
    if (basis.rows() == 0) basis = Matrix<mpq_class>(0, cols);
    return basis;
}

// Floating routines ----------------------------------------------------------

/// Relative singular-value threshold for numerical rank decisions.
inline constexpr double kFloatRankTolerance = 1e-8;

namespace detail {

/// Copies into Eigen with each row scaled to unit norm; rank and null space
/// are invariant under row scaling.
inline Eigen::MatrixXd normalized_rows(const Matrix<double>& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double norm = 0;
        for (std::size_t j = 0; j < a.cols(); ++j) norm += a(i, j) * a(i, j);
        norm = std::sqrt(norm);
        const double s = norm > 0 ? 1.0 / norm : 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j) * s;
    }
    return m;
}

inline std::size_t count_above(const Eigen::VectorXd& sigma, double rel_tol) {
    if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
    const double cut = rel_tol * sigma(0);
    std::size_t r = 0;
    for (Eigen::Index k = 0; k < sigma.size(); ++k)
        if (sigma(k) > cut) ++r;
    return r;
}

} // namespace detail

inline std::size_t rank(const Matrix<double>& a, double rel_tol = kFloatRankTolerance) {
    if (a.empty()) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::normalized_rows(a));
    return detail::count_above(svd.singularValues(), rel_tol);
}

/// Orthonormal basis (as rows) of the numerical right null space.
inline Matrix<double> null_space(const Matrix<double>& a, double rel_tol = kFloatRankTolerance) {
    const std::size_t cols = a.cols();
    if (a.rows() == 0) {
        Matrix<double> id(cols, cols);
        for (std::size_t k = 0; k < cols; ++k) id(k, k) = 1.0;
        return id;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::normalized_rows(a), Eigen::ComputeFullV);
    const std::size_t r = detail::count_above(svd.singularValues(), rel_tol);
    Matrix<double> basis(cols - r, cols);
    const Eigen::MatrixXd& v = svd.matrixV();
    for (std::size_t k = r; k < cols; ++k)
        for (std::size_t j = 0; j < cols; ++j)
            basis(k - r, j) = v(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    return basis;
}

} // namespace svident
