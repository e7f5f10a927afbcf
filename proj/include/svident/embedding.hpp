#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "svident/error.hpp"
#include "svident/linalg.hpp"
#include "svident/matrix.hpp"
#include "svident/spec.hpp"

namespace svident {

/// Exponent vector of one factor: n_i + 1 entries summing to d_i.
using Exponent = std::vector<int>;
/// One exponent vector per factor; indexes a coordinate of P^N.
using ExponentIndex = std::vector<Exponent>;

template <typename T>
using FactorPoint = std::vector<T>;
/// A point of P^{n_1} x ... x P^{n_r}, one coordinate vector per factor.
template <typename T>
using Point = std::vector<FactorPoint<T>>;

/// Largest ambient space the dense evaluators accept.
inline constexpr std::size_t kMaxAmbientSize = 20000;

/// Degree-d monomials in n + 1 variables, lexicographically descending:
/// (d,0,..,0) first, (0,..,0,d) last.
inline std::vector<Exponent> veronese_exponents(int n, int d) {
    std::vector<Exponent> out;
    Exponent current(static_cast<std::size_t>(n + 1), 0);
    auto fill = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos + 1 == current.size()) {
            current[pos] = remaining;
            out.push_back(current);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            current[pos] = e;
            self(self, pos + 1, remaining - e);
        }
    };
    fill(fill, 0, d);
    return out;
}

/// N + 1 as a native size; throws TooLarge beyond kMaxAmbientSize.
inline std::size_t ambient_size(const SVSpec& spec) {
    validate(spec);
    std::size_t size = 1;
    for (std::size_t i = 0; i < spec.factors(); ++i) {
        // C(n+d, n) computed incrementally stays exact at every step.
        std::size_t c = 1;
        for (int k = 1; k <= spec.n[i]; ++k) {
            c = c * static_cast<std::size_t>(spec.d[i] + k) / static_cast<std::size_t>(k);
            if (c > kMaxAmbientSize) throw Error(ErrorCode::TooLarge, to_string(spec));
        }
        size *= c;
        if (size > kMaxAmbientSize) throw Error(ErrorCode::TooLarge, to_string(spec));
    }
    return size;
}

/// Monomial basis of the embedding, factor 1 outermost.
inline std::vector<ExponentIndex> coordinate_basis(const SVSpec& spec) {
    ambient_size(spec);
    std::vector<ExponentIndex> out{ExponentIndex{}};
    for (std::size_t i = 0; i < spec.factors(); ++i) {
        const auto factor = veronese_exponents(spec.n[i], spec.d[i]);
        std::vector<ExponentIndex> next;
        next.reserve(out.size() * factor.size());
        for (const auto& prefix : out)
            for (const auto& e : factor) {
                next.push_back(prefix);
                next.back().push_back(e);
            }
        out = std::move(next);
    }
    return out;
}

/// Segre-Veronese parametrization in plain monomial coordinates (no
/// multinomial weights), with its chart derivatives.
///
/// Chart coordinates z_u run over the non-zeroth coordinates of every
/// factor, factor 1 first; points are expected to have x_i[0] = 1, which is
/// how every sampler in the library produces them.
template <typename T>
class Embedding {
public:
    explicit Embedding(SVSpec spec) : spec_(std::move(spec)), size_(svident::ambient_size(spec_)) {
        for (std::size_t i = 0; i < spec_.factors(); ++i) {
            exponents_.push_back(veronese_exponents(spec_.n[i], spec_.d[i]));
            for (int j = 1; j <= spec_.n[i]; ++j) directions_.emplace_back(i, j);
        }
    }

    const SVSpec& spec() const noexcept { return spec_; }
    std::size_t ambient_size() const noexcept { return size_; }
    int dim() const noexcept { return static_cast<int>(directions_.size()); }

    /// (factor, coordinate) moved by chart direction u.
    std::pair<std::size_t, int> chart_direction(int u) const { return directions_[static_cast<std::size_t>(u)]; }

    std::vector<T> embed(const Point<T>& p) const {
        check_point(p);
        std::vector<std::vector<T>> parts;
        for (std::size_t i = 0; i < spec_.factors(); ++i) parts.push_back(factor_values(i, p[i], -1, -1));
        return kron(parts);
    }

    /// Rows: embed(p), then d embed / d z_u for u = 0 .. dim-1.
    Matrix<T> tangent_frame(const Point<T>& p) const {
        check_point(p);
        Matrix<T> frame(static_cast<std::size_t>(dim()) + 1, size_);
        const auto base = plain_parts(p);
        auto write = [&](std::size_t row, const std::vector<T>& v) {
            for (std::size_t k = 0; k < size_; ++k) frame(row, k) = v[k];
        };
        write(0, kron(base));
        for (int u = 0; u < dim(); ++u) {
            auto parts = base;
            const auto [i, j] = chart_direction(u);
            parts[i] = factor_values(i, p[i], j, -1);
            write(static_cast<std::size_t>(u) + 1, kron(parts));
        }
        return frame;
    }

    /// d embed / d x_i[k] at p, any coordinate k of factor i.
    std::vector<T> partial(const Point<T>& p, std::size_t i, int k) const {
        check_point(p);
        auto parts = plain_parts(p);
        parts[i] = factor_values(i, p[i], k, -1);
        return kron(parts);
    }

    /// d^2 embed / d z_u d z_v at p as an ambient vector.
    std::vector<T> second_derivative(const Point<T>& p, int u, int v) const {
        check_point(p);
        auto parts = plain_parts(p);
        const auto [iu, ju] = chart_direction(u);
        const auto [iv, jv] = chart_direction(v);
        if (iu == iv) {
            parts[iu] = factor_values(iu, p[iu], ju, jv);
        } else {
            parts[iu] = factor_values(iu, p[iu], ju, -1);
            parts[iv] = factor_values(iv, p[iv], jv, -1);
        }
        return kron(parts);
    }

    /// Chart Hessian of z -> <form, embed(x(z))> at p, without checking that
    /// the form is singular at p.
    Matrix<T> chart_hessian(const Point<T>& p, std::span<const T> form) const {
        check_form(form);
        const auto n = static_cast<std::size_t>(dim());
        Matrix<T> h(n, n);
        for (int u = 0; u < dim(); ++u)
            for (int v = u; v < dim(); ++v) {
                const T value = dot(form, second_derivative(p, u, v));
                h(static_cast<std::size_t>(u), static_cast<std::size_t>(v)) = value;
                h(static_cast<std::size_t>(v), static_cast<std::size_t>(u)) = value;
            }
        return h;
    }

    /// Quadratic part (times 2) of the hyperplane section cut by `form`,
    /// which must vanish on the affine tangent space at p.
    Matrix<T> hessian(const Point<T>& p, std::span<const T> form) const {
        check_form(form);
        const Matrix<T> frame = tangent_frame(p);
        const double form_norm = norm(form);
        for (std::size_t r = 0; r < frame.rows(); ++r) {
            const T pairing = dot(form, frame.row(r));
            bool ok;
            if constexpr (is_exact_v<T>) {
                ok = scalar_traits<T>::is_zero(pairing);
            } else {
                ok = scalar_traits<T>::magnitude(pairing) <= 1e-9 * form_norm * norm(frame.row(r));
            }
            if (!ok)
                throw Error(ErrorCode::PreconditionViolated,
                            "linear form does not vanish on tangent frame row " + std::to_string(r));
        }
        return chart_hessian(p, form);
    }

private:
    void check_point(const Point<T>& p) const {
        if (p.size() != spec_.factors())
            throw Error(ErrorCode::InvalidArgument, "expected one factor point per factor");
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i].size() != static_cast<std::size_t>(spec_.n[i] + 1))
                throw Error(ErrorCode::InvalidArgument, "factor point " + std::to_string(i + 1) + " has wrong length");
            bool all_zero = true;
            for (const T& x : p[i])
                if (!scalar_traits<T>::is_zero(x)) all_zero = false;
            if (all_zero) throw Error(ErrorCode::ZeroPoint, "factor point " + std::to_string(i + 1) + " is zero");
        }
    }

    void check_form(std::span<const T> form) const {
        if (form.size() != size_) throw Error(ErrorCode::InvalidArgument, "linear form has wrong length");
    }

    static double norm(std::span<const T> v) {
        double acc = 0;
        for (const T& x : v) {
            const double m = scalar_traits<T>::magnitude(x);
            acc += m * m;
        }
        return std::sqrt(acc);
    }

    std::vector<std::vector<T>> plain_parts(const Point<T>& p) const {
        std::vector<std::vector<T>> parts;
        for (std::size_t i = 0; i < spec_.factors(); ++i) parts.push_back(factor_values(i, p[i], -1, -1));
        return parts;
    }

    /// Monomials of factor i at x, differentiated by x_{j1} and x_{j2}
    /// (a negative index means no derivative).
    std::vector<T> factor_values(std::size_t i, const FactorPoint<T>& x, int j1, int j2) const {
        const int d = spec_.d[i];
        std::vector<std::vector<T>> powers(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            powers[k].resize(static_cast<std::size_t>(d) + 1, T(1));
            for (int e = 1; e <= d; ++e) powers[k][static_cast<std::size_t>(e)] = powers[k][static_cast<std::size_t>(e) - 1] * x[k];
        }
        std::vector<T> out;
        out.reserve(exponents_[i].size());
        for (const Exponent& alpha : exponents_[i]) {
            Exponent e = alpha;
            long coeff = 1;
            for (int j : {j1, j2}) {
                if (j < 0) continue;
                coeff *= e[static_cast<std::size_t>(j)];
                if (e[static_cast<std::size_t>(j)] > 0) --e[static_cast<std::size_t>(j)];
            }
            if (coeff == 0) {
                out.push_back(T(0));
                continue;
            }
            T value(coeff);
            for (std::size_t k = 0; k < e.size(); ++k) value *= powers[k][static_cast<std::size_t>(e[k])];
            out.push_back(value);
        }
        return out;
    }

    std::vector<T> kron(const std::vector<std::vector<T>>& parts) const {
        std::vector<T> out{T(1)};
        for (const auto& part : parts) {
            std::vector<T> next;
            next.reserve(out.size() * part.size());
            for (const T& a : out)
                for (const T& b : part) next.push_back(a * b);
            out = std::move(next);
        }
        return out;
    }

    SVSpec spec_;
    std::size_t size_;
    std::vector<std::vector<Exponent>> exponents_;
    std::vector<std::pair<std::size_t, int>> directions_;
};

template <typename T>
std::vector<T> embed(const SVSpec& spec, const Point<T>& p) {
    return Embedding<T>(spec).embed(p);
}

template <typename T>
Matrix<T> tangent_frame(const SVSpec& spec, const Point<T>& p) {
    return Embedding<T>(spec).tangent_frame(p);
}

template <typename T>
Matrix<T> hessian(const SVSpec& spec, const Point<T>& p, std::span<const T> form) {
    return Embedding<T>(spec).hessian(p, form);
}

} // namespace svident
