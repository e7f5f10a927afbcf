#pragma once

#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "svident/error.hpp"

namespace svident {

/// Multi-indices (n, d) of a Segre-Veronese variety: the image of
/// P^{n_1} x ... x P^{n_r} under the multidegree (d_1, ..., d_r) embedding.
struct SVSpec {
    std::vector<int> n;
    std::vector<int> d;

    std::size_t factors() const noexcept { return n.size(); }

    /// dim X = sum of n_i.
    int dim() const noexcept { return std::accumulate(n.begin(), n.end(), 0); }

    friend bool operator==(const SVSpec&, const SVSpec&) = default;
};

inline void validate(const SVSpec& spec) {
    if (spec.n.empty())
        throw Error(ErrorCode::InvalidSpec, "at least one factor is required");
    if (spec.n.size() != spec.d.size())
        throw Error(ErrorCode::InvalidSpec, "n and d must have the same length");
    for (std::size_t i = 0; i < spec.n.size(); ++i) {
        if (spec.n[i] < 1)
            throw Error(ErrorCode::InvalidSpec, "n_" + std::to_string(i + 1) + " must be >= 1");
        if (spec.d[i] < 1)
            throw Error(ErrorCode::InvalidSpec, "d_" + std::to_string(i + 1) + " must be >= 1");
    }
}

inline SVSpec make_spec(std::vector<int> n, std::vector<int> d) {
    SVSpec spec{std::move(n), std::move(d)};
    validate(spec);
    return spec;
}

inline std::string join(const std::vector<int>& values, char sep = ',') {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << sep;
        out << values[i];
    }
    return out.str();
}

inline std::string to_string(const SVSpec& spec) {
    return "n=(" + join(spec.n) + ") d=(" + join(spec.d) + ")";
}

} // namespace svident
