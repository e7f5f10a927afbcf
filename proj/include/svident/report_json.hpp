#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "svident/classifier.hpp"
#include "svident/contact.hpp"
#include "svident/falsifier.hpp"
#include "svident/projection.hpp"
#include "svident/terracini.hpp"

namespace svident {

using json = nlohmann::ordered_json;

/// Integers that fit in 64 bits are emitted as numbers, larger ones as
/// decimal strings.
inline json to_json(const mpz_class& z) {
    if (z.fits_slong_p()) return json(static_cast<std::int64_t>(z.get_si()));
    return json(z.get_str());
}

/// "p/q", or "p" for integers.
inline json to_json(const mpq_class& q) { return json(q.get_str()); }

inline json to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const SVSpec& s) {
    return json{{"r", s.factors()}, {"n", s.n}, {"d", s.d}};
}

inline json to_json(const RankProfile& p) {
    return json{{"ambient_dim", to_json(p.ambient_dim)},
                {"variety_dim", p.variety_dim},
                {"generic_rank", to_json(p.generic_rank)},
                {"perfect", p.perfect}};
}

/// The pivot is reported 1-based, like factor numbering elsewhere in output.
inline json to_json(const CriterionReport& c) {
    json margins = json::array();
    for (const auto& m : c.nef_margins) margins.push_back(to_json(m));
    return json{{"degree_hypothesis", c.degree_hypothesis},
                {"rank_hypothesis", c.rank_hypothesis},
                {"pivot", c.pivot + 1},
                {"slope_a", to_json(c.slope_a)},
                {"nef_margins", margins},
                {"verdict", to_string(c.verdict)}};
}

inline json to_json(const TerraciniReport& t) {
    return json{{"h", t.h},
                {"expected_affine_rank", t.expected_affine_rank},
                {"measured_rank", t.measured_rank},
                {"defect", t.defect},
                {"mode", to_string(t.mode)},
                {"seed", t.seed},
                {"attempts", t.attempts}};
}

inline json to_json(const ContactReport& c) {
    return json{{"h", c.h},
                {"form_count", c.form_count},
                {"per_form_kernel_dims", c.per_form_kernel_dims},
                {"common_kernel_dim", c.common_kernel_dim},
                {"twd", c.twd},
                {"base_point_index", c.base_point_index},
                {"mode", to_string(c.mode)},
                {"seed", c.seed}};
}

inline json to_json(const FinitenessReport& f) {
    return json{{"h", f.h},
                {"jacobian_rank", f.jacobian_rank},
                {"target_dim", f.target_dim},
                {"generically_finite", f.generically_finite},
                {"fiber_type", f.fiber_type},
                {"attempts", f.attempts},
                {"mode", to_string(f.mode)},
                {"seed", f.seed}};
}

inline json to_json(const Decomposition& d) {
    json terms = json::array();
    for (const Term& t : d.terms) {
        json points = json::array();
        for (const auto& x : t.points) {
            json coords = json::array();
            for (const cplx& c : x) coords.push_back(to_json(c));
            points.push_back(coords);
        }
        terms.push_back(json{{"weight", to_json(t.weight)}, {"points", points}});
    }
    return json{{"rank", d.rank()}, {"terms", terms}};
}

inline json to_json(const SearchConfig& c) {
    return json{{"starts", c.starts},
                {"max_iter", c.max_iter},
                {"residual_tol", c.residual_tol},
                {"match_tol", c.match_tol},
                {"seed", c.seed},
                {"threads", c.threads}};
}

inline json to_json(const EvidenceReport& r) {
    json outcomes = json::array();
    for (const auto& o : r.outcomes)
        outcomes.push_back(json{{"seed", o.seed},
                                {"status", to_string(o.status)},
                                {"residual", o.residual},
                                {"iterations", o.iterations}});
    json representatives = json::array();
    for (const auto& d : r.representatives) representatives.push_back(to_json(d));
    return json{{"spec", to_json(r.spec)},
                {"g", r.g},
                {"config", to_json(r.config)},
                {"successes", r.successes},
                {"classes_found", r.classes_found},
                {"class_sizes", r.class_sizes},
                {"representatives", representatives},
                {"pairwise_distances", r.pairwise_distances},
                {"residuals", r.residuals},
                {"planted", to_json(r.planted)},
                {"planted_recovered", r.planted_recovered},
                {"degenerate", r.degenerate},
                {"verdict", to_string(r.verdict)},
                {"outcomes", outcomes}};
}

/// Enough to re-run the command that produced an output.
struct RunManifest {
    std::string command;
    std::optional<SVSpec> spec;
    std::uint64_t seed = 0;
    json config = json::object();
    std::string tool_version;
    std::optional<std::string> timestamp; // omitted by default to keep outputs reproducible
};

inline json to_json(const RunManifest& m) {
    return json{{"command", m.command},
                {"spec", m.spec ? to_json(*m.spec) : json(nullptr)},
                {"seed", m.seed},
                {"config", m.config},
                {"tool_version", m.tool_version},
                {"timestamp", m.timestamp ? json(*m.timestamp) : json(nullptr)}};
}

} // namespace svident
