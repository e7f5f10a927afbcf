#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svident/report_json.hpp"

using namespace svident;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::vector<int> n, d;
    std::uint64_t seed = 0;
    std::string mode = "exact";
    int starts = 64;
    std::optional<int> rank;
    int threads = 0;
    std::string out;
    int n_max = 0, d_max = 0, r_max = 0;
};

/// SOURCE_DATE_EPOCH, when set, is recorded as an ISO 8601 UTC timestamp.
std::optional<std::string> manifest_timestamp() {
    const char* env = std::getenv("SOURCE_DATE_EPOCH");
    if (env == nullptr || *env == '\0') return std::nullopt;
    char* end = nullptr;
    const long long secs = std::strtoll(env, &end, 10);
    if (*end != '\0') throw UsageError("SOURCE_DATE_EPOCH must be an integer");
    const std::time_t t = static_cast<std::time_t>(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

RunManifest manifest(const std::string& command, std::optional<SVSpec> spec, std::uint64_t seed, json config) {
    return RunManifest{command, std::move(spec), seed, std::move(config), SVIDENT_VERSION, manifest_timestamp()};
}

SVSpec parse_spec(const Options& o) {
    try {
        return make_spec(o.n, o.d);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw UsageError("cannot open " + o.out + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + o.out);
}

void emit(const Options& o, const json& doc) { emit(o, doc.dump(2) + "\n"); }

int cmd_classify(const Options& o) {
    const SVSpec spec = parse_spec(o);
    json doc;
    doc["manifest"] = to_json(manifest("classify", spec, o.seed, json::object()));
    doc["spec"] = to_json(spec);
    doc["rank_profile"] = to_json(rank_profile(spec));
    doc["criterion"] = to_json(criterion(spec));
    emit(o, doc);
    return 0;
}

/// Runs `f`; a missing hypothesis or a full span becomes a "skipped" entry.
template <typename F>
json optional_check(F&& f) {
    try {
        json out = f();
        out["status"] = "ok";
        return out;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::HypothesisUnmet && e.code() != ErrorCode::FullSpan) throw;
        return json{{"status", "skipped"}, {"reason", e.what()}};
    }
}

int cmd_analyze(const Options& o) {
    const SVSpec spec = parse_spec(o);
    const Mode mode = o.mode == "float" ? Mode::Float : Mode::Exact;
    json doc;
    doc["manifest"] = to_json(manifest("analyze", spec, o.seed, json{{"mode", o.mode}}));
    doc["spec"] = to_json(spec);
    doc["rank_profile"] = to_json(rank_profile(spec));
    doc["criterion"] = to_json(criterion(spec));
    json scan = json::array();
    for (const auto& r : defectivity_scan(spec, o.seed, mode)) scan.push_back(to_json(r));
    doc["terracini"] = scan;
    doc["zero_dim"] = optional_check([&] {
        const auto r = zero_dim_check(spec, o.seed, mode);
        return json{{"contact", to_json(r.contact)},
                    {"rank_condition", r.rank_condition},
                    {"matches_expectation", r.matches_expectation}};
    });
    doc["finiteness"] = optional_check([&] { return to_json(finiteness_check(spec, o.seed, mode)); });
    emit(o, doc);
    return 0;
}

int cmd_falsify(const Options& o) {
    const SVSpec spec = parse_spec(o);
    SearchConfig config;
    config.starts = o.starts;
    config.seed = o.seed;
    config.threads = o.threads;
    json echo = to_json(config);
    echo["rank"] = o.rank ? json(*o.rank) : json(nullptr);
    const auto report = identifiability_evidence(spec, config, o.rank);
    json doc;
    doc["manifest"] = to_json(manifest("falsify", spec, o.seed, echo));
    const json body = to_json(report);
    for (const auto& [key, value] : body.items()) doc[key] = value;
    emit(o, doc);
    if (report.degenerate) {
        std::cerr << "svident: degenerate search: " << report.successes << " successful fits out of " << config.starts
                  << " starts\n";
        return kExitFailure;
    }
    return 0;
}

std::string csv_quote(const std::string& s) { return "\"" + s + "\""; }

int cmd_scan(const Options& o) {
    if (o.n_max < 1 || o.d_max < 1 || o.r_max < 1) throw UsageError("scan bounds must be at least 1");
    const auto entries = scan(o.n_max, o.d_max, o.r_max);
    const json config{{"n_max", o.n_max}, {"d_max", o.d_max}, {"r_max", o.r_max}};
    std::ostringstream csv;
    csv << "# manifest: " << to_json(manifest("scan", std::nullopt, o.seed, config)).dump() << "\n";
    csv << "n,d,N,dim,g,perfect,degree_hyp,rank_hyp,verdict\n";
    for (const auto& e : entries) {
        csv << csv_quote(join(e.spec.n)) << ',' << csv_quote(join(e.spec.d)) << ',' << e.profile.ambient_dim.get_str()
            << ',' << e.profile.variety_dim << ',' << e.profile.generic_rank.get_str() << ','
            << (e.profile.perfect ? "true" : "false") << ',' << (e.report.degree_hypothesis ? "true" : "false") << ','
            << (e.report.rank_hypothesis ? "true" : "false") << ',' << to_string(e.report.verdict) << "\n";
    }
    emit(o, csv.str());
    return 0;
}

void add_spec_options(CLI::App* sub, Options& o) {
    sub->add_option("--n", o.n, "factor dimensions n_i, comma-separated")->required()->delimiter(',');
    sub->add_option("--d", o.d, "factor degrees d_i, comma-separated")->required()->delimiter(',');
    sub->add_option("--seed", o.seed, "master seed")->capture_default_str();
    sub->add_option("--out", o.out, "output file (default: stdout)");
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Identifiability checks for Segre-Veronese tensor formats"};
    app.set_version_flag("--version", std::string(SVIDENT_VERSION));
    app.require_subcommand(1);

    auto* classify = app.add_subcommand("classify", "apply the non-identifiability criterion");
    add_spec_options(classify, o);

    auto* analyze = app.add_subcommand("analyze", "secant ranks, tangential contact and finiteness checks");
    add_spec_options(analyze, o);
    analyze->add_option("--mode", o.mode, "exact or float arithmetic")
        ->check(CLI::IsMember({"exact", "float"}))
        ->capture_default_str();

    auto* falsify = app.add_subcommand("falsify", "search for distinct decompositions of a random tensor");
    add_spec_options(falsify, o);
    falsify->add_option("--starts", o.starts, "random starts")->check(CLI::PositiveNumber)->capture_default_str();
    falsify->add_option("--rank", o.rank, "rank of the synthesized tensor (default: generic rank)")
        ->check(CLI::PositiveNumber);
    falsify->add_option("--threads", o.threads, "worker threads, 0 = all cores")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    auto* scan_cmd = app.add_subcommand("scan", "tabulate the criterion over a grid of formats");
    scan_cmd->add_option("--n-max", o.n_max, "largest n_i")->required();
    scan_cmd->add_option("--d-max", o.d_max, "largest d_i")->required();
    scan_cmd->add_option("--r-max", o.r_max, "largest number of factors")->required();
    scan_cmd->add_option("--out", o.out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*classify) return cmd_classify(o);
        if (*analyze) return cmd_analyze(o);
        if (*falsify) return cmd_falsify(o);
        return cmd_scan(o);
    } catch (const UsageError& e) {
        std::cerr << "svident: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "svident: " << e.what() << "\n";
        return kExitFailure;
    }
}
