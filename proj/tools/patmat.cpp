#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "patmat/ensembles.hpp"
#include "patmat/errors.hpp"
#include "patmat/limits.hpp"
#include "patmat/montecarlo.hpp"
#include "patmat/spectra.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

std::string now_iso8601() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

// One run's bookkeeping: parameter echo for the manifest, plus every file the
// command produces. Data files carry no timestamps, so reruns are
// byte-identical; the wall-clock lives only in the manifest sidecar.
struct RunContext {
    std::string command;
    ordered_json parameters = ordered_json::object();
    std::optional<std::string> out;
    std::vector<std::string> outputs;
    std::string started = now_iso8601();
};

void write_file(const std::string& path, const std::string& payload) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) {
        throw patmat::InvalidArgumentError("cannot open output file '" + path + "'");
    }
    stream << payload;
    if (!stream) {
        throw patmat::InvalidArgumentError("failed writing output file '" + path + "'");
    }
}

void finish(RunContext& context, const std::string& payload) {
    if (!context.out) {
        std::cout << payload;
        if (payload.empty() || payload.back() != '\n') {
            std::cout << '\n';
        }
        return;
    }
    write_file(*context.out, payload);
    context.outputs.insert(context.outputs.begin(), *context.out);

    ordered_json manifest;
    manifest["command"] = context.command;
    manifest["version"] = kVersion;
    manifest["parameters"] = context.parameters;
    manifest["started"] = context.started;
    manifest["finished"] = now_iso8601();
    manifest["outputs"] = context.outputs;
    write_file(*context.out + ".manifest.json", manifest.dump(2) + "\n");
}

patmat::EnsembleKind kind_from_flag(const std::string& value) {
    return patmat::parse_kind(value);
}

// ---------------------------------------------------------------- limit ----

struct LimitArgs {
    std::string kind;
    int p = 1;
    std::string parity;
    std::string out;
    std::string format = "json";
};

int run_limit(const LimitArgs& args) {
    patmat::EnsembleKind kind = kind_from_flag(args.kind);
    patmat::LimitValue value{};
    std::optional<double> alt;
    switch (kind) {
    case patmat::EnsembleKind::Circulant:
        value = patmat::limit_var_circulant(args.p);
        break;
    case patmat::EnsembleKind::ReverseCirculant:
        // p is the half order: the statistic is Tr(RC^(2p)).
        value = patmat::limit_var_reverse_circulant(args.p);
        break;
    case patmat::EnsembleKind::SymmetricCirculant:
        value = patmat::limit_var_symmetric_circulant(args.p);
        if (args.p % 2 == 0) {
            alt = patmat::limit_var_symmetric_circulant(args.p,
                                                        patmat::ScEvenScaling::SingleExponent)
                      .value;
        }
        break;
    case patmat::EnsembleKind::Hankel:
        (void)patmat::limit_for_experiment(kind, args.p); // throws: no closed form
        break;
    }
    if (!args.parity.empty() && args.parity != value.parity) {
        throw patmat::InvalidArgumentError("requested parity '" + args.parity +
                                           "' does not match p");
    }

    RunContext context;
    context.command = "limit";
    context.parameters = {{"kind", args.kind}, {"p", args.p}};
    if (!args.out.empty()) {
        context.out = args.out;
    }

    std::string payload;
    if (args.format == "csv") {
        payload = "kind,p,parity,value\n" + args.kind + "," + std::to_string(args.p) + "," +
                  value.parity + "," + format_double(value.value) + "\n";
    } else {
        ordered_json body;
        body["command"] = "limit";
        body["kind"] = args.kind;
        body["p"] = args.p;
        body["parity"] = value.parity;
        body["value"] = value.value;
        if (alt) {
            body["value_alt"] = *alt;
            body["alt_note"] = "interior halving factor read as 2^(m-k) instead of 2^(2(m-k))";
        }
        payload = body.dump(2) + "\n";
    }
    finish(context, payload);
    return 0;
}

// ---------------------------------------------------------------- count ----

struct CountArgs {
    std::string family;
    int p = 1;
    long long s = 0;
    int k = -1;
    long long n = 1;
    bool brute = false;
    std::string out;
    std::string format = "json";
};

int run_count(const CountArgs& args) {
    patmat::CardFamily family = patmat::parse_family(args.family);
    long long parameter = args.s;
    if (family == patmat::CardFamily::Bk) {
        if (args.k < 0) {
            throw patmat::InvalidArgumentError("--k is required for family Bk");
        }
        parameter = args.k;
    }

    patmat::CardinalityResult closed{};
    switch (family) {
    case patmat::CardFamily::A:
        closed = patmat::card_A(args.p, args.s, args.n);
        break;
    case patmat::CardFamily::B:
        closed = patmat::card_B(args.p, args.s, args.n);
        break;
    case patmat::CardFamily::Bk:
        closed = patmat::card_B_k(args.p, args.k, args.n);
        break;
    }

    std::optional<patmat::CardinalityResult> brute;
    if (args.brute) {
        brute = patmat::brute_card(family, args.p, parameter, args.n);
    }

    RunContext context;
    context.command = "count";
    context.parameters = {{"family", args.family},
                          {"p", args.p},
                          {family == patmat::CardFamily::Bk ? "k" : "s", parameter},
                          {"n", args.n},
                          {"brute", args.brute}};
    if (!args.out.empty()) {
        context.out = args.out;
    }

    std::string payload;
    if (args.format == "csv") {
        payload = "family,p,param,n,count\n" + args.family + "," + std::to_string(args.p) + "," +
                  std::to_string(parameter) + "," + std::to_string(args.n) + "," +
                  closed.count.str() + "\n";
    } else {
        ordered_json body;
        body["command"] = "count";
        body["family"] = args.family;
        body["p"] = args.p;
        body[family == patmat::CardFamily::Bk ? "k" : "s"] = parameter;
        body["n"] = args.n;
        body["method"] = "closed-form";
        body["count"] = closed.count.str();
        body["in_range"] = closed.in_range;
        if (!closed.in_range) {
            body["note"] = "parameter outside the valid range; the set is empty";
        }
        if (brute) {
            body["brute"] = brute->count.str();
            body["equal"] = (brute->count == closed.count);
        }
        payload = body.dump(2) + "\n";
    }
    finish(context, payload);
    return 0;
}

// -------------------------------------------------------------- density ----

struct DensityArgs {
    int p = 1;
    double x = 0.0;
    bool has_x = false;
    long long table = 0;
    std::string out;
    std::string format = "json";
};

int run_density(const DensityArgs& args) {
    RunContext context;
    context.command = "density";
    context.parameters = {{"p", args.p}};
    if (!args.out.empty()) {
        context.out = args.out;
    }

    std::string payload;
    if (args.table > 0) {
        context.parameters["points"] = args.table + 1;
        std::vector<std::pair<double, double>> rows;
        for (long long i = 0; i <= args.table; ++i) {
            double x = static_cast<double>(args.p) * static_cast<double>(i) /
                       static_cast<double>(args.table);
            rows.emplace_back(x, patmat::irwin_hall_density(args.p, x));
        }
        if (args.format == "csv") {
            payload = "x,density\n";
            for (const auto& [x, v] : rows) {
                payload += format_double(x) + "," + format_double(v) + "\n";
            }
        } else {
            ordered_json body;
            body["command"] = "density";
            body["p"] = args.p;
            body["rows"] = ordered_json::array();
            for (const auto& [x, v] : rows) {
                body["rows"].push_back({x, v});
            }
            payload = body.dump(2) + "\n";
        }
    } else if (args.has_x) {
        context.parameters["x"] = args.x;
        double value = patmat::irwin_hall_density(args.p, args.x);
        if (args.format == "csv") {
            payload = "p,x,density\n" + std::to_string(args.p) + "," + format_double(args.x) +
                      "," + format_double(value) + "\n";
        } else {
            ordered_json body;
            body["command"] = "density";
            body["p"] = args.p;
            body["x"] = args.x;
            body["value"] = value;
            payload = body.dump(2) + "\n";
        }
    } else {
        throw patmat::InvalidArgumentError("density needs --x or --table");
    }
    finish(context, payload);
    return 0;
}

// ------------------------------------------------------------------ clt ----

struct CltArgs {
    std::string kind;
    long long n = 0;
    int p = 0;
    bool growing_p = false;
    long long replicates = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string samples_out;
    std::string format = "json";
};

int run_clt(const CltArgs& args) {
    if (args.p <= 0 && !args.growing_p) {
        throw patmat::InvalidArgumentError("clt needs --p or --growing-p");
    }
    patmat::ExperimentConfig config;
    config.kind = kind_from_flag(args.kind);
    config.n = args.n;
    config.p = args.growing_p ? 0 : args.p;
    config.replicates = args.replicates;
    config.seed = args.seed;
    config.growing_p = args.growing_p;

    std::vector<patmat::TraceSample> samples = patmat::run_replicates(config);
    patmat::CltReport report = patmat::summarize(samples, config);

    RunContext context;
    context.command = "clt";
    context.parameters = {{"kind", args.kind},         {"n", args.n},
                          {"p", report.p},             {"growing_p", args.growing_p},
                          {"replicates", args.replicates}, {"seed", args.seed}};
    if (!args.out.empty()) {
        context.out = args.out;
    }

    ordered_json body;
    body["command"] = "clt";
    body["kind"] = args.kind;
    body["n"] = args.n;
    body["p"] = report.p;
    body["growing_p"] = args.growing_p;
    body["replicates"] = args.replicates;
    body["seed"] = args.seed;
    body["sample_mean"] = report.sample_mean;
    body["sample_variance"] = report.sample_variance;
    body["variance_ratio"] = report.variance_ratio;
    if (report.limit_ratio) {
        body["limit_ratio"] = *report.limit_ratio;
        body["relative_gap"] = *report.relative_gap;
    }
    body["ks_statistic"] = report.ks_statistic;
    body["skewness"] = report.skewness;
    body["excess_kurtosis"] = report.excess_kurtosis;
    if (report.note) {
        body["note"] = *report.note;
    }
    std::string payload = body.dump(2) + "\n";

    if (!args.samples_out.empty()) {
        // Standardized samples for external plotting; adds a second column
        // standardized by the exact moments whenever the oracle is feasible.
        std::optional<std::pair<double, double>> exact;
        try {
            patmat::ExactTraceMoments moments =
                patmat::exact_trace_moments(config.kind, config.n, report.p);
            exact = {moments.mean.convert_to<double>(),
                     moments.variance.convert_to<double>()};
        } catch (const patmat::ResourceError&) {
        }
        double sd = std::sqrt(report.sample_variance);
        std::string csv = exact ? "standardized,exact_standardized\n" : "standardized\n";
        for (const patmat::TraceSample& s : samples) {
            csv += format_double((s.value - report.sample_mean) / sd);
            if (exact) {
                csv += "," + format_double((s.value - exact->first) / std::sqrt(exact->second));
            }
            csv += "\n";
        }
        write_file(args.samples_out, csv);
        context.outputs.push_back(args.samples_out);
    }

    finish(context, payload);
    return 0;
}

// ------------------------------------------------------------- variance ----

struct VarianceArgs {
    std::string kind;
    int p = 1;
    std::vector<long long> grid;
    long long replicates = 0;
    std::uint64_t seed = 0;
    bool exact = false;
    std::string out;
    std::string format = "csv";
};

int run_variance(const VarianceArgs& args) {
    patmat::EnsembleKind kind = kind_from_flag(args.kind);
    std::vector<Eigen::Index> grid(args.grid.begin(), args.grid.end());
    patmat::VarianceTable table =
        patmat::variance_convergence(kind, args.p, grid, args.replicates, args.seed);

    std::vector<std::optional<double>> exact_ratio(table.rows.size());
    if (args.exact) {
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            double n = static_cast<double>(table.rows[i].n);
            exact_ratio[i] = patmat::exact_variance(kind, table.rows[i].n, args.p) /
                             std::pow(n, args.p + 1);
        }
    }

    bool alt_columns = false;
    for (const patmat::VarianceRow& row : table.rows) {
        alt_columns = alt_columns || row.limit_ratio_alt.has_value();
    }

    RunContext context;
    context.command = "variance";
    context.parameters = {{"kind", args.kind},
                          {"p", args.p},
                          {"grid", args.grid},
                          {"replicates", args.replicates},
                          {"seed", args.seed},
                          {"exact", args.exact}};
    if (!args.out.empty()) {
        context.out = args.out;
    }

    std::string payload;
    if (args.format == "csv") {
        std::string header = "n,variance_ratio,limit_ratio,relative_gap";
        if (alt_columns) {
            header += ",limit_ratio_alt,relative_gap_alt";
        }
        if (args.exact) {
            header += ",exact_ratio";
        }
        payload = header + "\n";
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const patmat::VarianceRow& row = table.rows[i];
            payload += std::to_string(row.n) + "," + format_double(row.variance_ratio);
            payload += ",";
            if (row.limit_ratio) {
                payload += format_double(*row.limit_ratio);
            }
            payload += ",";
            if (row.relative_gap) {
                payload += format_double(*row.relative_gap);
            }
            if (alt_columns) {
                payload += ",";
                if (row.limit_ratio_alt) {
                    payload += format_double(*row.limit_ratio_alt);
                }
                payload += ",";
                if (row.relative_gap_alt) {
                    payload += format_double(*row.relative_gap_alt);
                }
            }
            if (args.exact) {
                payload += "," + format_double(*exact_ratio[i]);
            }
            payload += "\n";
        }
    } else {
        ordered_json body;
        body["command"] = "variance";
        body["kind"] = args.kind;
        body["p"] = args.p;
        body["replicates"] = args.replicates;
        body["seed"] = args.seed;
        body["gaps_decreasing"] = table.gaps_decreasing;
        body["rows"] = ordered_json::array();
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const patmat::VarianceRow& row = table.rows[i];
            ordered_json item;
            item["n"] = row.n;
            item["variance_ratio"] = row.variance_ratio;
            if (row.limit_ratio) {
                item["limit_ratio"] = *row.limit_ratio;
                item["relative_gap"] = *row.relative_gap;
            }
            if (row.limit_ratio_alt) {
                item["limit_ratio_alt"] = *row.limit_ratio_alt;
                item["relative_gap_alt"] = *row.relative_gap_alt;
            }
            if (exact_ratio[i]) {
                item["exact_ratio"] = *exact_ratio[i];
            }
            body["rows"].push_back(item);
        }
        payload = body.dump(2) + "\n";
    }
    finish(context, payload);
    return 0;
}

// ------------------------------------------------------------ norm-scan ----

struct NormScanArgs {
    std::string kind;
    std::vector<long long> grid;
    long long replicates = 20;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
};

int run_norm_scan(const NormScanArgs& args) {
    patmat::EnsembleKind kind = kind_from_flag(args.kind);
    std::vector<Eigen::Index> grid(args.grid.begin(), args.grid.end());
    std::vector<patmat::NormScanRow> rows =
        patmat::norm_scan(kind, grid, args.replicates, args.seed);

    RunContext context;
    context.command = "norm-scan";
    context.parameters = {{"kind", args.kind},
                          {"grid", args.grid},
                          {"replicates", args.replicates},
                          {"seed", args.seed}};
    if (!args.out.empty()) {
        context.out = args.out;
    }

    std::string payload;
    if (args.format == "csv") {
        payload = "n,replicates,mean_norm,ratio\n";
        for (const patmat::NormScanRow& row : rows) {
            payload += std::to_string(row.n) + "," + std::to_string(row.replicates) + "," +
                       format_double(row.mean_norm) + "," + format_double(row.ratio) + "\n";
        }
    } else {
        ordered_json body;
        body["command"] = "norm-scan";
        body["kind"] = args.kind;
        body["replicates"] = args.replicates;
        body["seed"] = args.seed;
        body["rows"] = ordered_json::array();
        for (const patmat::NormScanRow& row : rows) {
            ordered_json item;
            item["n"] = row.n;
            item["replicates"] = row.replicates;
            item["mean_norm"] = row.mean_norm;
            item["ratio"] = row.ratio;
            body["rows"].push_back(item);
        }
        payload = body.dump(2) + "\n";
    }
    finish(context, payload);
    return 0;
}

// ------------------------------------------------------------- spectrum ----

struct SpectrumArgs {
    std::string kind;
    long long n = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
};

int run_spectrum(const SpectrumArgs& args) {
    patmat::MatrixRealization real =
        patmat::make_realization(kind_from_flag(args.kind), args.n, args.seed);
    patmat::Spectrum spectrum = patmat::spectrum(real);

    RunContext context;
    context.command = "spectrum";
    context.parameters = {{"kind", args.kind}, {"n", args.n}, {"seed", args.seed}};
    if (!args.out.empty()) {
        context.out = args.out;
    }

    std::string payload;
    if (args.format == "csv") {
        payload = "k,real,imag\n";
        for (Eigen::Index k = 1; k <= real.n; ++k) {
            const std::complex<double>& ev = spectrum.eigenvalues[k - 1];
            payload += std::to_string(k) + "," + format_double(ev.real()) + "," +
                       format_double(ev.imag()) + "\n";
        }
    } else {
        ordered_json body;
        body["command"] = "spectrum";
        body["kind"] = args.kind;
        body["n"] = args.n;
        body["seed"] = args.seed;
        body["eigenvalues"] = ordered_json::array();
        for (Eigen::Index k = 0; k < real.n; ++k) {
            const std::complex<double>& ev = spectrum.eigenvalues[k];
            body["eigenvalues"].push_back({ev.real(), ev.imag()});
        }
        payload = body.dump(2) + "\n";
    }
    finish(context, payload);
    return 0;
}

void add_format_option(CLI::App* sub, std::string& format) {
    sub->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
}

std::string& config_sink() {
    static std::string sink;
    return sink;
}

// The argument parser reads config files only on the root command, so the
// subcommands' --config is expanded before parsing: each `key = value` line
// becomes a `--key=value` token unless that flag was already given on the
// command line, which is how explicit flags override the file. Values may be
// quoted; blank lines and lines starting with # are skipped.
std::vector<std::string> expand_config(const std::vector<std::string>& raw) {
    std::string path;
    std::vector<std::string> args;
    std::set<std::string> given;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const std::string& token = raw[i];
        if (token == "--config" && i + 1 < raw.size()) {
            path = raw[i + 1];
            ++i;
            continue;
        }
        if (token.rfind("--config=", 0) == 0) {
            path = token.substr(std::string("--config=").size());
            continue;
        }
        if (token.rfind("--", 0) == 0) {
            given.insert(token.substr(0, token.find('=')));
        }
        args.push_back(token);
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream file(path);
    if (!file) {
        throw std::runtime_error("cannot read config file '" + path + "'");
    }
    auto trim = [](const std::string& text) {
        const char* ws = " \t\r";
        std::size_t begin = text.find_first_not_of(ws);
        std::size_t end = text.find_last_not_of(ws);
        return begin == std::string::npos ? std::string() : text.substr(begin, end - begin + 1);
    };
    std::string line;
    while (std::getline(file, line)) {
        std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#') {
            continue;
        }
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line is not key = value: '" + entry + "'");
        }
        std::string key = trim(entry.substr(0, eq));
        std::string value = trim(entry.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
            value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        if (key.empty()) {
            throw std::runtime_error("config line has an empty key: '" + entry + "'");
        }
        std::string flag = "--" + key;
        if (given.count(flag) > 0) {
            continue;
        }
        args.push_back(flag + "=" + value);
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"patterned gaussian random matrices: closed-form limits, exact oracles, "
                 "and seeded experiments (thread count via PATMAT_THREADS)"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    LimitArgs limit_args;
    CLI::App* limit = app.add_subcommand("limit", "closed-form limiting variance ratios");
    limit->add_option("--config", config_sink(), "flat key = value file mirroring the long flags; explicit flags win");
    limit->add_option("--kind", limit_args.kind, "ensemble kind")->required();
    limit->add_option("--p", limit_args.p,
                      "order (reverse-circulant: half the trace power)")
        ->required()
        ->check(CLI::PositiveNumber);
    limit->add_option("--parity", limit_args.parity, "expected parity branch")
        ->check(CLI::IsMember({"odd", "even", "any"}));
    limit->add_option("--out", limit_args.out, "output file (with manifest sidecar)");
    add_format_option(limit, limit_args.format);

    CountArgs count_args;
    CLI::App* count = app.add_subcommand("count", "cardinality formulas and brute-force oracle");
    count->add_option("--config", config_sink(), "flat key = value file mirroring the long flags; explicit flags win");
    count->add_option("--family", count_args.family, "A, B, or Bk")->required();
    count->add_option("--p", count_args.p, "tuple order")->required()->check(CLI::PositiveNumber);
    count->add_option("--s", count_args.s, "target multiple of n (families A and B)");
    count->add_option("--k", count_args.k, "positive-sign prefix length (family Bk)");
    count->add_option("--n", count_args.n, "dimension")->required()->check(CLI::PositiveNumber);
    count->add_flag("--brute", count_args.brute, "also enumerate and compare");
    count->add_option("--out", count_args.out, "output file (with manifest sidecar)");
    add_format_option(count, count_args.format);

    DensityArgs density_args;
    CLI::App* density = app.add_subcommand("density", "density of a sum of p uniform variables");
    density->add_option("--config", config_sink(), "flat key = value file mirroring the long flags; explicit flags win");
    density->add_option("--p", density_args.p, "number of uniform summands")
        ->required()
        ->check(CLI::PositiveNumber);
    CLI::Option* x_option = density->add_option("--x", density_args.x, "evaluation point");
    density->add_option("--table", density_args.table,
                        "emit a table with this many grid steps over [0, p]")
        ->check(CLI::PositiveNumber);
    density->add_option("--out", density_args.out, "output file (with manifest sidecar)");
    add_format_option(density, density_args.format);

    CltArgs clt_args;
    CLI::App* clt = app.add_subcommand("clt", "replicated trace experiment with diagnostics");
    clt->add_option("--config", config_sink(), "flat key = value file mirroring the long flags; explicit flags win");
    clt->add_option("--kind", clt_args.kind, "ensemble kind")->required();
    clt->add_option("--n", clt_args.n, "dimension")->required()->check(CLI::PositiveNumber);
    clt->add_option("--p", clt_args.p, "matrix power (even for reverse-circulant and hankel)");
    clt->add_flag("--growing-p", clt_args.growing_p, "use the slow-growth power schedule p(n)");
    clt->add_option("--replicates", clt_args.replicates, "number of replicates")
        ->required()
        ->check(CLI::PositiveNumber);
    clt->add_option("--seed", clt_args.seed, "base seed (replicate r uses stream (seed, r))")
        ->required();
    clt->add_option("--out", clt_args.out, "report file (with manifest sidecar)");
    clt->add_option("--samples-out", clt_args.samples_out, "standardized samples CSV");
    add_format_option(clt, clt_args.format);

    VarianceArgs variance_args;
    CLI::App* variance = app.add_subcommand("variance", "variance-ratio convergence table");
    variance->add_option("--config", config_sink(), "flat key = value file mirroring the long flags; explicit flags win");
    variance->add_option("--kind", variance_args.kind, "ensemble kind")->required();
    variance->add_option("--p", variance_args.p, "matrix power")
        ->required()
        ->check(CLI::PositiveNumber);
    variance->add_option("--grid", variance_args.grid, "ascending n values")
        ->required()
        ->delimiter(',');
    variance->add_option("--replicates", variance_args.replicates, "replicates per n")
        ->required()
        ->check(CLI::PositiveNumber);
    variance->add_option("--seed", variance_args.seed, "base seed")->required();
    variance->add_flag("--exact", variance_args.exact,
                       "add the exact Gaussian-moment variance ratio column");
    variance->add_option("--out", variance_args.out, "output file (with manifest sidecar)");
    add_format_option(variance, variance_args.format);

    NormScanArgs norm_args;
    CLI::App* norm_scan = app.add_subcommand("norm-scan", "spectral norm growth scan");
    norm_scan->add_option("--config", config_sink(), "flat key = value file mirroring the long flags; explicit flags win");
    norm_scan->add_option("--kind", norm_args.kind, "ensemble kind")->required();
    norm_scan->add_option("--grid", norm_args.grid, "n values (>= 3)")->required()->delimiter(',');
    norm_scan->add_option("--replicates", norm_args.replicates, "replicates per n")
        ->check(CLI::PositiveNumber);
    norm_scan->add_option("--seed", norm_args.seed, "base seed")->required();
    norm_scan->add_option("--out", norm_args.out, "output file (with manifest sidecar)");
    add_format_option(norm_scan, norm_args.format);

    SpectrumArgs spectrum_args;
    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues of one seeded realization");
    spectrum->add_option("--config", config_sink(), "flat key = value file mirroring the long flags; explicit flags win");
    spectrum->add_option("--kind", spectrum_args.kind, "ensemble kind")->required();
    spectrum->add_option("--n", spectrum_args.n, "dimension")
        ->required()
        ->check(CLI::PositiveNumber);
    spectrum->add_option("--seed", spectrum_args.seed, "input stream seed")->required();
    spectrum->add_option("--out", spectrum_args.out, "output file (with manifest sidecar)");
    add_format_option(spectrum, spectrum_args.format);

    app.name(argc > 0 ? argv[0] : "patmat");
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = expand_config(args);
    } catch (const std::exception& e) {
        std::cerr << "error: code=usage message=\"" << e.what() << "\"\n";
        return 64;
    }
    std::reverse(args.begin(), args.end()); // the parser consumes back to front
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "error: code=usage message=\"" << e.what() << "\"\n";
        return 64;
    }

    try {
        if (limit->parsed()) {
            return run_limit(limit_args);
        }
        if (count->parsed()) {
            return run_count(count_args);
        }
        if (density->parsed()) {
            density_args.has_x = x_option->count() > 0;
            return run_density(density_args);
        }
        if (clt->parsed()) {
            return run_clt(clt_args);
        }
        if (variance->parsed()) {
            return run_variance(variance_args);
        }
        if (norm_scan->parsed()) {
            return run_norm_scan(norm_args);
        }
        if (spectrum->parsed()) {
            return run_spectrum(spectrum_args);
        }
        std::cerr << "error: code=usage message=\"no subcommand selected\"\n";
        return 64;
    } catch (const patmat::Error& e) {
        std::cerr << "error: code=" << e.code() << " message=\"" << e.what() << "\"\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: code=internal message=\"" << e.what() << "\"\n";
        return 70;
    }
}
