#include "recdev/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "recdev/error.hpp"
#include "recdev/law_io.hpp"
#include "recdev/montecarlo.hpp"
#include "recdev/oracle.hpp"
#include "recdev/rates.hpp"
#include "recdev/verify.hpp"

namespace recdev::cli {

using nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxReportedOracle = 2000;

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    return fmt::format("{:.17g}", x);
}

/// Doubles go through num() so CSV and JSON print identical digits.
ordered_json jnum(double x) {
    if (!std::isfinite(x)) return num(x);
    return x;
}

struct Options {
    std::string law = "ssrw_right";
    std::string format = "csv";
    std::string output;
    double x = 1.0;
    bool fit = false;
    std::size_t n = 100;
    std::optional<std::size_t> kmax;
    std::uint64_t paths = 100'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::vector<std::size_t> n_list{100, 200, 400, 800, 1600};
    std::string table_kind;
    std::string rate_kind;
    bool quick = false;
    bool emit_json = false;
    bool law_given = false;
};

/// Metadata printed ahead of every artifact.
class Provenance {
public:
    Provenance(std::string command, StepLaw const* law) : command_(std::move(command)) {
        if (law != nullptr) law_ = law_to_json(*law);
    }
    void add(std::string key, std::string value) { params_.emplace_back(std::move(key), std::move(value)); }

    void write_csv(std::ostream& out) const {
        out << "# recdev " << kVersion << '\n';
        out << "# command: " << command_ << '\n';
        if (!law_.empty()) out << "# law: " << law_ << '\n';
        for (auto const& [k, v] : params_) out << "# " << k << ": " << v << '\n';
    }

    [[nodiscard]] ordered_json json() const {
        ordered_json j;
        j["tool"] = "recdev";
        j["version"] = kVersion;
        j["command"] = command_;
        if (!law_.empty()) j["law"] = ordered_json::parse(law_);
        ordered_json params = ordered_json::object();
        for (auto const& [k, v] : params_) params[k] = v;
        j["parameters"] = params;
        return j;
    }

private:
    std::string command_;
    std::string law_;
    std::vector<std::pair<std::string, std::string>> params_;
};

void emit_json(std::ostream& out, Provenance const& prov, ordered_json body) {
    ordered_json doc;
    doc["provenance"] = prov.json();
    for (auto& [k, v] : body.items()) doc[k] = v;
    out << doc.dump(2) << '\n';
}

void write_rows(std::ostream& out, Provenance const& prov, std::vector<std::string> const& header,
                std::vector<std::vector<std::string>> const& rows) {
    prov.write_csv(out);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (auto const& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

// ---------------------------------------------------------------- validate

int cmd_validate(Options const& o, std::ostream& out) {
    StepLaw const law = load_law(o.law);
    if (o.emit_json) {
        out << law_to_json(law) << '\n';
        return kExitOk;
    }
    Provenance prov("validate", &law);
    std::vector<std::pair<std::string, std::string>> fields;
    fields.emplace_back("side", std::string(to_string(law.side())));
    fields.emplace_back("kind", std::string(to_string(law.kind())));
    fields.emplace_back("q", num(law.q()));
    fields.emplace_back("p0", num(law.p0()));
    fields.emplace_back("phi_prime_1", num(law.pgf(1.0, 1)));
    if (law.kind() == LawKind::Finite) {
        std::string p;
        for (std::size_t i = 0; i < law.p().size(); ++i) p += (i ? ";" : "") + num(law.p()[i]);
        fields.emplace_back("p", p);
        fields.emplace_back("sigma2", num(*law.phi_second_at_one()));
    } else {
        fields.emplace_back("gamma", num(law.gamma()));
        fields.emplace_back("beta", num(law.beta()));
    }
    try {
        HParams const hp = assumption_h_exact(law);
        fields.emplace_back("alpha", num(hp.alpha));
        fields.emplace_back("c", num(hp.c));
        fields.emplace_back("h_source", std::string(to_string(hp.source)));
    } catch (Error const& e) {
        if (e.code() != Errc::NoClosedForm) throw;
        fields.emplace_back("h_source", "none");
    }
    if (o.format == "json") {
        ordered_json body;
        ordered_json report = ordered_json::object();
        for (auto const& [k, v] : fields) report[k] = v;
        body["valid"] = true;
        body["report"] = report;
        emit_json(out, prov, body);
    } else {
        std::vector<std::vector<std::string>> rows;
        for (auto const& [k, v] : fields) rows.push_back({k, v});
        write_rows(out, prov, {"field", "value"}, rows);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- rate

int cmd_rate(Options const& o, std::ostream& out) {
    StepLaw const law = load_law(o.law);
    Provenance prov(fmt::format("rate {}", o.rate_kind), &law);
    prov.add("x", num(o.x));
    RateResult result;
    std::optional<HParams> hp;
    if (o.rate_kind == "ldp") {
        result = ldp_rate(law, o.x);
    } else {
        hp = o.fit ? assumption_h_fit(law) : assumption_h_exact(law);
        prov.add("fit", o.fit ? "true" : "false");
        result = mdp_rate(law, o.x, *hp);
    }
    if (o.format == "json") {
        ordered_json body;
        body["regime"] = std::string(to_string(result.regime));
        body["side"] = std::string(to_string(result.side));
        body["x"] = jnum(o.x);
        body["value"] = jnum(result.value);
        body["threshold_exponents"] = {jnum(result.threshold_exponents.first),
                                       jnum(result.threshold_exponents.second)};
        if (hp) {
            body["alpha"] = jnum(hp->alpha);
            body["c"] = jnum(hp->c);
            body["h_source"] = std::string(to_string(hp->source));
            if (hp->fit_r2) body["fit_r2"] = jnum(*hp->fit_r2);
        }
        emit_json(out, prov, body);
        return kExitOk;
    }
    std::vector<std::string> row{std::string(to_string(result.regime)), std::string(to_string(result.side)),
                                 num(o.x), num(result.value), num(result.threshold_exponents.first),
                                 num(result.threshold_exponents.second)};
    std::vector<std::string> header{"regime", "side", "x", "value", "exponent_n", "exponent_cn"};
    if (hp) {
        header.insert(header.end(), {"alpha", "c", "h_source"});
        row.insert(row.end(), {num(hp->alpha), num(hp->c), std::string(to_string(hp->source))});
    }
    write_rows(out, prov, header, {row});
    return kExitOk;
}

// ---------------------------------------------------------------- dist

std::vector<std::string> scaled_columns(ScaledValue v) {
    return {num(v.mantissa), fmt::format("{}", v.exponent2), to_decimal_string(v)};
}

int cmd_dist(Options const& o, std::ostream& out) {
    StepLaw const law = load_law(o.law);
    std::size_t const kmax = o.kmax.value_or(o.n);
    TailTable const table = record_tail_exact(law, o.n, kmax);
    Provenance prov("dist", &law);
    prov.add("n", fmt::format("{}", o.n));
    prov.add("kmax", fmt::format("{}", table.kmax()));
    prov.add("threshold", "tail[k] = P(A_n >= k)");
    if (o.format == "json") {
        ordered_json rows = ordered_json::array();
        for (std::size_t k = 0; k <= table.kmax(); ++k) {
            ScaledValue const v = table.tail[k];
            rows.push_back({{"k", k}, {"mantissa", jnum(v.mantissa)}, {"exponent2", v.exponent2},
                            {"probability", to_decimal_string(v)}});
        }
        ordered_json body;
        body["n"] = o.n;
        body["mass_defect"] = jnum(table.mass_defect);
        body["tail"] = rows;
        emit_json(out, prov, body);
        return kExitOk;
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k <= table.kmax(); ++k) {
        std::vector<std::string> row{fmt::format("{}", k)};
        auto cols = scaled_columns(table.tail[k]);
        row.insert(row.end(), cols.begin(), cols.end());
        rows.push_back(std::move(row));
    }
    write_rows(out, prov, {"k", "mantissa", "exponent2", "probability"}, rows);
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(Options const& o, std::ostream& out) {
    StepLaw const law = load_law(o.law);
    SimConfig const cfg{law, o.n, o.paths, o.seed, o.workers};
    SimResult const result = empirical_pmf(cfg);
    Provenance prov("simulate", &law);
    prov.add("n", fmt::format("{}", o.n));
    prov.add("paths", fmt::format("{}", o.paths));
    prov.add("seed", fmt::format("{}", o.seed));
    prov.add("violations", fmt::format("{}", result.violations));

    std::optional<double> tv;
    if (o.n <= kMaxReportedOracle) {
        TailTable const table = record_tail_exact(law, o.n);
        std::vector<double> reference;
        for (auto const& p : table.pmf) reference.push_back(p.to_double());
        tv = total_variation(result.empirical_pmf(), reference);
        prov.add("tv_distance", num(*tv));
    }

    if (o.format == "json") {
        ordered_json estimates = ordered_json::array();
        for (std::size_t k = 0; k <= o.n; ++k) {
            TailEstimate const e = result.tail(k);
            estimates.push_back({{"k", k}, {"count", result.histogram[k]}, {"tail", jnum(e.estimate)},
                                 {"lower", jnum(e.lower)}, {"upper", jnum(e.upper)}});
        }
        ordered_json body;
        body["paths"] = result.paths;
        body["violations"] = result.violations;
        body["tv_distance"] = tv ? jnum(*tv) : ordered_json(nullptr);
        body["estimates"] = estimates;
        emit_json(out, prov, body);
        return kExitOk;
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k <= o.n; ++k) {
        TailEstimate const e = result.tail(k);
        rows.push_back({fmt::format("{}", k), fmt::format("{}", result.histogram[k]), num(e.estimate), num(e.lower),
                        num(e.upper)});
    }
    write_rows(out, prov, {"k", "count", "tail", "lower95", "upper95"}, rows);
    return kExitOk;
}

// ---------------------------------------------------------------- table

int cmd_table(Options const& o, std::ostream& out) {
    StepLaw const law = load_law(o.law);
    std::vector<ConvergenceRow> const rows = convergence_table(law, o.x, o.n_list);
    Provenance prov("table ldp-convergence", &law);
    prov.add("x", num(o.x));
    prov.add("threshold", "k = ceil(x n)");
    if (o.format == "json") {
        ordered_json arr = ordered_json::array();
        for (auto const& r : rows) {
            arr.push_back({{"n", r.n}, {"k", r.k}, {"mantissa", jnum(r.probability.mantissa)},
                           {"exponent2", r.probability.exponent2}, {"probability", to_decimal_string(r.probability)},
                           {"neg_log_rate", jnum(r.neg_log_rate)}, {"ldp_rate", jnum(r.ldp_rate)}});
        }
        ordered_json body;
        body["rows"] = arr;
        emit_json(out, prov, body);
        return kExitOk;
    }
    std::vector<std::vector<std::string>> table;
    for (auto const& r : rows) {
        std::vector<std::string> row{fmt::format("{}", r.n), fmt::format("{}", r.k)};
        auto cols = scaled_columns(r.probability);
        row.insert(row.end(), cols.begin(), cols.end());
        row.push_back(num(r.neg_log_rate));
        row.push_back(num(r.ldp_rate));
        table.push_back(std::move(row));
    }
    write_rows(out, prov, {"n", "k", "mantissa", "exponent2", "probability", "neg_log_rate", "ldp_rate"}, table);
    return kExitOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(Options const& o, std::ostream& out) {
    std::vector<std::pair<std::string, StepLaw>> laws;
    if (o.law_given) {
        laws.emplace_back(o.law, load_law(o.law));
    } else {
        laws = builtin_fixture_laws();
    }
    out << "# recdev " << kVersion << '\n';
    out << "# command: verify" << (o.quick ? " --quick" : "") << '\n';
    auto const results = run_invariant_suite(laws, o.quick, &out);
    std::size_t failed = 0;
    for (auto const& r : results) failed += r.passed ? 0 : 1;
    out << fmt::format("{} checks, {} failed\n", results.size(), failed);
    return failed == 0 ? kExitOk : kExitVerification;
}

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Record-count deviations for skip-free critical random walks", "recdev"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Options o;

    auto add_law = [&](CLI::App* sub) {
        sub->add_option("--law", o.law, "builtin name or path to a JSON law file")
            ->each([&](std::string const&) { o.law_given = true; });
    };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output,-o", o.output, "write to this file instead of standard output");
    };

    auto* validate = app.add_subcommand("validate", "validate a law and print its report");
    add_law(validate);
    add_format(validate);
    validate->add_flag("--emit-json", o.emit_json, "print the canonical JSON law only");

    auto* rate = app.add_subcommand("rate", "LDP or MDP rate constant");
    rate->add_option("kind", o.rate_kind, "ldp or mdp")->required()->check(CLI::IsMember({"ldp", "mdp"}));
    add_law(rate);
    add_format(rate);
    rate->add_option("--x", o.x, "deviation level")->required();
    rate->add_flag("--fit", o.fit, "estimate (alpha, c) numerically");

    auto* dist = app.add_subcommand("dist", "exact tail P(A_n >= k)");
    add_law(dist);
    add_format(dist);
    dist->add_option("--n", o.n, "horizon")->required()->check(CLI::Range(std::size_t{1}, kMaxOracleHorizon));
    dist->add_option("--kmax", o.kmax, "largest k");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo histogram of A_n");
    add_law(simulate);
    add_format(simulate);
    simulate->add_option("--n", o.n, "horizon")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--paths", o.paths, "number of paths")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", o.seed, "64-bit seed")->required();
    simulate->add_option("--workers", o.workers, "threads (0 = all; capped by RD_THREADS)");

    auto* table = app.add_subcommand("table", "convergence tables");
    table->add_option("kind", o.table_kind, "ldp-convergence")->required()->check(CLI::IsMember({"ldp-convergence"}));
    add_law(table);
    add_format(table);
    table->add_option("--x", o.x, "fraction x in (0, 1]; threshold k = ceil(x n)")->required();
    table->add_option("--n-list", o.n_list, "horizons")->delimiter(',');

    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    add_law(verify);
    verify->add_flag("--quick", o.quick, "smaller horizons and path counts");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return kExitOk;
    } catch (CLI::CallForVersion const&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (CLI::ParseError const& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::ofstream file;
    if (!o.output.empty()) {
        file.open(o.output);
        if (!file) {
            err << "error: cannot open " << o.output << '\n';
            return kExitUsage;
        }
    }
    std::ostream& sink = o.output.empty() ? out : file;
    try {
        if (validate->parsed()) return cmd_validate(o, sink);
        if (rate->parsed()) return cmd_rate(o, sink);
        if (dist->parsed()) return cmd_dist(o, sink);
        if (simulate->parsed()) return cmd_simulate(o, sink);
        if (table->parsed()) return cmd_table(o, sink);
        if (verify->parsed()) return cmd_verify(o, sink);
    } catch (Error const& e) {
        err << "error: " << e.what() << '\n';
        bool const about_law = e.is_validation() || e.code() == Errc::NoClosedForm || e.code() == Errc::FitFailed;
        return about_law ? kExitValidation : kExitUsage;
    }
    return kExitUsage;
}

}  // namespace recdev::cli
