// cli.hpp: batch driver behind the `pfwcl` executable.
//
// Every run resolves a RunConfig (defaults < --config file < command-line flags),
// echoes it into the output, then streams rows one at a time.
// Exit codes: 0 ok, 2 configuration/assumption error, 3 numerical failure.

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pfwcl/energy.hpp"
#include "pfwcl/errors.hpp"
#include "pfwcl/fockdesk.hpp"
#include "pfwcl/formfactor.hpp"
#include "pfwcl/hermite.hpp"
#include "pfwcl/parallel.hpp"
#include "pfwcl/scan.hpp"
#include "pfwcl/wienerhopf.hpp"

namespace pfwcl::cli {

using nlohmann::json;

enum class ParamKind { Number, Integer, List, Modes };

struct ParamSpec {
    std::string name;
    ParamKind kind;
    json fallback;  // null = optional and absent
    std::string help;
};

inline const std::map<std::string, std::vector<ParamSpec>>& param_table() {
    static const std::map<std::string, std::vector<ParamSpec>> table = {
        {"energy",
         {{"kappa-list", ParamKind::List, json::array({1.0}), "coupling values"},
          {"p-list", ParamKind::List, json::array({0.0}), "total momenta"}}},
        {"cutoff-scan", {{"lambda", ParamKind::List, json::array({1e2, 1e4, 1e6}), "cutoff values"}}},
        {"wiener-hopf",
         {{"T", ParamKind::Number, 20.0, "horizon"},
          {"nodes", ParamKind::Number, 40.0, "quadrature nodes per unit T"},
          {"kappa", ParamKind::Number, 1.0, "coupling"},
          {"p", ParamKind::Number, 0.0, "momentum for the vacuum rate"},
          {"T-ladder", ParamKind::List, json::array(), "increasing horizons (overrides --T)"}}},
        {"fock",
         {{"modes", ParamKind::Modes, "1:1:0.6,2:2:-0.6", "modes as w:W:q,..."},
          {"ntot", ParamKind::Integer, 40, "total occupation cutoff"},
          {"kappa-list", ParamKind::List, json::array({1.0, 2.0, 4.0, 8.0}), "coupling values"},
          {"p-list", ParamKind::List, json::array({0.2}), "total momenta"},
          {"epsilon", ParamKind::Number, 1.0, "interpolation parameter in [0,1]"},
          {"T", ParamKind::Number, json(), "semigroup horizon (adds semigroup_res)"}}},
        {"hermite-check", {}},
        {"validate", {}},
    };
    return table;
}

inline const std::vector<std::string> kMeasureSubcommands = {"energy", "wiener-hopf", "validate"};

inline json default_measure() {
    return {{"dimension", 3}, {"profile", {{"type", "point_masses"}, {"atoms", json::array({{{"omega", 1.0}, {"weight", 3.0}}})}}}};
}

namespace detail {

inline double parse_number(const std::string& text, const std::string& where) {
    std::string s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError(where + ": cannot parse number '" + text + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline json parse_modes_text(const std::string& text, const std::string& where) {
    json arr = json::array();
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 3) throw ConfigError(where + ": mode '" + item + "' is not of the form w:W:q");
        arr.push_back({{"omega", parse_number(parts[0], where)},
                       {"weight", parse_number(parts[1], where)},
                       {"q", parse_number(parts[2], where)}});
    }
    if (arr.empty()) throw ConfigError(where + ": no modes given");
    return arr;
}

/// Canonical JSON value of a parameter given either as JSON or as command-line text.
inline json normalize(const ParamSpec& spec, const json& raw, const std::string& where) {
    switch (spec.kind) {
    case ParamKind::Number:
        if (raw.is_number()) return raw.get<double>();
        if (raw.is_string()) return parse_number(raw.get<std::string>(), where);
        break;
    case ParamKind::Integer: {
        double v = 0.0;
        if (raw.is_number()) v = raw.get<double>();
        else if (raw.is_string()) v = parse_number(raw.get<std::string>(), where);
        else break;
        if (v != std::floor(v)) throw ConfigError(where + ": expected an integer");
        return static_cast<long long>(v);
    }
    case ParamKind::List: {
        json out = json::array();
        if (raw.is_array()) {
            for (const auto& v : raw) {
                if (!v.is_number()) throw ConfigError(where + ": list entries must be numbers");
                out.push_back(v.get<double>());
            }
            return out;
        }
        if (raw.is_number()) return json::array({raw.get<double>()});
        if (raw.is_string()) {
            const auto text = raw.get<std::string>();
            if (text.empty()) return out;
            for (const auto& item : split(text, ',')) out.push_back(parse_number(item, where));
            return out;
        }
        break;
    }
    case ParamKind::Modes:
        if (raw.is_string()) return parse_modes_text(raw.get<std::string>(), where);
        if (raw.is_array()) {
            json out = json::array();
            for (const auto& m : raw) {
                pfwcl::detail::reject_unknown(m, {"omega", "weight", "q"}, where + "[]");
                out.push_back({{"omega", pfwcl::detail::require<double>(m, "omega", where)},
                               {"weight", pfwcl::detail::require<double>(m, "weight", where)},
                               {"q", m.contains("q") ? pfwcl::detail::require<double>(m, "q", where) : 0.0}});
            }
            return out;
        }
        break;
    }
    throw ConfigError(where + ": wrong value type");
}

inline std::vector<double> as_list(const json& j) { return j.get<std::vector<double>>(); }

inline std::vector<Mode> as_modes(const json& j) {
    std::vector<Mode> modes;
    for (const auto& m : j) modes.push_back({m.at("omega").get<double>(), m.at("weight").get<double>(), m.at("q").get<double>()});
    return modes;
}

}  // namespace detail

/// Streams rows as CSV (with a `# config:` comment line) or as a JSON document.
class RowWriter {
public:
    RowWriter(std::ostream& os, std::string format, const json& config, std::vector<std::string> columns)
        : os_(os), format_(std::move(format)), columns_(std::move(columns)) {
        if (format_ == "csv") {
            os_ << "# config: " << config.dump() << '\n';
            write_csv_header(os_, columns_);
        } else {
            os_ << "{\"config\":" << config.dump() << ",\"columns\":" << json(columns_).dump() << ",\"rows\":[";
        }
        os_.flush();
    }

    void row(const ScanRecord& r) {
        if (format_ == "csv") {
            write_csv_row(os_, r, columns_);
        } else {
            os_ << (rows_ ? ",\n" : "\n") << to_json(r, columns_).dump();
        }
        ++rows_;
        os_.flush();
    }

    void finish() {
        if (format_ == "json") os_ << "\n]}\n";
        os_.flush();
    }

private:
    std::ostream& os_;
    std::string format_;
    std::vector<std::string> columns_;
    std::size_t rows_ = 0;
};

struct Resolved {
    json config;  // echoed verbatim
    unsigned jobs = 1;
};

namespace detail {

inline int run_energy(const Resolved& rc, std::ostream& os) {
    const RadialMeasure ff = measure_from_json(rc.config.at("measure"));
    const auto& params = rc.config.at("params");
    const auto kappas = as_list(params.at("kappa-list"));
    const auto ps = as_list(params.at("p-list"));
    for (double k : kappas)
        if (!(k >= 0.0)) throw ConfigError("energy: kappa values must be nonnegative");
    const EnergyResult base = ground_energy(ff);
    const auto* sharp = std::get_if<SharpCutoff>(&ff.profile());

    RowWriter w(os, rc.config.at("output").at("format"), rc.config,
                {"lambda", "kappa", "p", "calE", "log_spectral", "E_over_lambda_1p5", "dispersion"});
    ordered_parallel_for(
        kappas.size() * ps.size(), rc.jobs,
        [&](std::size_t i) {
            const double kappa = kappas[i / ps.size()];
            const double p = ps[i % ps.size()];
            ScanRecord r;
            if (sharp) r.set("lambda", sharp->lambda);
            r.set("kappa", kappa).set("p", p).set("calE", base.calE);
            r.set("log_spectral", log_spectral_energy(ff, kappa));
            if (sharp) r.set("E_over_lambda_1p5", base.calE / std::pow(sharp->lambda, 1.5));
            r.set("dispersion", dipole_dispersion(ff, kappa, p));
            return r;
        },
        [&](std::size_t, ScanRecord&& r) { w.row(r); });
    w.finish();
    return 0;
}

inline int run_cutoff_scan(const Resolved& rc, std::ostream& os) {
    const auto lambdas = as_list(rc.config.at("params").at("lambda"));
    if (lambdas.empty()) throw ConfigError("cutoff-scan: empty lambda list");
    for (double l : lambdas)
        if (!(l > 0.0)) throw ConfigError("cutoff-scan: lambda values must be positive");
    RowWriter w(os, rc.config.at("output").at("format"), rc.config,
                {"lambda", "kappa", "calE", "E_over_lambda_1p5", "I1", "I2"});
    ordered_parallel_for(
        lambdas.size(), rc.jobs,
        [&](std::size_t i) {
            const double lambda = lambdas[i];
            const double e = cutoff_energy_3d(lambda);
            ScanRecord r;
            r.set("lambda", lambda).set("kappa", 1.0).set("calE", e).set("E_over_lambda_1p5", e / std::pow(lambda, 1.5));
            if (lambda > 1.0) {
                const CutoffSplit s = cutoff_split_I1_I2(lambda);
                r.set("I1", s.I1).set("I2", s.I2);
            }
            return r;
        },
        [&](std::size_t, ScanRecord&& r) { w.row(r); });
    w.finish();
    return 0;
}

inline int run_wiener_hopf(const Resolved& rc, std::ostream& os) {
    const RadialMeasure ff = measure_from_json(rc.config.at("measure"));
    const auto& params = rc.config.at("params");
    const double kappa = params.at("kappa").get<double>();
    const double p = params.at("p").get<double>();
    const double density = params.at("nodes").get<double>();
    if (!(kappa >= 0.0)) throw ConfigError("wiener-hopf: kappa must be nonnegative");
    if (!(density > 0.0)) throw ConfigError("wiener-hopf: nodes must be positive");
    std::vector<double> Ts = as_list(params.at("T-ladder"));
    if (Ts.empty()) Ts.push_back(params.at("T").get<double>());
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        if (!(Ts[i] > 0.0)) throw ConfigError("wiener-hopf: horizons must be positive");
        if (i > 0 && !(Ts[i] > Ts[i - 1])) throw ConfigError("wiener-hopf: T ladder must be increasing");
    }
    const double ak_target = log_spectral_energy(ff, kappa);
    const double mass_target = 1.0 / moment_report(ff).m_eff;

    RowWriter w(os, rc.config.at("output").at("format"), rc.config,
                {"T", "n", "logdet_per_T", "ak_target", "ak_dev", "mass_fn", "mass_target", "mass_dev", "vacuum_rate"});
    ordered_parallel_for(
        Ts.size(), rc.jobs,
        [&](std::size_t i) {
            const double T = Ts[i];
            const std::size_t n = default_node_count(T, density);
            const WienerHopfGrid grid(ff, kappa, T, n);
            const double ld = log_det(grid) / T;
            const double mf = mass_functional(grid);
            ScanRecord r;
            r.set("T", T).set("n", static_cast<double>(n));
            r.set("logdet_per_T", ld).set("ak_target", ak_target).set("ak_dev", ld - ak_target);
            r.set("mass_fn", mf).set("mass_target", mass_target).set("mass_dev", mf - mass_target);
            r.set("vacuum_rate", -std::log(vacuum_amplitude(grid, p)) / T);
            return r;
        },
        [&](std::size_t, ScanRecord&& r) { w.row(r); });
    w.finish();
    return 0;
}

inline int run_fock(const Resolved& rc, std::ostream& os) {
    const auto& params = rc.config.at("params");
    const FiberOperators ops(build_basis(as_modes(params.at("modes")), static_cast<int>(params.at("ntot").get<long long>())));
    WclScanOptions opt;
    opt.epsilon = params.at("epsilon").get<double>();
    opt.jobs = rc.jobs;
    if (!params.at("T").is_null()) opt.semigroup_T = params.at("T").get<double>();
    const auto kappas = as_list(params.at("kappa-list"));
    const auto ps = as_list(params.at("p-list"));

    RowWriter w(os, rc.config.at("output").at("format"), rc.config,
                {"kappa", "p", "epsilon", "E_p", "E_0", "gap", "target", "gap_dev", "E0_dev", "semigroup_res"});
    wcl_scan(ops, kappas, ps, opt, [&](ScanRecord&& r) { w.row(r); });
    w.finish();
    return 0;
}

inline int run_hermite_check(const Resolved& rc, std::ostream& os, std::ostream& err) {
    const auto seed = rc.config.at("seed").get<std::uint64_t>();
    const auto checks = run_hermite_checks(seed);
    bool all = true;
    const std::string format = rc.config.at("output").at("format");
    if (format == "json") {
        json arr = json::array();
        for (const auto& c : checks) {
            arr.push_back({{"name", c.name}, {"value", std::isfinite(c.value) ? json(c.value) : json()},
                           {"threshold", c.threshold}, {"passed", c.passed}, {"detail", c.detail}});
            all = all && c.passed;
        }
        os << json{{"config", rc.config}, {"checks", arr}, {"passed", all}}.dump(2) << '\n';
    } else {
        os << "# config: " << rc.config.dump() << '\n' << "name,value,threshold,passed\n";
        for (const auto& c : checks) {
            os << c.name << ',' << format_double(c.value) << ',' << format_double(c.threshold) << ','
               << (c.passed ? "true" : "false") << '\n';
            all = all && c.passed;
        }
    }
    os.flush();
    if (!all) {
        for (const auto& c : checks)
            if (!c.passed) err << "hermite-check: check '" << c.name << "' failed: " << c.detail << '\n';
        return 3;
    }
    return 0;
}

inline int run_validate(const Resolved& rc, std::ostream& os, std::ostream& err) {
    const auto [d, profile] = parse_measure(rc.config.at("measure"));
    const AssumptionReport rep = validate_assumptions(d, profile);
    const double pf = std::holds_alternative<PointMasses>(profile) ? 1.0 : static_cast<double>(d - 1) / d;
    ScanRecord r;
    r.set("dimension", d);
    r.set("m_plus1", pfwcl::detail::raw_moment(d, profile, 1));
    r.set("m_minus1", pfwcl::detail::raw_moment(d, profile, -1));
    const double m2 = pfwcl::detail::raw_moment(d, profile, -2);
    r.set("m_minus2", m2);
    const double m3 = pfwcl::detail::raw_moment(d, profile, -3);
    r.set("m_minus3", m3);
    r.set("ir_regular", std::isfinite(m3) ? 1.0 : 0.0);
    r.set("delta_m", pf * m2).set("m_eff", 1.0 + pf * m2);
    r.set("a2_ok", rep.ok() ? 1.0 : 0.0);
    RowWriter w(os, rc.config.at("output").at("format"), rc.config,
                {"dimension", "m_plus1", "m_minus1", "m_minus2", "m_minus3", "ir_regular", "delta_m", "m_eff", "a2_ok"});
    w.row(r);
    w.finish();
    if (!rep.ok()) {
        for (const auto& f : rep.failures) err << "Assumption a2 violated: " << f << '\n';
        return 2;
    }
    return 0;
}

}  // namespace detail

/// Merges defaults, the config file and explicit flags into the echoed RunConfig.
inline json resolve_config(const std::string& subcommand, const json& file_config,
                           const std::map<std::string, std::string>& flag_params,
                           const std::optional<std::string>& out_path, const std::optional<std::string>& out_format,
                           const std::optional<std::uint64_t>& seed) {
    pfwcl::detail::reject_unknown(file_config, {"subcommand", "measure", "params", "output", "seed"}, "config");
    const auto& table = param_table();
    const auto& specs = table.at(subcommand);

    json params = json::object();
    for (const auto& s : specs) params[s.name] = s.fallback;
    if (file_config.contains("params")) {
        const auto& fp = file_config.at("params");
        if (!fp.is_object()) throw ConfigError("config.params: expected a JSON object");
        for (const auto& item : fp.items()) {
            auto it = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == item.key(); });
            if (it == specs.end()) throw ConfigError("config.params: unknown key '" + item.key() + "' for " + subcommand);
            params[item.key()] = item.value().is_null() ? json() : detail::normalize(*it, item.value(), "params." + item.key());
        }
    }
    for (const auto& [name, text] : flag_params) {
        auto it = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == name; });
        params[name] = detail::normalize(*it, json(text), "--" + name);
    }
    for (const auto& s : specs) {
        if (!params[s.name].is_null()) params[s.name] = detail::normalize(s, params[s.name], "params." + s.name);
    }

    json measure;
    const bool uses_measure =
        std::find(kMeasureSubcommands.begin(), kMeasureSubcommands.end(), subcommand) != kMeasureSubcommands.end();
    if (uses_measure) {
        measure = file_config.contains("measure") ? file_config.at("measure") : default_measure();
        auto [d, profile] = parse_measure(measure);
        measure = {{"dimension", d}, {"profile", profile_to_json(profile)}};
    }

    json output = {{"path", "-"}, {"format", subcommand == "hermite-check" ? "json" : "csv"}};
    if (file_config.contains("output")) {
        const auto& fo = file_config.at("output");
        pfwcl::detail::reject_unknown(fo, {"path", "format"}, "config.output");
        if (fo.contains("path")) output["path"] = pfwcl::detail::require<std::string>(fo, "path", "config.output");
        if (fo.contains("format")) output["format"] = pfwcl::detail::require<std::string>(fo, "format", "config.output");
    }
    if (out_path) output["path"] = *out_path;
    if (out_format) output["format"] = *out_format;
    if (output["format"] != "csv" && output["format"] != "json")
        throw ConfigError("output.format must be 'csv' or 'json'");

    std::uint64_t s = 42;
    if (file_config.contains("seed")) s = pfwcl::detail::require<std::uint64_t>(file_config, "seed", "config");
    if (seed) s = *seed;

    return {{"subcommand", subcommand}, {"measure", measure}, {"params", params}, {"output", output}, {"seed", s}};
}

inline json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Dipole and fiber-Hamiltonian numerics: energies, Wiener-Hopf determinants, Fock-space scans"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> out_path, out_format;
    std::optional<std::uint64_t> seed;
    unsigned jobs = default_jobs();
    app.add_option("--config", config_path, "JSON RunConfig file");
    app.add_option("--output", out_path, "output path, '-' for stdout");
    app.add_option("--format", out_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--jobs", jobs, "worker threads (default PF_WCL_JOBS or 1)")->check(CLI::PositiveNumber);

    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, specs] : param_table()) {
        static const std::map<std::string, std::string> about = {
            {"energy", "ground energy, log-spectral energy and dipole dispersion of a measure"},
            {"cutoff-scan", "E(lambda)/lambda^1.5 and the I1/I2 split for the 3d sharp cutoff"},
            {"wiener-hopf", "Nystrom log-determinant, mass functional and vacuum rate on [0,T]"},
            {"fock", "truncated Fock-space scan of fiber ground energies and gaps"},
            {"hermite-check", "pass/fail report for the Hermite polynomial identities"},
            {"validate", "moment report and square-integrability check of a measure"},
        };
        CLI::App* sub = app.add_subcommand(name, about.at(name));
        subs[name] = sub;
        for (const auto& s : specs) {
            sub->add_option_function<std::string>("--" + s.name, [&raw, n = name, p = s.name](const std::string& v) { raw[n][p] = v; },
                                                  s.help);
        }
    }
    subs["hermite-check"]->add_option("--seed", seed, "seed for the random symmetric matrix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        json file_config = json::object();
        if (!config_path.empty()) file_config = load_config_file(config_path);
        if (!file_config.is_object()) throw ConfigError("config: expected a JSON object");

        std::string subcommand;
        for (const auto& [name, sub] : subs)
            if (sub->parsed()) subcommand = name;
        if (file_config.contains("subcommand")) {
            const auto from_file = pfwcl::detail::require<std::string>(file_config, "subcommand", "config");
            if (!param_table().contains(from_file)) throw ConfigError("config: unknown subcommand '" + from_file + "'");
            if (!subcommand.empty() && subcommand != from_file)
                throw ConfigError("config: subcommand '" + from_file + "' conflicts with '" + subcommand + "'");
            subcommand = from_file;
        }
        if (subcommand.empty()) throw ConfigError("no subcommand given (use --help)");

        Resolved rc;
        rc.config = resolve_config(subcommand, file_config, raw[subcommand], out_path, out_format, seed);
        rc.jobs = jobs;

        const std::string path = rc.config.at("output").at("path");
        std::unique_ptr<std::ofstream> file;
        if (path != "-") {
            file = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
            if (!*file) throw ConfigError("cannot open output file '" + path + "'");
        }
        std::ostream& os = file ? static_cast<std::ostream&>(*file) : out;

        if (subcommand == "energy") return detail::run_energy(rc, os);
        if (subcommand == "cutoff-scan") return detail::run_cutoff_scan(rc, os);
        if (subcommand == "wiener-hopf") return detail::run_wiener_hopf(rc, os);
        if (subcommand == "fock") return detail::run_fock(rc, os);
        if (subcommand == "hermite-check") return detail::run_hermite_check(rc, os, err);
        return detail::run_validate(rc, os, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure in " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace pfwcl::cli
