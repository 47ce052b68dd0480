#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "clonesim/analysis.hpp"
#include "clonesim/cloners.hpp"
#include "clonesim/report.hpp"
#include "clonesim/version.hpp"
#include "clonesim/witness.hpp"

namespace clonesim::cli {

/// Raised for invalid invocations; maps to exit status 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Everything a command needs. Angles are rational multiples of π.
struct RunConfig {
    std::string command;
    std::vector<std::string> models;
    int tau = 2;
    std::vector<int> Ns;
    report::PiFraction theta_a{1, 2};
    report::PiFraction phi_a{0, 1};
    report::PiFraction theta_b{1, 2};
    report::PiFraction phi_b{0, 1};
    std::vector<int> sigmas;
    std::string output;
    std::string format = "csv";
    double gain = 0.0;
    int cutoff = 40;
    std::string figure;
    bool allow_approx_N = false;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline nlohmann::json to_json(const RunConfig& c) {
    return {{"command", c.command},
            {"models", c.models},
            {"tau", c.tau},
            {"N", c.Ns},
            {"theta_a", c.theta_a.str()},
            {"phi_a", c.phi_a.str()},
            {"theta_b", c.theta_b.str()},
            {"phi_b", c.phi_b.str()},
            {"sigmas", c.sigmas},
            {"output", c.output},
            {"format", c.format},
            {"gain", c.gain},
            {"cutoff", c.cutoff},
            {"figure", c.figure},
            {"allow_approx_N", c.allow_approx_N}};
}

inline RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    c.command = j.at("command").get<std::string>();
    c.models = j.at("models").get<std::vector<std::string>>();
    c.tau = j.at("tau").get<int>();
    c.Ns = j.at("N").get<std::vector<int>>();
    c.theta_a = report::PiFraction::parse(j.at("theta_a").get<std::string>());
    c.phi_a = report::PiFraction::parse(j.at("phi_a").get<std::string>());
    c.theta_b = report::PiFraction::parse(j.at("theta_b").get<std::string>());
    c.phi_b = report::PiFraction::parse(j.at("phi_b").get<std::string>());
    c.sigmas = j.at("sigmas").get<std::vector<int>>();
    c.output = j.at("output").get<std::string>();
    c.format = j.at("format").get<std::string>();
    c.gain = j.at("gain").get<double>();
    c.cutoff = j.at("cutoff").get<int>();
    c.figure = j.at("figure").get<std::string>();
    c.allow_approx_N = j.at("allow_approx_N").get<bool>();
    return c;
}

/// "unitary", "mp-eq" or "mp-sq" (τ from the config).
inline ClonerModel parse_model(const std::string& name, int tau, double gain = 0.0) {
    if (name == "unitary") return ClonerModel::unitary(Gain{gain});
    if (name == "mp-eq") return ClonerModel::mp_equatorial();
    if (name == "mp-sq") {
        if (tau < 0) throw UsageError("--tau must be >= 0");
        return ClonerModel::mp_squeezed(tau);
    }
    throw UsageError("unknown model '" + name + "' (expected unitary, mp-eq or mp-sq)");
}

inline std::string model_file_stem(const ClonerModel& m) {
    switch (m.kind()) {
        case ClonerModel::Kind::Unitary: return "unitary";
        case ClonerModel::Kind::MpEquatorial: return "mp_eq";
        case ClonerModel::Kind::MpSqueezed: return "mp_sq_tau" + std::to_string(m.tau());
    }
    return "model";
}

inline MeasurementSetting setting_of(const RunConfig& c) {
    return MeasurementSetting::from_angles(c.theta_a.radians(), c.phi_a.radians(), c.theta_b.radians(),
                                           c.phi_b.radians());
}

/// Checks N against the model's parity and τ constraints. An even N for an
/// odd-only model is an error unless `allow_approx` is set, in which case it
/// is raised to N+1 and the substitution is reported through `notes`.
inline int resolve_N(int N, const ClonerModel& model, bool allow_approx, std::vector<std::string>& notes) {
    if (N < 1) throw UsageError("N must be >= 1 (got " + std::to_string(N) + ")");
    const bool odd_only = model.kind() != ClonerModel::Kind::MpEquatorial;
    if (odd_only && N % 2 == 0) {
        if (!allow_approx)
            throw UsageError("model " + model.name() + " needs an odd total photon number: one input photon plus " +
                             "photon pairs is always odd (got N=" + std::to_string(N) +
                             "; pass --allow-approx-N to use N+1)");
        notes.push_back("N=" + std::to_string(N) + " replaced by N=" + std::to_string(N + 1) +
                        " (odd photon number required by " + model.name() + ")");
        N += 1;
    }
    if (model.kind() == ClonerModel::Kind::MpSqueezed && model.tau() > (N - 1) / 2)
        throw UsageError("tau=" + std::to_string(model.tau()) + " exceeds (N-1)/2=" + std::to_string((N - 1) / 2));
    return N;
}

inline void emit(const RunConfig& c, const std::string& content, std::ostream& out) {
    if (c.output.empty() || c.output == "-")
        out << content;
    else
        report::write_file_atomically(c.output, content);
}

inline void warn_all(const std::vector<std::string>& notes, std::ostream& err) {
    for (const auto& n : notes) err << "warning: " << n << '\n';
}

/// `dist`: one distribution as `j,probability` CSV (or JSON).
inline int cmd_dist(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.models.size() != 1) throw UsageError("dist expects exactly one --model");
    if (c.Ns.size() != 1) throw UsageError("dist expects exactly one --N");
    if (c.format != "csv" && c.format != "json") throw UsageError("dist supports --format csv or json");
    const auto model = parse_model(c.models[0], c.tau);
    std::vector<std::string> notes;
    const int N = resolve_N(c.Ns[0], model, c.allow_approx_N, notes);
    const auto setting = setting_of(c);
    warn_all(notes, err);
    const auto p = distribution(model, N, setting);
    std::string content;
    if (c.format == "csv") {
        content = report::distribution_csv(p.probabilities());
    } else {
        nlohmann::json j = {{"model", model.name()},
                            {"N", N},
                            {"probabilities", std::vector<double>(p.probabilities().begin(), p.probabilities().end())}};
        content = j.dump(2) + "\n";
    }
    emit(c, content, out);
    return kExitOk;
}

inline std::string sweep_csv(const SweepResult& r) {
    std::string s = "N,sigma,sigma_over_N,distance\n";
    for (const auto& row : r.rows)
        s += std::to_string(row.N) + "," + std::to_string(row.sigma) + "," + report::format_number(row.sigma_over_N) +
             "," + report::format_number(row.distance) + "\n";
    return s;
}

inline std::string sweep_svg(const SweepResult& r, bool against_relative) {
    std::vector<report::Series> series;
    for (const auto& row : r.rows) {
        const std::string label = "N=" + std::to_string(row.N);
        if (series.empty() || series.back().label != label) series.push_back({label, {}});
        series.back().points.emplace_back(against_relative ? row.sigma_over_N : row.sigma, row.distance);
    }
    const std::string title = r.model_a.name() + " vs " + r.model_b.name();
    return report::svg_line_chart(series, title, against_relative ? "sigma / N" : "bin size sigma",
                                  "Manhattan distance D");
}

inline std::filesystem::path with_extension(const std::string& path, const char* ext) {
    std::filesystem::path p(path);
    p.replace_extension(ext);
    return p;
}

/// `sweep`: coarse-grained distance table `N,sigma,sigma_over_N,distance`.
inline int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.models.size() != 2) throw UsageError("sweep expects two models (--model-a, --model-b)");
    if (c.Ns.empty() || c.sigmas.empty()) throw UsageError("sweep expects --Ns and --sigmas");
    if (c.format != "csv" && c.format != "svg+csv") throw UsageError("sweep supports --format csv or svg+csv");
    if (c.format == "svg+csv" && (c.output.empty() || c.output == "-"))
        throw UsageError("--format svg+csv needs an --out file");
    const auto a = parse_model(c.models[0], c.tau);
    const auto b = parse_model(c.models[1], c.tau);
    std::vector<std::string> notes;
    std::vector<int> Ns;
    for (int N : c.Ns) {
        const int na = resolve_N(N, a, c.allow_approx_N, notes);
        const int nb = resolve_N(N, b, c.allow_approx_N, notes);
        Ns.push_back(std::max(na, nb));
    }
    for (int s : c.sigmas)
        if (s < 1 || s % 2 == 0) throw UsageError("sigma must be odd and positive (got " + std::to_string(s) + ")");
    warn_all(notes, err);
    const auto result = distance_sweep(a, b, setting_of(c), Ns, c.sigmas);
    if (c.format == "svg+csv") report::write_file_atomically(with_extension(c.output, ".svg"), sweep_svg(result, false));
    emit(c, sweep_csv(result), out);
    return kExitOk;
}

inline nlohmann::json witness_report(const RunConfig& c, std::vector<std::string>& notes) {
    if (c.models.size() != 1) throw UsageError("witness expects exactly one --model");
    const auto model = parse_model(c.models[0], c.tau, c.gain);
    if (model.kind() == ClonerModel::Kind::Unitary) {
        if (c.cutoff < 0) throw UsageError("--cutoff must be >= 0");
        if (!(c.gain >= 0.0)) throw UsageError("--gain must be >= 0");
        const auto st = build_truncated_state(Gain{c.gain}, c.cutoff);
        if (st.cutoff_warning)
            notes.push_back("norm deficit " + report::format_number(st.norm_deficit) +
                            " exceeds 1e-8; increase --cutoff for gain " + report::format_number(c.gain));
        return {{"model", model.name()},
                {"parameters", {{"gain", c.gain}, {"cutoff", c.cutoff}}},
                {"excess", witness_excess(st)},
                {"norm_deficit", st.norm_deficit},
                {"tail_bound", st.tail_bound}};
    }
    if (c.Ns.size() != 1) throw UsageError("witness for measure-and-prepare models expects exactly one --N");
    const int N = resolve_N(c.Ns[0], model, c.allow_approx_N, notes);
    nlohmann::json params = {{"N", N}};
    if (model.kind() == ClonerModel::Kind::MpSqueezed) params["tau"] = model.tau();
    return {{"model", model.name()}, {"parameters", params}, {"excess", mp_witness_excess(model, N)}, {"tail_bound", 0.0}};
}

/// `witness`: JSON report {model, parameters, excess, tail_bound}.
inline int cmd_witness(const RunConfig& c, std::ostream& out, std::ostream& err) {
    std::vector<std::string> notes;
    const auto j = witness_report(c, notes);
    warn_all(notes, err);
    emit(c, j.dump(2) + "\n", out);
    return kExitOk;
}

inline std::vector<int> odd_range(int first, int last) {
    std::vector<int> v;
    for (int s = first; s <= last; s += 2) v.push_back(s);
    return v;
}

/// `reproduce`: regenerate the data behind the odd-even figure (fig2) or the
/// coarse-graining figure (fig3) into an output directory with a MANIFEST.json.
inline int cmd_reproduce(const RunConfig& c, std::ostream& /*out*/, std::ostream& err) {
    if (c.figure != "fig2" && c.figure != "fig3") throw UsageError("unknown figure '" + c.figure + "' (fig2 or fig3)");
    if (c.output.empty()) throw UsageError("reproduce needs --out <directory>");
    const std::filesystem::path dir(c.output);
    std::vector<std::string> notes;
    std::vector<std::string> files;
    nlohmann::json params;
    auto put = [&](const std::string& name, const std::string& content) {
        report::write_file_atomically(dir / name, content);
        files.push_back(name);
    };

    if (c.figure == "fig2") {
        const auto u = ClonerModel::unitary();
        const auto mp = ClonerModel::mp_equatorial();
        const int N = resolve_N(c.Ns.empty() ? 101 : c.Ns[0], u, c.allow_approx_N, notes);
        const auto setting = MeasurementSetting::from_angles(kPi / 2.0, 0.0, kPi / 2.0, 0.0);
        warn_all(notes, err);
        const auto pu = distribution(u, N, setting);
        const auto pm = distribution(mp, N, setting);
        const auto bu = pair_bin(pu.probabilities());
        const auto bm = pair_bin(pm.probabilities());
        const double d = manhattan_distance(pu, pm);
        const double db = manhattan_distance(bu, bm);
        put("fig2_unitary.csv", report::distribution_csv(pu.probabilities()));
        put("fig2_mp_eq.csv", report::distribution_csv(pm.probabilities()));
        put("fig2_unitary_pairs.csv", report::distribution_csv(bu, "bin"));
        put("fig2_mp_eq_pairs.csv", report::distribution_csv(bm, "bin"));
        nlohmann::json summary = {{"N", N},
                                  {"distance_unbinned", d},
                                  {"distance_pair_binned", db},
                                  {"reduction_factor", db > 0.0 ? d / db : 0.0}};
        put("fig2_summary.json", summary.dump(2) + "\n");
        std::vector<report::Series> series(2);
        series[0].label = "unitary";
        series[1].label = "mp-eq";
        for (int j = 0; j <= N; ++j) {
            series[0].points.emplace_back(j, pu[j]);
            series[1].points.emplace_back(j, pm[j]);
        }
        put("fig2.svg", report::svg_line_chart(series, "photon counts, N=" + std::to_string(N), "j", "P(j)"));
        params = {{"N", N},
                  {"models", {u.name(), mp.name()}},
                  {"theta_a", "1/2"},
                  {"theta_b", "1/2"},
                  {"delta_phi", "0"}};
    } else {
        const auto u = ClonerModel::unitary();
        const auto sq = ClonerModel::mp_squeezed(c.tau);
        std::vector<int> Ns = c.Ns.empty() ? std::vector<int>{51, 101, 201} : c.Ns;
        for (auto& N : Ns) N = resolve_N(N, sq, c.allow_approx_N, notes);
        const auto sigmas = c.sigmas.empty() ? odd_range(1, 61) : c.sigmas;
        const auto setting = MeasurementSetting::from_angles(kPi / 2.0, 0.0, kPi / 12.0, 0.0);
        warn_all(notes, err);
        const auto result = distance_sweep(u, sq, setting, Ns, sigmas);
        put("fig3_sweep.csv", sweep_csv(result));
        std::string inset = "N,sigma_over_N,distance\n";
        for (const auto& row : result.rows)
            inset += std::to_string(row.N) + "," + report::format_number(row.sigma_over_N) + "," +
                     report::format_number(row.distance) + "\n";
        put("fig3_inset.csv", inset);
        put("fig3.svg", sweep_svg(result, false));
        put("fig3_inset.svg", sweep_svg(result, true));
        params = {{"N", Ns},
                  {"sigmas", sigmas},
                  {"models", {u.name(), sq.name()}},
                  {"tau", c.tau},
                  {"theta_a", "1/2"},
                  {"theta_b", "1/12"},
                  {"delta_phi", "0"}};
    }

    nlohmann::json manifest = {{"command", "reproduce"},
                               {"figure", c.figure},
                               {"library", "clonesim"},
                               {"version", kVersion},
                               {"parameters", params},
                               {"files", files},
                               {"substitutions", notes}};
    report::write_file_atomically(dir / "MANIFEST.json", manifest.dump(2) + "\n");
    return kExitOk;
}

/// Runs a command and maps failures to exit statuses (2 usage, 3 numerical guard).
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        if (c.command == "dist") return cmd_dist(c, out, err);
        if (c.command == "sweep") return cmd_sweep(c, out, err);
        if (c.command == "witness") return cmd_witness(c, out, err);
        if (c.command == "reproduce") return cmd_reproduce(c, out, err);
        throw UsageError("unknown command '" + c.command + "'");
    } catch (const PrecisionError& e) {
        err << "numerical guard failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace clonesim::cli
