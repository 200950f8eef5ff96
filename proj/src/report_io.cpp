#include "beamlab/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace beamlab {

using nlohmann::json;

const char* const kToolVersion = "0.1.0";

RunConfig default_run_config() {
    RunConfig cfg;
    const LayerParams unit{1.0, 1.0, 1.0, 1.0, 1.0};
    cfg.beam = BeamConfig::create(unit, unit, 1.0, 0.5, M_PI);
    cfg.damping = DampingPattern{};
    cfg.n_elements = 32;
    cfg.experiment = ExperimentParams{};
    return cfg;
}

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
        }
    }
}

double require_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw ValidationError("config: missing key '" + std::string(key) + "' in " + where);
    }
    if (!j[key].is_number()) {
        throw ValidationError("config: key '" + std::string(key) + "' in " + where +
                              " must be a number");
    }
    return j[key].get<double>();
}

LayerParams parse_layer(const json& j, const std::string& where) {
    if (!j.is_object()) throw ValidationError("config: " + where + " must be an object");
    reject_unknown_keys(j, {"rho", "E", "G", "I", "h"}, where);
    LayerParams p{};
    p.rho = require_number(j, "rho", where);
    p.E = require_number(j, "E", where);
    p.G = require_number(j, "G", where);
    p.I = require_number(j, "I", where);
    p.h = require_number(j, "h", where);
    return p;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
    reject_unknown_keys(j, {"schema_version", "beam", "damping", "mesh", "experiment"},
                        "top level");
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
        throw ValidationError("config: missing integer key 'schema_version'");
    }
    if (j["schema_version"].get<int>() != kConfigSchemaVersion) {
        std::ostringstream os;
        os << "config: unsupported schema_version " << j["schema_version"].get<int>()
           << " (expected " << kConfigSchemaVersion << ")";
        throw ValidationError(os.str());
    }
    if (!j.contains("beam")) throw ValidationError("config: missing key 'beam'");
    const json& jb = j["beam"];
    reject_unknown_keys(jb, {"L", "rho2", "h2", "layer1", "layer3"}, "beam");
    if (!jb.contains("layer1") || !jb.contains("layer3")) {
        throw ValidationError("config: beam requires 'layer1' and 'layer3'");
    }

    RunConfig cfg;
    const LayerParams top = parse_layer(jb["layer1"], "beam.layer1");
    const LayerParams bottom = parse_layer(jb["layer3"], "beam.layer3");
    cfg.beam = BeamConfig::create(top, bottom, require_number(jb, "rho2", "beam"),
                                  require_number(jb, "h2", "beam"),
                                  require_number(jb, "L", "beam"));

    if (j.contains("damping")) {
        const json& jd = j["damping"];
        reject_unknown_keys(jd, {"a", "b", "c", "d", "e"}, "damping");
        auto get = [&](const char* k) {
            return jd.contains(k) ? require_number(jd, k, "damping") : 0.0;
        };
        cfg.damping = DampingPattern{get("a"), get("b"), get("c"), get("d"), get("e")};
        cfg.damping.validate();
    }

    if (!j.contains("mesh")) throw ValidationError("config: missing key 'mesh'");
    const json& jm = j["mesh"];
    reject_unknown_keys(jm, {"n_elements"}, "mesh");
    if (!jm.contains("n_elements") || !jm["n_elements"].is_number_integer()) {
        throw ValidationError("config: mesh.n_elements must be an integer");
    }
    cfg.n_elements = jm["n_elements"].get<int>();
    if (cfg.n_elements < 2) {
        throw ValidationError("config: mesh.n_elements must be >= 2");
    }

    if (j.contains("experiment")) {
        const json& je = j["experiment"];
        reject_unknown_keys(je,
                            {"dt", "t_final", "lambda_min", "lambda_max", "n_points", "spacing",
                             "seed", "smoothness"},
                            "experiment");
        ExperimentParams& e = cfg.experiment;
        if (je.contains("dt")) e.dt = require_number(je, "dt", "experiment");
        if (je.contains("t_final")) e.t_final = require_number(je, "t_final", "experiment");
        if (je.contains("lambda_min"))
            e.lambda_min = require_number(je, "lambda_min", "experiment");
        if (je.contains("lambda_max"))
            e.lambda_max = require_number(je, "lambda_max", "experiment");
        if (je.contains("n_points")) {
            if (!je["n_points"].is_number_integer())
                throw ValidationError("config: experiment.n_points must be an integer");
            e.n_points = je["n_points"].get<int>();
        }
        if (je.contains("spacing")) {
            const std::string s = je["spacing"].get<std::string>();
            if (s == "log")
                e.spacing = SweepSpacing::Log;
            else if (s == "linear")
                e.spacing = SweepSpacing::Linear;
            else
                throw ValidationError("config: experiment.spacing must be 'log' or 'linear'");
        }
        if (je.contains("seed")) {
            if (!je["seed"].is_number_unsigned() && !je["seed"].is_number_integer())
                throw ValidationError("config: experiment.seed must be a nonnegative integer");
            e.seed = je["seed"].get<std::uint64_t>();
        }
        if (je.contains("smoothness")) {
            if (!je["smoothness"].is_number_integer())
                throw ValidationError("config: experiment.smoothness must be an integer");
            e.smoothness = je["smoothness"].get<int>();
            if (e.smoothness < 1)
                throw ValidationError("config: experiment.smoothness must be >= 1");
        }
        if (!(e.dt > 0.0)) throw ValidationError("config: experiment.dt must be > 0");
        if (!(e.t_final >= e.dt))
            throw ValidationError("config: experiment.t_final must be >= dt");
        if (!(e.lambda_min > 0.0) || !(e.lambda_max > e.lambda_min))
            throw ValidationError("config: require 0 < lambda_min < lambda_max");
        if (e.n_points < 8) throw ValidationError("config: experiment.n_points must be >= 8");
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw ValidationError("config: JSON parse error in '" + path + "': " + err.what());
    }
    return parse_run_config(j);
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    auto layer = [](const LayerParams& p) {
        return json{{"rho", p.rho}, {"E", p.E}, {"G", p.G}, {"I", p.I}, {"h", p.h}};
    };
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["beam"] = {{"L", cfg.beam.L},
                 {"rho2", cfg.beam.rho2},
                 {"h2", cfg.beam.h2},
                 {"layer1", layer(cfg.beam.top)},
                 {"layer3", layer(cfg.beam.bottom)}};
    j["damping"] = {{"a", cfg.damping.a},
                    {"b", cfg.damping.b},
                    {"c", cfg.damping.c},
                    {"d", cfg.damping.d},
                    {"e", cfg.damping.e}};
    j["mesh"] = {{"n_elements", cfg.n_elements}};
    const ExperimentParams& e = cfg.experiment;
    j["experiment"] = {{"dt", e.dt},
                       {"t_final", e.t_final},
                       {"lambda_min", e.lambda_min},
                       {"lambda_max", e.lambda_max},
                       {"n_points", e.n_points},
                       {"spacing", e.spacing == SweepSpacing::Log ? "log" : "linear"},
                       {"seed", e.seed},
                       {"smoothness", e.smoothness}};
    return j;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw NumericalError("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out) throw NumericalError("write to '" + tmp + "' failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw NumericalError("rename of '" + tmp + "' to '" + path + "' failed");
    }
}

std::string format_csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string energy_trace_csv(const EnergyTrace& trace) {
    std::ostringstream os;
    os << "t,energy,cumulative_dissipation\n";
    for (size_t i = 0; i < trace.times.size(); ++i) {
        os << format_csv_number(trace.times[i]) << ',' << format_csv_number(trace.energies[i])
           << ',' << format_csv_number(trace.cumulative_dissipation[i]) << '\n';
    }
    return os.str();
}

std::string spectrum_csv(const SpectrumReport& report) {
    std::ostringstream os;
    os << "re,im\n";
    for (const auto& ev : report.eigenvalues) {
        os << format_csv_number(ev.real()) << ',' << format_csv_number(ev.imag()) << '\n';
    }
    return os.str();
}

std::string resolvent_sweep_csv(const ResolventSweep& sweep) {
    std::ostringstream os;
    os << "lambda,norm\n";
    for (size_t i = 0; i < sweep.lambdas.size(); ++i) {
        os << format_csv_number(sweep.lambdas[i]) << ',' << format_csv_number(sweep.norms[i])
           << '\n';
    }
    return os.str();
}

nlohmann::json verdict_to_json(const StabilityVerdict& verdict, const DampingPattern& damping) {
    json j;
    j["kind"] = "classify";
    j["version"] = kToolVersion;
    j["status"] = to_string(verdict.status);
    if (verdict.predicted_ell) {
        j["ell"] = *verdict.predicted_ell;
    } else {
        j["ell"] = nullptr;
    }
    j["sharp"] = verdict.sharp;
    j["rationale"] = verdict.rationale;
    j["active"] = damping.active_names();
    j["equality_tolerance"] = kEqualityTol;
    return j;
}

nlohmann::json spectrum_sidecar_json(const SpectrumReport& report, const RunConfig& cfg) {
    json j;
    j["kind"] = "spectrum";
    j["version"] = kToolVersion;
    j["config"] = run_config_to_json(cfg);
    j["tolerances"] = {{"tol_axis_rel", report.tol_axis_rel},
                       {"tol_axis_abs", report.tol_axis_abs}};
    j["spectral_abscissa"] = report.spectral_abscissa;
    j["max_magnitude"] = report.max_magnitude;
    j["n_eigenvalues"] = report.eigenvalues.size();
    j["n_imaginary_axis"] = report.imaginary_axis_eigs.size();
    json axis = json::array();
    for (const auto& ev : report.imaginary_axis_eigs) {
        axis.push_back({ev.real(), ev.imag()});
    }
    j["imaginary_axis_eigs"] = axis;
    j["damping"] = report.damping_echo;
    return j;
}

nlohmann::json sweep_sidecar_json(const ResolventSweep& sweep, const RunConfig& cfg) {
    json j;
    j["kind"] = "resolvent_sweep";
    j["version"] = kToolVersion;
    j["config"] = run_config_to_json(cfg);
    j["band"] = {{"lo", sweep.band_lo}, {"hi", sweep.band_hi}};
    j["fitted_exponent"] = sweep.fitted_exponent;
    j["fit_r2"] = sweep.fit_r2;
    j["n_points"] = sweep.lambdas.size();
    j["caveat"] = sweep.caveat;
    return j;
}

void validate_report_json(const nlohmann::json& j, const std::string& kind) {
    auto require = [&](const char* key) {
        if (!j.contains(key)) {
            throw ValidationError("report validation (" + kind + "): missing key '" + key + "'");
        }
    };
    require("kind");
    if (j["kind"].get<std::string>() != kind) {
        throw ValidationError("report validation: kind mismatch, expected '" + kind + "'");
    }
    require("version");
    if (kind == "classify") {
        for (const char* k : {"status", "ell", "sharp", "rationale", "active"}) require(k);
        const std::string st = j["status"].get<std::string>();
        if (st != "StronglyStable" && st != "Unstable" && st != "OpenCase") {
            throw ValidationError("report validation: bad status '" + st + "'");
        }
    } else if (kind == "spectrum") {
        for (const char* k :
             {"config", "tolerances", "spectral_abscissa", "max_magnitude", "n_eigenvalues",
              "n_imaginary_axis", "imaginary_axis_eigs", "damping"})
            require(k);
    } else if (kind == "resolvent_sweep") {
        for (const char* k : {"config", "band", "fitted_exponent", "fit_r2", "caveat"})
            require(k);
    } else if (kind == "simulate_summary") {
        for (const char* k : {"E0", "E_final", "balance_residual", "n_steps"}) require(k);
    } else if (kind == "verify_mode") {
        for (const char* k : {"config", "theorem", "rows"}) require(k);
    } else if (kind == "report") {
        for (const char* k : {"config", "sections"}) require(k);
    } else {
        throw ValidationError("report validation: unknown kind '" + kind + "'");
    }
}

}  // namespace beamlab
