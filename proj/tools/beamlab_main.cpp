#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "beamlab/dynamics.hpp"
#include "beamlab/report_io.hpp"
#include "beamlab/spectral.hpp"

using nlohmann::json;
using namespace beamlab;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    int elements = 0;  // 0 = keep config value
    double dt = 0.0;
    double t_final = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    int points = 0;
    std::string theorem;
    std::string n_range = "1..3";
    std::string initial = "random";
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool wants_out) {
    cmd->add_option("--config", args.config_path, "Run configuration (JSON)")->required();
    if (wants_out) {
        cmd->add_option("--out", args.out_path,
                        "Output base path (writes <out>.csv and <out>.json)");
    }
    cmd->add_option("--elements", args.elements, "Override mesh.n_elements");
    cmd->add_option("--dt", args.dt, "Override experiment.dt");
    cmd->add_option("--t-final", args.t_final, "Override experiment.t_final");
    cmd->add_option("--lambda-min", args.lambda_min, "Override experiment.lambda_min");
    cmd->add_option("--lambda-max", args.lambda_max, "Override experiment.lambda_max");
    cmd->add_option("--points", args.points, "Override experiment.n_points");
    cmd->add_option("--seed", args.seed, "Override experiment.seed");
}

RunConfig load_with_overrides(const CommonArgs& args) {
    RunConfig cfg = load_run_config(args.config_path);
    if (args.elements > 0) cfg.n_elements = args.elements;
    if (args.dt > 0.0) cfg.experiment.dt = args.dt;
    if (args.t_final > 0.0) cfg.experiment.t_final = args.t_final;
    if (args.lambda_min > 0.0) cfg.experiment.lambda_min = args.lambda_min;
    if (args.lambda_max > 0.0) cfg.experiment.lambda_max = args.lambda_max;
    if (args.points > 0) cfg.experiment.n_points = args.points;
    if (args.seed) cfg.experiment.seed = *args.seed;
    if (cfg.n_elements < 2) throw ValidationError("config: n_elements must be >= 2");
    return cfg;
}

SemiDiscreteSystem build_system(const RunConfig& cfg) {
    return assemble(cfg.beam, cfg.damping, build_mesh(cfg.beam.L, cfg.n_elements));
}

StateVector make_initial(const SemiDiscreteSystem& sys, const RunConfig& cfg,
                         const std::string& initial) {
    if (initial == "random") {
        return random_initial(sys, cfg.experiment.seed, cfg.experiment.smoothness);
    }
    if (initial.rfind("mode:", 0) == 0) {
        const std::string rest = initial.substr(5);
        const auto colon = rest.find(':');
        if (colon == std::string::npos) {
            throw ValidationError("--initial mode spec must look like mode:T2.4:1");
        }
        const ModeFamily family = mode_family_from_string(rest.substr(0, colon));
        const int n = std::stoi(rest.substr(colon + 1));
        const ClosedFormMode mode = closed_form_mode(family, n, sys.config);
        StateVector u = StateVector::zero(sys.layout);
        u.q = interpolate_mode_positions(sys, mode);
        return u;
    }
    throw ValidationError("--initial must be 'random' or 'mode:<id>:<n>'");
}

std::pair<int, int> parse_n_range(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        const int n = std::stoi(s);
        return {n, n};
    }
    const int lo = std::stoi(s.substr(0, dots));
    const int hi = std::stoi(s.substr(dots + 2));
    if (lo < 1 || hi < lo) throw ValidationError("--n-range must satisfy 1 <= a <= b");
    return {lo, hi};
}

void emit_outputs(const std::string& base, const std::string& csv, const json& sidecar) {
    if (base.empty()) return;
    write_file_atomic(base + ".csv", csv);
    write_file_atomic(base + ".json", sidecar.dump(2) + "\n");
}

int cmd_classify(const CommonArgs& args) {
    const RunConfig cfg = load_with_overrides(args);
    const StabilityVerdict verdict = classify(cfg.beam, cfg.damping);
    std::cout << verdict_to_json(verdict, cfg.damping).dump(2) << "\n";
    return 0;
}

json simulate_summary(const SemiDiscreteSystem& sys, const RunConfig& cfg,
                      const EnergyTrace& trace, const std::string& initial) {
    const double e0 = trace.energies.front();
    const double ef = trace.energies.back();
    const double diss = trace.cumulative_dissipation.back();
    const double denom = std::max(e0, 1e-300);
    json j;
    j["kind"] = "simulate_summary";
    j["version"] = kToolVersion;
    j["config"] = run_config_to_json(cfg);
    j["initial"] = initial;
    j["E0"] = e0;
    j["E_final"] = ef;
    j["dissipated"] = diss;
    j["balance_residual"] = std::abs(e0 - ef - diss) / denom;
    j["n_steps"] = trace.times.size() - 1;
    // Exploratory decay fit on [5%, 60%] of t_final; never acceptance-gated.
    j["decay_fit"] = nullptr;
    if (!cfg.damping.active_set().empty()) {
        const double t_hi = 0.60 * trace.times.back();
        const double t_lo = 0.05 * trace.times.back();
        try {
            const DecayFit fit = fit_decay(trace, t_lo, t_hi);
            j["decay_fit"] = {{"window", {fit.t_lo, fit.t_hi}},
                              {"alpha", fit.alpha},
                              {"c", fit.c},
                              {"r2", fit.r2},
                              {"exploratory", true}};
        } catch (const ValidationError&) {
            // window too small or energies hit zero; leave null
        }
    }
    return j;
}

int cmd_simulate(const CommonArgs& args) {
    const RunConfig cfg = load_with_overrides(args);
    const SemiDiscreteSystem sys = build_system(cfg);
    const StateVector u0 = make_initial(sys, cfg, args.initial);
    const EnergyTrace trace = simulate(sys, u0, cfg.experiment.dt, cfg.experiment.t_final);
    const json summary = simulate_summary(sys, cfg, trace, args.initial);
    if (!args.out_path.empty()) {
        write_file_atomic(args.out_path + ".csv", energy_trace_csv(trace));
        write_file_atomic(args.out_path + ".json", summary.dump(2) + "\n");
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_spectrum(const CommonArgs& args) {
    const RunConfig cfg = load_with_overrides(args);
    const SemiDiscreteSystem sys = build_system(cfg);
    const SpectrumReport rep = full_spectrum(sys);
    const json sidecar = spectrum_sidecar_json(rep, cfg);
    emit_outputs(args.out_path, spectrum_csv(rep), sidecar);
    std::cout << sidecar.dump(2) << "\n";
    return 0;
}

int cmd_resolvent(const CommonArgs& args) {
    const RunConfig cfg = load_with_overrides(args);
    const SemiDiscreteSystem sys = build_system(cfg);
    // The cached spectrum powers pole diagnostics; skip it above the dense cap.
    std::optional<SpectrumReport> spec;
    if (sys.layout.state_dim() <= kDenseSolverCap) {
        spec = full_spectrum(sys);
    }
    const ResolventSweep sweep =
        resolvent_sweep(sys, cfg.experiment.lambda_min, cfg.experiment.lambda_max,
                        cfg.experiment.n_points, cfg.experiment.spacing,
                        spec ? &*spec : nullptr);
    const json sidecar = sweep_sidecar_json(sweep, cfg);
    emit_outputs(args.out_path, resolvent_sweep_csv(sweep), sidecar);
    std::cout << sidecar.dump(2) << "\n";
    return 0;
}

int cmd_verify_mode(const CommonArgs& args) {
    const RunConfig cfg = load_with_overrides(args);
    if (args.theorem.empty()) {
        throw ValidationError("verify-mode requires --theorem (T2.3, T2.4 or T2.5)");
    }
    const ModeFamily family = mode_family_from_string(args.theorem);
    const auto [n_lo, n_hi] = parse_n_range(args.n_range);

    const int n_coarse = cfg.n_elements;
    const int n_fine = 2 * cfg.n_elements;
    const SemiDiscreteSystem sys_coarse =
        assemble(cfg.beam, cfg.damping, build_mesh(cfg.beam.L, n_coarse));
    const SemiDiscreteSystem sys_fine =
        assemble(cfg.beam, cfg.damping, build_mesh(cfg.beam.L, n_fine));

    json rows = json::array();
    std::ostringstream csv;
    csv << "n,lambda,dispersion_gap,residual_elements_" << n_coarse << ",residual_elements_"
        << n_fine << "\n";
    for (int n = n_lo; n <= n_hi; ++n) {
        const ClosedFormMode mode = closed_form_mode(family, n, cfg.beam);
        const double gap = dispersion_gap(family, n, cfg.beam);
        const double r_coarse = mode_residual(sys_coarse, mode);
        const double r_fine = mode_residual(sys_fine, mode);
        rows.push_back({{"n", n},
                        {"lambda", mode.lambda},
                        {"dispersion_gap", gap},
                        {"residual_coarse", r_coarse},
                        {"residual_fine", r_fine},
                        {"elements_coarse", n_coarse},
                        {"elements_fine", n_fine}});
        csv << n << ',' << format_csv_number(mode.lambda) << ',' << format_csv_number(gap) << ','
            << format_csv_number(r_coarse) << ',' << format_csv_number(r_fine) << '\n';
    }
    json out;
    out["kind"] = "verify_mode";
    out["version"] = kToolVersion;
    out["config"] = run_config_to_json(cfg);
    out["theorem"] = to_string(family);
    out["rows"] = rows;
    emit_outputs(args.out_path, csv.str(), out);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_report(const CommonArgs& args) {
    const RunConfig cfg = load_with_overrides(args);
    json sections;
    int failures = 0;
    int total = 0;

    auto section = [&](const char* name, auto&& fn) {
        ++total;
        try {
            sections[name] = fn();
        } catch (const std::exception& err) {
            sections[name] = {{"error", err.what()}};
            ++failures;
        }
    };

    section("classify", [&] {
        return verdict_to_json(classify(cfg.beam, cfg.damping), cfg.damping);
    });

    std::optional<SemiDiscreteSystem> sys;
    std::optional<SpectrumReport> spec;
    section("spectrum", [&] {
        sys.emplace(build_system(cfg));
        spec.emplace(full_spectrum(*sys));
        return spectrum_sidecar_json(*spec, cfg);
    });

    section("simulation", [&] {
        if (!sys) sys.emplace(build_system(cfg));
        const StateVector u0 =
            random_initial(*sys, cfg.experiment.seed, cfg.experiment.smoothness);
        const EnergyTrace trace = simulate(*sys, u0, cfg.experiment.dt, cfg.experiment.t_final);
        return simulate_summary(*sys, cfg, trace, "random");
    });

    section("sweep", [&] {
        if (!sys) sys.emplace(build_system(cfg));
        if (spec && !spec->imaginary_axis_eigs.empty()) {
            return json{{"skipped", "imaginary-axis eigenvalues present"}};
        }
        const ResolventSweep sweep =
            resolvent_sweep(*sys, cfg.experiment.lambda_min, cfg.experiment.lambda_max,
                            cfg.experiment.n_points, cfg.experiment.spacing,
                            spec ? &*spec : nullptr);
        return sweep_sidecar_json(sweep, cfg);
    });

    json out;
    out["kind"] = "report";
    out["version"] = kToolVersion;
    out["config"] = run_config_to_json(cfg);
    out["sections"] = sections;
    if (!args.out_path.empty()) {
        write_file_atomic(args.out_path + ".json", out.dump(2) + "\n");
    }
    std::cout << out.dump(2) << "\n";
    return failures == total ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"beamlab: damped five-layer sandwich beam laboratory"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* classify_cmd = app.add_subcommand("classify", "Damping-pattern stability verdict");
    add_common(classify_cmd, args, false);
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Implicit-midpoint energy trace");
    add_common(simulate_cmd, args, true);
    simulate_cmd->add_option("--initial", args.initial, "random or mode:<id>:<n>");
    CLI::App* spectrum_cmd = app.add_subcommand("spectrum", "Dense spectrum of the generator");
    add_common(spectrum_cmd, args, true);
    CLI::App* resolvent_cmd = app.add_subcommand("resolvent", "Resolvent-norm sweep");
    add_common(resolvent_cmd, args, true);
    CLI::App* verify_cmd = app.add_subcommand("verify-mode", "Closed-form mode diagnostics");
    add_common(verify_cmd, args, true);
    verify_cmd->add_option("--theorem", args.theorem, "Mode family: T2.3, T2.4 or T2.5");
    verify_cmd->add_option("--n-range", args.n_range, "Mode indices, e.g. 1..3");
    CLI::App* report_cmd = app.add_subcommand("report", "Consolidated JSON report");
    add_common(report_cmd, args, true);

    try {
        app.parse(argc, argv);
        if (classify_cmd->parsed()) return cmd_classify(args);
        if (simulate_cmd->parsed()) return cmd_simulate(args);
        if (spectrum_cmd->parsed()) return cmd_spectrum(args);
        if (resolvent_cmd->parsed()) return cmd_resolvent(args);
        if (verify_cmd->parsed()) return cmd_verify_mode(args);
        if (report_cmd->parsed()) return cmd_report(args);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const PoleError& e) {
        std::cerr << "numerical error: " << e.what();
        if (e.nearest_eigenvalue) {
            std::cerr << " [nearest eigenvalue: " << e.nearest_eigenvalue->real() << " + "
                      << e.nearest_eigenvalue->imag() << "i]";
        }
        std::cerr << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
