#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "beamlab/dynamics.hpp"
#include "beamlab/spectral.hpp"

namespace beamlab {

inline constexpr int kConfigSchemaVersion = 1;
extern const char* const kToolVersion;

/// Experiment knobs carried by the run configuration. Every module
/// precondition is re-checked when the file is loaded.
struct ExperimentParams {
    double dt = 1e-3;
    double t_final = 10.0;
    double lambda_min = 1.0;
    double lambda_max = 40.0;
    int n_points = 33;
    SweepSpacing spacing = SweepSpacing::Log;
    std::uint64_t seed = 1;
    int smoothness = 3;
};

struct RunConfig {
    BeamConfig beam;
    DampingPattern damping;
    int n_elements = 32;
    ExperimentParams experiment;
};

/// Desk-scale default: L = pi, unit layers, rho2 = 1, h2 = 0.5, 32 elements.
RunConfig default_run_config();

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);

/// Writes `content` atomically (temp file in the same directory + rename).
void write_file_atomic(const std::string& path, const std::string& content);

/// 17-significant-digit decimal text used by all CSV emitters.
std::string format_csv_number(double v);

std::string energy_trace_csv(const EnergyTrace& trace);
std::string spectrum_csv(const SpectrumReport& report);
std::string resolvent_sweep_csv(const ResolventSweep& sweep);

nlohmann::json verdict_to_json(const StabilityVerdict& verdict, const DampingPattern& damping);
nlohmann::json spectrum_sidecar_json(const SpectrumReport& report, const RunConfig& cfg);
nlohmann::json sweep_sidecar_json(const ResolventSweep& sweep, const RunConfig& cfg);

/// Structural validation of emitted reports (used by the round-trip tests).
void validate_report_json(const nlohmann::json& j, const std::string& kind);

}  // namespace beamlab
