#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "beamlab/errors.hpp"

namespace beamlab {

// Relative tolerance for coefficient-equality tests in the classification table.
inline constexpr double kEqualityTol = 1e-12;

// |x - y| <= tol * max(|x|, |y|); exact zeros compare equal.
bool nearly_equal(double x, double y, double tol = kEqualityTol);

/// Physical parameters of one face layer (layer 1 = top, layer 3 = bottom).
struct LayerParams {
    double rho;  // density
    double E;    // Young's modulus
    double G;    // shear modulus
    double I;    // moment of inertia
    double h;    // thickness

    void validate(const std::string& which) const;
};

/// Full beam description: two face layers, core density/thickness, length,
/// and the derived totals rho_h = rho1*h1 + rho2*h2 + rho3*h3 and
/// EI_total = E1*I1 + E3*I3.
struct BeamConfig {
    LayerParams top;     // layer 1
    LayerParams bottom;  // layer 3
    double rho2;
    double h2;
    double L;
    double rho_h;
    double EI_total;

    static BeamConfig create(const LayerParams& top, const LayerParams& bottom,
                             double rho2, double h2, double L);

    // Exchange layers 1 and 3 (used by the classification symmetry).
    BeamConfig layer_swapped() const;

    double speed1() const { return top.E / top.rho; }
    double speed3() const { return bottom.E / bottom.rho; }
};

std::pair<double, double> derived_constants(const LayerParams& top, const LayerParams& bottom,
                                            double rho2, double h2);

/// Viscous damping coefficients: a on u1_t, b on y1_t, c on omega_t,
/// d on u3_t, e on y3_t.
struct DampingPattern {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;

    void validate() const;
    std::array<double, 5> coefficients() const { return {a, b, c, d, e}; }

    // Indices into {a,b,c,d,e} with strictly positive coefficient.
    std::vector<int> active_set() const;

    // Compact name like "ab" or "-" when nothing is active.
    std::string active_names() const;

    // Counterpart under the layer-1 <-> layer-3 exchange: a<->d, b<->e, c fixed.
    DampingPattern layer_swapped() const { return {d, e, c, a, b}; }
};

enum class StabilityStatus { StronglyStable, Unstable, OpenCase };

std::string to_string(StabilityStatus s);

/// Outcome of the damping-location classification. `predicted_ell` carries the
/// polynomial-decay order (energy ~ t^{-2/ell}) when one is published for the
/// active set; `sharp` marks the active sets whose stability conditions are
/// necessary and sufficient ({a,b}, {a,c}, {b,c}).
struct StabilityVerdict {
    StabilityStatus status = StabilityStatus::OpenCase;
    std::optional<int> predicted_ell;
    std::vector<std::string> rationale;
    bool sharp = false;
};

/// Shear stress in the core layer:
///   tau = -u1 + u3 + h2*omega_x - (h1/2)*y1 - (h3/2)*y3.
double shear_stress_tau(double u1, double u3, double omega_x, double y1, double y3,
                        const BeamConfig& config);

/// Classification table for two-damper patterns. Any other number of active
/// dampers yields OpenCase with empty rationale (never an exception).
StabilityVerdict classify(const BeamConfig& config, const DampingPattern& damping);

enum class ModeFamily { T23, T24, T25 };

ModeFamily mode_family_from_string(const std::string& s);
std::string to_string(ModeFamily f);

/// Closed-form candidate eigenmode. Each displacement field is
/// amplitude * sin(n*pi*x/L); the transverse field is zero in all three
/// families. Velocities are i*lambda times positions.
struct ClosedFormMode {
    ModeFamily theorem;
    int n;
    double lambda;
    double amp_u1 = 0.0;
    double amp_y1 = 0.0;
    double amp_u3 = 0.0;
    double amp_y3 = 0.0;
};

/// Builds the candidate mode for the requested family, checking the family's
/// coefficient hypotheses (throws ValidationError naming the failed equality).
ClosedFormMode closed_form_mode(ModeFamily family, int n, const BeamConfig& config);

/// Absolute difference between the lambda^2 values implied by the two nonzero
/// fields' own equations under the candidate profile. Zero exactly when the
/// candidate solves every field equation simultaneously.
double dispersion_gap(ModeFamily family, int n, const BeamConfig& config);

}  // namespace beamlab
