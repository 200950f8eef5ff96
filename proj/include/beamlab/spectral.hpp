#pragma once

#include <complex>

#include "beamlab/discretization.hpp"

namespace beamlab {

/// Relative tolerance classifying an eigenvalue as lying on the imaginary
/// axis: |Re lambda| < tol_axis * max|lambda|. Reported, never silent.
inline constexpr double kAxisTolRel = 1e-8;

/// Dense eigensolves are refused above this state dimension.
inline constexpr int kDenseSolverCap = 4000;

struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues;  // sorted by (Im, Re)
    double spectral_abscissa = 0.0;
    double max_magnitude = 0.0;
    double tol_axis_rel = kAxisTolRel;
    double tol_axis_abs = 0.0;
    std::vector<std::complex<double>> imaginary_axis_eigs;
    std::string damping_echo;  // active-set names, e.g. "bc"
};

/// All eigenvalues of the first-order generator (equivalently of the pencil
/// lambda^2 M + lambda D + K) via a dense solver on the linearized form.
SpectrumReport full_spectrum(const SemiDiscreteSystem& sys, double tol_axis_rel = kAxisTolRel,
                             int dense_cap = kDenseSolverCap);

/// Energy-norm residual of the interpolated closed-form candidate:
/// ||(i lambda I - A_h) PiU||_E / ||PiU||_E, with PiU carrying the profiles as
/// positions and i*lambda times them as velocities (computed as a real
/// two-vector rotation; no complex matrices are formed).
double mode_residual(const SemiDiscreteSystem& sys, const ClosedFormMode& mode);

/// Options for the shifted smallest-singular-value solve.
struct ResolventOptions {
    int max_iterations = 500;
    double rel_tol = 1e-9;
    // Dense SVD fallback is attempted below this state dimension when the
    // power iteration has not converged.
    int dense_fallback_dim = 1500;
    // Norms beyond this are reported as poles when no spectrum is available.
    double pole_threshold = 1e13;
};

/// ||(i lambda - A_h)^{-1}|| in the energy norm: the reciprocal smallest
/// singular value of R (i lambda - A_h) R^{-1} with E_gram = R^T R. When a
/// cached spectrum is supplied, shifts within tol_axis of an eigenvalue raise
/// PoleError carrying the nearest eigenvalue; otherwise a numerically singular
/// solve is detected from the computed norm itself.
double resolvent_norm(const SemiDiscreteSystem& sys, double lambda,
                      const SpectrumReport* cached_spectrum = nullptr,
                      const ResolventOptions& opts = {});

enum class SweepSpacing { Linear, Log };

struct ResolventSweep {
    std::vector<double> lambdas;
    std::vector<double> norms;
    double band_lo = 0.0, band_hi = 0.0;  // central fit band
    double fitted_exponent = 0.0;
    double fit_r2 = 0.0;
    std::string caveat;
};

/// Log-log least-squares slope of `norms` against `lambdas` restricted to
/// [band_lo, band_hi]. Returns {slope, r2}.
std::pair<double, double> fit_loglog(const std::vector<double>& lambdas,
                                     const std::vector<double>& norms, double band_lo,
                                     double band_hi);

/// Pointwise resolvent norms over the grid plus a log-log slope fit over the
/// central band [2*lambda_min, lambda_max/2]. Grid points are independent; the
/// parallel kernel runs them under OpenMP (capped by BEAMLAB_THREADS) and is
/// bit-identical to the serial reference.
ResolventSweep resolvent_sweep(const SemiDiscreteSystem& sys, double lambda_min,
                               double lambda_max, int n_points, SweepSpacing spacing,
                               const SpectrumReport* cached_spectrum = nullptr,
                               const ResolventOptions& opts = {});

/// Serial reference implementation of the same sweep (kept for testing and
/// benchmarking against the parallel kernel).
ResolventSweep resolvent_sweep_serial(const SemiDiscreteSystem& sys, double lambda_min,
                                      double lambda_max, int n_points, SweepSpacing spacing,
                                      const SpectrumReport* cached_spectrum = nullptr,
                                      const ResolventOptions& opts = {});

/// Caveat line included in every sweep report.
extern const char* const kSweepCaveat;

}  // namespace beamlab
