#pragma once

#include <cstdint>

#include "beamlab/discretization.hpp"

namespace beamlab {

/// Discrete energy history. `cumulative_dissipation[i]` is the running sum of
/// dt * p_mid^T D p_mid up to time `times[i]`, so that
/// energies[0] - energies[i] == cumulative_dissipation[i] up to solver roundoff.
struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> energies;
    std::vector<double> cumulative_dissipation;
};

struct DecayFit {
    double t_lo, t_hi;
    double alpha;  // fitted exponent: E ~ c * t^(-alpha)
    double c;
    double r2;
};

/// Implicit midpoint stepper. The factorization of
/// S = M + (dt/2) D + (dt^2/4) K is computed once per (system, dt).
class MidpointStepper {
public:
    MidpointStepper(const SemiDiscreteSystem& sys, double dt);

    StateVector step(const StateVector& u) const;

    // Midpoint velocity of the most natural splitting: (p + p_next)/2.
    // Returned alongside the step to keep the balance bookkeeping exact.
    struct Result {
        StateVector next;
        double midpoint_dissipation;  // p_mid^T D p_mid
    };
    Result step_with_dissipation(const StateVector& u) const;

    double dt() const { return dt_; }

private:
    const SemiDiscreteSystem& sys_;
    double dt_;
    Eigen::LLT<Eigen::MatrixXd> S_llt_;
};

/// One implicit-midpoint step: solves (I - dt/2 A) U+ = (I + dt/2 A) U.
StateVector step_implicit_midpoint(const SemiDiscreteSystem& sys, const StateVector& u,
                                   double dt);

/// Repeated implicit-midpoint steps with the energy trace recorded every step.
EnergyTrace simulate(const SemiDiscreteSystem& sys, const StateVector& u0, double dt,
                     double t_final);

/// Log-log least squares of E against t restricted to [t_lo, t_hi].
DecayFit fit_decay(const EnergyTrace& trace, double t_lo, double t_hi);

/// Deterministic pseudo-random combination of the lowest `smoothness`
/// interpolated modes per field (sines for the in-plane fields, clamped
/// sin^2 bumps for the transverse field), reproducible by seed.
StateVector random_initial(const SemiDiscreteSystem& sys, std::uint64_t seed, int smoothness);

}  // namespace beamlab
