#include "beamlab/dynamics.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace beamlab {

MidpointStepper::MidpointStepper(const SemiDiscreteSystem& sys, double dt) : sys_(sys), dt_(dt) {
    if (!(dt > 0.0)) throw ValidationError("implicit midpoint: dt must be strictly positive");
    const Eigen::MatrixXd S =
        sys.M + (0.5 * dt) * sys.D + (0.25 * dt * dt) * sys.K;
    S_llt_.compute(S);
    if (S_llt_.info() != Eigen::Success) {
        throw NumericalError("implicit midpoint: step matrix factorization failed");
    }
}

MidpointStepper::Result MidpointStepper::step_with_dissipation(const StateVector& u) const {
    // Eliminating q+ = q + dt/2 (p + p+) from the midpoint equations leaves
    //   (M + dt/2 D + dt^2/4 K) p+ = (M - dt/2 D - dt^2/4 K) p - dt K q.
    const Eigen::VectorXd Kq = sys_.K * u.q;
    const Eigen::VectorXd rhs = sys_.M * u.p - (0.5 * dt_) * (sys_.D * u.p) -
                                (0.25 * dt_ * dt_) * (sys_.K * u.p) - dt_ * Kq;
    Result r;
    r.next.p = S_llt_.solve(rhs);
    if (!r.next.p.allFinite()) {
        const double res = (sys_.M * r.next.p - rhs).norm();
        std::ostringstream os;
        os << "implicit midpoint: step solve produced non-finite values (residual " << res << ")";
        throw NumericalError(os.str());
    }
    r.next.q = u.q + (0.5 * dt_) * (u.p + r.next.p);
    const Eigen::VectorXd p_mid = 0.5 * (u.p + r.next.p);
    r.midpoint_dissipation = p_mid.dot(sys_.D * p_mid);
    return r;
}

StateVector MidpointStepper::step(const StateVector& u) const {
    return step_with_dissipation(u).next;
}

StateVector step_implicit_midpoint(const SemiDiscreteSystem& sys, const StateVector& u,
                                   double dt) {
    return MidpointStepper(sys, dt).step(u);
}

EnergyTrace simulate(const SemiDiscreteSystem& sys, const StateVector& u0, double dt,
                     double t_final) {
    if (!(dt > 0.0)) throw ValidationError("simulate: dt must be strictly positive");
    if (!(t_final >= dt)) throw ValidationError("simulate: t_final must be >= dt");
    const long n_steps = std::max<long>(1, std::lround(t_final / dt));

    MidpointStepper stepper(sys, dt);
    EnergyTrace trace;
    trace.times.reserve(n_steps + 1);
    trace.energies.reserve(n_steps + 1);
    trace.cumulative_dissipation.reserve(n_steps + 1);

    StateVector u = u0;
    double dissipated = 0.0;
    trace.times.push_back(0.0);
    trace.energies.push_back(energy(sys, u));
    trace.cumulative_dissipation.push_back(0.0);
    for (long i = 1; i <= n_steps; ++i) {
        auto r = stepper.step_with_dissipation(u);
        u = std::move(r.next);
        dissipated += dt * r.midpoint_dissipation;
        trace.times.push_back(dt * static_cast<double>(i));
        trace.energies.push_back(energy(sys, u));
        trace.cumulative_dissipation.push_back(dissipated);
    }
    return trace;
}

DecayFit fit_decay(const EnergyTrace& trace, double t_lo, double t_hi) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo)) {
        throw ValidationError("fit_decay: window must satisfy 0 < t_lo < t_hi");
    }
    std::vector<double> lx, ly;
    for (size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (t < t_lo || t > t_hi) continue;
        const double en = trace.energies[i];
        if (!(en > 0.0)) {
            throw ValidationError("fit_decay: nonpositive energy inside the fit window");
        }
        lx.push_back(std::log(t));
        ly.push_back(std::log(en));
    }
    if (lx.size() < 10) {
        std::ostringstream os;
        os << "fit_decay: window holds " << lx.size() << " samples, need at least 10";
        throw ValidationError(os.str());
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (size_t i = 0; i < lx.size(); ++i) {
        const double fit = slope * lx[i] + intercept;
        ss_res += (ly[i] - fit) * (ly[i] - fit);
        ss_tot += (ly[i] - ybar) * (ly[i] - ybar);
    }
    DecayFit out;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    out.alpha = -slope;
    out.c = std::exp(intercept);
    out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

StateVector random_initial(const SemiDiscreteSystem& sys, std::uint64_t seed, int smoothness) {
    if (smoothness < 1) throw ValidationError("random_initial: smoothness must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double L = sys.config.L;

    // Draw order is fixed: fields in layout order, position before velocity,
    // modes from 1 to `smoothness`.
    auto draw_sine_field = [&]() {
        std::vector<double> coeffs(smoothness);
        for (auto& cval : coeffs) cval = unit(rng);
        return [coeffs, L](double x) {
            double v = 0.0;
            for (size_t k = 0; k < coeffs.size(); ++k) {
                v += coeffs[k] * std::sin((k + 1) * M_PI * x / L);
            }
            return v;
        };
    };
    // Transverse modes use sin^2(k pi x / L): both the value and the slope
    // vanish at the ends, matching the clamped condition.
    struct BumpField {
        std::vector<double> coeffs;
        double L;
        double value(double x) const {
            double v = 0.0;
            for (size_t k = 0; k < coeffs.size(); ++k) {
                const double s = std::sin((k + 1) * M_PI * x / L);
                v += coeffs[k] * s * s;
            }
            return v;
        }
        double slope(double x) const {
            double v = 0.0;
            for (size_t k = 0; k < coeffs.size(); ++k) {
                const double kk = (k + 1) * M_PI / L;
                v += coeffs[k] * kk * std::sin(2.0 * kk * x);
            }
            return v;
        }
    };
    auto draw_bump_field = [&]() {
        BumpField f;
        f.L = L;
        f.coeffs.resize(smoothness);
        for (auto& cval : f.coeffs) cval = unit(rng);
        return f;
    };

    FieldFunctions pos, vel;
    pos.u1 = draw_sine_field();
    vel.u1 = draw_sine_field();
    pos.y1 = draw_sine_field();
    vel.y1 = draw_sine_field();
    const BumpField wq = draw_bump_field();
    const BumpField wp = draw_bump_field();
    pos.w = [wq](double x) { return wq.value(x); };
    pos.w_x = [wq](double x) { return wq.slope(x); };
    vel.w = [wp](double x) { return wp.value(x); };
    vel.w_x = [wp](double x) { return wp.slope(x); };
    pos.u3 = draw_sine_field();
    vel.u3 = draw_sine_field();
    pos.y3 = draw_sine_field();
    vel.y3 = draw_sine_field();

    return interpolate(sys, pos, vel);
}

}  // namespace beamlab
