#pragma once

// Test-only oracles. Everything here recomputes energies by direct numerical
// quadrature of the underlying integrals, evaluating the finite element
// interpolants pointwise with its own shape-function code. No assembled matrix
// from the library is touched, so agreement with the quadratic-form path is a
// genuine cross-check, not a tautology.

#include <array>
#include <cmath>

#include "beamlab/discretization.hpp"

namespace beamlab::oracle {

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
inline const std::array<double, 10>& gauss10_nodes() {
    static const std::array<double, 10> x = {
        -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
        -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
        0.8650633666889845,  0.9739065285171717};
    return x;
}
inline const std::array<double, 10>& gauss10_weights() {
    static const std::array<double, 10> w = {
        0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
        0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
        0.1494513491505806, 0.0666713443086881};
    return w;
}

struct FieldSamples {
    double u1, u1x, y1, y1x, u3, u3x, y3, y3x, w, wx, wxx;
};

// Evaluates one quadratic-Lagrange field from its interior coefficients at
// local coordinate t in [0, 1] of element e.
inline void eval_quad(const Eigen::VectorXd& q, int offset, int count, int e, double t,
                      double h, double& val, double& deriv) {
    auto coeff = [&](int node) -> double {
        return (node >= 1 && node <= count) ? q(offset + node - 1) : 0.0;
    };
    const double c0 = coeff(2 * e), c1 = coeff(2 * e + 1), c2 = coeff(2 * e + 2);
    // Lagrange basis through (0, 1/2, 1), written as explicit products.
    const double l0 = (t - 0.5) * (t - 1.0) / ((0.0 - 0.5) * (0.0 - 1.0));
    const double l1 = (t - 0.0) * (t - 1.0) / ((0.5 - 0.0) * (0.5 - 1.0));
    const double l2 = (t - 0.0) * (t - 0.5) / ((1.0 - 0.0) * (1.0 - 0.5));
    const double d0 = ((t - 0.5) + (t - 1.0)) / 0.5;
    const double d1 = ((t - 0.0) + (t - 1.0)) / -0.25;
    const double d2 = ((t - 0.0) + (t - 0.5)) / 0.5;
    val = c0 * l0 + c1 * l1 + c2 * l2;
    deriv = (c0 * d0 + c1 * d1 + c2 * d2) / h;
}

// Evaluates the Hermite field (value, slope pairs at interior nodes).
inline void eval_hermite(const Eigen::VectorXd& q, int offset, int n_elements, int e, double t,
                         double h, double& val, double& dval, double& d2val) {
    auto vc = [&](int node) -> double {
        return (node >= 1 && node <= n_elements - 1) ? q(offset + 2 * (node - 1)) : 0.0;
    };
    auto sc = [&](int node) -> double {
        return (node >= 1 && node <= n_elements - 1) ? q(offset + 2 * (node - 1) + 1) : 0.0;
    };
    const double v0 = vc(e), s0 = sc(e), v1 = vc(e + 1), s1 = sc(e + 1);
    // Standard Hermite cubics in the local coordinate, slopes scaled by h.
    const double t2 = t * t, t3 = t2 * t;
    val = v0 * (2 * t3 - 3 * t2 + 1) + s0 * h * (t3 - 2 * t2 + t) + v1 * (3 * t2 - 2 * t3) +
          s1 * h * (t3 - t2);
    dval = (v0 * (6 * t2 - 6 * t) + s0 * h * (3 * t2 - 4 * t + 1) + v1 * (6 * t - 6 * t2) +
            s1 * h * (3 * t2 - 2 * t)) /
           h;
    d2val = (v0 * (12 * t - 6) + s0 * h * (6 * t - 4) + v1 * (6 - 12 * t) + s1 * h * (6 * t - 2)) /
            (h * h);
}

inline FieldSamples sample(const SemiDiscreteSystem& sys, const Eigen::VectorXd& coeffs, int e,
                           double t) {
    const auto& lay = sys.layout;
    const double h = sys.mesh.spacing();
    FieldSamples s{};
    eval_quad(coeffs, lay.off_u1, lay.quad_count, e, t, h, s.u1, s.u1x);
    eval_quad(coeffs, lay.off_y1, lay.quad_count, e, t, h, s.y1, s.y1x);
    eval_quad(coeffs, lay.off_u3, lay.quad_count, e, t, h, s.u3, s.u3x);
    eval_quad(coeffs, lay.off_y3, lay.quad_count, e, t, h, s.y3, s.y3x);
    eval_hermite(coeffs, lay.off_w, lay.n_elements, e, t, h, s.w, s.wx, s.wxx);
    return s;
}

// Direct quadrature of the potential-energy integrals on the interpolants.
inline double potential_energy(const SemiDiscreteSystem& sys, const Eigen::VectorXd& q) {
    const auto& c = sys.config;
    const double h = sys.mesh.spacing();
    double total = 0.0;
    for (int e = 0; e < sys.mesh.n_elements; ++e) {
        for (int g = 0; g < 10; ++g) {
            const double t = 0.5 * (gauss10_nodes()[g] + 1.0);
            const double w = 0.5 * gauss10_weights()[g] * h;
            const FieldSamples s = sample(sys, q, e, t);
            const double tau = -s.u1 + s.u3 + c.h2 * s.wx - 0.5 * c.top.h * s.y1 -
                               0.5 * c.bottom.h * s.y3;
            total += w * (c.top.E * c.top.h * s.u1x * s.u1x +
                          c.bottom.E * c.bottom.h * s.u3x * s.u3x +
                          c.EI_total * s.wxx * s.wxx + c.top.E * c.top.I * s.y1x * s.y1x +
                          c.bottom.E * c.bottom.I * s.y3x * s.y3x +
                          c.top.G * c.top.h * (s.wx + s.y1) * (s.wx + s.y1) +
                          c.bottom.G * c.bottom.h * (s.wx + s.y3) * (s.wx + s.y3) + tau * tau);
        }
    }
    return 0.5 * total;
}

inline double kinetic_energy(const SemiDiscreteSystem& sys, const Eigen::VectorXd& p) {
    const auto& c = sys.config;
    const double h = sys.mesh.spacing();
    double total = 0.0;
    for (int e = 0; e < sys.mesh.n_elements; ++e) {
        for (int g = 0; g < 10; ++g) {
            const double t = 0.5 * (gauss10_nodes()[g] + 1.0);
            const double w = 0.5 * gauss10_weights()[g] * h;
            const FieldSamples s = sample(sys, p, e, t);
            total += w * (c.top.rho * c.top.h * s.u1 * s.u1 + c.top.rho * c.top.I * s.y1 * s.y1 +
                          c.rho_h * s.w * s.w + c.bottom.rho * c.bottom.h * s.u3 * s.u3 +
                          c.bottom.rho * c.bottom.I * s.y3 * s.y3);
        }
    }
    return 0.5 * total;
}

inline double total_energy(const SemiDiscreteSystem& sys, const StateVector& u) {
    return potential_energy(sys, u.q) + kinetic_energy(sys, u.p);
}

// a||v1||^2 + b||z1||^2 + c||psi||^2 + d||v3||^2 + e||z3||^2 on the interpolants.
inline double dissipation(const SemiDiscreteSystem& sys, const Eigen::VectorXd& p) {
    const auto& d = sys.damping;
    const double h = sys.mesh.spacing();
    double total = 0.0;
    for (int e = 0; e < sys.mesh.n_elements; ++e) {
        for (int g = 0; g < 10; ++g) {
            const double t = 0.5 * (gauss10_nodes()[g] + 1.0);
            const double w = 0.5 * gauss10_weights()[g] * h;
            const FieldSamples s = sample(sys, p, e, t);
            total += w * (d.a * s.u1 * s.u1 + d.b * s.y1 * s.y1 + d.c * s.w * s.w +
                          d.d * s.u3 * s.u3 + d.e * s.y3 * s.y3);
        }
    }
    return total;
}

}  // namespace beamlab::oracle
