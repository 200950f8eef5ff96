#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <functional>

#include "beamlab/model.hpp"

namespace beamlab {

/// Uniform mesh on [0, L].
struct Mesh1D {
    double L;
    int n_elements;
    std::vector<double> nodes;

    double spacing() const { return L / n_elements; }
};

Mesh1D build_mesh(double L, int n_elements);

/// Position-block layout. The four in-plane fields (u1, y1, u3, y3) use
/// quadratic Lagrange elements with Dirichlet ends eliminated (2N-1 interior
/// DOFs each); the transverse field uses cubic Hermite elements with clamped
/// ends eliminated (value + slope at the N-1 interior nodes).
struct DofLayout {
    int n_elements;
    int quad_count;     // 2N - 1
    int hermite_count;  // 2(N - 1)
    int off_u1, off_y1, off_w, off_u3, off_y3;
    int n_q;  // total position DOFs

    int state_dim() const { return 2 * n_q; }
};

DofLayout make_layout(int n_elements);

/// First-order state: q holds positions (u1, y1, w, u3, y3 blocks), p the
/// matching velocities. Boundary DOFs are eliminated, never stored.
struct StateVector {
    Eigen::VectorXd q;
    Eigen::VectorXd p;

    static StateVector zero(const DofLayout& layout);
};

/// Per-field closed-form functions for interpolation. Null entries mean zero.
/// The transverse field needs both value and slope for Hermite interpolation.
struct FieldFunctions {
    std::function<double(double)> u1, y1, u3, y3, w, w_x;
};

/// Assembled semi-discretization: mass, stiffness (elastic + shear coupling +
/// core shear-stress coupling), damping form, and the factorizations used by
/// the generator and by shifted solves. Immutable after assembly; safe to
/// share across concurrent readers.
struct SemiDiscreteSystem {
    BeamConfig config;
    DampingPattern damping;
    Mesh1D mesh;
    DofLayout layout;

    Eigen::MatrixXd M;  // symmetric positive definite
    Eigen::MatrixXd K;  // symmetric positive definite on the constrained space
    Eigen::MatrixXd D;  // symmetric positive semidefinite

    Eigen::LLT<Eigen::MatrixXd> M_llt;
    Eigen::LLT<Eigen::MatrixXd> K_llt;

    // Energy Gram on states: blockdiag(K over positions, M over velocities).
    double energy_inner(const StateVector& a, const StateVector& b) const;
    double energy_norm2(const StateVector& u) const { return energy_inner(u, u); }
};

SemiDiscreteSystem assemble(const BeamConfig& config, const DampingPattern& damping,
                            const Mesh1D& mesh);

/// Generator action: (q, p) -> (p, -M^{-1}(K q + D p)).
StateVector apply_generator(const SemiDiscreteSystem& sys, const StateVector& u);

/// Solves A_h U = F (the discrete counterpart of 0 being in the resolvent set).
StateVector solve_generator(const SemiDiscreteSystem& sys, const StateVector& f);

/// Total energy (1/2)(p^T M p + q^T K q).
double energy(const SemiDiscreteSystem& sys, const StateVector& u);

/// Instantaneous dissipation p^T D p =
/// a||v1||^2 + b||z1||^2 + c||psi||^2 + d||v3||^2 + e||z3||^2.
double dissipation_rate(const SemiDiscreteSystem& sys, const StateVector& u);

/// Nodal (Lagrange) / value-slope (Hermite) interpolation of closed-form
/// fields; null functions yield zero blocks.
Eigen::VectorXd interpolate_positions(const SemiDiscreteSystem& sys, const FieldFunctions& f);
StateVector interpolate(const SemiDiscreteSystem& sys, const FieldFunctions& positions,
                        const FieldFunctions& velocities);

/// Position coefficients of a closed-form candidate mode (profiles only).
Eigen::VectorXd interpolate_mode_positions(const SemiDiscreteSystem& sys,
                                           const ClosedFormMode& mode);

}  // namespace beamlab
