#include "beamlab/discretization.hpp"

#include <cmath>
#include <sstream>

#include "beamlab/elements.hpp"

namespace beamlab {

Mesh1D build_mesh(double L, int n_elements) {
    if (!(L > 0.0)) throw ValidationError("build_mesh: L must be strictly positive");
    if (n_elements < 2) {
        std::ostringstream os;
        os << "build_mesh: n_elements must be >= 2, got " << n_elements;
        throw ValidationError(os.str());
    }
    Mesh1D mesh;
    mesh.L = L;
    mesh.n_elements = n_elements;
    mesh.nodes.resize(n_elements + 1);
    for (int i = 0; i <= n_elements; ++i) {
        mesh.nodes[i] = L * static_cast<double>(i) / n_elements;
    }
    mesh.nodes.front() = 0.0;
    mesh.nodes.back() = L;
    return mesh;
}

DofLayout make_layout(int n_elements) {
    DofLayout lay;
    lay.n_elements = n_elements;
    lay.quad_count = 2 * n_elements - 1;
    lay.hermite_count = 2 * (n_elements - 1);
    lay.off_u1 = 0;
    lay.off_y1 = lay.quad_count;
    lay.off_w = 2 * lay.quad_count;
    lay.off_u3 = 2 * lay.quad_count + lay.hermite_count;
    lay.off_y3 = 3 * lay.quad_count + lay.hermite_count;
    lay.n_q = 4 * lay.quad_count + lay.hermite_count;
    return lay;
}

StateVector StateVector::zero(const DofLayout& layout) {
    StateVector u;
    u.q = Eigen::VectorXd::Zero(layout.n_q);
    u.p = Eigen::VectorXd::Zero(layout.n_q);
    return u;
}

namespace {

constexpr int kLocalDofs = 16;  // 3 per quadratic field x4 + 4 Hermite

using LocalMat = Eigen::Matrix<double, kLocalDofs, kLocalDofs>;
using LocalVec = Eigen::Matrix<double, kLocalDofs, 1>;

// Local slot ranges: u1 0..2, y1 3..5, w 6..9, u3 10..12, y3 13..15.
struct ElementDofMap {
    std::array<int, kLocalDofs> global;
};

ElementDofMap element_dofs(const DofLayout& lay, int e) {
    ElementDofMap map;
    auto quad_global = [&](int offset, int a) {
        const int node = 2 * e + a;
        return (node >= 1 && node <= lay.quad_count) ? offset + node - 1 : -1;
    };
    for (int a = 0; a < 3; ++a) {
        map.global[a] = quad_global(lay.off_u1, a);
        map.global[3 + a] = quad_global(lay.off_y1, a);
        map.global[10 + a] = quad_global(lay.off_u3, a);
        map.global[13 + a] = quad_global(lay.off_y3, a);
    }
    for (int a = 0; a < 4; ++a) {
        const int node = e + a / 2;
        const int comp = a % 2;
        map.global[6 + a] = (node >= 1 && node <= lay.n_elements - 1)
                                ? lay.off_w + 2 * (node - 1) + comp
                                : -1;
    }
    return map;
}

void scatter(Eigen::MatrixXd& A, const LocalMat& local, const ElementDofMap& map) {
    for (int i = 0; i < kLocalDofs; ++i) {
        const int gi = map.global[i];
        if (gi < 0) continue;
        for (int j = 0; j < kLocalDofs; ++j) {
            const int gj = map.global[j];
            if (gj < 0) continue;
            A(gi, gj) += local(i, j);
        }
    }
}

}  // namespace

SemiDiscreteSystem assemble(const BeamConfig& config, const DampingPattern& damping,
                            const Mesh1D& mesh) {
    damping.validate();
    SemiDiscreteSystem sys;
    sys.config = config;
    sys.damping = damping;
    sys.mesh = mesh;
    sys.layout = make_layout(mesh.n_elements);

    const int n = sys.layout.n_q;
    sys.M = Eigen::MatrixXd::Zero(n, n);
    sys.K = Eigen::MatrixXd::Zero(n, n);
    sys.D = Eigen::MatrixXd::Zero(n, n);

    const double h = mesh.spacing();
    const auto& c = config;
    const GaussRule4 rule = gauss4();

    for (int e = 0; e < mesh.n_elements; ++e) {
        LocalMat Ke = LocalMat::Zero();
        LocalMat Me = LocalMat::Zero();
        LocalMat De = LocalMat::Zero();
        for (int g = 0; g < GaussRule4::n; ++g) {
            const double wq = rule.w[g] * h;
            const QuadShape qs = quad_shape(rule.xi[g]);
            const HermiteShape hs = hermite_shape(rule.xi[g], h);

            LocalVec vu1 = LocalVec::Zero(), du1 = LocalVec::Zero();
            LocalVec vy1 = LocalVec::Zero(), dy1 = LocalVec::Zero();
            LocalVec vu3 = LocalVec::Zero(), du3 = LocalVec::Zero();
            LocalVec vy3 = LocalVec::Zero(), dy3 = LocalVec::Zero();
            LocalVec vw = LocalVec::Zero(), wx = LocalVec::Zero(), wxx = LocalVec::Zero();
            for (int a = 0; a < 3; ++a) {
                vu1(a) = qs.N[a];
                du1(a) = qs.dN[a] / h;
                vy1(3 + a) = qs.N[a];
                dy1(3 + a) = qs.dN[a] / h;
                vu3(10 + a) = qs.N[a];
                du3(10 + a) = qs.dN[a] / h;
                vy3(13 + a) = qs.N[a];
                dy3(13 + a) = qs.dN[a] / h;
            }
            for (int a = 0; a < 4; ++a) {
                vw(6 + a) = hs.H[a];
                wx(6 + a) = hs.dH[a];
                wxx(6 + a) = hs.d2H[a];
            }

            const LocalVec tau =
                -vu1 + vu3 + c.h2 * wx - 0.5 * c.top.h * vy1 - 0.5 * c.bottom.h * vy3;
            const LocalVec shear1 = wx + vy1;
            const LocalVec shear3 = wx + vy3;

            Ke += wq * (c.top.E * c.top.h * (du1 * du1.transpose()) +
                        c.bottom.E * c.bottom.h * (du3 * du3.transpose()) +
                        c.EI_total * (wxx * wxx.transpose()) +
                        c.top.E * c.top.I * (dy1 * dy1.transpose()) +
                        c.bottom.E * c.bottom.I * (dy3 * dy3.transpose()) +
                        c.top.G * c.top.h * (shear1 * shear1.transpose()) +
                        c.bottom.G * c.bottom.h * (shear3 * shear3.transpose()) +
                        tau * tau.transpose());

            Me += wq * (c.top.rho * c.top.h * (vu1 * vu1.transpose()) +
                        c.top.rho * c.top.I * (vy1 * vy1.transpose()) +
                        c.rho_h * (vw * vw.transpose()) +
                        c.bottom.rho * c.bottom.h * (vu3 * vu3.transpose()) +
                        c.bottom.rho * c.bottom.I * (vy3 * vy3.transpose()));

            // Damping weights the plain L2 mass of each velocity block.
            De += wq * (damping.a * (vu1 * vu1.transpose()) + damping.b * (vy1 * vy1.transpose()) +
                        damping.c * (vw * vw.transpose()) + damping.d * (vu3 * vu3.transpose()) +
                        damping.e * (vy3 * vy3.transpose()));
        }
        const ElementDofMap map = element_dofs(sys.layout, e);
        scatter(sys.K, Ke, map);
        scatter(sys.M, Me, map);
        scatter(sys.D, De, map);
    }

    sys.M_llt.compute(sys.M);
    if (sys.M_llt.info() != Eigen::Success) {
        throw NumericalError("assemble: mass form is not positive definite");
    }
    sys.K_llt.compute(sys.K);
    if (sys.K_llt.info() != Eigen::Success) {
        throw NumericalError("assemble: stiffness form is not positive definite");
    }
    return sys;
}

double SemiDiscreteSystem::energy_inner(const StateVector& a, const StateVector& b) const {
    return a.q.dot(K * b.q) + a.p.dot(M * b.p);
}

StateVector apply_generator(const SemiDiscreteSystem& sys, const StateVector& u) {
    StateVector out;
    out.q = u.p;
    out.p = -sys.M_llt.solve(sys.K * u.q + sys.D * u.p);
    return out;
}

StateVector solve_generator(const SemiDiscreteSystem& sys, const StateVector& f) {
    StateVector u;
    u.p = f.q;
    u.q = sys.K_llt.solve(-(sys.M * f.p + sys.D * f.q));
    return u;
}

double energy(const SemiDiscreteSystem& sys, const StateVector& u) {
    return 0.5 * (u.p.dot(sys.M * u.p) + u.q.dot(sys.K * u.q));
}

double dissipation_rate(const SemiDiscreteSystem& sys, const StateVector& u) {
    return u.p.dot(sys.D * u.p);
}

Eigen::VectorXd interpolate_positions(const SemiDiscreteSystem& sys, const FieldFunctions& f) {
    const DofLayout& lay = sys.layout;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(lay.n_q);
    const double h = sys.mesh.spacing();

    auto fill_quad = [&](int offset, const std::function<double(double)>& fn) {
        if (!fn) return;
        for (int j = 1; j <= lay.quad_count; ++j) {
            q(offset + j - 1) = fn(0.5 * h * j);
        }
    };
    fill_quad(lay.off_u1, f.u1);
    fill_quad(lay.off_y1, f.y1);
    fill_quad(lay.off_u3, f.u3);
    fill_quad(lay.off_y3, f.y3);

    if (f.w || f.w_x) {
        for (int m = 1; m <= lay.n_elements - 1; ++m) {
            const double x = sys.mesh.nodes[m];
            if (f.w) q(lay.off_w + 2 * (m - 1)) = f.w(x);
            if (f.w_x) q(lay.off_w + 2 * (m - 1) + 1) = f.w_x(x);
        }
    }
    return q;
}

StateVector interpolate(const SemiDiscreteSystem& sys, const FieldFunctions& positions,
                        const FieldFunctions& velocities) {
    StateVector u;
    u.q = interpolate_positions(sys, positions);
    u.p = interpolate_positions(sys, velocities);
    return u;
}

Eigen::VectorXd interpolate_mode_positions(const SemiDiscreteSystem& sys,
                                           const ClosedFormMode& mode) {
    const double k = static_cast<double>(mode.n) * M_PI / sys.config.L;
    FieldFunctions f;
    auto profile = [k](double amp) -> std::function<double(double)> {
        if (amp == 0.0) return nullptr;
        return [amp, k](double x) { return amp * std::sin(k * x); };
    };
    f.u1 = profile(mode.amp_u1);
    f.y1 = profile(mode.amp_y1);
    f.u3 = profile(mode.amp_u3);
    f.y3 = profile(mode.amp_y3);
    return interpolate_positions(sys, f);
}

}  // namespace beamlab
