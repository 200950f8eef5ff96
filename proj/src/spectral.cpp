#include "beamlab/spectral.hpp"

#include <lapacke.h>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace beamlab {

const char* const kSweepCaveat =
    "Discretization truncates the spectrum: fitted sweep exponents support ordering and "
    "finiteness claims only, not exact decay orders.";

SpectrumReport full_spectrum(const SemiDiscreteSystem& sys, double tol_axis_rel, int dense_cap) {
    const int n = sys.layout.n_q;
    const int dim = 2 * n;
    if (dim > dense_cap) {
        std::ostringstream os;
        os << "full_spectrum: state dimension " << dim << " exceeds the dense-solver cap "
           << dense_cap << "; rerun with fewer elements";
        throw ValidationError(os.str());
    }

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    A.topRightCorner(n, n).setIdentity();
    A.bottomLeftCorner(n, n) = -sys.M_llt.solve(sys.K);
    A.bottomRightCorner(n, n) = -sys.M_llt.solve(sys.D);

    std::vector<double> wr(dim), wi(dim);
    const int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', dim, A.data(), dim, wr.data(),
                                   wi.data(), nullptr, 1, nullptr, 1);
    if (info != 0) {
        std::ostringstream os;
        os << "full_spectrum: dense eigensolver failed to converge (dgeev info=" << info << ")";
        throw NumericalError(os.str());
    }

    SpectrumReport rep;
    rep.eigenvalues.resize(dim);
    for (int i = 0; i < dim; ++i) rep.eigenvalues[i] = {wr[i], wi[i]};
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.imag() != b.imag()) return a.imag() < b.imag();
                  return a.real() < b.real();
              });

    rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
    rep.max_magnitude = 0.0;
    for (const auto& ev : rep.eigenvalues) {
        rep.spectral_abscissa = std::max(rep.spectral_abscissa, ev.real());
        rep.max_magnitude = std::max(rep.max_magnitude, std::abs(ev));
    }
    rep.tol_axis_rel = tol_axis_rel;
    rep.tol_axis_abs = tol_axis_rel * rep.max_magnitude;
    for (const auto& ev : rep.eigenvalues) {
        if (std::abs(ev.real()) < rep.tol_axis_abs) rep.imaginary_axis_eigs.push_back(ev);
    }
    rep.damping_echo = sys.damping.active_names();
    return rep;
}

double mode_residual(const SemiDiscreteSystem& sys, const ClosedFormMode& mode) {
    const Eigen::VectorXd q = interpolate_mode_positions(sys, mode);
    const double lam = mode.lambda;

    // Complex state Z = (q, i lam q) split into the real pair
    // Z_re = (q, 0), Z_im = (0, lam q).
    StateVector z_re, z_im;
    z_re.q = q;
    z_re.p = Eigen::VectorXd::Zero(q.size());
    z_im.q = Eigen::VectorXd::Zero(q.size());
    z_im.p = lam * q;

    const double denom2 = sys.energy_norm2(z_re) + sys.energy_norm2(z_im);
    if (!(denom2 > 0.0)) {
        throw NumericalError("mode_residual: interpolated mode is identically zero");
    }

    // (i lam - A)(Z_re + i Z_im) = (-lam Z_im - A Z_re) + i (lam Z_re - A Z_im)
    const StateVector az_re = apply_generator(sys, z_re);
    const StateVector az_im = apply_generator(sys, z_im);
    StateVector w_re, w_im;
    w_re.q = -lam * z_im.q - az_re.q;
    w_re.p = -lam * z_im.p - az_re.p;
    w_im.q = lam * z_re.q - az_im.q;
    w_im.p = lam * z_re.p - az_im.p;

    const double num2 = sys.energy_norm2(w_re) + sys.energy_norm2(w_im);
    return std::sqrt(num2 / denom2);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) {
    return 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
}

// Per-shift solver for (i lambda - A_h) in the energy metric. The shifted
// quadratic form S(lambda) = K + i lambda D - lambda^2 M is factored once; both
// the resolvent apply and its adjoint reuse the factorization.
class ShiftedSolver {
public:
    ShiftedSolver(const SemiDiscreteSystem& sys, double lambda)
        : sys_(sys), lambda_(lambda), n_(sys.layout.n_q) {
        Eigen::MatrixXcd S = sys.K.cast<std::complex<double>>();
        S.noalias() += std::complex<double>(0.0, lambda) * sys.D;
        S.noalias() -= std::complex<double>(lambda * lambda, 0.0) * sys.M;
        lu_.compute(S);
        U_K_ = sys.K_llt.matrixU();
        U_M_ = sys.M_llt.matrixU();
    }

    // x = (i lambda - A)^{-1} z
    Eigen::VectorXcd apply_resolvent(const Eigen::VectorXcd& z) const {
        const auto f = z.head(n_);
        const auto g = z.tail(n_);
        const std::complex<double> ilam(0.0, lambda_);
        Eigen::VectorXcd rhs = sys_.M * g + ilam * (sys_.M * f) + sys_.D * f;
        Eigen::VectorXcd q = lu_.solve(rhs);
        Eigen::VectorXcd out(2 * n_);
        out.head(n_) = q;
        out.tail(n_) = ilam * q - f;
        return out;
    }

    // x = (i lambda - A)^{-H} z, reusing the same factorization via conjugation.
    Eigen::VectorXcd apply_resolvent_adjoint(const Eigen::VectorXcd& z) const {
        const auto y1 = z.head(n_);
        const auto y2 = z.tail(n_);
        const std::complex<double> ilam(0.0, lambda_);
        Eigen::VectorXcd c = y1 - ilam * y2;
        Eigen::VectorXcd w = lu_.solve(c.conjugate()).conjugate();
        Eigen::VectorXcd out(2 * n_);
        out.tail(n_) = sys_.M * w;
        out.head(n_) = -ilam * out.tail(n_) + sys_.D * w - y2;
        return out;
    }

    // Energy factor applications: E_gram = R^T R with R = blockdiag(U_K, U_M).
    Eigen::VectorXcd apply_R(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd out(2 * n_);
        out.head(n_) = tri_mul(U_K_, v.head(n_), false);
        out.tail(n_) = tri_mul(U_M_, v.tail(n_), false);
        return out;
    }
    Eigen::VectorXcd apply_RT(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd out(2 * n_);
        out.head(n_) = tri_mul(U_K_, v.head(n_), true);
        out.tail(n_) = tri_mul(U_M_, v.tail(n_), true);
        return out;
    }
    Eigen::VectorXcd solve_R(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd out(2 * n_);
        out.head(n_) = tri_solve(U_K_, v.head(n_), false);
        out.tail(n_) = tri_solve(U_M_, v.tail(n_), false);
        return out;
    }
    Eigen::VectorXcd solve_RT(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd out(2 * n_);
        out.head(n_) = tri_solve(U_K_, v.head(n_), true);
        out.tail(n_) = tri_solve(U_M_, v.tail(n_), true);
        return out;
    }

    int dim() const { return 2 * n_; }
    const SemiDiscreteSystem& system() const { return sys_; }
    double lambda() const { return lambda_; }

private:
    static Eigen::VectorXcd tri_mul(const Eigen::MatrixXd& U, const Eigen::VectorXcd& v,
                                    bool transposed) {
        Eigen::VectorXd re = v.real(), im = v.imag();
        Eigen::VectorXd re2, im2;
        if (transposed) {
            re2 = U.triangularView<Eigen::Upper>().transpose() * re;
            im2 = U.triangularView<Eigen::Upper>().transpose() * im;
        } else {
            re2 = U.triangularView<Eigen::Upper>() * re;
            im2 = U.triangularView<Eigen::Upper>() * im;
        }
        return re2 + std::complex<double>(0.0, 1.0) * im2;
    }
    static Eigen::VectorXcd tri_solve(const Eigen::MatrixXd& U, const Eigen::VectorXcd& v,
                                      bool transposed) {
        Eigen::VectorXd re = v.real(), im = v.imag();
        Eigen::VectorXd re2, im2;
        if (transposed) {
            re2 = U.triangularView<Eigen::Upper>().transpose().solve(re);
            im2 = U.triangularView<Eigen::Upper>().transpose().solve(im);
        } else {
            re2 = U.triangularView<Eigen::Upper>().solve(re);
            im2 = U.triangularView<Eigen::Upper>().solve(im);
        }
        return re2 + std::complex<double>(0.0, 1.0) * im2;
    }

    const SemiDiscreteSystem& sys_;
    double lambda_;
    int n_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    Eigen::MatrixXd U_K_;
    Eigen::MatrixXd U_M_;
};

// Largest eigenvalue of T = B^{-1} B^{-H} (Hermitian PSD) by power iteration,
// where B = R (i lambda - A) R^{-1}. Returns ||B^{-1}||_2^2.
struct PowerResult {
    double mu = 0.0;
    bool converged = false;
    bool finite = true;
};

PowerResult power_iterate(const ShiftedSolver& solver, const ResolventOptions& opts,
                          double lambda) {
    const int dim = solver.dim();
    std::uint64_t seed = 0x757265736F6C7665ULL ^ std::bit_cast<std::uint64_t>(lambda);
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) {
        const double re = unit_double(splitmix64(seed));
        const double im = unit_double(splitmix64(seed));
        v(i) = {re, im};
    }
    v /= v.norm();

    PowerResult res;
    double mu_prev = 0.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::VectorXcd t = solver.apply_RT(v);
        t = solver.apply_resolvent_adjoint(t);
        t = solver.solve_RT(t);
        t = solver.solve_R(t);
        t = solver.apply_resolvent(t);
        Eigen::VectorXcd w = solver.apply_R(t);
        const double mu = w.norm();
        if (!std::isfinite(mu)) {
            res.finite = false;
            res.mu = std::numeric_limits<double>::infinity();
            return res;
        }
        if (mu == 0.0) {
            res.mu = 0.0;
            res.converged = true;
            return res;
        }
        v = w / mu;
        if (it > 3 && std::abs(mu - mu_prev) <= opts.rel_tol * mu) {
            res.mu = mu;
            res.converged = true;
            return res;
        }
        mu_prev = mu;
        res.mu = mu;
    }
    return res;
}

// Dense fallback: smallest singular value of B via the Hermitian product.
double dense_smallest_singular(const ShiftedSolver& solver) {
    const auto& sys = solver.system();
    const int n = sys.layout.n_q;
    const int dim = 2 * n;
    const std::complex<double> ilam(0.0, solver.lambda());

    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(dim, dim);
    C.diagonal().setConstant(ilam);
    C.topRightCorner(n, n) -= Eigen::MatrixXcd::Identity(n, n);
    C.bottomLeftCorner(n, n) = sys.M_llt.solve(sys.K).cast<std::complex<double>>();
    C.bottomRightCorner(n, n) = sys.M_llt.solve(sys.D).cast<std::complex<double>>();

    Eigen::MatrixXd Rb = Eigen::MatrixXd::Zero(dim, dim);
    Rb.topLeftCorner(n, n) = sys.K_llt.matrixU();
    Rb.bottomRightCorner(n, n) = sys.M_llt.matrixU();
    const Eigen::MatrixXcd Rz = Rb.cast<std::complex<double>>();

    Eigen::MatrixXcd B = Rz.triangularView<Eigen::Upper>() * C;
    Rz.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(B);

    const Eigen::MatrixXcd H = B.adjoint() * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("resolvent_norm: dense fallback eigensolver failed");
    }
    const double smallest = std::max(es.eigenvalues()(0), 0.0);
    return std::sqrt(smallest);
}

std::complex<double> nearest_eigenvalue(const SpectrumReport& spec, double lambda) {
    std::complex<double> best = spec.eigenvalues.empty() ? std::complex<double>(0, 0)
                                                         : spec.eigenvalues.front();
    double best_dist = std::numeric_limits<double>::infinity();
    const std::complex<double> shift(0.0, lambda);
    for (const auto& ev : spec.eigenvalues) {
        const double d = std::abs(ev - shift);
        if (d < best_dist) {
            best_dist = d;
            best = ev;
        }
    }
    return best;
}

}  // namespace

double resolvent_norm(const SemiDiscreteSystem& sys, double lambda,
                      const SpectrumReport* cached_spectrum, const ResolventOptions& opts) {
    if (cached_spectrum != nullptr) {
        const auto nearest = nearest_eigenvalue(*cached_spectrum, lambda);
        const double dist = std::abs(nearest - std::complex<double>(0.0, lambda));
        if (dist <= cached_spectrum->tol_axis_abs) {
            std::ostringstream os;
            os << "resolvent_norm: shift i*" << lambda
               << " lies within tol_axis of the eigenvalue (" << nearest.real() << ", "
               << nearest.imag() << "i)";
            throw PoleError(os.str(), lambda, nearest);
        }
    }

    ShiftedSolver solver(sys, lambda);
    PowerResult pw = power_iterate(solver, opts, lambda);
    double norm = std::sqrt(pw.mu);

    if (!pw.finite || norm > opts.pole_threshold) {
        std::ostringstream os;
        os << "resolvent_norm: shift i*" << lambda << " is numerically singular";
        std::optional<std::complex<double>> nearest;
        if (cached_spectrum != nullptr) nearest = nearest_eigenvalue(*cached_spectrum, lambda);
        throw PoleError(os.str(), lambda, nearest);
    }
    if (!pw.converged && solver.dim() <= opts.dense_fallback_dim) {
        const double smin = dense_smallest_singular(solver);
        if (smin <= 0.0 || 1.0 / smin > opts.pole_threshold) {
            std::ostringstream os;
            os << "resolvent_norm: shift i*" << lambda << " is numerically singular";
            throw PoleError(os.str(), lambda, std::nullopt);
        }
        norm = 1.0 / smin;
    }
    return norm;
}

std::pair<double, double> fit_loglog(const std::vector<double>& lambdas,
                                     const std::vector<double>& norms, double band_lo,
                                     double band_hi) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < lambdas.size(); ++i) {
        if (lambdas[i] < band_lo || lambdas[i] > band_hi) continue;
        if (!(lambdas[i] > 0.0) || !(norms[i] > 0.0)) continue;
        lx.push_back(std::log(lambdas[i]));
        ly.push_back(std::log(norms[i]));
    }
    if (lx.size() < 2) {
        throw ValidationError("resolvent sweep: fit band holds fewer than 2 grid points");
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
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return {slope, r2};
}

namespace {

std::vector<double> sweep_grid(double lo, double hi, int n_points, SweepSpacing spacing) {
    std::vector<double> grid(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double t = static_cast<double>(i) / (n_points - 1);
        grid[i] = spacing == SweepSpacing::Log ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
    }
    return grid;
}

int sweep_thread_count() {
#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    if (const char* env = std::getenv("BEAMLAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) threads = std::min(threads, cap);
    }
    return threads;
}

ResolventSweep run_sweep(const SemiDiscreteSystem& sys, double lambda_min, double lambda_max,
                         int n_points, SweepSpacing spacing,
                         const SpectrumReport* cached_spectrum, const ResolventOptions& opts,
                         bool parallel) {
    if (!(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
        throw ValidationError("resolvent sweep: require 0 < lambda_min < lambda_max");
    }
    if (n_points < 8) {
        throw ValidationError("resolvent sweep: n_points must be >= 8");
    }

    ResolventSweep sweep;
    sweep.lambdas = sweep_grid(lambda_min, lambda_max, n_points, spacing);
    sweep.norms.assign(n_points, 0.0);
    sweep.band_lo = 2.0 * lambda_min;
    sweep.band_hi = 0.5 * lambda_max;
    sweep.caveat = kSweepCaveat;

    struct PointFailure {
        bool failed = false;
        std::string message;
        double lambda = 0.0;
        std::optional<std::complex<double>> nearest;
    };
    std::vector<PointFailure> failures(n_points);

    auto run_point = [&](int i) {
        try {
            sweep.norms[i] = resolvent_norm(sys, sweep.lambdas[i], cached_spectrum, opts);
        } catch (const PoleError& err) {
            failures[i] = {true, err.what(), err.lambda, err.nearest_eigenvalue};
        }
    };

    if (parallel) {
        const int threads = sweep_thread_count();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
        for (int i = 0; i < n_points; ++i) run_point(i);
        (void)threads;
    } else {
        for (int i = 0; i < n_points; ++i) run_point(i);
    }

    for (int i = 0; i < n_points; ++i) {
        if (failures[i].failed) {
            std::ostringstream os;
            os << "resolvent sweep aborted at grid point " << i << " (lambda = "
               << failures[i].lambda << "): " << failures[i].message;
            throw PoleError(os.str(), failures[i].lambda, failures[i].nearest);
        }
    }

    auto [slope, r2] = fit_loglog(sweep.lambdas, sweep.norms, sweep.band_lo, sweep.band_hi);
    sweep.fitted_exponent = slope;
    sweep.fit_r2 = r2;
    return sweep;
}

}  // namespace

ResolventSweep resolvent_sweep(const SemiDiscreteSystem& sys, double lambda_min,
                               double lambda_max, int n_points, SweepSpacing spacing,
                               const SpectrumReport* cached_spectrum,
                               const ResolventOptions& opts) {
    return run_sweep(sys, lambda_min, lambda_max, n_points, spacing, cached_spectrum, opts,
                     /*parallel=*/true);
}

ResolventSweep resolvent_sweep_serial(const SemiDiscreteSystem& sys, double lambda_min,
                                      double lambda_max, int n_points, SweepSpacing spacing,
                                      const SpectrumReport* cached_spectrum,
                                      const ResolventOptions& opts) {
    return run_sweep(sys, lambda_min, lambda_max, n_points, spacing, cached_spectrum, opts,
                     /*parallel=*/false);
}

}  // namespace beamlab
