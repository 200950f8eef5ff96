#include "beamlab/elements.hpp"

#include <cmath>

namespace beamlab {

GaussRule4 gauss4() {
    // Nodes/weights for [-1, 1], mapped to [0, 1].
    const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
    const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
    GaussRule4 r;
    r.xi = {0.5 * (1.0 - b), 0.5 * (1.0 - a), 0.5 * (1.0 + a), 0.5 * (1.0 + b)};
    r.w = {0.5 * wb, 0.5 * wa, 0.5 * wa, 0.5 * wb};
    return r;
}

QuadShape quad_shape(double xi) {
    QuadShape s;
    s.N = {2.0 * (xi - 0.5) * (xi - 1.0), 4.0 * xi * (1.0 - xi), 2.0 * xi * (xi - 0.5)};
    s.dN = {4.0 * xi - 3.0, 4.0 - 8.0 * xi, 4.0 * xi - 1.0};
    return s;
}

HermiteShape hermite_shape(double xi, double h) {
    HermiteShape s;
    const double xi2 = xi * xi;
    const double xi3 = xi2 * xi;
    s.H = {1.0 - 3.0 * xi2 + 2.0 * xi3, h * xi * (1.0 - xi) * (1.0 - xi),
           3.0 * xi2 - 2.0 * xi3, h * xi2 * (xi - 1.0)};
    s.dH = {(-6.0 * xi + 6.0 * xi2) / h, 1.0 - 4.0 * xi + 3.0 * xi2,
            (6.0 * xi - 6.0 * xi2) / h, 3.0 * xi2 - 2.0 * xi};
    s.d2H = {(-6.0 + 12.0 * xi) / (h * h), (-4.0 + 6.0 * xi) / h, (6.0 - 12.0 * xi) / (h * h),
             (6.0 * xi - 2.0) / h};
    return s;
}

}  // namespace beamlab
