#pragma once

#include <array>

namespace beamlab {

/// 4-point Gauss-Legendre rule on [0, 1]; exact through polynomial degree 7,
/// which covers every integrand assembled here (max degree 6).
struct GaussRule4 {
    static constexpr int n = 4;
    std::array<double, 4> xi;
    std::array<double, 4> w;
};

GaussRule4 gauss4();

/// Quadratic Lagrange shape functions on [0, 1] with nodes {0, 1/2, 1}.
struct QuadShape {
    std::array<double, 3> N;
    std::array<double, 3> dN;  // d/dxi
};

QuadShape quad_shape(double xi);

/// Cubic Hermite shape functions on an element of physical length h, ordered
/// (value_left, slope_left, value_right, slope_right). Derivatives are with
/// respect to the physical coordinate.
struct HermiteShape {
    std::array<double, 4> H;
    std::array<double, 4> dH;
    std::array<double, 4> d2H;
};

HermiteShape hermite_shape(double xi, double h);

}  // namespace beamlab
