#pragma once

#include <random>

#include "beamlab/discretization.hpp"

namespace beamlab::testing {

inline BeamConfig unit_config(double L = M_PI) {
    const LayerParams unit{1.0, 1.0, 1.0, 1.0, 1.0};
    return BeamConfig::create(unit, unit, 1.0, 0.5, L);
}

inline BeamConfig tweaked_config(double L, double E3, double G3, double rho3 = 1.0,
                                 double I3 = 1.0, double h3 = 1.0) {
    const LayerParams top{1.0, 1.0, 1.0, 1.0, 1.0};
    const LayerParams bottom{rho3, E3, G3, I3, h3};
    return BeamConfig::create(top, bottom, 1.0, 0.5, L);
}

inline BeamConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.5, 2.0);
    const LayerParams top{u(rng), u(rng), u(rng), u(rng), u(rng)};
    const LayerParams bottom{u(rng), u(rng), u(rng), u(rng), u(rng)};
    return BeamConfig::create(top, bottom, u(rng), u(rng), 1.0 + 3.0 * (u(rng) - 0.5));
}

inline DampingPattern random_two_damper(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 4);
    std::uniform_real_distribution<double> mag(0.1, 2.0);
    int i = pick(rng);
    int j = pick(rng);
    while (j == i) j = pick(rng);
    std::array<double, 5> c{};
    c[i] = mag(rng);
    c[j] = mag(rng);
    return DampingPattern{c[0], c[1], c[2], c[3], c[4]};
}

inline StateVector random_state(const SemiDiscreteSystem& sys, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    StateVector u = StateVector::zero(sys.layout);
    for (int i = 0; i < sys.layout.n_q; ++i) {
        u.q(i) = g(rng);
        u.p(i) = g(rng);
    }
    return u;
}

}  // namespace beamlab::testing
