#pragma once

#include "exitgame/dynamics.hpp"
#include "exitgame/geometry.hpp"

namespace exitgame {

// Complete scenario: geometry, dynamics, finite control sets, running cost
// g with its lower bound b, boundary payoff sigma with (Sigma, L), and the
// Lipschitz/growth constants. Immutable after construction.
struct GameSpec {
    DomainGeometry geometry;
    Dynamics dynamics;
    ControlSet P;
    ControlSet Q;
    RunningCost cost;
    BoundaryPayoff payoff;
    SigmaExtension sigma_hat;
    double lambda = 0.0;  // Lipschitz constant of f and g in x
    double r_f = 0.0;     // sublinear growth constant
    std::uint64_t hash = 0;
    std::string name;

    double g(ConstSpan x) const { return cost.eval(x); }

    // Kruzhkov transform of the extended payoff; callers add the
    // lifeline-shell override (= 1 on M2^eps) where they need it.
    double sigma_tilde(ConstSpan x) const { return kruzhkov(sigma_hat(x)); }

    // Boundary value used at grid nodes: sigma-tilde on M1, 1 on M2.
    double boundary_value(ConstSpan x) const {
        if (geometry.m2.contains(x)) return 1.0;
        return sigma_tilde(x);
    }
};

}  // namespace exitgame
