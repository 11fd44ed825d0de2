#pragma once

#include "exitgame/game.hpp"
#include "exitgame/grid.hpp"

namespace exitgame {

struct SolverConfig {
    double time_step = 0.0;     // <= 0 picks the CFL default h / max|f|
    double residual_tol = 1e-10;
    int max_iters = 2000;
    enum class Sweep { GaussSeidel, Jacobi };
    Sweep sweep = Sweep::GaussSeidel;
};

struct SolveReport {
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> residual_history;  // one entry per iteration
    std::vector<double> contraction_ratios;
    double time_step_used = 0.0;
    double max_speed = 0.0;  // sampled max |f| used for the CFL step
    bool converged = false;

    std::string to_text() const;
};

struct SolveError : std::runtime_error {
    double last_residual;
    SolveError(const std::string& msg, double residual)
        : std::runtime_error(msg), last_residual(residual) {}
};

// Value iteration for the Dirichlet problem in Kruzhkov variables. The
// fixed point of
//   u(x) = min_p max_q [ e^{-g(x) h_t} u(x + h_t f(x,p,q)) + 1 - e^{-g(x) h_t} ]
// at interior nodes with u = sigma-tilde on target nodes and u = 1 on
// lifeline/box-edge nodes. One Gauss-Seidel iteration cycles through all
// 2^d sweep orderings, which keeps the per-iteration residual ratio below
// the discount factor e^{-b h_t}.
std::pair<ValueField, SolveReport> solve(const GameSpec& spec, const Grid& grid,
                                         const SolverConfig& cfg);

// Sup-norm defect of the update over interior nodes; boundary nodes are
// read at their enforced values regardless of what vf stores there.
double residual(const ValueField& vf, const GameSpec& spec,
                const SolverConfig& cfg);

}  // namespace exitgame
