#pragma once

#include <optional>

#include "exitgame/strategies.hpp"

namespace exitgame {

// Uniform correction-time grid t_i = i * diam.
struct Partition {
    double diam = 0.0;
    double min_step = 0.0;

    static Partition uniform(double diam) {
        if (!(diam > 0.0)) throw std::invalid_argument("partition: diam must be positive");
        return Partition{diam, diam};
    }
};

enum class HitSet { None, M1, M2 };

struct ExitRecord {
    double tau_eps = kInfinity;
    HitSet hit = HitSet::None;
    double t_hat_1 = kInfinity;  // first eps-approach to the target boundary
    double t_hat_2 = kInfinity;  // first eps-approach to the lifeline boundary
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<double> control_times;  // piecewise-constant records
    std::vector<Vec> p_controls;
    std::vector<Vec> q_controls;
    ExitRecord exit;
    double payoff = kInfinity;  // +inf on lifeline hit or no exit

    void write_ndrec(const std::string& path) const;
};

// Opponent control source for rollouts: a feedback strategy evaluated on
// the sub-partition, seeded uniform-random picks, or one constant control.
struct OpponentPolicy {
    enum class Kind { Feedback, Random, Constant };
    Kind kind = Kind::Constant;
    const FeedbackStrategy* feedback = nullptr;
    std::uint64_t seed = 0;
    int constant_index = 0;
    std::string describe() const;
};

struct SimulationParams {
    double eps = 0.0;
    double theta = 0.0;
    int kappa_sub = 4;      // opponent sub-steps per partition interval
    double tol_event = kTolEvent;
    double max_rk_step = 0.0;  // <= 0: one RK4 step per sub-interval
};

// One step-by-step motion: the controller's feedback is frozen at x(t_i)
// across [t_i, t_{i+1}); the opponent plays piecewise-constant controls on
// the sub-partition; exit on the eps-inflated sets is located by bisection.
Trajectory step_motion(const GameSpec& spec, ConstSpan x0,
                       const FeedbackStrategy& controller,
                       const OpponentPolicy& opponent, const Partition& delta,
                       const SimulationParams& sim);

struct GuaranteeReport {
    Player player = Player::First;
    Vec x0;
    double eps = 0.0;
    double alpha = 0.0;
    double diam = 0.0;
    double theta = 0.0;
    double estimate = kInfinity;
    bool is_lower_bound = false;  // J1: lower bound of the sup; J2: upper of the inf
    int rollouts = 0;
    std::uint64_t seed = 0;
    std::string opponent_mix;
    std::string achieved_by;

    std::string to_text() const;
};

// Worst payoff over the opponent ensemble: extremal-shift adversary,
// seeded random piecewise-constant controls, and every constant control.
// The true sup is over measurable controls, so the estimate is an explicit
// lower bound. adversary_field (a Sup mollification of the same base) is
// built on demand when absent.
GuaranteeReport estimate_J1(const GameSpec& spec, ConstSpan x0,
                            const FeedbackStrategy& U, const Partition& delta,
                            const SimulationParams& sim, int n_rollouts,
                            std::uint64_t seed,
                            const MollifiedField* adversary_field = nullptr);

// Mirror: best payoff over the first-player ensemble; upper bound of the inf.
GuaranteeReport estimate_J2(const GameSpec& spec, ConstSpan x0,
                            const FeedbackStrategy& V, const Partition& delta,
                            const SimulationParams& sim, int n_rollouts,
                            std::uint64_t seed,
                            const MollifiedField* adversary_field = nullptr);

struct LadderRung {
    double eps = 0.0;
    double alpha = 0.0;
    double diam = 0.0;
};

struct LadderEntry {
    LadderRung rung;
    GuaranteeReport report;
    double target_value = kInfinity;  // kruzhkov_inv(u(x0))
    double gap = kInfinity;           // estimate - target
};

// Refinement ladder for the first player's guarantee: one estimate per
// rung, against -ln(1 - u(x0)) from the solved field.
std::vector<LadderEntry> refinement_ladder(const GameSpec& spec,
                                           const ValueField& solved,
                                           ConstSpan x0,
                                           const std::vector<LadderRung>& rungs,
                                           const SimulationParams& base_sim,
                                           int n_rollouts, std::uint64_t seed);

// Independent oracle: lower-game value of the depth-limited discrete game
// tree with Euler steps of length h_bf. Exit checks against the sharp sets
// M1/M2; lifeline and horizon give +inf.
double brute_force_value(const GameSpec& spec, ConstSpan x0, double h_bf,
                         int depth);

// theta default: 1.25 * kruzhkov_inv(u(x0)) / b when finite, else 0 (caller
// must supply).
double default_theta(const GameSpec& spec, const ValueField& solved, ConstSpan x0);

}  // namespace exitgame
