#include "exitgame/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace exitgame {

namespace {

// One classical 4-stage step with both controls held constant.
void rk4_step(const GameSpec& spec, const Vec& p, const Vec& q, double dt,
              const Vec& x, Vec& out) {
    const int d = spec.dynamics.state_dim;
    Vec k1(d), k2(d), k3(d), k4(d), tmp(d);
    spec.dynamics.eval(x.data(), p.data(), q.data(), k1.data());
    for (int i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    spec.dynamics.eval(tmp.data(), p.data(), q.data(), k2.data());
    for (int i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    spec.dynamics.eval(tmp.data(), p.data(), q.data(), k3.data());
    for (int i = 0; i < d; ++i) tmp[i] = x[i] + dt * k3[i];
    spec.dynamics.eval(tmp.data(), p.data(), q.data(), k4.data());
    out.resize(d);
    for (int i = 0; i < d; ++i) {
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(out[i])) {
            throw std::runtime_error("step_motion: non-finite state");
        }
    }
}

struct ShellPair {
    ShapeSet m1eps;
    ShapeSet m2eps;
    bool in_either(ConstSpan x) const {
        return m1eps.contains(x) || m2eps.contains(x);
    }
};

}  // namespace

std::string OpponentPolicy::describe() const {
    switch (kind) {
        case Kind::Feedback: return "extremal-shift";
        case Kind::Random: return "random(seed=" + std::to_string(seed) + ")";
        case Kind::Constant: return "constant[" + std::to_string(constant_index) + "]";
    }
    return "";
}

Trajectory step_motion(const GameSpec& spec, ConstSpan x0,
                       const FeedbackStrategy& controller,
                       const OpponentPolicy& opponent, const Partition& delta,
                       const SimulationParams& sim) {
    if (!(sim.theta > 0.0)) throw std::invalid_argument("step_motion: theta must be positive");
    if (!(sim.eps >= 0.0)) throw std::invalid_argument("step_motion: eps must be >= 0");
    const int d = spec.dynamics.state_dim;
    const ShellPair shells{inflate(spec.geometry.m1, sim.eps),
                           inflate(spec.geometry.m2, sim.eps)};

    Trajectory traj;
    Vec x(x0.begin(), x0.end());

    // Starting states on a shell edge exit immediately; strictly inside an
    // inflated set is a caller error.
    const bool in1 = shells.m1eps.contains(x);
    const bool in2 = shells.m2eps.contains(x);
    if (in1 || in2) {
        const ShapeSet& inner = in1 ? spec.geometry.m1 : spec.geometry.m2;
        const double bd = inner.boundary_distance(x);
        const bool strictly_inside = inner.contains(x, 0.0) && bd > 1e-12;
        if (strictly_inside || bd < sim.eps - 1e-12) {
            throw std::invalid_argument(
                "step_motion: x0 lies inside an eps-inflated exit set");
        }
        traj.times.push_back(0.0);
        traj.states.push_back(x);
        traj.exit.tau_eps = 0.0;
        traj.exit.hit = in1 ? HitSet::M1 : HitSet::M2;
        (in1 ? traj.exit.t_hat_1 : traj.exit.t_hat_2) = 0.0;
        traj.payoff = in1 ? spec.sigma_hat(x) : kInfinity;
        return traj;
    }

    const double sub_dt_target = delta.diam / std::max(1, sim.kappa_sub);
    std::uint64_t rng = seed_stream(opponent.seed, 0x5e9);

    traj.times.push_back(0.0);
    traj.states.push_back(x);
    double integral_g = 0.0;  // trapezoid over the dense samples
    double g_prev = spec.g(x);
    double t = 0.0;
    bool done = false;

    auto opponent_control = [&](const Vec& xc) -> Vec {
        switch (opponent.kind) {
            case OpponentPolicy::Kind::Feedback:
                return opponent.feedback->act(xc);
            case OpponentPolicy::Kind::Random: {
                const ControlSet& set =
                    controller.player() == Player::First ? spec.Q : spec.P;
                const int i = std::min<int>(
                    static_cast<int>(unit_uniform(rng) * set.size()),
                    set.size() - 1);
                return set.points[i];
            }
            case OpponentPolicy::Kind::Constant: {
                const ControlSet& set =
                    controller.player() == Player::First ? spec.Q : spec.P;
                return set.points[opponent.constant_index];
            }
        }
        return {};
    };

    Vec x_next(d), x_mid(d);
    while (!done && t < sim.theta - 1e-15) {
        // controller frozen at the partition node
        const Vec own = controller.act(x);
        const double t_stop = std::min(t + delta.diam, sim.theta);
        double t_sub = t;
        while (t_sub < t_stop - 1e-15 && !done) {
            const Vec opp = opponent_control(x);
            const Vec& p = controller.player() == Player::First ? own : opp;
            const Vec& q = controller.player() == Player::First ? opp : own;
            double piece_end = std::min(t_sub + sub_dt_target, t_stop);
            // integrate the piece with one or more RK4 steps
            double step = piece_end - t_sub;
            if (sim.max_rk_step > 0.0 && step > sim.max_rk_step) {
                const int n = static_cast<int>(std::ceil(step / sim.max_rk_step));
                step = (piece_end - t_sub) / n;
            }
            while (t_sub < piece_end - 1e-15 && !done) {
                const double dt = std::min(step, piece_end - t_sub);
                rk4_step(spec, p, q, dt, x, x_next);
                if (shells.in_either(x_next)) {
                    // bisect the event time within [t_sub, t_sub + dt]
                    double lo = 0.0, hi = dt;
                    for (int it = 0; it < 200 && hi - lo > sim.tol_event; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        rk4_step(spec, p, q, mid, x, x_mid);
                        if (shells.in_either(x_mid)) hi = mid;
                        else lo = mid;
                    }
                    rk4_step(spec, p, q, hi, x, x_next);
                    const double t_hit = t_sub + hi;
                    const double g_next = spec.g(x_next);
                    integral_g += 0.5 * (g_prev + g_next) * hi;
                    traj.times.push_back(t_hit);
                    traj.states.push_back(x_next);
                    traj.control_times.push_back(t_sub);
                    traj.p_controls.push_back(p);
                    traj.q_controls.push_back(q);
                    const bool hit1 = shells.m1eps.contains(x_next);
                    traj.exit.tau_eps = t_hit;
                    traj.exit.hit = hit1 ? HitSet::M1 : HitSet::M2;
                    (hit1 ? traj.exit.t_hat_1 : traj.exit.t_hat_2) = t_hit;
                    traj.payoff =
                        hit1 ? integral_g + spec.sigma_hat(x_next) : kInfinity;
                    done = true;
                    break;
                }
                const double g_next = spec.g(x_next);
                integral_g += 0.5 * (g_prev + g_next) * dt;
                g_prev = g_next;
                x = x_next;
                t_sub += dt;
                traj.times.push_back(t_sub);
                traj.states.push_back(x);
            }
            if (!done) {
                traj.control_times.push_back(t_sub);
                traj.p_controls.push_back(p);
                traj.q_controls.push_back(q);
            }
        }
        t = t_stop;
    }
    if (!done) {
        // no exit before the horizon
        traj.exit.tau_eps = kInfinity;
        traj.exit.hit = HitSet::None;
        traj.payoff = kInfinity;
    }
    return traj;
}

namespace {

GuaranteeReport estimate_guarantee(const GameSpec& spec, ConstSpan x0,
                                   const FeedbackStrategy& strat,
                                   const Partition& delta,
                                   const SimulationParams& sim, int n_rollouts,
                                   std::uint64_t seed,
                                   const MollifiedField* adversary_field) {
    if (n_rollouts < 1) throw std::invalid_argument("estimate: n_rollouts >= 1");
    const bool first = strat.player() == Player::First;
    const ControlSet& opp_set = first ? spec.Q : spec.P;

    GuaranteeReport rep;
    rep.player = strat.player();
    rep.x0.assign(x0.begin(), x0.end());
    rep.eps = sim.eps;
    rep.alpha = strat.field().kernel.alpha;
    rep.diam = delta.diam;
    rep.theta = sim.theta;
    rep.seed = seed;
    rep.is_lower_bound = first;

    // J1 takes the max over opponents (reported as a lower bound of the
    // sup over measurable controls); J2 the min.
    const double sign = first ? 1.0 : -1.0;
    double best = -kInfinity;
    std::string who;
    int count = 0;

    // +inf payoffs dominate the J1 max and lose the J2 min.
    auto consider = [&](const Trajectory& tr, const std::string& label) {
        ++count;
        const double key = sign * tr.payoff;
        if (count == 1 || key > best) {
            best = key;
            who = label;
        }
    };

    if (opp_set.size() == 1) {
        // singleton opponent: the ensemble collapses to one rollout
        OpponentPolicy opp;
        opp.kind = OpponentPolicy::Kind::Constant;
        opp.constant_index = 0;
        consider(step_motion(spec, x0, strat, opp, delta, sim), "constant[0]");
        rep.opponent_mix = "singleton";
    } else {
        // (a) extremal-shift adversary on its own convolution of the base
        MollifiedField local;
        const MollifiedField* adv = adversary_field;
        if (!adv) {
            local = build_mollified(*strat.field().base, strat.field().kernel,
                                    first ? MollifyMode::Sup : MollifyMode::Inf);
            adv = &local;
        }
        FeedbackStrategy adv_strat(first ? Player::Second : Player::First, *adv,
                                   spec);
        OpponentPolicy opp;
        opp.kind = OpponentPolicy::Kind::Feedback;
        opp.feedback = &adv_strat;
        consider(step_motion(spec, x0, strat, opp, delta, sim), "extremal-shift");
        // (b) seeded random piecewise-constant controls
        for (int r = 0; r < n_rollouts; ++r) {
            OpponentPolicy rnd;
            rnd.kind = OpponentPolicy::Kind::Random;
            rnd.seed = seed_stream(seed, r + 1);
            consider(step_motion(spec, x0, strat, rnd, delta, sim),
                     rnd.describe());
        }
        // (c) every constant control
        for (int i = 0; i < opp_set.size(); ++i) {
            OpponentPolicy c;
            c.kind = OpponentPolicy::Kind::Constant;
            c.constant_index = i;
            consider(step_motion(spec, x0, strat, c, delta, sim), c.describe());
        }
        rep.opponent_mix = "extremal-shift + " + std::to_string(n_rollouts) +
                           " random + " + std::to_string(opp_set.size()) +
                           " constant";
    }
    rep.rollouts = count;
    rep.estimate = sign * best;
    rep.achieved_by = who;
    return rep;
}

}  // namespace

GuaranteeReport estimate_J1(const GameSpec& spec, ConstSpan x0,
                            const FeedbackStrategy& U, const Partition& delta,
                            const SimulationParams& sim, int n_rollouts,
                            std::uint64_t seed,
                            const MollifiedField* adversary_field) {
    if (U.player() != Player::First) {
        throw std::invalid_argument("estimate_J1: needs a first-player strategy");
    }
    return estimate_guarantee(spec, x0, U, delta, sim, n_rollouts, seed,
                              adversary_field);
}

GuaranteeReport estimate_J2(const GameSpec& spec, ConstSpan x0,
                            const FeedbackStrategy& V, const Partition& delta,
                            const SimulationParams& sim, int n_rollouts,
                            std::uint64_t seed,
                            const MollifiedField* adversary_field) {
    if (V.player() != Player::Second) {
        throw std::invalid_argument("estimate_J2: needs a second-player strategy");
    }
    return estimate_guarantee(spec, x0, V, delta, sim, n_rollouts, seed,
                              adversary_field);
}

std::vector<LadderEntry> refinement_ladder(const GameSpec& spec,
                                           const ValueField& solved,
                                           ConstSpan x0,
                                           const std::vector<LadderRung>& rungs,
                                           const SimulationParams& base_sim,
                                           int n_rollouts, std::uint64_t seed) {
    std::vector<LadderEntry> out;
    const double u0 = solved.interpolate(x0);
    const double target = kruzhkov_inv(u0);
    for (const auto& rung : rungs) {
        const Kernel k = Kernel::make(rung.alpha, spec.lambda);
        const MollifiedField inf_field = build_mollified(solved, k, MollifyMode::Inf);
        const FeedbackStrategy U(Player::First, inf_field, spec);
        SimulationParams sim = base_sim;
        sim.eps = rung.eps;
        LadderEntry e;
        e.rung = rung;
        e.report = estimate_J1(spec, x0, U, Partition::uniform(rung.diam), sim,
                               n_rollouts, seed);
        e.target_value = target;
        e.gap = e.report.estimate - target;
        out.push_back(std::move(e));
    }
    return out;
}

double brute_force_value(const GameSpec& spec, ConstSpan x0, double h_bf,
                         int depth) {
    if (!(h_bf > 0.0)) throw std::invalid_argument("brute_force: h_bf must be positive");
    const double paths =
        std::pow(static_cast<double>(spec.P.size()) * spec.Q.size(), depth);
    if (paths > 1e9) {
        throw std::invalid_argument(
            "brute_force: |P|^depth * |Q|^depth too large");
    }
    struct Rec {
        const GameSpec& spec;
        double h;
        double run(const Vec& x, int remaining) const {
            if (spec.geometry.m1.contains(x)) return spec.sigma_hat(x);
            if (spec.geometry.m2.contains(x)) return kInfinity;
            if (remaining == 0) return kInfinity;
            const double gstep = spec.g(x) * h;
            const int d = spec.dynamics.state_dim;
            Vec f(d), nx(d);
            double best = kInfinity;
            for (const auto& p : spec.P.points) {
                double inner = -kInfinity;
                for (const auto& q : spec.Q.points) {
                    spec.dynamics.eval(x.data(), p.data(), q.data(), f.data());
                    for (int i = 0; i < d; ++i) nx[i] = x[i] + h * f[i];
                    inner = std::max(inner, run(nx, remaining - 1));
                    if (inner >= best) break;
                }
                best = std::min(best, inner);
            }
            return std::isinf(best) ? best : gstep + best;
        }
    };
    Vec x(x0.begin(), x0.end());
    return Rec{spec, h_bf}.run(x, depth);
}

double default_theta(const GameSpec& spec, const ValueField& solved,
                     ConstSpan x0) {
    const double u0 = solved.interpolate(x0);
    if (u0 >= 1.0) return 0.0;
    return 1.25 * kruzhkov_inv(u0) / spec.cost.b;
}

void Trajectory::write_ndrec(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    // one JSON record per dense sample; controls are the piecewise records
    // active at the sample time
    std::size_t ci = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        while (ci + 1 < control_times.size() && control_times[ci + 1] <= times[i])
            ++ci;
        os << "{\"t\":" << fmt17(times[i]) << ",\"x\":[";
        for (std::size_t k = 0; k < states[i].size(); ++k)
            os << (k ? "," : "") << fmt17(states[i][k]);
        os << "]";
        if (ci < p_controls.size()) {
            os << ",\"p\":[";
            for (std::size_t k = 0; k < p_controls[ci].size(); ++k)
                os << (k ? "," : "") << fmt17(p_controls[ci][k]);
            os << "],\"q\":[";
            for (std::size_t k = 0; k < q_controls[ci].size(); ++k)
                os << (k ? "," : "") << fmt17(q_controls[ci][k]);
            os << "]";
        }
        os << "}\n";
    }
}

std::string GuaranteeReport::to_text() const {
    std::ostringstream os;
    os << "player: " << (player == Player::First ? "first" : "second") << "\n";
    os << "x0:";
    for (double c : x0) os << " " << fmt17(c);
    os << "\n";
    os << "eps: " << fmt17(eps) << "\n";
    os << "alpha: " << fmt17(alpha) << "\n";
    os << "diam: " << fmt17(diam) << "\n";
    os << "theta: " << fmt17(theta) << "\n";
    os << "rollouts: " << rollouts << "\n";
    os << "seed: " << seed << "\n";
    os << "opponent_mix: " << opponent_mix << "\n";
    os << "achieved_by: " << achieved_by << "\n";
    os << "estimate: " << (std::isinf(estimate) ? "inf" : fmt17(estimate)) << "\n";
    os << "bound: "
       << (player == Player::First
               ? "lower bound of sup over opponent controls (J1)"
               : "upper bound of inf over opponent controls (J2)")
       << "\n";
    return os.str();
}

}  // namespace exitgame
