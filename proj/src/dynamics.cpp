#include "exitgame/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace exitgame {

ControlSet circle_controls(int count, double radius, bool include_center,
                           const std::string& label) {
    if (count <= 0) throw ConfigError("controls: circle count must be positive");
    ControlSet cs;
    cs.label = label;
    for (int i = 0; i < count; ++i) {
        const double t = 2.0 * std::numbers::pi * i / count;
        cs.points.push_back({radius * std::cos(t), radius * std::sin(t)});
    }
    if (include_center) cs.points.push_back({0.0, 0.0});
    return cs;
}

Dynamics Dynamics::simple_motion(int dim) {
    Dynamics d;
    d.model = Model::SimpleMotion;
    d.state_dim = dim;
    d.p_dim = dim;
    d.q_dim = dim;
    return d;
}

Dynamics Dynamics::relative_pursuit(int dim) {
    Dynamics d;
    d.model = Model::RelativePursuit;
    d.state_dim = dim;
    d.p_dim = dim;
    d.q_dim = dim;
    return d;
}

Dynamics Dynamics::rotating() {
    Dynamics d;
    d.model = Model::Rotating;
    d.state_dim = 2;
    d.p_dim = 2;
    d.q_dim = 2;
    return d;
}

Dynamics Dynamics::control_affine(int dim, std::vector<double> A,
                                  std::vector<double> B, int p_dim,
                                  std::vector<double> C, int q_dim) {
    if (static_cast<int>(A.size()) != dim * dim)
        throw ConfigError("dynamics: A must be dim x dim");
    if (static_cast<int>(B.size()) != dim * p_dim)
        throw ConfigError("dynamics: B must be dim x p_dim");
    if (static_cast<int>(C.size()) != dim * q_dim)
        throw ConfigError("dynamics: C must be dim x q_dim");
    Dynamics d;
    d.model = Model::ControlAffine;
    d.state_dim = dim;
    d.A = std::move(A);
    d.B = std::move(B);
    d.C = std::move(C);
    d.p_dim = p_dim;
    d.q_dim = q_dim;
    return d;
}

void Dynamics::eval(const double* x, const double* p, const double* q,
                    double* out) const {
    switch (model) {
        case Model::SimpleMotion:
            for (int i = 0; i < state_dim; ++i) out[i] = p[i];
            return;
        case Model::RelativePursuit:
            for (int i = 0; i < state_dim; ++i) out[i] = p[i] - q[i];
            return;
        case Model::Rotating:
            out[0] = x[1] + p[0] - q[0];
            out[1] = -x[0] + p[1] - q[1];
            return;
        case Model::ControlAffine:
            for (int i = 0; i < state_dim; ++i) {
                double v = 0.0;
                for (int j = 0; j < state_dim; ++j) v += A[i * state_dim + j] * x[j];
                for (int j = 0; j < p_dim; ++j) v += B[i * p_dim + j] * p[j];
                for (int j = 0; j < q_dim; ++j) v += C[i * q_dim + j] * q[j];
                out[i] = v;
            }
            return;
    }
}

Vec Dynamics::eval(ConstSpan x, ConstSpan p, ConstSpan q) const {
    Vec out(state_dim);
    eval(x.data(), p.data(), q.data(), out.data());
    return out;
}

double RunningCost::eval(ConstSpan x) const {
    switch (kind) {
        case Kind::Constant:
            return value;
        case Kind::AffineClamped:
            return std::max(b, value + dot(x, coeff));
        case Kind::Radial:
            return std::max(b, value + c1 * dist(x, coeff));
    }
    return b;
}

namespace {

double game_part(const Dynamics& dyn, const ControlSet& P, const ControlSet& Q,
                 ConstSpan x, ConstSpan s, int* argmin_p) {
    Vec f(dyn.state_dim);
    double best = kInfinity;
    int best_p = 0;
    for (int ip = 0; ip < P.size(); ++ip) {
        double inner = -kInfinity;
        for (int iq = 0; iq < Q.size(); ++iq) {
            dyn.eval(x.data(), P.points[ip].data(), Q.points[iq].data(), f.data());
            inner = std::max(inner, dot(s, f));
        }
        if (inner < best) {
            best = inner;
            best_p = ip;
        }
    }
    if (argmin_p) *argmin_p = best_p;
    return best;
}

double game_part_upper(const Dynamics& dyn, const ControlSet& P,
                       const ControlSet& Q, ConstSpan x, ConstSpan s,
                       int* argmax_q) {
    Vec f(dyn.state_dim);
    double best = -kInfinity;
    int best_q = 0;
    for (int iq = 0; iq < Q.size(); ++iq) {
        double inner = kInfinity;
        for (int ip = 0; ip < P.size(); ++ip) {
            dyn.eval(x.data(), P.points[ip].data(), Q.points[iq].data(), f.data());
            inner = std::min(inner, dot(s, f));
        }
        if (inner > best) {
            best = inner;
            best_q = iq;
        }
    }
    if (argmax_q) *argmax_q = best_q;
    return best;
}

}  // namespace

double lower_game_value(const Dynamics& dyn, const ControlSet& P,
                        const ControlSet& Q, ConstSpan x, ConstSpan s) {
    return game_part(dyn, P, Q, x, s, nullptr);
}

double upper_game_value(const Dynamics& dyn, const ControlSet& P,
                        const ControlSet& Q, ConstSpan x, ConstSpan s) {
    return game_part_upper(dyn, P, Q, x, s, nullptr);
}

double hamiltonian_H(const Dynamics& dyn, const RunningCost& cost,
                     const ControlSet& P, const ControlSet& Q,
                     ConstSpan x, ConstSpan s, double z) {
    return lower_game_value(dyn, P, Q, x, s) + cost.eval(x) * (1.0 - z);
}

double hamiltonian_script(const Dynamics& dyn, const RunningCost& cost,
                          const ControlSet& P, const ControlSet& Q,
                          ConstSpan x, ConstSpan s) {
    return hamiltonian_H(dyn, cost, P, Q, x, s, 0.0);
}

IsaacsReport check_isaacs(const Dynamics& dyn, const ControlSet& P,
                          const ControlSet& Q, const std::vector<Vec>& xs,
                          const std::vector<Vec>& ss) {
    if (xs.empty() || ss.empty()) {
        throw std::invalid_argument("check_isaacs: empty sample lists");
    }
    IsaacsReport rep;
    for (const auto& x : xs) {
        for (const auto& s : ss) {
            const double lo = lower_game_value(dyn, P, Q, x, s);
            const double hi = upper_game_value(dyn, P, Q, x, s);
            const double gap = std::abs(lo - hi);
            if (gap > rep.max_gap) {
                rep.max_gap = gap;
                rep.worst_x = x;
                rep.worst_s = s;
            }
        }
    }
    return rep;
}

int p0_index(const Dynamics& dyn, const ControlSet& P, const ControlSet& Q,
             ConstSpan x, ConstSpan s) {
    int ip = 0;
    game_part(dyn, P, Q, x, s, &ip);
    return ip;
}

int q0_index(const Dynamics& dyn, const ControlSet& P, const ControlSet& Q,
             ConstSpan x, ConstSpan s) {
    int iq = 0;
    game_part_upper(dyn, P, Q, x, s, &iq);
    return iq;
}

double estimate_lambda(const Dynamics& dyn, const RunningCost& cost,
                       const ControlSet& P, const ControlSet& Q,
                       const BoxBounds& box, int n_samples) {
    std::uint64_t rng = seed_stream(0x1a3bda, 7);
    const int d = dyn.state_dim;
    const double step = 1e-5 * std::max(box.diameter(), 1.0);
    double lam = 0.0;
    Vec x(d), xp(d), f0(d), f1(d);
    for (int it = 0; it < n_samples; ++it) {
        for (int i = 0; i < d; ++i)
            x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit_uniform(rng);
        const auto& p = P.points[static_cast<std::size_t>(unit_uniform(rng) * P.size()) % P.size()];
        const auto& q = Q.points[static_cast<std::size_t>(unit_uniform(rng) * Q.size()) % Q.size()];
        for (int axis = 0; axis < d; ++axis) {
            xp = x;
            xp[axis] += step;
            dyn.eval(x.data(), p.data(), q.data(), f0.data());
            dyn.eval(xp.data(), p.data(), q.data(), f1.data());
            lam = std::max(lam, dist(f0, f1) / step);
            lam = std::max(lam, std::abs(cost.eval(xp) - cost.eval(x)) / step);
        }
    }
    return lam;
}

double estimate_growth(const Dynamics& dyn, const ControlSet& P,
                       const ControlSet& Q, const BoxBounds& box,
                       int n_samples) {
    std::uint64_t rng = seed_stream(0x6704, 11);
    const int d = dyn.state_dim;
    double rf = 0.0;
    Vec x(d), f(d);
    for (int it = 0; it < n_samples; ++it) {
        for (int i = 0; i < d; ++i)
            x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit_uniform(rng);
        for (const auto& p : P.points) {
            for (const auto& q : Q.points) {
                dyn.eval(x.data(), p.data(), q.data(), f.data());
                rf = std::max(rf, norm(f) / (1.0 + norm(x)));
            }
        }
    }
    return rf;
}

}  // namespace exitgame
