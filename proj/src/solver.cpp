#include "exitgame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace exitgame {

namespace {

constexpr int kMaxDim = 8;

double interp_raw(const Grid& g, const double* values, const double* x) {
    const int d = g.dim;
    int base[kMaxDim];
    double t[kMaxDim];
    std::size_t stride[kMaxDim];
    std::size_t s = 1;
    for (int i = d - 1; i >= 0; --i) {
        stride[i] = s;
        s *= g.nodes[i];
    }
    for (int i = 0; i < d; ++i) {
        const double rel = (x[i] - g.origin[i]) / g.spacing[i];
        if (!(rel >= -1e-12) || rel > g.nodes[i] - 1 + 1e-12) return 1.0;
        int c = static_cast<int>(std::floor(rel));
        c = std::clamp(c, 0, g.nodes[i] - 2);
        base[i] = c;
        t[i] = std::clamp(rel - c, 0.0, 1.0);
    }
    double acc = 0.0;
    for (int m = 0; m < (1 << d); ++m) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int i = 0; i < d; ++i) {
            const int bit = (m >> i) & 1;
            w *= bit ? t[i] : (1.0 - t[i]);
            idx += stride[i] * (base[i] + bit);
        }
        if (w != 0.0) acc += w * values[idx];
    }
    return acc;
}

// Shared machinery of solve() and residual(): boundary-enforced values,
// per-node discounts, and precomputed foot-point stencils when f does not
// depend on x.
struct UpdateKernel {
    const GameSpec& spec;
    const Grid& grid;
    const std::vector<NodeClass>& classes;
    double h_t = 0.0;
    double max_speed = 0.0;
    int d = 0;
    int np = 0, nq = 0;
    std::size_t stride[kMaxDim] = {};
    std::vector<double> discount;

    bool fast = false;
    std::vector<std::ptrdiff_t> corner_off;  // flattened nonzero corners
    std::vector<double> corner_w;
    std::vector<int> pair_begin;             // npq+1 entries into corners
    std::vector<double> delta;               // npq x d foot offsets
    std::vector<char> safe;                  // per node: all stencils in range
    // Warm start: last argmin p per node. Seeds the min-p loop so the
    // alpha-beta pruning cuts most q evaluations; the returned value is
    // exact either way.
    std::vector<std::uint16_t> warm;

    UpdateKernel(const GameSpec& s, const Grid& g,
                 const std::vector<NodeClass>& cls, const SolverConfig& cfg)
        : spec(s), grid(g), classes(cls) {
        d = grid.dim;
        if (d > kMaxDim) throw ConfigError("grid: dimension above supported limit");
        np = spec.P.size();
        nq = spec.Q.size();
        std::size_t acc = 1;
        for (int i = d - 1; i >= 0; --i) {
            stride[i] = acc;
            acc *= grid.nodes[i];
        }
        max_speed = sample_max_speed();
        h_t = cfg.time_step > 0.0 ? cfg.time_step
                                  : grid.min_spacing() / std::max(max_speed, 1e-12);

        discount.resize(grid.total());
        Vec x(d);
        for (std::size_t i = 0; i < discount.size(); ++i) {
            grid.coords_into(i, x.data());
            discount[i] = std::exp(-spec.g(x) * h_t);
        }

        if (spec.dynamics.state_independent()) build_stencils();
        warm.assign(grid.total(), 0);
    }

    double sample_max_speed() const {
        const std::size_t n = grid.total();
        const std::size_t step = std::max<std::size_t>(1, n / 4096);
        Vec x(d), f(d);
        double m = 0.0;
        for (std::size_t idx = 0; idx < n; idx += step) {
            grid.coords_into(idx, x.data());
            for (const auto& p : spec.P.points) {
                for (const auto& q : spec.Q.points) {
                    spec.dynamics.eval(x.data(), p.data(), q.data(), f.data());
                    m = std::max(m, norm(f));
                }
            }
            if (spec.dynamics.state_independent()) break;
        }
        return m;
    }

    void build_stencils() {
        fast = true;
        const int npq = np * nq;
        pair_begin.assign(npq + 1, 0);
        delta.assign(static_cast<std::size_t>(npq) * d, 0.0);
        int margin_lo[kMaxDim] = {};
        int margin_hi[kMaxDim] = {};
        Vec x0(d, 0.0), f(d);
        int fl[kMaxDim];
        double tt[kMaxDim];
        for (int ip = 0; ip < np; ++ip) {
            for (int iq = 0; iq < nq; ++iq) {
                const int k = ip * nq + iq;
                spec.dynamics.eval(x0.data(), spec.P.points[ip].data(),
                                   spec.Q.points[iq].data(), f.data());
                for (int i = 0; i < d; ++i) {
                    if (!std::isfinite(f[i]))
                        throw SolveError("solve: dynamics produced NaN", 0.0);
                    const double dx = h_t * f[i];
                    delta[static_cast<std::size_t>(k) * d + i] = dx;
                    double rel = dx / grid.spacing[i];
                    int c = static_cast<int>(std::floor(rel));
                    double t = rel - c;
                    if (t > 1.0 - 1e-12) { ++c; t = 0.0; }  // snap exact node hits
                    if (t < 1e-12) t = 0.0;
                    fl[i] = c;
                    tt[i] = t;
                }
                for (int m = 0; m < (1 << d); ++m) {
                    double w = 1.0;
                    std::ptrdiff_t off = 0;
                    int lo[kMaxDim], hi[kMaxDim];
                    for (int i = 0; i < d; ++i) {
                        const int bit = (m >> i) & 1;
                        w *= bit ? tt[i] : (1.0 - tt[i]);
                        const int shift = fl[i] + bit;
                        off += static_cast<std::ptrdiff_t>(stride[i]) * shift;
                        lo[i] = std::max(0, -shift);
                        hi[i] = std::max(0, shift);
                    }
                    if (w == 0.0) continue;
                    corner_off.push_back(off);
                    corner_w.push_back(w);
                    for (int i = 0; i < d; ++i) {
                        margin_lo[i] = std::max(margin_lo[i], lo[i]);
                        margin_hi[i] = std::max(margin_hi[i], hi[i]);
                    }
                }
                pair_begin[k + 1] = static_cast<int>(corner_off.size());
            }
        }
        safe.assign(grid.total(), 0);
        std::vector<int> mi(d, 0);
        for (std::size_t idx = 0; idx < safe.size(); ++idx) {
            bool ok = true;
            std::size_t rem = idx;
            for (int i = d - 1; i >= 0; --i) {
                const int m = static_cast<int>(rem % grid.nodes[i]);
                rem /= grid.nodes[i];
                if (m < margin_lo[i] || m > grid.nodes[i] - 1 - margin_hi[i]) {
                    ok = false;
                    break;
                }
            }
            safe[idx] = ok ? 1 : 0;
        }
    }

    double max_over_q_fast(std::size_t idx, const double* v, int ip,
                           double cutoff) const {
        double inner = -kInfinity;
        for (int iq = 0; iq < nq; ++iq) {
            const int k = ip * nq + iq;
            double acc = 0.0;
            for (int c = pair_begin[k]; c < pair_begin[k + 1]; ++c) {
                acc += corner_w[c] * v[idx + corner_off[c]];
            }
            if (acc > inner) {
                inner = acc;
                if (inner >= cutoff) break;
            }
        }
        return inner;
    }

    double max_over_q_slow(std::size_t idx, const double* v, const double* x,
                           int ip, double cutoff) const {
        double foot[kMaxDim];
        double f[kMaxDim];
        double inner = -kInfinity;
        for (int iq = 0; iq < nq; ++iq) {
            if (fast) {
                const int k = ip * nq + iq;
                for (int i = 0; i < d; ++i)
                    foot[i] = x[i] + delta[static_cast<std::size_t>(k) * d + i];
            } else {
                spec.dynamics.eval(x, spec.P.points[ip].data(),
                                   spec.Q.points[iq].data(), f);
                for (int i = 0; i < d; ++i) {
                    const double fx = x[i] + h_t * f[i];
                    if (!std::isfinite(fx)) {
                        throw SolveError("solve: dynamics produced NaN at node " +
                                             std::to_string(idx),
                                         0.0);
                    }
                    foot[i] = fx;
                }
            }
            const double val = interp_raw(grid, v, foot);
            if (val > inner) {
                inner = val;
                if (inner >= cutoff) break;
            }
        }
        return inner;
    }

    // min_p max_q of the interpolated foot value at node idx.
    double game_value(std::size_t idx, const double* v, const double* x) {
        const bool use_fast = fast && safe[idx];
        const int first = warm[idx];
        double best = use_fast ? max_over_q_fast(idx, v, first, kInfinity)
                               : max_over_q_slow(idx, v, x, first, kInfinity);
        int best_p = first;
        for (int ip = 0; ip < np; ++ip) {
            if (ip == first) continue;
            const double inner = use_fast
                                     ? max_over_q_fast(idx, v, ip, best)
                                     : max_over_q_slow(idx, v, x, ip, best);
            if (inner < best) {
                best = inner;
                best_p = ip;
            }
        }
        warm[idx] = static_cast<std::uint16_t>(best_p);
        return best;
    }

    double update(std::size_t idx, const double* v, const double* x) {
        const double disc = discount[idx];
        return disc * game_value(idx, v, x) + (1.0 - disc);
    }
};

std::vector<double> enforced_values(const GameSpec& spec, const Grid& grid,
                                    const std::vector<NodeClass>& classes,
                                    const double* interior_source) {
    std::vector<double> v(grid.total());
    Vec x(grid.dim);
    for (std::size_t i = 0; i < v.size(); ++i) {
        switch (classes[i]) {
            case NodeClass::Target:
                grid.coords_into(i, x.data());
                v[i] = spec.sigma_tilde(x);
                break;
            case NodeClass::Lifeline:
            case NodeClass::BoxEdge:
                v[i] = 1.0;
                break;
            case NodeClass::Interior:
                v[i] = interior_source ? interior_source[i] : 1.0;
                break;
        }
    }
    return v;
}

// Visits every node once for the given sweep ordering (bit set = axis
// descending) and applies fn(linear_index, coords).
template <typename Fn>
void sweep_nodes(const Grid& grid, unsigned ordering, Fn&& fn) {
    const int d = grid.dim;
    std::vector<int> mi(d), start(d), stop(d), step(d);
    for (int i = 0; i < d; ++i) {
        if (ordering & (1u << i)) {
            start[i] = grid.nodes[i] - 1;
            stop[i] = -1;
            step[i] = -1;
        } else {
            start[i] = 0;
            stop[i] = grid.nodes[i];
            step[i] = 1;
        }
        mi[i] = start[i];
    }
    Vec x(d);
    const std::size_t total = grid.total();
    for (std::size_t count = 0; count < total; ++count) {
        std::size_t idx = 0;
        for (int i = 0; i < d; ++i) idx = idx * grid.nodes[i] + mi[i];
        for (int i = 0; i < d; ++i) x[i] = grid.origin[i] + grid.spacing[i] * mi[i];
        fn(idx, x.data());
        int axis = d - 1;
        while (axis >= 0) {
            mi[axis] += step[axis];
            if (mi[axis] != stop[axis]) break;
            mi[axis] = start[axis];
            --axis;
        }
    }
}

}  // namespace

std::pair<ValueField, SolveReport> solve(const GameSpec& spec, const Grid& grid,
                                         const SolverConfig& cfg) {
    if (!(cfg.residual_tol > 0.0)) throw ConfigError("solver: residual_tol must be positive");
    auto classes = classify(grid, spec.geometry);
    UpdateKernel kernel(spec, grid, classes, cfg);

    std::vector<double> values = enforced_values(spec, grid, classes, nullptr);
    std::vector<double> snapshot(values.size());
    std::vector<double> scratch;
    if (cfg.sweep == SolverConfig::Sweep::Jacobi) scratch.resize(values.size());

    SolveReport report;
    report.time_step_used = kernel.h_t;
    report.max_speed = kernel.max_speed;

    const unsigned n_orderings = 1u << grid.dim;
    bool converged = false;
    for (int iter = 0; iter < cfg.max_iters && !converged; ++iter) {
        std::memcpy(snapshot.data(), values.data(), values.size() * sizeof(double));
        if (cfg.sweep == SolverConfig::Sweep::GaussSeidel) {
            for (unsigned o = 0; o < n_orderings; ++o) {
                sweep_nodes(grid, o, [&](std::size_t idx, const double* x) {
                    if (classes[idx] != NodeClass::Interior) return;
                    const double u = kernel.update(idx, values.data(), x);
                    if (!std::isfinite(u)) {
                        throw SolveError("solve: non-finite update at node " +
                                             std::to_string(idx),
                                         report.residual_history.empty()
                                             ? 0.0
                                             : report.residual_history.back());
                    }
                    values[idx] = u;
                });
            }
        } else {
            std::memcpy(scratch.data(), values.data(), values.size() * sizeof(double));
            sweep_nodes(grid, 0, [&](std::size_t idx, const double* x) {
                if (classes[idx] != NodeClass::Interior) return;
                const double u = kernel.update(idx, values.data(), x);
                if (!std::isfinite(u)) {
                    throw SolveError("solve: non-finite update at node " +
                                         std::to_string(idx),
                                     report.residual_history.empty()
                                         ? 0.0
                                         : report.residual_history.back());
                }
                scratch[idx] = u;
            });
            values.swap(scratch);
        }
        double res = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (classes[i] == NodeClass::Interior) {
                res = std::max(res, std::abs(values[i] - snapshot[i]));
            }
        }
        report.residual_history.push_back(res);
        ++report.iterations;
        converged = res <= cfg.residual_tol;
    }
    report.final_residual = report.residual_history.empty()
                                ? 0.0
                                : report.residual_history.back();
    report.converged = converged;
    for (std::size_t i = 1; i < report.residual_history.size(); ++i) {
        const double prev = report.residual_history[i - 1];
        report.contraction_ratios.push_back(
            prev > 0.0 ? report.residual_history[i] / prev : 0.0);
    }
    if (!converged) {
        throw SolveError("solve: max_iters=" + std::to_string(cfg.max_iters) +
                             " exceeded, last residual " +
                             fmt17(report.final_residual),
                         report.final_residual);
    }

    ValueField vf;
    vf.grid = grid;
    vf.values = std::move(values);
    vf.classes = std::move(classes);
    vf.scenario_hash = spec.hash;
    vf.residual = report.final_residual;
    vf.iterations = report.iterations;
    return {std::move(vf), std::move(report)};
}

double residual(const ValueField& vf, const GameSpec& spec,
                const SolverConfig& cfg) {
    UpdateKernel kernel(spec, vf.grid, vf.classes, cfg);
    const auto enforced = enforced_values(spec, vf.grid, vf.classes, vf.values.data());
    double res = 0.0;
    sweep_nodes(vf.grid, 0, [&](std::size_t idx, const double* x) {
        if (vf.classes[idx] != NodeClass::Interior) return;
        const double u = kernel.update(idx, enforced.data(), x);
        res = std::max(res, std::abs(u - vf.values[idx]));
    });
    return res;
}

std::string SolveReport::to_text() const {
    std::ostringstream os;
    os << "iterations: " << iterations << "\n";
    os << "converged: " << (converged ? "yes" : "no") << "\n";
    os << "final_residual: " << fmt17(final_residual) << "\n";
    os << "time_step: " << fmt17(time_step_used) << "\n";
    os << "max_speed: " << fmt17(max_speed) << "\n";
    os << "residual_history:";
    for (double r : residual_history) os << " " << fmt17(r);
    os << "\n";
    os << "contraction_ratios:";
    for (double r : contraction_ratios) os << " " << fmt17(r);
    os << "\n";
    return os.str();
}

}  // namespace exitgame
