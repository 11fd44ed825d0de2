#include "exitgame/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace exitgame {

Kernel Kernel::make(double alpha, double lambda) {
    if (!(alpha > 0.0)) throw ConfigError("mollifier: alpha must be positive");
    if (lambda < 0.0) throw ConfigError("mollifier: lambda must be >= 0");
    Kernel k;
    k.alpha = alpha;
    k.lambda = lambda;
    k.nu = 1.0 / (2.0 + 2.0 * lambda);
    return k;
}

double w_alpha(const Kernel& k, ConstSpan x, ConstSpan y) {
    const double base = std::pow(k.alpha, 2.0 / k.nu) + dist2(x, y);
    return std::pow(base, k.nu) / k.alpha;
}

Vec grad_w_alpha(const Kernel& k, ConstSpan x, ConstSpan y) {
    const double base = std::pow(k.alpha, 2.0 / k.nu) + dist2(x, y);
    const double coef = 2.0 * k.nu / k.alpha * std::pow(base, k.nu - 1.0);
    Vec g(x.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = coef * (x[i] - y[i]);
    return g;
}

MollifiedField build_mollified(const ValueField& base, const Kernel& kernel,
                               MollifyMode mode,
                               const std::vector<double>* base_values) {
    const Grid& grid = base.grid;
    const std::vector<double>& u = base_values ? *base_values : base.values;
    if (u.size() != grid.total()) {
        throw std::invalid_argument("build_mollified: base value count mismatch");
    }
    // The continuum minimizer lies within 2 alpha (and within 1); the 1.5
    // safety factor tolerates grid quantization of the argmin.
    const double r_search = std::min(2.0 * kernel.alpha * 1.5, 1.0);
    const BoxBounds box = grid.box();
    for (int i = 0; i < grid.dim; ++i) {
        if (r_search > box.hi[i] - box.lo[i]) {
            throw std::invalid_argument(
                "build_mollified: search radius exceeds the grid box");
        }
    }

    MollifiedField mf;
    mf.base = &base;
    mf.kernel = kernel;
    mf.mode = mode;
    mf.search_radius = r_search;
    mf.source_values = u;
    mf.values.resize(grid.total());
    mf.foot_index.resize(grid.total());
    mf.shifts.resize(grid.total() * grid.dim);

    const int d = grid.dim;
    std::vector<int> reach(d);
    for (int i = 0; i < d; ++i) {
        reach[i] = static_cast<int>(std::ceil(r_search / grid.spacing[i]));
    }

    Vec x(d), y(d);
    std::vector<int> mi(d), lo(d), hi(d), cur(d);
    const double sign = (mode == MollifyMode::Inf) ? 1.0 : -1.0;
    const double r2max = r_search * r_search;

    for (std::size_t idx = 0; idx < grid.total(); ++idx) {
        grid.coords_into(idx, x.data());
        {
            std::size_t rem = idx;
            for (int i = d - 1; i >= 0; --i) {
                mi[i] = static_cast<int>(rem % grid.nodes[i]);
                rem /= grid.nodes[i];
            }
        }
        for (int i = 0; i < d; ++i) {
            lo[i] = std::max(0, mi[i] - reach[i]);
            hi[i] = std::min(grid.nodes[i] - 1, mi[i] + reach[i]);
            cur[i] = lo[i];
        }
        double best = kInfinity;
        std::size_t best_idx = idx;
        // scan the candidate block in ascending linear order (ties keep the
        // smallest node index)
        while (true) {
            std::size_t cidx = 0;
            for (int i = 0; i < d; ++i) cidx = cidx * grid.nodes[i] + cur[i];
            double r2 = 0.0;
            for (int i = 0; i < d; ++i) {
                const double dy = (cur[i] - mi[i]) * grid.spacing[i];
                r2 += dy * dy;
            }
            if (r2 <= r2max) {
                grid.coords_into(cidx, y.data());
                const double obj = sign * u[cidx] + w_alpha(kernel, x, y);
                if (obj < best) {
                    best = obj;
                    best_idx = cidx;
                }
            }
            int axis = d - 1;
            while (axis >= 0) {
                if (++cur[axis] <= hi[axis]) break;
                cur[axis] = lo[axis];
                --axis;
            }
            if (axis < 0) break;
        }
        mf.values[idx] = sign * best;
        mf.foot_index[idx] = best_idx;
        grid.coords_into(best_idx, y.data());
        const double footdist = dist(x, y);
        mf.max_foot_distance = std::max(mf.max_foot_distance, footdist);
        if (footdist > 2.0 * kernel.alpha + 1e-12) ++mf.foot_bound_violations;
        Vec s = grad_w_alpha(kernel, x, y);
        for (int i = 0; i < d; ++i) {
            mf.shifts[idx * d + i] = (mode == MollifyMode::Inf) ? s[i] : -s[i];
        }
    }
    return mf;
}

Vec MollifiedField::shift_at(std::size_t node) const {
    const int d = base->grid.dim;
    Vec s(d);
    for (int i = 0; i < d; ++i) s[i] = shifts[node * d + i];
    return s;
}

Vec MollifiedField::foot_at(std::size_t node) const {
    return base->grid.coords(foot_index[node]);
}

std::size_t MollifiedField::nearest_node(ConstSpan x) const {
    const Grid& g = base->grid;
    std::size_t idx = 0;
    for (int i = 0; i < g.dim; ++i) {
        const double rel = (x[i] - g.origin[i]) / g.spacing[i];
        int c = static_cast<int>(std::lround(rel));
        c = std::clamp(c, 0, g.nodes[i] - 1);
        idx = idx * g.nodes[i] + c;
    }
    return idx;
}

void write_mollified_csv(const MollifiedField& mf, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    const Grid& g = mf.base->grid;
    os << "# exitgame-mollified v1 mode="
       << (mf.mode == MollifyMode::Inf ? "inf" : "sup")
       << " alpha=" << fmt17(mf.kernel.alpha) << " nu=" << fmt17(mf.kernel.nu)
       << "\n";
    for (int i = 0; i < g.dim; ++i) os << "x" << (i + 1) << ",";
    os << "u_alpha";
    for (int i = 0; i < g.dim; ++i) os << ",y" << (i + 1);
    for (int i = 0; i < g.dim; ++i) os << ",s" << (i + 1);
    os << "\n";
    Vec x(g.dim);
    for (std::size_t idx = 0; idx < mf.values.size(); ++idx) {
        g.coords_into(idx, x.data());
        for (int i = 0; i < g.dim; ++i) os << fmt17(x[i]) << ",";
        os << fmt17(mf.values[idx]);
        const Vec y = mf.foot_at(idx);
        for (int i = 0; i < g.dim; ++i) os << "," << fmt17(y[i]);
        for (int i = 0; i < g.dim; ++i) os << "," << fmt17(mf.shifts[idx * g.dim + i]);
        os << "\n";
    }
}

Prop2Report prop2_check(const Kernel& k, const GameSpec& spec,
                        const std::vector<Prop2Sample>& samples, double tol) {
    Prop2Report rep;
    for (const auto& s : samples) {
        const Vec g = grad_w_alpha(k, s.x, s.y);  // = D_x w = -D_y w
        const double lhs =
            hamiltonian_H(spec.dynamics, spec.cost, spec.P, spec.Q, s.x, g, s.z) -
            hamiltonian_H(spec.dynamics, spec.cost, spec.P, spec.Q, s.y, g, s.z) -
            spec.cost.b * w_alpha(k, s.x, s.y);
        if (lhs > rep.max_lhs) {
            rep.max_lhs = lhs;
            rep.worst = s;
        }
        if (lhs > tol) ++rep.violations;
    }
    return rep;
}

std::vector<Prop2Sample> prop2_random_samples(const GameSpec& spec, int count,
                                              std::uint64_t seed) {
    std::uint64_t rng = seed_stream(seed, 0x9702);
    const BoxBounds& box = spec.geometry.bounding_box;
    const int d = box.dim();
    std::vector<Prop2Sample> out;
    out.reserve(count);
    for (int it = 0; it < count; ++it) {
        Prop2Sample s;
        s.x.resize(d);
        s.y.resize(d);
        for (int i = 0; i < d; ++i) {
            s.x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit_uniform(rng);
        }
        // offset with |x - y| <= 1, uniform direction and radius
        Vec dir(d);
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            dir[i] = 2.0 * unit_uniform(rng) - 1.0;
            n2 += dir[i] * dir[i];
        }
        const double n = std::sqrt(std::max(n2, 1e-12));
        const double r = unit_uniform(rng);
        for (int i = 0; i < d; ++i) s.y[i] = s.x[i] + dir[i] / n * r;
        s.z = -1.0 + 3.0 * unit_uniform(rng);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace exitgame
