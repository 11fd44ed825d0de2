#include "exitgame/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace exitgame {

namespace {

Vec normalized(Vec v) {
    const double n = norm(v);
    if (n <= 0.0) throw ConfigError("half_space: normal must be nonzero");
    for (double& c : v) c /= n;
    return v;
}

// Deterministic point on the unit sphere for d >= 3 sampling.
Vec sphere_point(int dim, std::uint64_t& rng) {
    Vec v(dim);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            // Box-Muller pair from two uniforms.
            const double u1 = std::max(unit_uniform(rng), 1e-300);
            const double u2 = unit_uniform(rng);
            v[i] = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
            n2 += v[i] * v[i];
        }
    } while (n2 < 1e-12);
    const double n = std::sqrt(n2);
    for (double& c : v) c /= n;
    return v;
}

}  // namespace

ShapeSet ShapeSet::ball(Vec center, double radius) {
    if (radius < 0.0) throw ConfigError("ball: radius must be >= 0");
    ShapeSet s;
    s.kind_ = Kind::Ball;
    s.dim_ = static_cast<int>(center.size());
    s.a_ = std::move(center);
    s.scalar_ = radius;
    return s;
}

ShapeSet ShapeSet::box(Vec lo, Vec hi) {
    if (lo.size() != hi.size()) throw ConfigError("box: lo/hi dimension mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] > hi[i]) throw ConfigError("box: lo must not exceed hi");
    }
    ShapeSet s;
    s.kind_ = Kind::Box;
    s.dim_ = static_cast<int>(lo.size());
    s.a_ = std::move(lo);
    s.b_ = std::move(hi);
    return s;
}

ShapeSet ShapeSet::half_space(Vec normal, double offset) {
    ShapeSet s;
    s.kind_ = Kind::HalfSpace;
    s.dim_ = static_cast<int>(normal.size());
    const double n = norm(normal);
    s.a_ = normalized(std::move(normal));
    s.scalar_ = offset / n;
    return s;
}

ShapeSet ShapeSet::complement_of(ShapeSet inner) {
    ShapeSet s;
    s.kind_ = Kind::Complement;
    s.dim_ = inner.dim();
    s.children_.push_back(std::move(inner));
    return s;
}

ShapeSet ShapeSet::union_of(std::vector<ShapeSet> parts) {
    if (parts.empty()) throw ConfigError("union: needs at least one part");
    ShapeSet s;
    s.kind_ = Kind::Union;
    s.dim_ = parts.front().dim();
    for (const auto& p : parts) {
        if (p.dim() != s.dim_) throw ConfigError("union: mixed dimensions");
    }
    s.children_ = std::move(parts);
    return s;
}

ShapeSet inflate(const ShapeSet& s, double eps) {
    if (eps < 0.0) throw ConfigError("inflate: eps must be >= 0");
    ShapeSet out;
    out.kind_ = ShapeSet::Kind::Inflated;
    out.dim_ = s.dim();
    out.scalar_ = eps;
    out.children_.push_back(s);
    return out;
}

bool ShapeSet::contains(ConstSpan x, double tol) const {
    return distance(x) <= tol;
}

double ShapeSet::distance(ConstSpan x) const {
    switch (kind_) {
        case Kind::Ball:
            return std::max(dist(x, a_) - scalar_, 0.0);
        case Kind::Box: {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double d = std::max({a_[i] - x[i], x[i] - b_[i], 0.0});
                s += d * d;
            }
            return std::sqrt(s);
        }
        case Kind::HalfSpace:
            return std::max(dot(x, a_) - scalar_, 0.0);
        case Kind::Complement: {
            const ShapeSet& in = children_[0];
            if (!in.contains(x, 0.0)) return 0.0;
            return in.boundary_distance(x);
        }
        case Kind::Union: {
            double best = kInfinity;
            for (const auto& c : children_) best = std::min(best, c.distance(x));
            return best;
        }
        case Kind::Inflated: {
            const ShapeSet& in = children_[0];
            const double bd = in.boundary_distance(x);
            if (bd <= scalar_ || in.contains(x, 0.0)) return 0.0;
            return bd - scalar_;
        }
    }
    return kInfinity;
}

double ShapeSet::boundary_distance(ConstSpan x) const {
    switch (kind_) {
        case Kind::Ball:
            return std::abs(dist(x, a_) - scalar_);
        case Kind::Box: {
            const double outside = distance(x);
            if (outside > 0.0) return outside;
            double inner = kInfinity;
            for (int i = 0; i < dim_; ++i) {
                inner = std::min({inner, x[i] - a_[i], b_[i] - x[i]});
            }
            return std::max(inner, 0.0);
        }
        case Kind::HalfSpace:
            return std::abs(dot(x, a_) - scalar_);
        case Kind::Complement:
            return children_[0].boundary_distance(x);
        case Kind::Union: {
            // Exact for separated parts; documented approximation otherwise.
            double best = kInfinity;
            for (const auto& c : children_) {
                best = std::min(best, c.boundary_distance(x));
            }
            return best;
        }
        case Kind::Inflated: {
            const ShapeSet& in = children_[0];
            const double bd = in.boundary_distance(x);
            if (in.contains(x, 0.0)) return bd + scalar_;
            return std::abs(bd - scalar_);
        }
    }
    return kInfinity;
}

std::optional<Vec> ShapeSet::project_boundary(ConstSpan x) const {
    switch (kind_) {
        case Kind::Ball: {
            Vec d(x.begin(), x.end());
            for (int i = 0; i < dim_; ++i) d[i] -= a_[i];
            double n = norm(d);
            if (n < 1e-15) {  // center: pick an arbitrary direction
                Vec y = a_;
                y[0] += scalar_;
                return y;
            }
            Vec y = a_;
            for (int i = 0; i < dim_; ++i) y[i] += d[i] * (scalar_ / n);
            return y;
        }
        case Kind::HalfSpace: {
            const double excess = dot(x, a_) - scalar_;
            Vec y(x.begin(), x.end());
            for (int i = 0; i < dim_; ++i) y[i] -= excess * a_[i];
            return y;
        }
        case Kind::Box: {
            Vec y(x.begin(), x.end());
            bool inside = true;
            for (int i = 0; i < dim_; ++i) {
                if (y[i] < a_[i]) { y[i] = a_[i]; inside = false; }
                if (y[i] > b_[i]) { y[i] = b_[i]; inside = false; }
            }
            if (!inside) return y;
            int axis = 0;
            double best = kInfinity;
            double snapped = 0.0;
            for (int i = 0; i < dim_; ++i) {
                if (x[i] - a_[i] < best) { best = x[i] - a_[i]; axis = i; snapped = a_[i]; }
                if (b_[i] - x[i] < best) { best = b_[i] - x[i]; axis = i; snapped = b_[i]; }
            }
            y[axis] = snapped;
            return y;
        }
        case Kind::Complement:
            return children_[0].project_boundary(x);
        case Kind::Union: {
            double best = kInfinity;
            std::optional<Vec> out;
            for (const auto& c : children_) {
                const double d = c.boundary_distance(x);
                if (d < best) {
                    auto p = c.project_boundary(x);
                    if (p) { best = d; out = std::move(p); }
                }
            }
            return out;
        }
        case Kind::Inflated:
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<Vec> ShapeSet::boundary_normal(ConstSpan y) const {
    switch (kind_) {
        case Kind::Ball: {
            Vec n(y.begin(), y.end());
            for (int i = 0; i < dim_; ++i) n[i] -= a_[i];
            const double m = norm(n);
            if (m < 1e-15) {
                Vec e(dim_, 0.0);
                e[0] = 1.0;
                return e;
            }
            for (double& c : n) c /= m;
            return n;
        }
        case Kind::HalfSpace:
            return a_;
        case Kind::Box: {
            int axis = 0;
            double best = kInfinity;
            double sign = 1.0;
            for (int i = 0; i < dim_; ++i) {
                if (std::abs(y[i] - a_[i]) < best) { best = std::abs(y[i] - a_[i]); axis = i; sign = -1.0; }
                if (std::abs(y[i] - b_[i]) < best) { best = std::abs(y[i] - b_[i]); axis = i; sign = +1.0; }
            }
            Vec n(dim_, 0.0);
            n[axis] = sign;
            return n;
        }
        case Kind::Complement: {
            auto n = children_[0].boundary_normal(y);
            if (n) for (double& c : *n) c = -c;
            return n;
        }
        case Kind::Union: {
            double best = kInfinity;
            const ShapeSet* who = nullptr;
            for (const auto& c : children_) {
                const double d = c.boundary_distance(y);
                if (d < best) { best = d; who = &c; }
            }
            return who ? who->boundary_normal(y) : std::nullopt;
        }
        case Kind::Inflated:
            return std::nullopt;
    }
    return std::nullopt;
}

std::vector<Vec> ShapeSet::sample_boundary(int n, const BoxBounds& window) const {
    std::vector<Vec> out;
    if (n <= 0) return out;
    switch (kind_) {
        case Kind::Ball: {
            if (dim_ == 1) {
                out.push_back({a_[0] - scalar_});
                out.push_back({a_[0] + scalar_});
            } else if (dim_ == 2) {
                for (int i = 0; i < n; ++i) {
                    const double t = 2.0 * std::numbers::pi * i / n;
                    out.push_back({a_[0] + scalar_ * std::cos(t),
                                   a_[1] + scalar_ * std::sin(t)});
                }
            } else {
                std::uint64_t rng = seed_stream(0xba11, n);
                for (int i = 0; i < n; ++i) {
                    Vec d = sphere_point(dim_, rng);
                    Vec y = a_;
                    for (int k = 0; k < dim_; ++k) y[k] += scalar_ * d[k];
                    out.push_back(std::move(y));
                }
            }
            break;
        }
        case Kind::Box: {
            if (dim_ == 1) {
                out.push_back({a_[0]});
                out.push_back({b_[0]});
            } else if (dim_ == 2) {
                const double w = b_[0] - a_[0], h = b_[1] - a_[1];
                const double per = 2.0 * (w + h);
                for (int i = 0; i < n; ++i) {
                    double t = per * i / n;
                    Vec y(2);
                    if (t < w) { y = {a_[0] + t, a_[1]}; }
                    else if (t < w + h) { y = {b_[0], a_[1] + (t - w)}; }
                    else if (t < 2 * w + h) { y = {b_[0] - (t - w - h), b_[1]}; }
                    else { y = {a_[0], b_[1] - (t - 2 * w - h)}; }
                    out.push_back(std::move(y));
                }
            } else {
                std::uint64_t rng = seed_stream(0xb0c5, n);
                for (int i = 0; i < n; ++i) {
                    Vec y(dim_);
                    for (int k = 0; k < dim_; ++k)
                        y[k] = a_[k] + (b_[k] - a_[k]) * unit_uniform(rng);
                    // snap to the nearest face
                    int axis = 0;
                    double best = kInfinity;
                    double snapped = 0.0;
                    for (int k = 0; k < dim_; ++k) {
                        if (y[k] - a_[k] < best) { best = y[k] - a_[k]; axis = k; snapped = a_[k]; }
                        if (b_[k] - y[k] < best) { best = b_[k] - y[k]; axis = k; snapped = b_[k]; }
                    }
                    y[axis] = snapped;
                    out.push_back(std::move(y));
                }
            }
            break;
        }
        case Kind::HalfSpace: {
            // Project window points onto the hyperplane.
            std::uint64_t rng = seed_stream(0x4a1f, n);
            if (dim_ == 1) {
                out.push_back({scalar_ * a_[0]});
            } else {
                for (int i = 0; i < n; ++i) {
                    Vec y(dim_);
                    for (int k = 0; k < dim_; ++k)
                        y[k] = window.lo[k] +
                               (window.hi[k] - window.lo[k]) * unit_uniform(rng);
                    const double excess = dot(y, a_) - scalar_;
                    for (int k = 0; k < dim_; ++k) y[k] -= excess * a_[k];
                    out.push_back(std::move(y));
                }
            }
            break;
        }
        case Kind::Complement:
            return children_[0].sample_boundary(n, window);
        case Kind::Union: {
            const int per = std::max(1, n / static_cast<int>(children_.size()));
            for (const auto& c : children_) {
                auto part = c.sample_boundary(per, window);
                out.insert(out.end(), part.begin(), part.end());
            }
            break;
        }
        case Kind::Inflated: {
            // Push inner boundary samples outward/inward by eps.
            const ShapeSet& in = children_[0];
            auto base = in.sample_boundary(std::max(1, n / 2), window);
            for (const auto& y : base) {
                auto nrm = in.boundary_normal(y);
                if (!nrm) continue;
                Vec outer = y, inner = y;
                for (int k = 0; k < dim_; ++k) {
                    outer[k] += scalar_ * (*nrm)[k];
                    inner[k] -= scalar_ * (*nrm)[k];
                }
                out.push_back(std::move(outer));
                if (!in.contains(inner)) out.push_back(std::move(inner));
            }
            break;
        }
    }
    return out;
}

DomainGeometry make_domain(ShapeSet m1, ShapeSet m2, BoxBounds box,
                           int n_boundary_samples) {
    if (m1.dim() != m2.dim() || m1.dim() != box.dim()) {
        throw ConfigError("geometry: M1, M2 and bounding box dimensions differ");
    }
    const int n = n_boundary_samples > 0 ? n_boundary_samples
                                         : default_boundary_samples(m1.dim());
    DomainGeometry geo{std::move(m1), std::move(m2), std::move(box), 0.0};

    // d(M1,M2): analytic distance from each sampled boundary point of one
    // set to the other, both directions.
    double sep = kInfinity;
    for (const auto& y : geo.m1.sample_boundary(n, geo.bounding_box)) {
        sep = std::min(sep, geo.m2.boundary_distance(y));
    }
    for (const auto& y : geo.m2.sample_boundary(n, geo.bounding_box)) {
        sep = std::min(sep, geo.m1.boundary_distance(y));
    }
    geo.separation = sep;
    if (!(sep > kTolSep)) {
        throw ConfigError("geometry: sampled d(M1,M2) = " + fmt17(sep) +
                          " does not exceed tol_sep; target and lifeline must be separated");
    }
    return geo;
}

double BoundaryPayoff::eval(ConstSpan x) const {
    switch (kind) {
        case Kind::Constant:
            return c0;
        case Kind::Affine:
            return c0 + dot(x, coeff);
        case Kind::Radial:
            return c0 + c1 * dist(x, coeff);
    }
    return 0.0;
}

SigmaExtension::SigmaExtension(const BoundaryPayoff& bp, const DomainGeometry& geo,
                               int n_samples)
    : lipschitz_(bp.lipschitz), sigma_max_(bp.sigma_max), m1_(&geo.m1), payoff_(bp) {
    const int n = n_samples > 0 ? n_samples : default_boundary_samples(geo.m1.dim());
    samples_ = geo.m1.sample_boundary(n, geo.bounding_box);
    values_.reserve(samples_.size());
    for (const auto& y : samples_) {
        const double v = bp.eval(y);
        if (v < -kTolGeom || v > bp.sigma_max + kTolGeom) {
            throw ConfigError("payoff: sigma(" + fmt17(y[0]) +
                              ",...) = " + fmt17(v) +
                              " outside [0, Sigma]; check payoff.sigma_max (A5)");
        }
        values_.push_back(v);
    }
}

double SigmaExtension::operator()(ConstSpan x) const {
    double best = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        best = std::max(best, values_[i] - lipschitz_ * dist(x, samples_[i]));
    }
    if (m1_) {
        if (auto y = m1_->project_boundary(x)) {
            best = std::max(best, payoff_.eval(*y) - lipschitz_ * dist(x, *y));
        }
    }
    return std::min(best, sigma_max_);
}

double kruzhkov(double phi) {
    if (std::isnan(phi) || phi < 0.0) {
        throw std::invalid_argument("kruzhkov: phi must be >= 0");
    }
    if (std::isinf(phi)) return 1.0;
    return -std::expm1(-phi);
}

double kruzhkov_inv(double u) {
    if (std::isnan(u) || u < 0.0 || u > 1.0) {
        throw std::invalid_argument("kruzhkov_inv: u must be in [0,1]");
    }
    if (u >= 1.0) return kInfinity;
    return -std::log1p(-u);
}

int default_boundary_samples(int dim) {
    return dim <= 1 ? 256 : 4096;
}

}  // namespace exitgame
