#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "exitgame/common.hpp"

namespace exitgame {

// Closed point sets with exact Euclidean distance. Sets are implicit
// (membership + distance), not meshed; the registry covers balls, boxes,
// half-spaces, complements and finite unions.
class ShapeSet {
public:
    enum class Kind { Ball, Box, HalfSpace, Complement, Union, Inflated };

    static ShapeSet ball(Vec center, double radius);
    static ShapeSet box(Vec lo, Vec hi);
    // {x : <normal, x> <= offset}; normal is normalized at construction.
    static ShapeSet half_space(Vec normal, double offset);
    static ShapeSet complement_of(ShapeSet inner);
    static ShapeSet union_of(std::vector<ShapeSet> parts);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }

    // Membership of the closed set, consistent with distance():
    // contains(x) <=> distance(x) <= tol_geom.
    bool contains(ConstSpan x, double tol = kTolGeom) const;

    // Euclidean distance to the set (zero inside).
    double distance(ConstSpan x) const;

    // Distance to the set's boundary (positive on both sides off it).
    double boundary_distance(ConstSpan x) const;

    // Nearest boundary point, when the shape supports a closed form.
    std::optional<Vec> project_boundary(ConstSpan x) const;

    // Outward unit normal at a boundary point (best effort for unions).
    std::optional<Vec> boundary_normal(ConstSpan y) const;

    // Deterministic boundary sample; half-spaces need the window to pick
    // points from, the other shapes ignore it.
    std::vector<Vec> sample_boundary(int n, const BoxBounds& window) const;

    friend ShapeSet inflate(const ShapeSet& s, double eps);

private:
    ShapeSet() = default;

    Kind kind_ = Kind::Ball;
    int dim_ = 0;
    Vec a_;           // center / lo / normal
    Vec b_;           // hi
    double scalar_ = 0.0;  // radius / offset / eps
    std::vector<ShapeSet> children_;
};

// eps-inflation of a set: the eps-shell around its boundary together with
// the set itself. membership(x) <=> dist(x, boundary) <= eps or x in S.
ShapeSet inflate(const ShapeSet& s, double eps);

struct DomainGeometry {
    ShapeSet m1;  // target set
    ShapeSet m2;  // lifeline
    BoxBounds bounding_box;
    double separation = 0.0;  // sampled d(M1, M2)

    bool in_domain(ConstSpan x) const {  // x in G = R^d \ (M1 u M2)
        return !m1.contains(x) && !m2.contains(x);
    }
};

// Builds the geometry and computes the sampled separation. Throws
// ConfigError when the sampled d(M1,M2) does not exceed tol_sep.
DomainGeometry make_domain(ShapeSet m1, ShapeSet m2, BoxBounds box,
                           int n_boundary_samples = 0);

struct BoundaryPayoff {
    enum class Kind { Constant, Affine, Radial };
    Kind kind = Kind::Constant;
    double c0 = 0.0;
    Vec coeff;     // affine gradient / radial center
    double c1 = 0.0;  // radial slope
    double sigma_max = 0.0;  // Sigma
    double lipschitz = 0.0;  // L on the target boundary

    double eval(ConstSpan x) const;
};

// Lipschitz extension sigma_hat(x) = max(sup_y {sigma(y) - L|x-y|}, 0)
// over sampled boundary points of M1, sharpened by the nearest-point
// projection when the shape provides one.
class SigmaExtension {
public:
    SigmaExtension() = default;
    SigmaExtension(const BoundaryPayoff& bp, const DomainGeometry& geo,
                   int n_samples = 0);

    double operator()(ConstSpan x) const;

    const std::vector<Vec>& samples() const { return samples_; }

private:
    std::vector<Vec> samples_;
    Vec values_;
    double lipschitz_ = 0.0;
    double sigma_max_ = 0.0;
    const ShapeSet* m1_ = nullptr;
    BoundaryPayoff payoff_;
};

// Kruzhkov transform u = 1 - e^{-phi} and its inverse; phi = +inf maps to
// u = 1 and back.
double kruzhkov(double phi);
double kruzhkov_inv(double u);

// Default boundary sample counts per dimension (1-D small, 2-D dense).
int default_boundary_samples(int dim);

}  // namespace exitgame
