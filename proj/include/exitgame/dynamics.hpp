#pragma once

#include <string>

#include "exitgame/common.hpp"

namespace exitgame {

// Finite control set; compactness comes for free and min/max over it is
// exact by exhaustion.
struct ControlSet {
    std::vector<Vec> points;
    std::string label;  // "P" or "Q"

    int size() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
};

ControlSet circle_controls(int count, double radius, bool include_center,
                           const std::string& label);

// Right-hand side f(x,p,q) from a small model registry:
//   simple_motion    f = p
//   relative_pursuit f = p - q
//   rotating         f = (x2, -x1) + p - q        (2-D only)
//   control_affine   f = A x + B p + C q
struct Dynamics {
    enum class Model { SimpleMotion, RelativePursuit, Rotating, ControlAffine };

    Model model = Model::SimpleMotion;
    int state_dim = 0;
    // Row-major matrices for the control-affine model.
    std::vector<double> A, B, C;
    int p_dim = 0, q_dim = 0;

    void eval(const double* x, const double* p, const double* q, double* out) const;
    Vec eval(ConstSpan x, ConstSpan p, ConstSpan q) const;

    // True when f does not depend on x (enables precomputed solver stencils).
    bool state_independent() const {
        return model == Model::SimpleMotion || model == Model::RelativePursuit;
    }

    static Dynamics simple_motion(int dim);
    static Dynamics relative_pursuit(int dim);
    static Dynamics rotating();
    static Dynamics control_affine(int dim, std::vector<double> A,
                                   std::vector<double> B, int p_dim,
                                   std::vector<double> C, int q_dim);
};

struct RunningCost {
    enum class Kind { Constant, AffineClamped, Radial };
    Kind kind = Kind::Constant;
    double value = 1.0;  // constant value / c0
    Vec coeff;           // affine gradient / radial center
    double c1 = 0.0;     // radial slope
    double b = 1.0;      // positive lower bound (A4)

    double eval(ConstSpan x) const;
};

// H(x,s,z) = min_p max_q <s, f(x,p,q)> + g(x)(1-z), exact over the finite
// sets.
double hamiltonian_H(const Dynamics& dyn, const RunningCost& cost,
                     const ControlSet& P, const ControlSet& Q,
                     ConstSpan x, ConstSpan s, double z);

// script-H(x,s) = H(x,s,0).
double hamiltonian_script(const Dynamics& dyn, const RunningCost& cost,
                          const ControlSet& P, const ControlSet& Q,
                          ConstSpan x, ConstSpan s);

struct IsaacsReport {
    double max_gap = 0.0;
    Vec worst_x, worst_s;
    bool pass(double tol = kTolIsaacs) const { return max_gap <= tol; }
};

// |min_p max_q <s,f> - max_q min_p <s,f>| over the supplied samples; finite
// control sets can break the saddle condition, so this only reports.
IsaacsReport check_isaacs(const Dynamics& dyn, const ControlSet& P,
                          const ControlSet& Q, const std::vector<Vec>& xs,
                          const std::vector<Vec>& ss);

// Extremal-shift pre-strategies. Ties break toward the lowest index in the
// control list.
int p0_index(const Dynamics& dyn, const ControlSet& P, const ControlSet& Q,
             ConstSpan x, ConstSpan s);
int q0_index(const Dynamics& dyn, const ControlSet& P, const ControlSet& Q,
             ConstSpan x, ConstSpan s);

// min_p max_q <s, f(x,p,q)> (the Hamiltonian's game part).
double lower_game_value(const Dynamics& dyn, const ControlSet& P,
                        const ControlSet& Q, ConstSpan x, ConstSpan s);
double upper_game_value(const Dynamics& dyn, const ControlSet& P,
                        const ControlSet& Q, ConstSpan x, ConstSpan s);

// Sampled Lipschitz-in-x estimate for f and g (max of both), and sampled
// sublinear-growth constant R_f.
double estimate_lambda(const Dynamics& dyn, const RunningCost& cost,
                       const ControlSet& P, const ControlSet& Q,
                       const BoxBounds& box, int n_samples = 128);
double estimate_growth(const Dynamics& dyn, const ControlSet& P,
                       const ControlSet& Q, const BoxBounds& box,
                       int n_samples = 128);

}  // namespace exitgame
