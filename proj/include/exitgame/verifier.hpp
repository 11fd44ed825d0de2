#pragma once

#include <functional>

#include "exitgame/game.hpp"
#include "exitgame/grid.hpp"

namespace exitgame {

// A candidate solution evaluated on demand: a grid field, the analytic
// lifeline-shell subsolution candidate, or any test function.
struct CandidateField {
    std::function<double(ConstSpan)> eval;
    std::string label;

    static CandidateField from_field(const ValueField& vf, std::string label = "solved");
    // v(x) = 1 on the eps-inflated lifeline, sigma-tilde elsewhere.
    static CandidateField subsol_candidate(const GameSpec& spec, double eps);
};

struct DirectionalDerivative {
    double value = 0.0;
    bool infinite = false;  // diverged; sign tells which way
    int sign = 0;
    bool stable = false;    // last two rung extrapolations agree within tol_dd
    bool no_admissible = false;
    std::vector<double> delta_ladder;
    std::vector<double> rung_values;

    bool finite() const { return !infinite && !no_admissible; }
    double as_value() const {
        if (no_admissible) return 0.0;
        return infinite ? (sign > 0 ? kInfinity : -kInfinity) : value;
    }
};

struct DerivativeOptions {
    double tol_dd = kTolDd;
    double divergence_threshold = 1e6;
    // Direction-perturbation radius per rung = rho_scale * delta_k / diam.
    double rho_scale = 0.01;
};

// Sampled upper/lower Dini derivative along f_dir: quotients over a
// shrinking (delta, direction-ball) ladder restricted to x + delta f' in G,
// Richardson-extrapolated; monotone 1/delta growth extends the ladder until
// the divergence sentinel fires.
DirectionalDerivative dplus(const CandidateField& u, const DomainGeometry& geo,
                            ConstSpan x, ConstSpan f_dir,
                            const DerivativeOptions& opts = {});
DirectionalDerivative dminus(const CandidateField& u, const DomainGeometry& geo,
                             ConstSpan x, ConstSpan f_dir,
                             const DerivativeOptions& opts = {});

struct PointMargin {
    Vec x;
    int control_index = -1;
    double margin = 0.0;
};

struct SolutionCheckReport {
    bool pass = false;
    bool inequality_pass = false;
    bool boundary_pass = false;
    double worst_margin = kInfinity;   // min over points of the checked sup/inf
    PointMargin worst;
    double worst_boundary_mismatch = 0.0;
    Vec worst_boundary_point;
    // reported, non-binding: largest jump seen when approaching the
    // boundary along the sample scale
    double semicontinuity_gap = 0.0;
    int points_checked = 0;
    std::string to_text(const std::string& name) const;
};

// Subsolution inequality (upper test): for each sampled x in G and p in P,
// max over the vertices q of E^-(x, z, p) of d+u(x; f(x,p,q)) - g(x)(z-1)
// must be >= -tol_visc, with z = candidate(x); plus the boundary value
// match candidate = sigma-tilde on sampled boundary points. Semicontinuity
// proxies are reported but do not gate the verdict.
SolutionCheckReport check_subsolution(const CandidateField& u, const GameSpec& spec,
                                      const std::vector<Vec>& samples,
                                      double tol_visc = kTolVisc,
                                      const DerivativeOptions& opts = {});

// Supersolution mirror: min over p-vertices of d-u(x; f) - g(x)(z-1) must
// be <= tol_visc for each sampled x and q.
SolutionCheckReport check_supersolution(const CandidateField& u, const GameSpec& spec,
                                        const std::vector<Vec>& samples,
                                        double tol_visc = kTolVisc,
                                        const DerivativeOptions& opts = {});

struct CondLowWitness {
    Vec x0;
    int p_index = 0;
    double lhs = 0.0;  // b (1 - v(x0))
    double best_rhs = 0.0;
};

struct CondLowReport {
    bool pass = false;
    std::vector<CondLowWitness> failures;  // located (x0, p) without a q0
    int points_checked = 0;
    std::string to_text() const;
};

// For each sampled x0 in G and p in P, searches q0 in Q with
// b (1 - v(x0)) >= -d+v(x0; f(x0,p,q0)) where v is the shell candidate.
// Sample set is augmented with points on the inflated-lifeline edge, where
// the condition is sharpest.
CondLowReport check_cond_low(const GameSpec& spec, double eps,
                             const std::vector<Vec>& samples,
                             const DerivativeOptions& opts = {});

// Interior grid nodes (strided to at most max_points) as verifier samples.
std::vector<Vec> interior_node_samples(const Grid& grid, const DomainGeometry& geo,
                                       std::size_t max_points = 2048);

// Boundary samples of M1 and M2 clipped to the bounding box.
std::vector<Vec> boundary_samples(const GameSpec& spec, int per_set = 64);

}  // namespace exitgame
