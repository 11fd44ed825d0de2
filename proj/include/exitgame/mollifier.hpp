#pragma once

#include "exitgame/game.hpp"
#include "exitgame/grid.hpp"

namespace exitgame {

// Kernel w_a(x,y) = (a^{2/nu} + |x-y|^2)^nu / a with nu = 1/(2+2*lambda).
struct Kernel {
    double alpha = 0.0;
    double nu = 0.5;
    double lambda = 0.0;

    static Kernel make(double alpha, double lambda);

    // b / lambda; +inf when lambda = 0.
    static double alpha_limit(double b, double lambda) {
        return lambda > 0.0 ? b / lambda : kInfinity;
    }
};

double w_alpha(const Kernel& k, ConstSpan x, ConstSpan y);
// D_x w_a = (2 nu / a)(a^{2/nu} + |x-y|^2)^{nu-1} (x - y); D_y w_a is its
// negative.
Vec grad_w_alpha(const Kernel& k, ConstSpan x, ConstSpan y);

enum class MollifyMode { Inf, Sup };

// Inf-convolution u_a (Inf) or sup-convolution v_a (Sup) of the base node
// values over the grid, with per-node foot points y_a(x) and shift
// covectors s_a(x).
struct MollifiedField {
    const ValueField* base = nullptr;
    Kernel kernel;
    MollifyMode mode = MollifyMode::Inf;
    std::vector<double> values;            // u_a / v_a per node
    std::vector<double> source_values;     // what was mollified
    std::vector<std::size_t> foot_index;   // y_a(x) as node index
    std::vector<double> shifts;            // s_a(x), node-major, d per node
    double max_foot_distance = 0.0;
    int foot_bound_violations = 0;         // nodes with |x - y_a| > 2 alpha
    double search_radius = 0.0;

    Vec shift_at(std::size_t node) const;
    Vec foot_at(std::size_t node) const;
    std::size_t nearest_node(ConstSpan x) const;
};

// base_values lets the caller mollify something other than the stored
// field (e.g. a subsolution candidate sampled at the nodes); defaults to
// the field's own values.
MollifiedField build_mollified(const ValueField& base, const Kernel& kernel,
                               MollifyMode mode,
                               const std::vector<double>* base_values = nullptr);

void write_mollified_csv(const MollifiedField& mf, const std::string& path);

struct Prop2Sample {
    Vec x, y;
    double z;
};

struct Prop2Report {
    double max_lhs = -kInfinity;
    Prop2Sample worst;
    int violations = 0;  // samples with lhs > tol
    bool pass(double tol = 1e-8) const { return max_lhs <= tol; }
};

// Spot check of H(x, D_x w, z) - H(y, -D_y w, z) - b w(x,y) <= 0 over the
// given samples (|x-y| <= 1 expected from the caller).
Prop2Report prop2_check(const Kernel& k, const GameSpec& spec,
                        const std::vector<Prop2Sample>& samples,
                        double tol = 1e-8);

std::vector<Prop2Sample> prop2_random_samples(const GameSpec& spec, int count,
                                              std::uint64_t seed);

}  // namespace exitgame
