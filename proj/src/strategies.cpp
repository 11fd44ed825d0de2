#include "exitgame/strategies.hpp"

#include <cmath>

namespace exitgame {

FeedbackStrategy::FeedbackStrategy(Player player, const MollifiedField& field,
                                   const GameSpec& spec, bool exact_research)
    : player_(player), field_(&field), spec_(&spec),
      exact_research_(exact_research) {
    if (player == Player::First && field.mode != MollifyMode::Inf) {
        throw std::invalid_argument(
            "FeedbackStrategy: first player needs an inf-convolution field");
    }
    if (player == Player::Second && field.mode != MollifyMode::Sup) {
        throw std::invalid_argument(
            "FeedbackStrategy: second player needs a sup-convolution field");
    }
}

Vec FeedbackStrategy::shift(ConstSpan x) const {
    const Grid& grid = field_->base->grid;
    if (!grid.box().contains(x, 1e-12)) {
        throw std::runtime_error("strategy: state left the bounding box");
    }
    if (!exact_research_) {
        return field_->shift_at(field_->nearest_node(x));
    }
    // Exact re-search of the argmin/argmax at x over grid nodes (used for
    // convergence studies; O(radius^d) per call).
    const Kernel& k = field_->kernel;
    const std::vector<double>& base = field_->source_values;
    const double r = field_->search_radius;
    const int d = grid.dim;
    std::vector<int> lo(d), hi(d), cur(d);
    for (int i = 0; i < d; ++i) {
        const double rel = (x[i] - grid.origin[i]) / grid.spacing[i];
        lo[i] = std::max(0, static_cast<int>(std::floor(rel - r / grid.spacing[i])));
        hi[i] = std::min(grid.nodes[i] - 1,
                         static_cast<int>(std::ceil(rel + r / grid.spacing[i])));
        cur[i] = lo[i];
    }
    const double sign = (field_->mode == MollifyMode::Inf) ? 1.0 : -1.0;
    double best = kInfinity;
    std::size_t best_idx = field_->nearest_node(x);
    Vec y(d);
    while (true) {
        std::size_t cidx = 0;
        for (int i = 0; i < d; ++i) cidx = cidx * grid.nodes[i] + cur[i];
        grid.coords_into(cidx, y.data());
        if (dist(x, y) <= r) {
            const double obj = sign * base[cidx] + w_alpha(k, x, y);
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
    grid.coords_into(best_idx, y.data());
    Vec s = grad_w_alpha(k, x, y);
    if (field_->mode == MollifyMode::Sup) {
        for (double& c : s) c = -c;
    }
    return s;
}

int FeedbackStrategy::act_index(ConstSpan x) const {
    const Vec s = shift(x);
    if (player_ == Player::First) {
        return p0_index(spec_->dynamics, spec_->P, spec_->Q, x, s);
    }
    return q0_index(spec_->dynamics, spec_->P, spec_->Q, x, s);
}

Vec FeedbackStrategy::act(ConstSpan x) const {
    const int i = act_index(x);
    return player_ == Player::First ? spec_->P.points[i] : spec_->Q.points[i];
}

}  // namespace exitgame
