#pragma once

#include "exitgame/mollifier.hpp"

namespace exitgame {

enum class Player { First, Second };

// Extremal-shift feedback over a mollified field: the first player plays
// p0(x, s_a(x)) on an inf-convolution, the second q0(x, s_a(x)) on a
// sup-convolution. Stationary and read-only, safe to share across rollouts.
class FeedbackStrategy {
public:
    FeedbackStrategy(Player player, const MollifiedField& field,
                     const GameSpec& spec, bool exact_research = false);

    Player player() const { return player_; }
    const MollifiedField& field() const { return *field_; }

    // Control for the state x; throws when x leaves the bounding box (the
    // caller must have stopped at the exit time).
    Vec act(ConstSpan x) const;
    int act_index(ConstSpan x) const;

    Vec shift(ConstSpan x) const;

private:
    Player player_;
    const MollifiedField* field_;
    const GameSpec* spec_;
    bool exact_research_;
};

}  // namespace exitgame
