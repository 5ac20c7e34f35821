#pragma once

#include <string_view>

#include "stlfd/envs.hpp"
#include "stlfd/features.hpp"

namespace stlfd {

// Walks env.step from `start` along a move string. Grids take U, D, L, R;
// Mountain Car takes l (push left), n (no push), r (push right).
// Whitespace and commas are skipped; anything else is a ValidationError
// naming the character position.
Trace trace_from_moves(const Environment& env, StateId start, std::string_view moves);

// Maps a move character to an action, or nullopt.
std::optional<ActionId> move_action(const Environment& env, char c);

// Scripted Mountain Car demonstration: push in the direction of motion
// until the goal bin or `cap` steps, starting from `initial` on the
// continuous car.
Trace pumping_demo(const MountainCarEnv& env, CarState initial, int cap = 200);

}  // namespace stlfd
