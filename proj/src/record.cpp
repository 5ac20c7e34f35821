#include "stlfd/record.hpp"

#include <cctype>

namespace stlfd {

std::optional<ActionId> move_action(const Environment& env, char c) {
  if (dynamic_cast<const MountainCarEnv*>(&env) != nullptr) {
    switch (std::tolower(static_cast<unsigned char>(c))) {
      case 'l': return kPushLeft;
      case 'n': return kNoPush;
      case 'r': return kPushRight;
      default: return std::nullopt;
    }
  }
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'U': return kUp;
    case 'D': return kDown;
    case 'L': return kLeft;
    case 'R': return kRight;
    default: return std::nullopt;
  }
}

Trace trace_from_moves(const Environment& env, StateId start, std::string_view moves) {
  if (!env.valid(start)) throw ValidationError("start state outside environment");
  Trace trace;
  trace.env_id = env.id();
  trace.steps.push_back(Step{start, std::nullopt});
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const char c = moves[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') continue;
    auto a = move_action(env, c);
    if (!a) {
      throw ValidationError("move " + std::to_string(i) + ": '" + std::string(1, c) +
                            "' is not a valid move");
    }
    trace.steps.back().action = a;
    trace.steps.push_back(Step{env.step(trace.steps.back().state, *a), std::nullopt});
  }
  return trace;
}

Trace pumping_demo(const MountainCarEnv& env, CarState initial, int cap) {
  Trace trace;
  trace.env_id = env.id();
  CarState car = initial;
  trace.steps.push_back(Step{env.bin_of(car), std::nullopt});
  for (int k = 0; k < cap && !env.is_goal(trace.steps.back().state); ++k) {
    const ActionId a = car.velocity >= 0.0 ? kPushRight : kPushLeft;
    trace.steps.back().action = a;
    car = env.advance(car, a);
    trace.steps.push_back(Step{env.bin_of(car), std::nullopt});
  }
  return trace;
}

}  // namespace stlfd
