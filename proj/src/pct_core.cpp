#include "pctagent/pct_core.hpp"

#include <cmath>

namespace pct {

const char* to_string(Action a) {
    switch (a) {
        case Action::noop: return "NOOP";
        case Action::fire: return "FIRE";
        case Action::right: return "RIGHT";
        case Action::left: return "LEFT";
    }
    return "?";
}

const char* to_string(Press p) {
    switch (p) {
        case Press::left: return "left";
        case Press::none: return "none";
        case Press::right: return "right";
    }
    return "?";
}

Action to_action(Press p, Axis axis) {
    if (p == Press::none) return Action::noop;
    const bool positive = p == Press::right;
    if (axis == Axis::horizontal) return positive ? Action::right : Action::left;
    return positive ? Action::left : Action::right;
}

UnitOutput ControlUnit::step(Signal perception, Signal new_reference) {
    if (!std::isfinite(perception) || !std::isfinite(new_reference)) {
        throw InvalidSignal("control unit received a non-finite signal");
    }
    const Signal error = gain * (new_reference - perception);
    if (!std::isfinite(error)) throw InvalidSignal("control unit error overflowed");
    reference = new_reference;
    last_perception = perception;
    last_error = error;
    last_output = error;
    return {error, error};
}

void HierarchySpec::validate() const {
    for (std::size_t i = 0; i < gains.size(); ++i) {
        if (!std::isfinite(gains[i])) {
            throw std::invalid_argument("gains[" + std::to_string(i) + "] must be finite");
        }
    }
    if (!std::isfinite(top_reference)) throw std::invalid_argument("top_reference must be finite");
    if (integrator_limit < 1) throw std::invalid_argument("integrator_limit must be >= 1");
    if (!(press_rate_scale > 0.0) || !std::isfinite(press_rate_scale)) {
        throw std::invalid_argument("press_rate_scale must be > 0");
    }
    if (fire_hold < 0) throw std::invalid_argument("fire_hold must be >= 0");
}

HierarchyState HierarchyState::initial(const HierarchySpec& spec) {
    HierarchyState s;
    for (std::size_t i = 0; i < s.units.size(); ++i) s.units[i].gain = spec.gains[i];
    s.units[Level::distance].reference = spec.top_reference;
    return s;
}

Press press_rate(Signal error, HierarchyState& state, const HierarchySpec& spec) {
    state.duty += error * spec.press_rate_scale;
    Press p = Press::none;
    if (state.duty >= 1.0) {
        p = Press::right;
    } else if (state.duty <= -1.0) {
        p = Press::left;
    }
    if (p != Press::none) {
        // Keep only the fractional residue: a saturated error cannot build up
        // a backlog of presses.
        state.duty -= std::trunc(state.duty);
    }
    return p;
}

Press integrator_update(HierarchyState& state, const HierarchySpec& spec, Press press) {
    if (press == Press::none) {
        state.integrator_count = 0;
        state.integrator_direction = Press::none;
        return Press::none;
    }
    if (press != state.integrator_direction) {
        state.integrator_count = 0;
    }
    ++state.integrator_count;
    if (state.integrator_count >= spec.integrator_limit) {
        state.integrator_count = 0;
        state.integrator_direction = Press::none;
        return opposite(press);
    }
    state.integrator_direction = press;
    return press;
}

Action hierarchy_step(HierarchyState& state, const HierarchySpec& spec, const PerceptState& percepts) {
    if (percepts.ball_valid) {
        state.ball_absent_ticks = 0;
    } else {
        ++state.ball_absent_ticks;
    }
    if (state.ball_absent_ticks > spec.fire_hold) {
        state.integrator_count = 0;
        state.integrator_direction = Press::none;
        state.last_press = Press::none;
        return Action::fire;
    }
    if (!percepts.paddle_valid) {
        state.last_press = Press::none;
        return Action::noop;
    }

    // Without a ball the distance goal collapses onto the paddle itself, so
    // the lower levels only brake.
    const Signal paddle = percepts.paddle_axis;
    const Signal ball = percepts.ball_valid ? percepts.ball_axis(spec.axis) : paddle;

    auto& units = state.units;
    const Signal distance = paddle - ball;
    const Signal e1 = units[Level::distance].step(distance, spec.top_reference).output;
    const Signal e2 = units[Level::direction].step(percepts.paddle_direction, e1).output;
    const Signal e3 = units[Level::position].step(percepts.paddle_delta, e2).output;
    const Signal e4 = units[Level::button].step(static_cast<int>(state.last_press), e3).output;

    const Press wanted = press_rate(e4, state, spec);
    const Press emitted = integrator_update(state, spec, wanted);
    state.last_press = emitted;
    return to_action(emitted, spec.axis);
}

Controller::Controller(HierarchySpec spec) : spec_(spec) {
    spec_.validate();
    state_ = HierarchyState::initial(spec_);
}

}  // namespace pct
