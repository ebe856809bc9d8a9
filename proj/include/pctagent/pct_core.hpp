#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "pctagent/percept.hpp"

namespace pct {

using Signal = double;

class InvalidSignal : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Button press along the control axis: `right` moves toward increasing
// coordinate (right in Breakout, down in Pong), `left` toward decreasing.
enum class Press : std::int8_t { left = -1, none = 0, right = 1 };

constexpr Press opposite(Press p) { return static_cast<Press>(-static_cast<int>(p)); }
const char* to_string(Press p);

// Maps an axis press onto a button. On the vertical axis the buttons follow
// the ALE Pong convention: RIGHT moves the paddle up, LEFT moves it down.
Action to_action(Press p, Axis axis);

struct UnitOutput {
    Signal error = 0.0;
    Signal output = 0.0;
};

// One comparator: error = gain * (reference - perception), output = error.
struct ControlUnit {
    double gain = 1.0;
    Signal reference = 0.0;
    Signal last_perception = 0.0;
    Signal last_error = 0.0;
    Signal last_output = 0.0;

    // Throws InvalidSignal if either input is NaN or infinite; the unit is
    // left untouched in that case.
    UnitOutput step(Signal perception, Signal new_reference);
};

struct HierarchySpec {
    std::array<double, 4> gains{1.0, 1.0, 1.0, 1.0};
    Signal top_reference = 0.0;  // R1, the distance goal
    int integrator_limit = 3;
    double press_rate_scale = 1.0;
    Axis axis = Axis::horizontal;
    int fire_hold = 8;  // ticks without a valid ball before FIRE

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Level indices into HierarchyState::units.
enum Level : std::size_t { distance = 0, direction = 1, position = 2, button = 3 };

struct HierarchyState {
    std::array<ControlUnit, 4> units{};
    int integrator_count = 0;
    Press integrator_direction = Press::none;
    double duty = 0.0;  // fractional press accumulator, always in (-1, 1)
    Press last_press = Press::none;  // B_P, what was emitted last tick
    int ball_absent_ticks = 0;

    static HierarchyState initial(const HierarchySpec& spec);
};

// Converts an error into a press decision. The error is accumulated as a
// signed duty; a press is issued whenever the accumulator crosses +-1.
Press press_rate(Signal error, HierarchyState& state, const HierarchySpec& spec);

// Counts consecutive same-direction presses. On reaching the limit the count
// resets and one opposite press is emitted instead. Returns the emitted press.
Press integrator_update(HierarchyState& state, const HierarchySpec& spec, Press press);

// One tick of the four-level cascade:
//   level 1  perceives D (paddle minus ball along the axis), reference R1
//   level 2  perceives M_D,           reference R2 = e1
//   level 3  perceives paddle delta,  reference R3 = e2
//   level 4  perceives B_P,           reference R4 = e3
// e4 drives press_rate and the integrator.
Action hierarchy_step(HierarchyState& state, const HierarchySpec& spec, const PerceptState& percepts);

// Owns one hierarchy instance.
class Controller {
public:
    explicit Controller(HierarchySpec spec);

    Action act(const PerceptState& percepts) { return hierarchy_step(state_, spec_, percepts); }
    void reset() { state_ = HierarchyState::initial(spec_); }

    [[nodiscard]] const HierarchySpec& spec() const { return spec_; }
    [[nodiscard]] const HierarchyState& state() const { return state_; }

private:
    HierarchySpec spec_;
    HierarchyState state_;
};

}  // namespace pct
