// angles.hpp — branch handling for scalar phases.
//
// Convention used everywhere: principal values live in (-pi, pi];
// accumulated (unwrapped) phases are plain doubles and carry winding.

#pragma once

#include <cmath>
#include <numbers>

namespace phaselab {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Reduce an angle to the principal branch (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, two_pi);  // in [-pi, pi]
    if (w <= -pi) w += two_pi;
    return w;
}

// Distance between two angles on the circle, in [0, pi].
inline double circular_distance(double a, double b) {
    return std::abs(wrap_angle(a - b));
}

// Number of full 2*pi turns separating an accumulated angle from its
// principal value.
inline long winding_of(double accumulated) {
    return std::lround((accumulated - wrap_angle(accumulated)) / two_pi);
}

// Representative of `target` (mod 2*pi) closest to `anchor`.
inline double align_branch(double target, double anchor) {
    return anchor + wrap_angle(target - anchor);
}

}  // namespace phaselab
