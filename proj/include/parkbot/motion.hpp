#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace parkbot {

inline constexpr double kPi = std::numbers::pi;

// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
    using std::remainder;
    Scalar r = remainder(a, Scalar(2) * Scalar(kPi));
    if (r <= -Scalar(kPi)) r += Scalar(2) * Scalar(kPi);
    return r;
}

// Compass bearing of `to` as seen from `from`: 0 = north (+y), clockwise positive.
template <typename Derived1, typename Derived2>
typename Derived1::Scalar bearing(const Eigen::MatrixBase<Derived1>& from,
                                  const Eigen::MatrixBase<Derived2>& to) {
    using std::atan2;
    const auto d = (to - from).eval();
    return atan2(d.x(), d.y());
}

// Unit vector along a compass heading.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> heading_vector(Scalar theta) {
    using std::cos;
    using std::sin;
    return {sin(theta), cos(theta)};
}

struct VelocityCommand {
    double v = 0.0;
    double omega = 0.0;
};

}  // namespace parkbot
