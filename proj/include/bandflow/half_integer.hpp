#pragma once

#include <cmath>
#include <compare>
#include <string>

#include "bandflow/errors.hpp"

namespace bandflow {

/// Integer or half-integer value stored exactly as twice its value.
/// Used for spins, angular-momentum projections and J_z labels.
class HalfInt {
public:
    constexpr HalfInt() = default;

    static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
    static constexpr HalfInt from_int(int value) { return HalfInt(2 * value); }

    /// Accepts only values whose double is an integer (to 1e-12).
    static HalfInt from_double(double value)
    {
        if (!std::isfinite(value)) {
            throw ConfigError("half-integer value is not finite");
        }
        const double twice = 2.0 * value;
        const double rounded = std::round(twice);
        if (std::abs(twice - rounded) > 1e-12) {
            throw ConfigError("value " + std::to_string(value) + " is not an integer or half-integer");
        }
        return HalfInt(static_cast<int>(rounded));
    }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    constexpr HalfInt operator-() const { return HalfInt(-twice_); }
    constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
    constexpr HalfInt operator+(int n) const { return HalfInt(twice_ + 2 * n); }
    constexpr HalfInt operator-(int n) const { return HalfInt(twice_ - 2 * n); }

    constexpr auto operator<=>(const HalfInt&) const = default;

    std::string str() const
    {
        if (is_integer()) {
            return std::to_string(twice_ / 2);
        }
        return std::to_string(twice_) + "/2";
    }

private:
    constexpr explicit HalfInt(int twice) : twice_(twice) {}
    int twice_ = 0;
};

constexpr HalfInt abs(HalfInt h) { return h.twice() < 0 ? -h : h; }

} // namespace bandflow
