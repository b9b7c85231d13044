#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace hsmsim {

// Virtual time in integer microseconds. Never negative during a run.
class SimTime {
public:
    using rep = std::int64_t;
    static constexpr rep ticks_per_second = 1'000'000;

    constexpr SimTime() = default;

    static constexpr SimTime from_micros(rep us) { return SimTime{us}; }

    // Rounds to the nearest microsecond.
    static SimTime from_seconds(double s) { return SimTime{static_cast<rep>(std::llround(s * ticks_per_second))}; }

    [[nodiscard]] constexpr rep micros() const { return us_; }
    [[nodiscard]] constexpr double seconds() const { return static_cast<double>(us_) / ticks_per_second; }

    constexpr SimTime &operator+=(SimTime o) {
        us_ += o.us_;
        return *this;
    }
    friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.us_ + b.us_}; }
    friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.us_ - b.us_}; }
    friend constexpr SimTime operator*(SimTime a, rep k) { return SimTime{a.us_ * k}; }
    friend constexpr auto operator<=>(SimTime, SimTime) = default;

private:
    constexpr explicit SimTime(rep us) : us_{us} {}
    rep us_ = 0;
};

}  // namespace hsmsim
