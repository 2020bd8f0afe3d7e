#pragma once

#include <cmath>
#include <cstdint>

namespace gsched {

// All durations and timestamps are integer microseconds. Inputs are given in
// milliseconds with at most three decimals, so the conversion is exact and
// every analysis/simulation step stays on an integer grid.
using time_us = std::int64_t;

inline time_us ms_to_us(double ms) {
    return static_cast<time_us>(std::llround(ms * 1000.0));
}

inline double us_to_ms(time_us us) {
    return static_cast<double>(us) / 1000.0;
}

// ceil(a / b) for a >= 0, b > 0. ceil(0 / b) == 0.
inline time_us ceil_div(time_us a, time_us b) {
    return (a + b - 1) / b;
}

} // namespace gsched
