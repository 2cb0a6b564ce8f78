#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace xlosh {

inline constexpr const char* version_string = "0.1.0";

// Error taxonomy. The CLI maps these onto its exit-code contract:
// parse 2, contour 3, evaluation 4, method/scenario incompatibility 5.
struct parse_error : std::runtime_error { using std::runtime_error::runtime_error; };
struct contour_error : std::runtime_error { using std::runtime_error::runtime_error; };
struct eval_error : std::runtime_error { using std::runtime_error::runtime_error; };
struct incompatible_error : std::runtime_error { using std::runtime_error::runtime_error; };
struct pole_error : std::runtime_error { using std::runtime_error::runtime_error; };
struct window_error : std::runtime_error { using std::runtime_error::runtime_error; };

// Worker count: XLOSH_THREADS if set, otherwise all cores.
inline unsigned thread_count() {
    if (const char* env = std::getenv("XLOSH_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

} // namespace xlosh
