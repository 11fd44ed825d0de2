#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace exitgame {

using Vec = std::vector<double>;
using ConstSpan = std::span<const double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Default tolerances; scenario config may override the ones it exposes.
inline constexpr double kTolGeom = 1e-9;
inline constexpr double kTolSep = 1e-6;
inline constexpr double kTolEvent = 1e-9;
inline constexpr double kTolIsaacs = 1e-12;
inline constexpr double kTolVisc = 1e-3;
inline constexpr double kTolDd = 1e-4;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

inline double dot(ConstSpan a, ConstSpan b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(ConstSpan a) {
    return dot(a, a);
}

inline double norm(ConstSpan a) {
    return std::sqrt(norm2(a));
}

inline double dist2(ConstSpan a, ConstSpan b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(ConstSpan a, ConstSpan b) {
    return std::sqrt(dist2(a, b));
}

inline Vec axpy(double c, ConstSpan x, ConstSpan y) {
    Vec out(y.begin(), y.end());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += c * x[i];
    return out;
}

// Axis-aligned bounds used for grids and sampling windows.
struct BoxBounds {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }

    bool contains(ConstSpan x, double tol = 0.0) const {
        for (std::size_t i = 0; i < lo.size(); ++i) {
            if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
        }
        return true;
    }

    double diameter() const {
        double s = 0.0;
        for (std::size_t i = 0; i < lo.size(); ++i) {
            const double d = hi[i] - lo[i];
            s += d * d;
        }
        return std::sqrt(s);
    }
};

// Decimal formatting used by every exported file: 17 significant digits
// round-trips a double exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Deterministic uniform in [0,1); independent of libstdc++ distribution
// internals so seeded runs replay byte-identically anywhere.
inline double unit_uniform(std::uint64_t& state) {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    return static_cast<double>((state * 2685821657736338717ull) >> 11) * 0x1.0p-53;
}

inline std::uint64_t seed_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = fnv1a(std::to_string(stream), seed ^ 0x9e3779b97f4a7c15ull);
    if (s == 0) s = 0x9e3779b97f4a7c15ull;
    return s;
}

}  // namespace exitgame
