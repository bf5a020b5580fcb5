#pragma once
#include <array>
#include <cmath>

namespace eikjohn {

// Point/vector in up to 3 dimensions; unused trailing components stay 0.
using Vec = std::array<double, 3>;

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec normalized(const Vec& a) {
    double n = norm(a);
    return n > 0 ? (1.0 / n) * a : Vec{0, 0, 0};
}

inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

// Angle between two nonzero vectors, in [0, pi].
inline double angle_between(const Vec& a, const Vec& b) {
    double c = dot(a, b) / (norm(a) * norm(b));
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return std::acos(c);
}

} // namespace eikjohn
