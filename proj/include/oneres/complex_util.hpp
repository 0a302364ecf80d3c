#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oneres {

using Cx = std::complex<double>;
using CVec = std::vector<Cx>;

// Angles are kept in "turns" (multiples of 2*pi) so that unit modulus is
// structural and phase reduction stays exact for large iterates.

/// Reduce to (-0.5, 0.5].
inline double wrap_half(double turns) {
    long double t = std::fmod(static_cast<long double>(turns), 1.0L);
    if (t > 0.5L) t -= 1.0L;
    if (t <= -0.5L) t += 1.0L;
    return static_cast<double>(t);
}

/// Reduce an angle in radians to (-pi, pi].
inline double wrap_pi(double a) {
    double t = std::remainder(a, 2.0 * std::numbers::pi);
    if (t <= -std::numbers::pi) t += 2.0 * std::numbers::pi;
    return t;
}

/// e^{2 pi i turns} with argument reduction in extended precision.
inline Cx unit_phase(double turns) {
    long double t = std::fmod(static_cast<long double>(turns), 1.0L);
    long double a = 2.0L * 3.14159265358979323846264338327950288L * t;
    return {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
}

/// |e^{2 pi i a} - e^{2 pi i b}| = 2 |sin(pi (a - b))|, stable near resonances.
inline double unit_gap(double a_turns, double b_turns) {
    long double dlt = std::fmod(static_cast<long double>(a_turns) - static_cast<long double>(b_turns), 1.0L);
    long double s = std::sin(3.14159265358979323846264338327950288L * dlt);
    return 2.0 * static_cast<double>(std::fabs(s));
}

/// Neumaier compensated accumulator, used by the series kernels when the
/// compensated mode is switched on.
struct CompensatedSum {
    Cx s{0.0, 0.0};
    Cx c{0.0, 0.0};
    void add(Cx v) {
        Cx t = s + v;
        double cr = (std::abs(s.real()) >= std::abs(v.real()))
                        ? (s.real() - t.real()) + v.real()
                        : (v.real() - t.real()) + s.real();
        double ci = (std::abs(s.imag()) >= std::abs(v.imag()))
                        ? (s.imag() - t.imag()) + v.imag()
                        : (v.imag() - t.imag()) + s.imag();
        c += Cx{cr, ci};
        s = t;
    }
    Cx value() const { return s + c; }
};

inline bool& series_compensated_mode() {
    static bool on = false;
    return on;
}

}  // namespace oneres
