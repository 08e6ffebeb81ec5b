#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "rotorlab/errors.hpp"

namespace rotorlab {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double pi = 3.141592653589793238462643383279;

// Chirikov resonance-overlap estimate K = pi^2/4 for the onset of global
// chaos. It overestimates the accepted critical value K_c ~ 0.9716.
inline constexpr double chirikov_overlap_K = pi * pi / 4.0;
inline constexpr double standard_map_Kc = 0.971635406;

// Floor-based reduction into [0, 2*pi). Branch-free across signs.
inline double wrap_angle(double x) {
    double y = x - two_pi * std::floor(x / two_pi);
    if (y >= two_pi) y -= two_pi;
    if (y < 0.0) y = 0.0;
    return y;
}

// Reduction into [-pi, pi), used by the singular potential family.
inline double wrap_symmetric(double x) {
    double y = x - two_pi * std::floor((x + pi) / two_pi);
    if (y < -pi) y = -pi;
    if (y >= pi) y -= two_pi;
    return y;
}

// Kick period, kept as an exact rational multiple of 2*pi plus a real
// detuning:  T = 2*pi*num/den + delta.
//
// Resonant free-rotation phases T*m^2/2 are reduced mod 2*pi in integer
// arithmetic so that e.g. T=4*pi gives the identity factor exactly; the
// detuning contribution is reduced in floating point.
struct Period {
    long long num = 0;
    long long den = 1;
    double delta = 0.0;

    static Period plain(double T) { return Period{0, 1, T}; }
    static Period rational_2pi(long long num, long long den, double delta = 0.0) {
        if (den <= 0) throw UsageError("Period: denominator must be positive");
        return Period{num, den, delta};
    }

    double value() const { return two_pi * static_cast<double>(num) / static_cast<double>(den) + delta; }

    bool is_exact_rational() const { return delta == 0.0; }

    // (p/q) * (T/2) * m^2 reduced to [0, 2*pi).
    double free_phase_scaled(long long m, long long p, long long q) const {
        long long m2 = m * m;
        double phase = 0.0;
        if (num != 0) {
            long long modulus = 2 * q * den;
            long long a = ((num * p) % modulus) * (m2 % modulus) % modulus;
            a %= modulus;
            if (a < 0) a += modulus;
            phase = two_pi * static_cast<double>(a) / static_cast<double>(modulus);
        }
        if (delta != 0.0) {
            double f = std::fmod(delta * static_cast<double>(p) * static_cast<double>(m2) /
                                     (2.0 * static_cast<double>(q)),
                                 two_pi);
            phase += f;
        }
        return wrap_angle(phase);
    }

    // T*m^2/2 reduced to [0, 2*pi): the phase of the free Floquet factor.
    double free_phase(long long m) const { return free_phase_scaled(m, 1, 1); }
};

// Compensated (Kahan) accumulator; merging partials in a fixed order keeps
// reductions byte-deterministic regardless of worker count.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Columnar time series: a shared abscissa plus named columns. Columns live
// in a deque so references from add_column stay valid as columns are added.
struct TimeSeries {
    std::vector<double> t;
    std::vector<std::string> names;
    std::deque<std::vector<double>> cols;

    std::size_t rows() const { return t.size(); }

    std::vector<double>& add_column(const std::string& name) {
        names.push_back(name);
        cols.emplace_back();
        return cols.back();
    }

    const std::vector<double>& col(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return cols[i];
        throw DataError("TimeSeries: missing column '" + name + "'");
    }

    bool has(const std::string& name) const {
        for (const auto& n : names)
            if (n == name) return true;
        return false;
    }
};

// Least-squares line fit y = a + b*x. Returns {a, b, slope stderr, R^2}.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace rotorlab
