#pragma once

#include <cstdint>
#include <vector>

#include "rotorlab/common.hpp"

namespace rotorlab::kepler {

// Kepler-map point: scaled energy N = E/omega (bound while negative),
// field phase at perihelion. Ionization is absorbing.
struct KeplerPoint {
    double N = -1.0;
    double phi = 0.0;
    bool ionized = false;
};

// Scaled microwave drive; derived quantities are recomputed on access.
struct MicrowaveParams {
    double epsilon = 0.0; // unscaled field amplitude
    double omega = 0.0;   // unscaled frequency
    double n0 = 0.0;      // initial principal action

    double omega0() const { return omega * n0 * n0 * n0; }
    double eps0() const { return epsilon * n0 * n0 * n0 * n0; }
    double k() const { return 2.6 * epsilon / std::pow(omega, 5.0 / 3.0); }
    double T_lin() const { return 6.0 * pi * omega * omega * std::pow(n0, 5.0); }
    double N_I() const { return 1.0 / (2.0 * n0 * n0 * omega); }
    double ell_phi() const { return 3.3 * epsilon * epsilon / std::pow(omega, 10.0 / 3.0); }

    static MicrowaveParams from_scaled(double eps0, double omega0, double n0);
};

// One Kepler-map step: N' = N + k sin(phi), phi' = phi + (pi/sqrt(2w))(-N')^{-3/2};
// crossing to N' >= 0 sets the ionized flag and skips the phase update.
KeplerPoint kepler_step(const KeplerPoint& p, const MicrowaveParams& params);

struct IonizationCurve {
    TimeSeries series; // t, fraction
    double final_fraction = 0.0;
};

// Ensemble at N0 = -1/(2 n0^2 omega), phases uniform; fraction ionized vs
// kick count (monotone by construction).
IonizationCurve ionization_probability(const MicrowaveParams& params, std::size_t n_traj,
                                       long steps, std::uint64_t seed);

struct Borders {
    double eps0_classical = 0.0;   // scaled chaos border 1/(49 w0^{1/3})
    double eps_quantum = 0.0;      // unscaled 0.4 w^{7/6} / n0
    double eps0_quantum = 0.0;     // same, scaled by n0^4
    double ratio_ell_NI = 0.0;     // delocalization predicate: > 1 ionizes
};

Borders borders(const MicrowaveParams& params);

// Smallest scaled field with >= `fraction` ionization after `steps` kicks,
// bisected between eps0_lo and eps0_hi (both scaled).
double ionization_threshold_eps0(double omega0, double n0, double fraction, long steps,
                                 std::size_t n_traj, double eps0_lo, double eps0_hi,
                                 std::uint64_t seed);

} // namespace rotorlab::kepler
