#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "rotorlab/classical.hpp"
#include "rotorlab/common.hpp"

namespace rotorlab::quantum {

// Complex amplitudes over the truncated angular-momentum lattice
// m in [-L, L], one or two spin components. Component c, momentum m live at
// amps[c*(2L+1) + m + L]. The state is never silently renormalised: for
// non-Hermitian runs the engine folds extreme magnitudes into log_scale, so
// the represented amplitudes are amps * exp(log_scale).
struct RotorState {
    int L = 0;
    int components = 1;
    std::vector<cplx> amps;
    double log_scale = 0.0;
    bool spill = false;

    int lattice() const { return 2 * L + 1; }
    std::size_t idx(int c, long m) const {
        return static_cast<std::size_t>(c) * lattice() + static_cast<std::size_t>(m + L);
    }
    cplx& at(int c, long m) { return amps[idx(c, m)]; }
    const cplx& at(int c, long m) const { return amps[idx(c, m)]; }

    double norm2() const;      // sum |A|^2, without the log_scale factor
    double log_norm2() const;  // ln(sum |A|^2) + 2*log_scale
};

RotorState init_delta(int L, long m0, int components = 1, int component = 0);
RotorState init_gaussian(int L, double center, double delta_I);
RotorState init_uniform(int L);
RotorState init_custom(int L, std::vector<cplx> amps, int components = 1);

struct Observables {
    double norm = 0.0;   // sum |A|^2 including the log_scale factor
    double energy = 0.0; // <I^2>/2, normalised by the current norm
    double meanI = 0.0;  // <I>, normalised by the current norm
    std::vector<double> P; // P(m), normalised, summed over components
};

Observables observables(const RotorState& s);

// Amplitude modulation of the kick: [1 + eps*cos(omega2*t)*cos(omega3*t)],
// t the integer kick index.
struct Modulation {
    double eps = 0.0;
    double omega2 = 0.0;
    double omega3 = 0.0;
    double factor(long t) const {
        return 1.0 + eps * std::cos(omega2 * static_cast<double>(t)) *
                         std::cos(omega3 * static_cast<double>(t));
    }
};

// Spin-1/2 kick: phase arguments V0, V entering exp(-i(V0 + V.sigma)) per
// grid angle, possibly time dependent through the kick index.
using SpinKickFn = std::function<void(double theta, long t, double& V0, double V[3])>;

// Everything defining one driven-rotor protocol.
struct FloquetSpec {
    Period T = Period::plain(1.0);
    classical::KickPotential potential = classical::KickPotential::cosine(0.0);
    // PT gain: V = k(cos th + i*gain*sin th); only defined for the cosine kick.
    double gain = 0.0;
    std::optional<Modulation> modulation;
    std::optional<SpinKickFn> spin_kick;
    bool half_step_split = false;
    double spill_threshold = 1e-8;

    bool hermitian() const { return gain == 0.0; }
};

struct EvolveResult {
    TimeSeries series;            // t, norm, energy, meanI
    std::vector<double> avg_dist; // time-averaged P(m), empty unless requested
    std::optional<long> first_spill;
};

// One-period split-step propagator: kick diagonal on the 2L+1 point theta
// grid (momentum->angle DFT, phase multiply, back), then the free factor
// e^{-i T m^2 / 2} diagonal in m. Kick before free rotation; the symmetric
// split is opt-in via the spec.
class FloquetEngine {
public:
    FloquetEngine(FloquetSpec spec, int L);
    ~FloquetEngine();
    FloquetEngine(const FloquetEngine&) = delete;
    FloquetEngine& operator=(const FloquetEngine&) = delete;

    void step(RotorState& s, long t);
    EvolveResult evolve(RotorState& s, long steps, long record_every = 1,
                        long accumulate_dist_from = -1);

    const FloquetSpec& spec() const { return spec_; }
    int L() const { return L_; }

private:
    struct Impl;
    void apply_kick(RotorState& s, long t);
    void apply_free(RotorState& s, bool half);
    void check_spill(RotorState& s, long t);

    FloquetSpec spec_;
    int L_;
    int N_;
    std::unique_ptr<Impl> impl_;
    std::vector<double> theta_;
    std::vector<cplx> kick_base_;   // e^{-iV(theta_j)}, scalar unmodulated path
    std::vector<cplx> v_grid_;      // V(theta_j), scalar modulated path
    std::vector<cplx> free_full_;
    std::vector<cplx> free_half_;
    std::optional<long> first_spill_;
};

// Convenience wrappers matching the operation contracts.
RotorState floquet_step(const RotorState& s, const FloquetSpec& spec, long t);
EvolveResult evolve(RotorState& s, const FloquetSpec& spec, long steps, long record_every = 1,
                    long accumulate_dist_from = -1);

// Quasiperiodic kicked rotor, Hilbert-space convention hbar_eff: kick
// strength K/hbar_eff, free phase hbar_eff m^2/2.
EvolveResult quasiperiodic_run(double K, double eps, double omega2, double omega3,
                               double hbar_eff, int L, long steps, long record_every = 1);

// Spin-1/2 quasiperiodic rotor: per theta2 sample evolve a two-component
// rotor whose kick phase advances as theta2 + omega_tilde * t; reports the
// theta2-averaged kinetic energy E(t) = <m^2>/2.
struct QheParams {
    int L = 512;
    double hbar_eff = 1.0;
    double omega_tilde = 0.0;
    int theta2_samples = 8;
    long steps = 200;
    long record_every = 1;
    double d3_coefficient = 0.8;
    bool zero_kick = false; // V=0 control
};

TimeSeries spinor_qhe_run(const QheParams& params);

} // namespace rotorlab::quantum
