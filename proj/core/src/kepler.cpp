#include "rotorlab/kepler.hpp"

#include <cmath>

#include "rotorlab/parallel.hpp"
#include "rotorlab/rng.hpp"

namespace rotorlab::kepler {

MicrowaveParams MicrowaveParams::from_scaled(double eps0, double omega0, double n0) {
    if (n0 <= 0.0) throw UsageError("MicrowaveParams: n0 must be positive");
    MicrowaveParams p;
    p.n0 = n0;
    p.omega = omega0 / (n0 * n0 * n0);
    p.epsilon = eps0 / (n0 * n0 * n0 * n0);
    return p;
}

KeplerPoint kepler_step(const KeplerPoint& p, const MicrowaveParams& params) {
    if (p.ionized) return p;
    if (p.N >= 0.0) throw DomainError("kepler_step: point is not bound (N >= 0)");
    KeplerPoint q;
    q.N = p.N + params.k() * std::sin(p.phi);
    if (q.N >= 0.0) {
        q.phi = p.phi;
        q.ionized = true;
        return q;
    }
    q.phi = wrap_angle(p.phi + pi / std::sqrt(2.0 * params.omega) * std::pow(-q.N, -1.5));
    q.ionized = false;
    return q;
}

IonizationCurve ionization_probability(const MicrowaveParams& params, std::size_t n_traj,
                                       long steps, std::uint64_t seed) {
    if (n_traj == 0) throw UsageError("ionization_probability: empty ensemble");
    if (params.omega0() <= 1.0)
        throw DomainError("ionization_probability: Kepler-map regime requires omega0 > 1");
    const double N0 = -params.N_I();
    const std::size_t chunk = 4096;
    const std::size_t n_chunks = (n_traj + chunk - 1) / chunk;
    const std::size_t rows = static_cast<std::size_t>(steps) + 1;
    std::vector<std::vector<long>> partial(n_chunks);

    parallel_chunks(n_traj, chunk, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        auto& counts = partial[c];
        counts.assign(rows, 0);
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng = trajectory_rng(seed, i);
            KeplerPoint p;
            p.N = N0;
            p.phi = rng.uniform(0.0, two_pi);
            for (long t = 1; t <= steps; ++t) {
                if (!p.ionized) p = kepler_step(p, params);
                if (p.ionized) counts[static_cast<std::size_t>(t)]++;
            }
        }
    });

    IonizationCurve out;
    out.series.t.resize(rows);
    auto& frac = out.series.add_column("fraction");
    frac.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        long total = 0;
        for (std::size_t c = 0; c < n_chunks; ++c) total += partial[c][r];
        out.series.t[r] = static_cast<double>(r);
        frac[r] = static_cast<double>(total) / static_cast<double>(n_traj);
    }
    out.final_fraction = frac.back();
    return out;
}

Borders borders(const MicrowaveParams& params) {
    const double w0 = params.omega0();
    if (w0 <= 1.0) throw DomainError("borders: Kepler-map regime requires omega0 > 1");
    Borders b;
    b.eps0_classical = 1.0 / (49.0 * std::cbrt(w0));
    b.eps_quantum = 0.4 * std::pow(params.omega, 7.0 / 6.0) / params.n0;
    b.eps0_quantum = b.eps_quantum * std::pow(params.n0, 4.0);
    b.ratio_ell_NI = params.ell_phi() / params.N_I();
    return b;
}

double ionization_threshold_eps0(double omega0, double n0, double fraction, long steps,
                                 std::size_t n_traj, double eps0_lo, double eps0_hi,
                                 std::uint64_t seed) {
    auto frac_at = [&](double eps0) {
        MicrowaveParams p = MicrowaveParams::from_scaled(eps0, omega0, n0);
        return ionization_probability(p, n_traj, steps, seed).final_fraction;
    };
    if (frac_at(eps0_hi) < fraction)
        throw FitError("ionization_threshold_eps0: upper bracket below target fraction");
    if (frac_at(eps0_lo) >= fraction)
        throw FitError("ionization_threshold_eps0: lower bracket already ionizes");
    double lo = eps0_lo, hi = eps0_hi;
    for (int it = 0; it < 20 && (hi - lo) > 1e-3 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (frac_at(mid) >= fraction)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace rotorlab::kepler
