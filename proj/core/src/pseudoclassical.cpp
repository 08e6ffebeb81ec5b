#include "rotorlab/pseudoclassical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rotorlab/parallel.hpp"
#include "rotorlab/rng.hpp"

namespace rotorlab::pseudoclassical {

PhasePoint pc_step(const PhasePoint& p, double K, int l) {
    PhasePoint q;
    q.J = p.J + K * std::sin(p.theta);
    // pi*l enters mod 2*pi: even l contributes exactly nothing.
    const double drift = (l % 2 == 0) ? 0.0 : pi;
    q.theta = wrap_angle(p.theta + q.J + drift);
    return q;
}

PhasePoint dkr_pc_step(const PhasePoint& p, double K) {
    const double J1 = p.J + K * std::sin(p.theta);
    const double th1 = p.theta + pi + J1;
    const double J2 = J1 + K * std::sin(th1);
    const double th2 = th1 - pi - J2;
    return {wrap_angle(th2), J2};
}

HarperPoint to_harper(const PhasePoint& p) {
    return {wrap_angle(p.J + p.theta), wrap_angle(p.theta)};
}

FixedPointAnalysis fixed_point_analysis(double K) {
    FixedPointAnalysis out;
    out.lambda_paper = std::log((K * K + 2.0 + std::sqrt(K * K + 4.0 * K)) / 2.0);

    // Central-difference Jacobian of dkr_pc_step at the unstable fixed point
    // (J, theta) = (0, pi). Displacements stay far from the angle wrap.
    const double h = 1e-6;
    auto step_raw = [&](double J, double th, double& Jo, double& tho) {
        const double J1 = J + K * std::sin(th);
        const double th1 = th + pi + J1;
        const double J2 = J1 + K * std::sin(th1);
        Jo = J2;
        tho = th1 - pi - J2;
    };
    double Jp, tp, Jm, tm;
    double M[2][2];
    step_raw(h, pi, Jp, tp);
    step_raw(-h, pi, Jm, tm);
    M[0][0] = (Jp - Jm) / (2 * h);
    M[1][0] = (tp - tm) / (2 * h);
    step_raw(0.0, pi + h, Jp, tp);
    step_raw(0.0, pi - h, Jm, tm);
    M[0][1] = (Jp - Jm) / (2 * h);
    M[1][1] = (tp - tm) / (2 * h);

    out.jac_trace = M[0][0] + M[1][1];
    out.jac_det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    const double disc = out.jac_trace * out.jac_trace - 4.0 * out.jac_det;
    if (disc > 0.0) {
        const double mu = 0.5 * (std::abs(out.jac_trace) + std::sqrt(disc));
        out.lambda_numeric = std::log(mu);
    } else {
        out.lambda_numeric = 0.0; // elliptic: no exponential divergence
    }
    out.discrepancy = std::abs(out.lambda_numeric - out.lambda_paper);
    return out;
}

GaussSumData gauss_sums(int r, int s) {
    if (s < 1) throw UsageError("gauss_sums: s must be >= 1");
    if (std::gcd(r, s) != 1) throw UsageError("gauss_sums: r and s must be coprime");
    GaussSumData out;
    out.r = r;
    out.s = s;
    out.G.resize(static_cast<std::size_t>(s));
    for (int l = 0; l < s; ++l) {
        KahanSum re, im;
        for (int m = 0; m < s; ++m) {
            // exact reduction: r*m*(m-l) mod s
            long long a = (static_cast<long long>(r) * m % s) * ((m - l) % s + s) % s;
            const double phase = -two_pi * static_cast<double>(a) / static_cast<double>(s);
            re.add(std::cos(phase));
            im.add(std::sin(phase));
        }
        out.G[static_cast<std::size_t>(l)] =
            cplx(re.value() / s, im.value() / s);
    }
    for (int l = 0; l < s; ++l) {
        if (std::abs(out.G[static_cast<std::size_t>(l)]) > 1e-12) {
            out.nonzero_l.push_back(l);
            out.amplitudes.push_back(out.G[static_cast<std::size_t>(l)]);
            out.bloch_phases.push_back(two_pi * static_cast<double>(r) * l / s);
        }
    }
    return out;
}

BranchEvolveResult multibranch_evolve(const BranchState& initial, double K,
                                      const GaussSumData& bands, long steps,
                                      double prune_threshold) {
    const int nb = bands.n_bands();
    if (nb < 1) throw UsageError("multibranch_evolve: no bands");
    {
        // capacity must admit the worst-case proliferation N^min(steps, cap)
        double projected = static_cast<double>(initial.branches.size());
        for (long t = 0; t < steps && projected <= 1e18; ++t) projected *= nb;
    }

    BranchEvolveResult out;
    out.state = initial;
    auto& meanJ = out.series.add_column("meanJ");
    auto& meanJ2 = out.series.add_column("meanJ2");

    auto record = [&](long t) {
        KahanSum w_acc, j_acc, j2_acc;
        for (const auto& b : out.state.branches) {
            const double w = std::norm(b.A);
            w_acc.add(w);
            j_acc.add(w * b.J);
            j2_acc.add(w * b.J * b.J);
        }
        const double w = w_acc.value();
        out.series.t.push_back(static_cast<double>(t));
        meanJ.push_back(w > 0 ? j_acc.value() / w : 0.0);
        meanJ2.push_back(w > 0 ? j2_acc.value() / w : 0.0);
    };

    record(0);
    for (long t = 1; t <= steps; ++t) {
        std::vector<Branch> next;
        next.reserve(out.state.branches.size() * static_cast<std::size_t>(nb));
        double dropped = 0.0;
        for (const auto& b : out.state.branches) {
            // H^(0) one-step dynamics (l = 0 band).
            PhasePoint adv = pc_step({b.theta, b.J}, K, 0);
            for (int j = 0; j < nb; ++j) {
                Branch child;
                child.J = adv.J;
                child.theta = wrap_angle(adv.theta + bands.bloch_phases[static_cast<std::size_t>(j)]);
                child.A = b.A * bands.amplitudes[static_cast<std::size_t>(j)];
                if (std::norm(child.A) < prune_threshold)
                    dropped += std::norm(child.A);
                else
                    next.push_back(child);
            }
        }
        out.state.dropped_weight += dropped;
        if (next.size() > out.state.capacity)
            throw CapacityError("multibranch_evolve: branch capacity exceeded at step " +
                                    std::to_string(t),
                                out.state.dropped_weight);
        out.state.branches = std::move(next);
        record(t);
    }
    return out;
}

TimeSeries dkr_exponential_run(double K, double delta, std::size_t n_traj, long steps,
                               std::uint64_t seed) {
    if (n_traj == 0) throw UsageError("dkr_exponential_run: empty ensemble");
    const std::size_t chunk = 4096;
    const std::size_t n_chunks = (n_traj + chunk - 1) / chunk;
    const std::size_t rows = static_cast<std::size_t>(steps) + 1;
    std::vector<std::vector<KahanSum>> partials(n_chunks);

    parallel_chunks(n_traj, chunk, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        auto& acc = partials[c];
        acc.resize(rows);
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng = trajectory_rng(seed, i);
            PhasePoint p;
            p.theta = rng.uniform(0.0, two_pi);
            p.J = rng.uniform(-0.5 * delta, 0.5 * delta);
            acc[0].add(p.J * p.J);
            for (long t = 1; t <= steps; ++t) {
                p = dkr_pc_step(p, K);
                acc[static_cast<std::size_t>(t)].add(p.J * p.J);
            }
        }
    });

    TimeSeries out;
    out.t.resize(rows);
    auto& j2 = out.add_column("meanJ2");
    j2.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        KahanSum acc;
        for (std::size_t c = 0; c < n_chunks; ++c) acc.add(partials[c][r].value());
        out.t[r] = static_cast<double>(r);
        j2[r] = acc.value() / static_cast<double>(n_traj);
    }
    return out;
}

} // namespace rotorlab::pseudoclassical
