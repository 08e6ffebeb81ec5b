#include "rotorlab/classical.hpp"

#include <algorithm>
#include <cmath>

#include "rotorlab/parallel.hpp"
#include "rotorlab/rng.hpp"

namespace rotorlab::classical {

namespace {

// Symmetric-branch angle with the singular point excluded by the guard
// interval; the sign of the boundary value follows the approach side.
double guarded_symmetric(double theta) {
    double th = wrap_symmetric(theta);
    if (std::abs(th) < KickPotential::singular_guard)
        th = th >= 0.0 ? KickPotential::singular_guard : -KickPotential::singular_guard;
    return th;
}

} // namespace

KickPotential KickPotential::power_law(double K, double alpha) {
    if (alpha < -1.0 || alpha > 1.0)
        throw DomainError("KickPotential::power_law: alpha must lie in [-1, 1]");
    return {Kind::PowerLaw, K, 0.0, alpha};
}

double KickPotential::value(double theta) const {
    switch (kind_) {
    case Kind::Cosine:
        return k_ * std::cos(theta);
    case Kind::CosinePhase:
        return k_ * std::cos(theta + phase_);
    case Kind::Sawtooth: {
        double th = wrap_angle(theta);
        return -0.5 * k_ * (th - pi) * (th - pi);
    }
    case Kind::PowerLaw: {
        double th = guarded_symmetric(theta);
        return k_ * std::pow(std::abs(th), alpha_);
    }
    case Kind::Log: {
        double th = guarded_symmetric(theta);
        return k_ * std::log(std::abs(th));
    }
    case Kind::PiecewiseLinear: {
        double th = wrap_symmetric(theta);
        return k_ * (1.0 - 2.0 * std::abs(th) / pi);
    }
    }
    return 0.0;
}

double KickPotential::force(double theta) const {
    switch (kind_) {
    case Kind::Cosine:
        return k_ * std::sin(theta);
    case Kind::CosinePhase:
        return k_ * std::sin(theta + phase_);
    case Kind::Sawtooth: {
        double th = wrap_angle(theta);
        return k_ * (th - pi);
    }
    case Kind::PowerLaw: {
        double th = guarded_symmetric(theta);
        double sign = th >= 0.0 ? 1.0 : -1.0;
        return -k_ * alpha_ * std::pow(std::abs(th), alpha_ - 1.0) * sign;
    }
    case Kind::Log: {
        double th = guarded_symmetric(theta);
        return -k_ / th;
    }
    case Kind::PiecewiseLinear: {
        double th = wrap_symmetric(theta);
        double sign = th >= 0.0 ? 1.0 : -1.0;
        return (2.0 * k_ / pi) * sign;
    }
    }
    return 0.0;
}

double KickPotential::force_derivative(double theta) const {
    switch (kind_) {
    case Kind::Cosine:
        return k_ * std::cos(theta);
    case Kind::CosinePhase:
        return k_ * std::cos(theta + phase_);
    case Kind::Sawtooth:
        return k_;
    case Kind::PowerLaw: {
        double th = guarded_symmetric(theta);
        return -k_ * alpha_ * (alpha_ - 1.0) * std::pow(std::abs(th), alpha_ - 2.0);
    }
    case Kind::Log: {
        double th = guarded_symmetric(theta);
        return k_ / (th * th);
    }
    case Kind::PiecewiseLinear:
        return 0.0;
    }
    return 0.0;
}

std::string KickPotential::describe() const {
    switch (kind_) {
    case Kind::Cosine:
        return "cosine(k=" + std::to_string(k_) + ")";
    case Kind::CosinePhase:
        return "cosine_phase(k=" + std::to_string(k_) + ",phi=" + std::to_string(phase_) + ")";
    case Kind::Sawtooth:
        return "sawtooth(k=" + std::to_string(k_) + ")";
    case Kind::PowerLaw:
        return "power_law(K=" + std::to_string(k_) + ",alpha=" + std::to_string(alpha_) + ")";
    case Kind::Log:
        return "log(K=" + std::to_string(k_) + ")";
    case Kind::PiecewiseLinear:
        return "piecewise_linear(k=" + std::to_string(k_) + ")";
    }
    return "?";
}

Geometry Geometry::torus(int cells) {
    if (cells < 1) throw UsageError("Geometry::torus: cells must be >= 1");
    return {Kind::Torus, cells};
}

namespace {

double reduce_J(double J, const Geometry& g) {
    if (g.kind != Geometry::Kind::Torus) return J;
    const double span = two_pi * g.cells;
    double y = J - span * std::floor(J / span);
    if (y >= span) y -= span;
    return y;
}

void check_finite(const PhasePoint& p, const KickPotential& pot) {
    if (!std::isfinite(p.J) || !std::isfinite(p.theta))
        throw DomainError("step_map: non-finite result for potential " + pot.describe());
}

} // namespace

Ensemble make_uniform_theta_ensemble(std::size_t n, double J0, std::uint64_t seed, Geometry geom) {
    Ensemble e;
    e.seed = seed;
    e.geometry = geom;
    e.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = trajectory_rng(seed, i);
        e.points[i] = {rng.uniform(0.0, two_pi), reduce_J(J0, geom)};
    }
    return e;
}

Ensemble make_gaussian_ensemble(std::size_t n, double theta0, double J0, double sigma_theta,
                                double sigma_J, std::uint64_t seed, Geometry geom) {
    Ensemble e;
    e.seed = seed;
    e.geometry = geom;
    e.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = trajectory_rng(seed, i);
        double th = wrap_angle(theta0 + sigma_theta * rng.gaussian());
        double J = reduce_J(J0 + sigma_J * rng.gaussian(), geom);
        e.points[i] = {th, J};
    }
    return e;
}

Ensemble make_cell_ensemble(std::size_t n, double J0, double width, std::uint64_t seed,
                            Geometry geom) {
    Ensemble e;
    e.seed = seed;
    e.geometry = geom;
    e.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = trajectory_rng(seed, i);
        double th = rng.uniform(0.0, two_pi);
        double J = reduce_J(J0 + rng.uniform(-0.5 * width, 0.5 * width), geom);
        e.points[i] = {th, J};
    }
    return e;
}

PhasePoint step_map(const PhasePoint& p, const KickPotential& pot, double drift) {
    PhasePoint q;
    q.J = p.J + pot.force(p.theta);
    q.theta = wrap_angle(p.theta + q.J + drift);
    check_finite(q, pot);
    return q;
}

PhasePoint inverse_step_map(const PhasePoint& p, const KickPotential& pot, double drift) {
    PhasePoint q;
    q.theta = wrap_angle(p.theta - p.J - drift);
    q.J = p.J - pot.force(q.theta);
    check_finite(q, pot);
    return q;
}

EnsembleSeries evolve_ensemble(const Ensemble& e, const KickPotential& pot, long steps,
                               double drift, long snapshot_every) {
    if (e.points.empty()) throw UsageError("evolve_ensemble: empty ensemble");
    if (steps < 1) throw UsageError("evolve_ensemble: steps must be >= 1");

    const std::size_t n = e.points.size();
    const std::size_t rows = static_cast<std::size_t>(steps) + 1;
    const std::size_t chunk = 4096;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    const bool torus = e.geometry.kind == Geometry::Kind::Torus;

    struct Partial {
        std::vector<KahanSum> sJ, sJ2;
    };
    std::vector<Partial> partials(n_chunks);

    std::vector<std::vector<PhasePoint>> snap_store;
    std::vector<long> snap_times;
    if (snapshot_every > 0) {
        for (long t = 0; t <= steps; t += snapshot_every) snap_times.push_back(t);
        snap_store.assign(snap_times.size(), std::vector<PhasePoint>(n));
    }

    parallel_chunks(n, chunk, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        Partial& part = partials[c];
        part.sJ.resize(rows);
        part.sJ2.resize(rows);
        for (std::size_t i = lo; i < hi; ++i) {
            PhasePoint p = e.points[i];
            part.sJ[0].add(p.J);
            part.sJ2[0].add(p.J * p.J);
            std::size_t snap_idx = 0;
            if (snapshot_every > 0) snap_store[snap_idx++][i] = p;
            for (long t = 1; t <= steps; ++t) {
                p = step_map(p, pot, drift);
                if (torus) p.J = reduce_J(p.J, e.geometry);
                part.sJ[static_cast<std::size_t>(t)].add(p.J);
                part.sJ2[static_cast<std::size_t>(t)].add(p.J * p.J);
                if (snapshot_every > 0 && t % snapshot_every == 0) snap_store[snap_idx++][i] = p;
            }
        }
    });

    EnsembleSeries out;
    out.series.t.resize(rows);
    auto& meanJ = out.series.add_column("meanJ");
    auto& varJ = out.series.add_column("varJ");
    meanJ.resize(rows);
    varJ.resize(rows);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < rows; ++r) {
        KahanSum s1, s2;
        for (std::size_t c = 0; c < n_chunks; ++c) {
            s1.add(partials[c].sJ[r].value());
            s2.add(partials[c].sJ2[r].value());
        }
        const double m1 = s1.value() * inv_n;
        const double m2 = s2.value() * inv_n;
        out.series.t[r] = static_cast<double>(r);
        meanJ[r] = m1;
        varJ[r] = m2 - m1 * m1;
    }
    for (std::size_t s = 0; s < snap_times.size(); ++s)
        out.snapshots.emplace_back(snap_times[s], std::move(snap_store[s]));
    return out;
}

DiffusionFit diffusion_coefficient(const TimeSeries& series, double t0, double t1) {
    const auto& var = series.col("varJ");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        if (series.t[i] < t0 || series.t[i] > t1) continue;
        if (!std::isfinite(var[i])) throw FitError("diffusion_coefficient: non-finite series");
        xs.push_back(series.t[i]);
        ys.push_back(var[i]);
    }
    if (xs.size() < 50) throw FitError("diffusion_coefficient: need >= 50 points in window");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] <= xs[i - 1]) throw FitError("diffusion_coefficient: non-monotone time axis");
    LineFit f = fit_line(xs, ys);
    return {f.slope, f.slope_stderr, xs.size()};
}

LyapunovResult max_lyapunov(const KickPotential& pot, const PhasePoint& p0, long steps,
                            long transient, double drift) {
    if (steps <= transient) throw UsageError("max_lyapunov: steps must exceed transient");
    PhasePoint p = p0;
    // Tangent vector (dJ, dtheta); renormalised every step to avoid overflow.
    double vJ = 1.0 / std::sqrt(2.0), vth = 1.0 / std::sqrt(2.0);
    for (long t = 0; t < transient; ++t) {
        const double fp = pot.force_derivative(p.theta);
        const double nJ = vJ + fp * vth;
        const double nth = vJ + (1.0 + fp) * vth;
        const double norm = std::hypot(nJ, nth);
        vJ = nJ / norm;
        vth = nth / norm;
        p = step_map(p, pot, drift);
    }
    const long n = steps - transient;
    const int blocks = 10;
    std::vector<KahanSum> block_sums(blocks);
    std::vector<long> block_counts(blocks, 0);
    for (long t = 0; t < n; ++t) {
        const double fp = pot.force_derivative(p.theta);
        const double nJ = vJ + fp * vth;
        const double nth = vJ + (1.0 + fp) * vth;
        const double norm = std::hypot(nJ, nth);
        const int b = static_cast<int>((t * blocks) / n);
        block_sums[b].add(std::log(norm));
        block_counts[b]++;
        vJ = nJ / norm;
        vth = nth / norm;
        p = step_map(p, pot, drift);
    }
    double mean = 0.0;
    std::vector<double> block_means(blocks);
    for (int b = 0; b < blocks; ++b) {
        block_means[b] = block_sums[b].value() / static_cast<double>(block_counts[b]);
        mean += block_sums[b].value();
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (int b = 0; b < blocks; ++b) {
        const double d = block_means[b] - mean;
        var += d * d;
    }
    var /= blocks * (blocks - 1);
    LyapunovResult r;
    r.lambda = mean;
    r.std_error = std::sqrt(var);
    r.chaotic = r.lambda > std::max(3.0 * r.std_error, 1e-3);
    return r;
}

std::vector<SectionCloud> poincare_section(const KickPotential& pot,
                                           const std::vector<PhasePoint>& seeds, long steps,
                                           int torus_cells, double drift) {
    Geometry geom = Geometry::torus(torus_cells);
    (void)geom;
    std::vector<SectionCloud> clouds(seeds.size());
    parallel_for_each(seeds.size(), [&](std::size_t i) {
        SectionCloud& cl = clouds[i];
        cl.seed_id = i;
        cl.points.reserve(static_cast<std::size_t>(steps) + 1);
        PhasePoint p = seeds[i];
        p.theta = wrap_angle(p.theta);
        cl.points.push_back(p);
        for (long t = 0; t < steps; ++t) {
            p = step_map(p, pot, drift);
            cl.points.push_back(p);
        }
    });
    return clouds;
}

} // namespace rotorlab::classical
