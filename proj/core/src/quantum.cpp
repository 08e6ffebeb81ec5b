#include "rotorlab/quantum.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "rotorlab/parallel.hpp"

namespace rotorlab::quantum {

namespace {

// FFTW plan creation is not thread-safe; execution on per-engine buffers is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

double RotorState::norm2() const {
    KahanSum acc;
    for (const cplx& a : amps) acc.add(std::norm(a));
    return acc.value();
}

double RotorState::log_norm2() const { return std::log(norm2()) + 2.0 * log_scale; }

RotorState init_delta(int L, long m0, int components, int component) {
    if (L < 1) throw UsageError("init_delta: L must be >= 1");
    if (m0 < -L || m0 > L) throw RangeError("init_delta: m0 outside [-L, L]");
    if (component < 0 || component >= components) throw RangeError("init_delta: bad component");
    RotorState s;
    s.L = L;
    s.components = components;
    s.amps.assign(static_cast<std::size_t>(components) * (2 * L + 1), cplx(0.0, 0.0));
    s.at(component, m0) = cplx(1.0, 0.0);
    return s;
}

RotorState init_gaussian(int L, double center, double delta_I) {
    if (L < 1) throw UsageError("init_gaussian: L must be >= 1");
    if (delta_I < 1.0) throw UsageError("init_gaussian: width must be >= lattice spacing");
    RotorState s;
    s.L = L;
    s.components = 1;
    s.amps.resize(2 * L + 1);
    for (long m = -L; m <= L; ++m) {
        const double d = static_cast<double>(m) - center;
        s.at(0, m) = std::exp(-d * d / (4.0 * delta_I * delta_I));
    }
    const double n = std::sqrt(s.norm2());
    for (auto& a : s.amps) a /= n;
    return s;
}

RotorState init_uniform(int L) {
    if (L < 1) throw UsageError("init_uniform: L must be >= 1");
    RotorState s;
    s.L = L;
    s.components = 1;
    s.amps.assign(2 * L + 1, cplx(1.0 / std::sqrt(2.0 * L + 1.0), 0.0));
    return s;
}

RotorState init_custom(int L, std::vector<cplx> amps, int components) {
    if (amps.size() != static_cast<std::size_t>(components) * (2 * L + 1))
        throw UsageError("init_custom: amplitude size mismatch");
    RotorState s;
    s.L = L;
    s.components = components;
    s.amps = std::move(amps);
    const double n2 = s.norm2();
    if (n2 <= 0.0) throw DegenerateStateError("init_custom: zero state");
    const double n = std::sqrt(n2);
    for (auto& a : s.amps) a /= n;
    return s;
}

Observables observables(const RotorState& s) {
    const double n2 = s.norm2();
    if (n2 <= 0.0) throw DegenerateStateError("observables: zero norm");
    Observables o;
    o.norm = n2 * std::exp(2.0 * s.log_scale);
    o.P.assign(s.lattice(), 0.0);
    KahanSum e_acc, i_acc;
    for (int c = 0; c < s.components; ++c) {
        for (long m = -s.L; m <= s.L; ++m) {
            const double w = std::norm(s.at(c, m));
            o.P[static_cast<std::size_t>(m + s.L)] += w;
            e_acc.add(w * static_cast<double>(m) * static_cast<double>(m));
            i_acc.add(w * static_cast<double>(m));
        }
    }
    for (auto& p : o.P) p /= n2;
    o.energy = 0.5 * e_acc.value() / n2;
    o.meanI = i_acc.value() / n2;
    return o;
}

struct FloquetEngine::Impl {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_complex* buf = nullptr;
    int N = 0;

    explicit Impl(int n) : N(n) {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        buf = fftw_alloc_complex(static_cast<std::size_t>(N));
        fwd = fftw_plan_dft_1d(N, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(N, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Impl() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }

    // momentum (array slot a = m+L) -> angle grid values, in place in buf
    void to_angle(const cplx* amps, int L) {
        for (int a = 0; a < N; ++a) {
            const int m = a - L;
            const int f = m >= 0 ? m : m + N;
            buf[f][0] = amps[a].real();
            buf[f][1] = amps[a].imag();
        }
        fftw_execute(bwd);
    }
    void to_momentum(cplx* amps, int L) {
        fftw_execute(fwd);
        const double inv = 1.0 / static_cast<double>(N);
        for (int a = 0; a < N; ++a) {
            const int m = a - L;
            const int f = m >= 0 ? m : m + N;
            amps[a] = cplx(buf[f][0] * inv, buf[f][1] * inv);
        }
    }
    cplx* grid() { return reinterpret_cast<cplx*>(buf); }
};

FloquetEngine::FloquetEngine(FloquetSpec spec, int L) : spec_(std::move(spec)), L_(L) {
    if (L < 1) throw UsageError("FloquetEngine: L must be >= 1");
    N_ = 2 * L + 1;
    if (spec_.gain != 0.0 &&
        spec_.potential.kind() != classical::KickPotential::Kind::Cosine)
        throw ConfigError("FloquetEngine: gain is defined for the cosine kick only");
    impl_ = std::make_unique<Impl>(N_);

    theta_.resize(N_);
    for (int j = 0; j < N_; ++j) theta_[j] = two_pi * j / static_cast<double>(N_);

    if (!spec_.spin_kick) {
        v_grid_.resize(N_);
        kick_base_.resize(N_);
        const double k = spec_.potential.amplitude();
        for (int j = 0; j < N_; ++j) {
            double vre = spec_.potential.value(theta_[j]);
            double vim = spec_.gain != 0.0 ? spec_.gain * k * std::sin(theta_[j]) : 0.0;
            v_grid_[j] = cplx(vre, vim);
            // e^{-i(vre + i vim)} = e^{vim} e^{-i vre}
            kick_base_[j] = std::exp(vim) * cplx(std::cos(vre), -std::sin(vre));
        }
    }

    free_full_.resize(N_);
    free_half_.resize(N_);
    for (long m = -L_; m <= L_; ++m) {
        const double ph_full = spec_.T.free_phase(m);
        const double ph_half = spec_.T.free_phase_scaled(m, 1, 2);
        free_full_[m + L_] = cplx(std::cos(ph_full), -std::sin(ph_full));
        free_half_[m + L_] = cplx(std::cos(ph_half), -std::sin(ph_half));
    }
}

FloquetEngine::~FloquetEngine() = default;

void FloquetEngine::apply_kick(RotorState& s, long t) {
    if (!spec_.spin_kick) {
        const bool modulated = spec_.modulation.has_value();
        const double mf = modulated ? spec_.modulation->factor(t) : 1.0;
        for (int c = 0; c < s.components; ++c) {
            cplx* comp = s.amps.data() + static_cast<std::size_t>(c) * N_;
            impl_->to_angle(comp, L_);
            cplx* g = impl_->grid();
            if (!modulated || mf == 1.0) {
                for (int j = 0; j < N_; ++j) g[j] *= kick_base_[j];
            } else {
                for (int j = 0; j < N_; ++j) {
                    const double vre = v_grid_[j].real() * mf;
                    const double vim = v_grid_[j].imag() * mf;
                    g[j] *= std::exp(vim) * cplx(std::cos(vre), -std::sin(vre));
                }
            }
            impl_->to_momentum(comp, L_);
        }
        return;
    }

    if (s.components != 2)
        throw ConfigError("FloquetEngine: spin kick requires a two-component state");
    // Transform both components to the angle grid, apply the per-theta 2x2
    // factor e^{-iV0}(cos|V| - i sin|V| n.sigma), transform back.
    std::vector<cplx> up(N_), dn(N_);
    impl_->to_angle(s.amps.data(), L_);
    std::copy(impl_->grid(), impl_->grid() + N_, up.begin());
    impl_->to_angle(s.amps.data() + N_, L_);
    std::copy(impl_->grid(), impl_->grid() + N_, dn.begin());

    const SpinKickFn& fn = *spec_.spin_kick;
    for (int j = 0; j < N_; ++j) {
        double V0 = 0.0, V[3] = {0.0, 0.0, 0.0};
        fn(theta_[j], t, V0, V);
        const double r = std::sqrt(V[0] * V[0] + V[1] * V[1] + V[2] * V[2]);
        cplx u00, u01, u10, u11;
        if (r < 1e-300) {
            u00 = u11 = cplx(1.0, 0.0);
            u01 = u10 = cplx(0.0, 0.0);
        } else {
            const double cr = std::cos(r), sr = std::sin(r);
            const double nx = V[0] / r, ny = V[1] / r, nz = V[2] / r;
            u00 = cplx(cr, -sr * nz);
            u11 = cplx(cr, sr * nz);
            u01 = cplx(-sr * ny, -sr * nx);
            u10 = cplx(sr * ny, -sr * nx);
        }
        const cplx phase(std::cos(V0), -std::sin(V0));
        const cplx a = up[j], b = dn[j];
        up[j] = phase * (u00 * a + u01 * b);
        dn[j] = phase * (u10 * a + u11 * b);
    }

    std::copy(up.begin(), up.end(), impl_->grid());
    impl_->to_momentum(s.amps.data(), L_);
    std::copy(dn.begin(), dn.end(), impl_->grid());
    impl_->to_momentum(s.amps.data() + N_, L_);
}

void FloquetEngine::apply_free(RotorState& s, bool half) {
    const std::vector<cplx>& f = half ? free_half_ : free_full_;
    for (int c = 0; c < s.components; ++c) {
        cplx* comp = s.amps.data() + static_cast<std::size_t>(c) * N_;
        for (int a = 0; a < N_; ++a) comp[a] *= f[a];
    }
}

void FloquetEngine::check_spill(RotorState& s, long t) {
    const double n2 = s.norm2();
    if (n2 <= 0.0) throw DegenerateStateError("FloquetEngine: state norm collapsed to zero");
    double edge = 0.0;
    for (int c = 0; c < s.components; ++c)
        edge += std::norm(s.at(c, -L_)) + std::norm(s.at(c, L_));
    if (edge / n2 > spec_.spill_threshold && !s.spill) {
        s.spill = true;
        if (!first_spill_) first_spill_ = t;
    }
    // Fold extreme magnitudes into log_scale; the represented state is
    // unchanged, so non-Hermitian evolution is never renormalised.
    if (n2 > 1e60 || n2 < 1e-60) {
        const double scale = std::sqrt(n2);
        for (auto& a : s.amps) a /= scale;
        s.log_scale += std::log(scale);
    }
}

void FloquetEngine::step(RotorState& s, long t) {
    if (s.L != L_) throw UsageError("FloquetEngine: state truncation mismatch");
    if (spec_.half_step_split) {
        apply_free(s, true);
        apply_kick(s, t);
        apply_free(s, true);
    } else {
        apply_kick(s, t);
        apply_free(s, false);
    }
    check_spill(s, t);
}

EvolveResult FloquetEngine::evolve(RotorState& s, long steps, long record_every,
                                   long accumulate_dist_from) {
    if (steps < 1) throw UsageError("evolve: steps must be >= 1");
    if (record_every < 1) record_every = 1;
    first_spill_.reset();

    EvolveResult out;
    auto& norm_col = out.series.add_column("norm");
    auto& energy_col = out.series.add_column("energy");
    auto& meanI_col = out.series.add_column("meanI");

    std::vector<KahanSum> dist_acc;
    long dist_count = 0;

    auto record = [&](long t) {
        Observables o = observables(s);
        out.series.t.push_back(static_cast<double>(t));
        norm_col.push_back(o.norm);
        energy_col.push_back(o.energy);
        meanI_col.push_back(o.meanI);
        if (accumulate_dist_from >= 0 && t >= accumulate_dist_from) {
            if (dist_acc.empty()) dist_acc.resize(o.P.size());
            for (std::size_t i = 0; i < o.P.size(); ++i) dist_acc[i].add(o.P[i]);
            ++dist_count;
        }
    };

    record(0);
    for (long t = 1; t <= steps; ++t) {
        step(s, t - 1); // kick index of the step being applied
        if (t % record_every == 0 || t == steps) record(t);
    }
    if (dist_count > 0) {
        out.avg_dist.resize(dist_acc.size());
        for (std::size_t i = 0; i < dist_acc.size(); ++i)
            out.avg_dist[i] = dist_acc[i].value() / static_cast<double>(dist_count);
    }
    out.first_spill = first_spill_;
    return out;
}

RotorState floquet_step(const RotorState& s, const FloquetSpec& spec, long t) {
    FloquetEngine engine(spec, s.L);
    RotorState out = s;
    engine.step(out, t);
    return out;
}

EvolveResult evolve(RotorState& s, const FloquetSpec& spec, long steps, long record_every,
                    long accumulate_dist_from) {
    FloquetEngine engine(spec, s.L);
    return engine.evolve(s, steps, record_every, accumulate_dist_from);
}

EvolveResult quasiperiodic_run(double K, double eps, double omega2, double omega3,
                               double hbar_eff, int L, long steps, long record_every) {
    if (hbar_eff <= 0.0) throw UsageError("quasiperiodic_run: hbar_eff must be positive");
    FloquetSpec spec;
    spec.T = Period::plain(hbar_eff);
    spec.potential = classical::KickPotential::cosine(K / hbar_eff);
    if (eps != 0.0) spec.modulation = Modulation{eps, omega2, omega3};
    RotorState s = init_delta(L, 0);
    return evolve(s, spec, steps, record_every, -1);
}

TimeSeries spinor_qhe_run(const QheParams& params) {
    if (params.theta2_samples < 8)
        throw UsageError("spinor_qhe_run: need at least 8 theta2 samples");
    const int ns = params.theta2_samples;

    std::vector<TimeSeries> per_sample(ns);
    parallel_for_each(ns, [&](std::size_t i) {
        const double theta2_0 = two_pi * static_cast<double>(i) / static_cast<double>(ns);
        FloquetSpec spec;
        spec.T = Period::plain(params.hbar_eff);
        const double hbar = params.hbar_eff;
        const double wt = params.omega_tilde;
        const double c3 = params.d3_coefficient;
        const bool zero = params.zero_kick;
        spec.spin_kick = SpinKickFn([=](double th1, long t, double& V0, double V[3]) {
            V0 = 0.0;
            if (zero) {
                V[0] = V[1] = V[2] = 0.0;
                return;
            }
            const double th2 = theta2_0 + wt * static_cast<double>(t);
            const double d1 = std::sin(th1);
            const double d2 = std::sin(th2);
            const double d3 = c3 * (1.0 - std::cos(th1) - std::cos(th2));
            const double r = std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
            const double pref = r < 1e-14 ? 2.0 : 2.0 * std::atan(2.0 * r) / r;
            V[0] = pref * d1 / hbar;
            V[1] = pref * d2 / hbar;
            V[2] = pref * d3 / hbar;
        });

        RotorState s = init_delta(params.L, 0, 2, 0);
        FloquetEngine engine(spec, params.L);
        EvolveResult res = engine.evolve(s, params.steps, params.record_every, -1);
        per_sample[i] = std::move(res.series);
    });

    TimeSeries avg;
    avg.t = per_sample[0].t;
    auto& e = avg.add_column("energy");
    e.resize(avg.t.size());
    for (std::size_t r = 0; r < avg.t.size(); ++r) {
        KahanSum acc;
        for (int i = 0; i < ns; ++i) acc.add(per_sample[i].col("energy")[r]);
        e[r] = acc.value() / static_cast<double>(ns);
    }
    return avg;
}

} // namespace rotorlab::quantum
