#include "rotorlab/nonhermitian.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "rotorlab/quantum.hpp"

namespace rotorlab::nonhermitian {

namespace {

// Dense ring operator matching the split-step engine: circulant kick from
// the grid phases, free diagonal with exact resonant reduction.
Eigen::MatrixXcd build_ring_operator(double k, const Period& T, double gamma, int L) {
    const int N = 2 * L + 1;
    // Circulant coefficients g_d = (1/N) sum_j e^{-iV(theta_j)} e^{-id theta_j}.
    std::vector<cplx> g(static_cast<std::size_t>(N), cplx(0.0, 0.0));
    std::vector<cplx> kickphase(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        const double th = two_pi * j / N;
        const double vre = k * std::cos(th);
        const double vim = k * gamma * std::sin(th);
        kickphase[static_cast<std::size_t>(j)] =
            std::exp(vim) * cplx(std::cos(vre), -std::sin(vre));
    }
    for (int d = 0; d < N; ++d) {
        KahanSum re, im;
        for (int j = 0; j < N; ++j) {
            const double th = two_pi * j / N;
            const cplx w(std::cos(d * th), -std::sin(d * th));
            const cplx v = kickphase[static_cast<std::size_t>(j)] * w;
            re.add(v.real());
            im.add(v.imag());
        }
        g[static_cast<std::size_t>(d)] = cplx(re.value() / N, im.value() / N);
    }
    Eigen::MatrixXcd U(N, N);
    for (int a = 0; a < N; ++a) {
        const long m = a - L;
        const double ph = T.free_phase(m);
        const cplx free(std::cos(ph), -std::sin(ph));
        for (int b = 0; b < N; ++b) {
            const int d = ((a - b) % N + N) % N;
            U(a, b) = free * g[static_cast<std::size_t>(d)];
        }
    }
    return U;
}

struct RawSpectrum {
    std::vector<cplx> lambda;
    double max_log_abs = 0.0, max_pos_log = 0.0, mean_abs_log = 0.0, mean_pos_log = 0.0;
};

RawSpectrum raw_spectrum(double k, const Period& T, double gamma, int L) {
    Eigen::MatrixXcd U = build_ring_operator(k, T, gamma, L);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(U, false);
    if (es.info() != Eigen::Success)
        throw NumericalError("nh_floquet_spectrum: eigensolver failed");
    RawSpectrum out;
    const int N = 2 * L + 1;
    out.lambda.resize(static_cast<std::size_t>(N));
    KahanSum abs_acc, pos_acc;
    for (int i = 0; i < N; ++i) {
        const cplx lam = es.eigenvalues()(i);
        out.lambda[static_cast<std::size_t>(i)] = lam;
        const double la = std::log(std::abs(lam));
        out.max_log_abs = std::max(out.max_log_abs, std::abs(la));
        out.max_pos_log = std::max(out.max_pos_log, la);
        abs_acc.add(std::abs(la));
        pos_acc.add(std::max(la, 0.0));
    }
    out.mean_abs_log = abs_acc.value() / N;
    out.mean_pos_log = pos_acc.value() / N;
    std::sort(out.lambda.begin(), out.lambda.end(), [](const cplx& a, const cplx& b) {
        const double ea = std::arg(a), eb = std::arg(b);
        if (ea != eb) return ea < eb;
        return std::abs(a) < std::abs(b);
    });
    return out;
}

double nearest_match_shift(const std::vector<cplx>& small, const std::vector<cplx>& big) {
    double worst = 0.0;
    for (const cplx& a : small) {
        double best = 1e300;
        for (const cplx& b : big) best = std::min(best, std::abs(a - b));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

NHSpectrum nh_floquet_spectrum(double k, const Period& T, double gamma, int L,
                               bool check_truncation) {
    if (std::abs(gamma) >= 1.0)
        throw DomainError("nh_floquet_spectrum: |gamma| must be < 1");
    RawSpectrum base = raw_spectrum(k, T, gamma, L);

    NHSpectrum out;
    out.L = L;
    out.gamma = gamma;
    out.k = k;
    out.T = T;
    out.lambda = base.lambda;
    out.max_log_abs = base.max_log_abs;
    out.max_pos_log = base.max_pos_log;
    out.mean_abs_log = base.mean_abs_log;
    out.mean_pos_log = base.mean_pos_log;
    out.re_eps.reserve(out.lambda.size());
    out.log_abs.reserve(out.lambda.size());
    for (const cplx& lam : out.lambda) {
        out.re_eps.push_back(std::arg(lam));
        out.log_abs.push_back(std::log(std::abs(lam)));
    }

    if (check_truncation) {
        RawSpectrum wide = raw_spectrum(k, T, gamma, L + 64);
        out.indicator_shift = std::abs(wide.max_log_abs - base.max_log_abs);
        out.eigenvalue_shift = nearest_match_shift(base.lambda, wide.lambda);
        out.truncation_checked = true;
        const bool looks_real = base.max_log_abs <= 1e-6;
        if (looks_real && out.indicator_shift > 1e-6)
            throw TruncationError(
                "nh_floquet_spectrum: reality indicator unstable under L -> L+64; "
                "increase L");
    }
    return out;
}

namespace {

// Median eigenstate decay length of the Hermitian (gamma = 0) problem,
// amplitude convention u ~ e^{-|n-n0|/xi}.
double hermitian_xi(double k, const Period& T, int L) {
    Eigen::MatrixXcd U = build_ring_operator(k, T, 0.0, L);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(U, true);
    if (es.info() != Eigen::Success) throw NumericalError("pt_threshold: eigensolver failed");
    const int N = 2 * L + 1;
    std::vector<double> xis;
    for (int c = 0; c < N; ++c) {
        // peak-centred decay fit on the ring (distance mod N)
        int peak = 0;
        double pmax = 0.0;
        for (int i = 0; i < N; ++i) {
            const double a = std::abs(es.eigenvectors()(i, c));
            if (a > pmax) {
                pmax = a;
                peak = i;
            }
        }
        std::vector<double> xs, ys;
        for (int i = 0; i < N; ++i) {
            const double a = std::abs(es.eigenvectors()(i, c));
            if (a < 1e-13 * pmax || a <= 0.0) continue;
            int d = std::abs(i - peak);
            d = std::min(d, N - d);
            if (d < 2) continue;
            xs.push_back(static_cast<double>(d));
            ys.push_back(std::log(a));
        }
        if (xs.size() < 8) continue;
        LineFit f = fit_line(xs, ys);
        if (f.slope < 0.0 && f.r2 > 0.5) xis.push_back(1.0 / std::abs(f.slope));
    }
    if (xis.empty()) throw FitError("pt_threshold: no localized eigenstates at gamma = 0");
    std::sort(xis.begin(), xis.end());
    return xis[xis.size() / 2];
}

} // namespace

PtThreshold pt_threshold(double k, const Period& T, int L,
                         const std::vector<double>& gamma_grid) {
    if (gamma_grid.empty()) throw UsageError("pt_threshold: empty gamma grid");
    PtThreshold out;
    out.xi_L = hermitian_xi(k, T, L);
    out.theory = std::tanh(1.0 / out.xi_L);

    auto broken = [&](double g) {
        RawSpectrum sp = raw_spectrum(k, T, g, L);
        return sp.max_pos_log > 1e-6;
    };

    std::vector<double> grid = gamma_grid;
    std::sort(grid.begin(), grid.end());
    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (double g : grid) {
        if (broken(g)) {
            hi = g;
            found = true;
            break;
        }
        lo = g;
    }
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    if (!found) return out; // open interval: no crossing on the grid

    for (int it = 0; it < 24 && (hi - lo) > 1e-6 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (broken(mid))
            hi = mid;
        else
            lo = mid;
    }
    out.gamma_PT = 0.5 * (lo + hi);
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    return out;
}

RatchetFit ratchet_velocity(double k, const Period& T, double gamma, long steps, int L) {
    quantum::FloquetSpec spec;
    spec.T = T;
    spec.potential = classical::KickPotential::cosine(k);
    spec.gain = gamma;
    spec.spill_threshold = 1.0; // growth in m is physical here; monitor off

    quantum::RotorState s = quantum::init_delta(L, 0);
    quantum::FloquetEngine engine(spec, L);

    RatchetFit out;
    auto& meanI = out.series.add_column("meanI");
    auto& log_norm = out.series.add_column("log_norm");
    out.series.t.push_back(0.0);
    meanI.push_back(0.0);
    log_norm.push_back(0.0);
    for (long t = 1; t <= steps; ++t) {
        engine.step(s, t - 1);
        quantum::Observables o = quantum::observables(s);
        out.series.t.push_back(static_cast<double>(t));
        meanI.push_back(o.meanI);
        log_norm.push_back(s.log_norm2());
    }

    // asymptotic window: trailing half (mode selection needs the transient
    // to decay first)
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < out.series.t.size(); ++i) {
        if (out.series.t[i] < 0.5 * static_cast<double>(steps)) continue;
        xs.push_back(out.series.t[i]);
        ys.push_back(meanI[i]);
    }
    LineFit f = fit_line(xs, ys);
    out.v = f.slope;
    out.r2 = f.r2;
    if (f.r2 < 0.95)
        throw NoRatchetError("ratchet_velocity: <I(t)> not linear (R^2 = " +
                             std::to_string(f.r2) + "), no directed transport");
    return out;
}

} // namespace rotorlab::nonhermitian
