#include <doctest.h>

#include <cmath>
#include <cstring>

#include "rotorlab/classical.hpp"
#include "rotorlab/diagnostics.hpp"
#include "rotorlab/quantum.hpp"
#include "rotorlab/rng.hpp"

using namespace rotorlab;
using namespace rotorlab::quantum;

namespace {

cplx minus_i_pow(int d) {
    switch (((d % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
    }
}

double bessel_j(int d, double x) {
    const int ad = std::abs(d);
    double v = std::cyl_bessel_j(static_cast<double>(ad), x);
    if (d < 0 && (ad % 2 != 0)) v = -v;
    return v;
}

RotorState random_state(int L, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> a(static_cast<std::size_t>(2 * L + 1));
    for (auto& x : a) x = cplx(rng.gaussian(), rng.gaussian());
    return init_custom(L, std::move(a));
}

} // namespace

TEST_CASE("init_state: delta, gaussian, uniform") {
    RotorState d = init_delta(8, 0);
    auto od = observables(d);
    CHECK(od.norm == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(od.meanI == doctest::Approx(0.0));

    RotorState d3 = init_delta(8, 3);
    auto o3 = observables(d3);
    CHECK(o3.meanI == doctest::Approx(3.0));
    CHECK(o3.energy == doctest::Approx(4.5));

    // width in integer-m units; <I^2> matches the continuum variance to 1%
    RotorState g = init_gaussian(64, 0.0, 2.0);
    auto og = observables(g);
    CHECK(std::abs(2.0 * og.energy - 4.0) / 4.0 < 0.01);

    RotorState u = init_uniform(8);
    auto ou = observables(u);
    for (double p : ou.P) CHECK(p == doctest::Approx(1.0 / 17.0).epsilon(1e-13));

    CHECK_THROWS_AS(init_delta(8, 9), RangeError);
    CHECK_THROWS_AS(init_gaussian(8, 0.0, 0.5), UsageError);
}

TEST_CASE("observables: superposition and zero-norm error") {
    std::vector<cplx> a(17, cplx(0.0, 0.0));
    a[8 + 1] = 1.0 / std::sqrt(2.0);
    a[8 - 1] = 1.0 / std::sqrt(2.0);
    RotorState s = init_custom(8, std::move(a));
    auto o = observables(s);
    CHECK(o.meanI == doctest::Approx(0.0));
    CHECK(o.energy == doctest::Approx(0.5));

    RotorState zero;
    zero.L = 2;
    zero.amps.assign(5, cplx(0.0, 0.0));
    CHECK_THROWS_AS(observables(zero), DegenerateStateError);
}

TEST_CASE("floquet_step: k=0 leaves |A_m| unchanged") {
    FloquetSpec spec;
    spec.T = Period::plain(0.7);
    spec.potential = classical::KickPotential::cosine(0.0);
    RotorState s = random_state(32, 5);
    RotorState before = s;
    s = floquet_step(s, spec, 0);
    for (long m = -32; m <= 32; ++m)
        CHECK(std::abs(s.at(0, m)) == doctest::Approx(std::abs(before.at(0, m))).epsilon(1e-12));
}

TEST_CASE("kick matrix equals the Bessel series (theta-grid convention pin)") {
    // kick-only spec: T = 0 makes the free factor exactly 1
    FloquetSpec spec;
    spec.T = Period::plain(0.0);
    spec.potential = classical::KickPotential::cosine(2.0);
    const int L = 32;
    FloquetEngine engine(spec, L);
    for (long m = -5; m <= 5; ++m) {
        RotorState s = init_delta(L, m);
        engine.step(s, 0);
        for (long n = m - 10; n <= m + 10; ++n) {
            const cplx expect = minus_i_pow(static_cast<int>(n - m)) *
                                bessel_j(static_cast<int>(n - m), 2.0);
            CHECK(std::abs(s.at(0, n) - expect) < 1e-8);
        }
    }
}

TEST_CASE("antiresonance: T = 2 pi returns any state after two kicks") {
    FloquetSpec spec;
    spec.T = Period::rational_2pi(1, 1);
    spec.potential = classical::KickPotential::cosine(5.0);
    const int L = 64;
    RotorState s = random_state(L, 11);
    const RotorState initial = s;
    FloquetEngine engine(spec, L);
    engine.step(s, 0);
    engine.step(s, 1);
    double err = 0.0;
    for (std::size_t i = 0; i < s.amps.size(); ++i)
        err = std::max(err, std::abs(s.amps[i] - initial.amps[i]));
    CHECK(err < 1e-10);
}

TEST_CASE("principal resonance: free factor is the identity to 1e-12") {
    Period T = Period::rational_2pi(2, 1); // T = 4 pi
    for (long m = -8192; m <= 8192; m += 97)
        CHECK(std::abs(T.free_phase(m)) < 1e-12);
}

TEST_CASE("principal resonance: E(t) = k^2 t^2/4 and the phase-state oracle") {
    const double k = 3.0;
    const int L = 512;
    FloquetSpec spec;
    spec.T = Period::rational_2pi(2, 1);
    spec.potential = classical::KickPotential::cosine(k);
    RotorState s = init_delta(L, 0);
    FloquetEngine engine(spec, L);
    auto res = engine.evolve(s, 50);
    const auto& E = res.series.col("energy");
    for (std::size_t i = 1; i < res.series.t.size(); ++i) {
        const double t = res.series.t[i];
        CHECK(std::abs(E[i] - 0.25 * k * k * t * t) / (0.25 * k * k * t * t) < 1e-6);
    }
    // independent oracle: psi_t(theta) = e^{-i k t cos theta} / sqrt(2 pi),
    // i.e. A_n(t) = (-i)^n J_n(k t)
    for (long n = -40; n <= 40; ++n) {
        const cplx expect = minus_i_pow(static_cast<int>(n)) *
                            bessel_j(static_cast<int>(n), k * 50.0);
        CHECK(std::abs(s.at(0, n) - expect) < 1e-8);
    }
}

TEST_CASE("unitarity: Hermitian spec norm drift below 1e-10 over 1e3 steps") {
    FloquetSpec spec;
    spec.T = Period::plain(1.3);
    spec.potential = classical::KickPotential::cosine(4.0);
    const int L = 2048;
    RotorState s = init_gaussian(L, 0.0, 2.0);
    FloquetEngine engine(spec, L);
    auto res = engine.evolve(s, 1000, 100);
    for (double n : res.series.col("norm")) CHECK(std::abs(n - 1.0) < 1e-10);
}

TEST_CASE("half-step split keeps unitarity and hermiticity flag") {
    FloquetSpec spec;
    spec.T = Period::plain(0.9);
    spec.potential = classical::KickPotential::cosine(2.0);
    spec.half_step_split = true;
    CHECK(spec.hermitian());
    RotorState s = init_gaussian(256, 0.0, 2.0);
    FloquetEngine engine(spec, 256);
    auto res = engine.evolve(s, 200, 50);
    for (double n : res.series.col("norm")) CHECK(std::abs(n - 1.0) < 1e-10);
}

TEST_CASE("spinor kick factor is unitary for random V0, V") {
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const double a0 = rng.uniform(-2.0, 2.0);
        const double ax = rng.uniform(-2.0, 2.0);
        const double ay = rng.uniform(-2.0, 2.0);
        const double az = rng.uniform(-2.0, 2.0);
        FloquetSpec spec;
        spec.T = Period::plain(0.5);
        spec.spin_kick = SpinKickFn([=](double th, long, double& V0, double V[3]) {
            V0 = a0 * std::cos(th);
            V[0] = ax * std::sin(th);
            V[1] = ay * std::cos(2.0 * th);
            V[2] = az * std::sin(3.0 * th);
        });
        const int L = 64;
        RotorState s = init_delta(L, 0, 2, 0);
        FloquetEngine engine(spec, L);
        for (long t = 0; t < 20; ++t) engine.step(s, t);
        CHECK(std::abs(s.norm2() - 1.0) < 1e-12 * 20);
    }
}

TEST_CASE("classical correspondence before the break time") {
    // T=0.25, k=20: quantum <J^2> (J = T I) tracks the classical ensemble
    // within 10% for t <= 0.2 k^2/2 = 40
    const double T = 0.25, k = 20.0;
    const int L = 2048;
    FloquetSpec spec;
    spec.T = Period::plain(T);
    spec.potential = classical::KickPotential::cosine(k);
    RotorState s = init_gaussian(L, 0.0, 1.0 / std::sqrt(T));
    FloquetEngine engine(spec, L);
    auto qres = engine.evolve(s, 40);

    auto pot = classical::KickPotential::cosine(k * T);
    auto ens = classical::make_gaussian_ensemble(200000, 0.0, 0.0, std::sqrt(T), std::sqrt(T),
                                                 4242);
    auto cres = classical::evolve_ensemble(ens, pot, 40);

    const auto& qe = qres.series.col("energy");
    const auto& cv = cres.series.col("varJ");
    const auto& cm = cres.series.col("meanJ");
    for (std::size_t i = 5; i < qres.series.t.size(); ++i) {
        const double qJ2 = 2.0 * qe[i] * T * T; // <J^2> = T^2 <m^2>
        const double cJ2 = cv[i] + cm[i] * cm[i];
        CHECK(std::abs(qJ2 / cJ2 - 1.0) < 0.10);
    }
}

TEST_CASE("localization: k=20, T=0.25 energy saturates after the break time") {
    const double k = 20.0, T = 0.25;
    const int L = 4096;
    FloquetSpec spec;
    spec.T = Period::plain(T);
    spec.potential = classical::KickPotential::cosine(k);
    RotorState s = init_gaussian(L, 0.0, 1.0 / std::sqrt(T));
    FloquetEngine engine(spec, L);
    auto res = engine.evolve(s, 1200, 5);
    CHECK_FALSE(res.first_spill.has_value());
    auto sat = diagnostics::saturation_time(res.series, "energy");
    REQUIRE(sat.has_value());
    CHECK(*sat > 100.0);  // still diffusing before the break time
    CHECK(*sat < 1000.0); // saturated well inside the window
    // growth law over the localized window
    auto fit = diagnostics::fit_growth_law(res.series, "energy", 500.0, 1200.0);
    CHECK(fit.law == diagnostics::GrowthLaw::Saturated);
}

TEST_CASE("spill monitor: resonant growth on a small lattice flags") {
    FloquetSpec spec;
    spec.T = Period::rational_2pi(2, 1);
    spec.potential = classical::KickPotential::cosine(3.0);
    RotorState s = init_delta(16, 0);
    FloquetEngine engine(spec, 16);
    auto res = engine.evolve(s, 30);
    CHECK(s.spill);
    CHECK(res.first_spill.has_value());
}

TEST_CASE("quasiperiodic: eps = 0 reduces bitwise to the plain rotor") {
    const int L = 256;
    auto res_mod = quasiperiodic_run(4.0, 0.0, 2.1, 3.3, 2.89, L, 100);

    FloquetSpec spec;
    spec.T = Period::plain(2.89);
    spec.potential = classical::KickPotential::cosine(4.0 / 2.89);
    RotorState s = init_delta(L, 0);
    auto res_plain = evolve(s, spec, 100);

    const auto& e1 = res_mod.series.col("energy");
    const auto& e2 = res_plain.series.col("energy");
    REQUIRE(e1.size() == e2.size());
    CHECK(std::memcmp(e1.data(), e2.data(), e1.size() * sizeof(double)) == 0);
}

TEST_CASE("quasiperiodic: insulating side localizes, metallic side spreads") {
    const double w2 = two_pi * std::sqrt(5.0), w3 = two_pi * std::sqrt(13.0);
    const int L = 1024;

    // small K, small eps: exponentially localized final profile
    {
        FloquetSpec spec;
        spec.T = Period::plain(2.89);
        spec.potential = classical::KickPotential::cosine(2.0 / 2.89);
        spec.modulation = Modulation{0.1, w2, w3};
        RotorState s = init_delta(L, 0);
        FloquetEngine engine(spec, L);
        auto res = engine.evolve(s, 1000, 10, 500);
        auto fit = diagnostics::fit_localization_length(res.avg_dist, -L, 0.0);
        CHECK(fit.r2 > 0.9);
        auto law = diagnostics::fit_growth_law(res.series, "energy", 300.0, 1000.0);
        CHECK(law.law == diagnostics::GrowthLaw::Saturated);
    }

    // large K, large eps: energy keeps growing through the window
    {
        FloquetSpec spec;
        spec.T = Period::plain(2.89);
        spec.potential = classical::KickPotential::cosine(9.0 / 2.89);
        spec.modulation = Modulation{0.8, w2, w3};
        RotorState s = init_delta(L, 0);
        FloquetEngine engine(spec, L);
        auto res = engine.evolve(s, 1000, 10);
        const auto& E = res.series.col("energy");
        CHECK(E.back() > 2.5 * E[E.size() / 4]);
    }
}

TEST_CASE("qhe run: V = 0 keeps E constant") {
    QheParams p;
    p.L = 32;
    p.hbar_eff = 1.0;
    p.omega_tilde = two_pi * 0.5 * (std::sqrt(5.0) - 1.0);
    p.theta2_samples = 8;
    p.steps = 20;
    p.zero_kick = true;
    auto series = spinor_qhe_run(p);
    const auto& E = series.col("energy");
    for (double e : E) CHECK(e == doctest::Approx(E[0]).epsilon(1e-12));
}

TEST_CASE("qhe run: rational drive is ballistic, irrational sample insulates") {
    QheParams rational;
    rational.L = 512;
    rational.hbar_eff = 1.0;
    rational.omega_tilde = two_pi * 0.5; // omega/2pi = 1/2
    rational.theta2_samples = 8;
    rational.steps = 200;
    auto rs = spinor_qhe_run(rational);
    const auto& Er = rs.col("energy");
    const std::size_t n = rs.t.size();
    const double rate_early = Er[n / 4] / rs.t[n / 4];
    const double rate_late = Er[n - 1] / rs.t[n - 1];
    CHECK(rate_late > 1.5 * rate_early); // E(t)/t grows: ballistic channel

    QheParams irrational = rational;
    irrational.omega_tilde = two_pi * 0.5 * (std::sqrt(5.0) - 1.0);
    irrational.steps = 400;
    auto is = spinor_qhe_run(irrational);
    const auto& Ei = is.col("energy");
    const std::size_t m = is.t.size();
    const double irate_early = Ei[m / 8] / is.t[m / 8];
    const double irate_late = Ei[m - 1] / is.t[m - 1];
    CHECK(irate_late < 0.5 * irate_early); // E(t)/t decays: insulating sample
}

TEST_CASE("non-Hermitian evolution does not renormalise") {
    FloquetSpec spec;
    spec.T = Period::rational_2pi(2, 1);
    spec.potential = classical::KickPotential::cosine(3.0);
    spec.gain = 0.1;
    spec.spill_threshold = 1.0;
    CHECK_FALSE(spec.hermitian());
    const int L = 256;
    RotorState s = init_delta(L, 0);
    FloquetEngine engine(spec, L);
    auto res = engine.evolve(s, 50, 10);
    const auto& norm = res.series.col("norm");
    CHECK(norm.back() > 10.0); // gain grows the norm; observables stay normalised
}
