#include <doctest.h>

#include <cmath>
#include <cstring>

#include "rotorlab/classical.hpp"
#include "rotorlab/rng.hpp"

using namespace rotorlab;
using namespace rotorlab::classical;

namespace {

// Finite-difference Jacobian determinant of one map step (5-point stencil),
// with unwrap correction when theta' crosses the branch cut.
double fd_jacobian_det(const KickPotential& pot, const PhasePoint& p, double drift = 0.0) {
    const double h = 1e-4;
    auto unwrap_near = [](double th, double ref) {
        double d = th - ref;
        if (d > pi) th -= two_pi;
        if (d < -pi) th += two_pi;
        return th;
    };
    auto deriv = [&](bool wrt_J, bool of_J) {
        double f[4];
        const double offs[4] = {-2 * h, -h, h, 2 * h};
        const PhasePoint ref = step_map(p, pot, drift);
        for (int i = 0; i < 4; ++i) {
            PhasePoint q = wrt_J ? PhasePoint{p.theta, p.J + offs[i]}
                                 : PhasePoint{p.theta + offs[i], p.J};
            PhasePoint r = step_map(q, pot, drift);
            f[i] = of_J ? r.J : unwrap_near(r.theta, ref.theta);
        }
        return (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h);
    };
    const double dJdJ = deriv(true, true);
    const double dTdJ = deriv(true, false);
    const double dJdT = deriv(false, true);
    const double dTdT = deriv(false, false);
    return dJdJ * dTdT - dJdT * dTdJ;
}

// Independent finite-separation divergence oracle for the Lyapunov exponent.
double divergence_oracle(const KickPotential& pot, PhasePoint p0, long steps) {
    const double d0 = 1e-9;
    PhasePoint a = p0;
    PhasePoint b{p0.theta + d0 / std::sqrt(2.0), p0.J + d0 / std::sqrt(2.0)};
    double acc = 0.0;
    long count = 0;
    for (long t = 0; t < steps; ++t) {
        a = step_map(a, pot);
        b = step_map(b, pot);
        double dth = b.theta - a.theta;
        if (dth > pi) dth -= two_pi;
        if (dth < -pi) dth += two_pi;
        const double d = std::hypot(b.J - a.J, dth);
        if (d <= 0.0) continue;
        acc += std::log(d / d0);
        ++count;
        // renormalise the separation back to d0 along the current direction
        b.J = a.J + (b.J - a.J) * (d0 / d);
        b.theta = wrap_angle(a.theta + dth * (d0 / d));
    }
    return acc / static_cast<double>(count);
}

} // namespace

TEST_CASE("step_map: fixed point, free rotor, direct arithmetic") {
    auto cos5 = KickPotential::cosine(5.0);
    PhasePoint fp = step_map({0.0, 0.0}, cos5);
    CHECK(fp.theta == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(fp.J == doctest::Approx(0.0).epsilon(1e-15));

    auto zero = KickPotential::cosine(0.0);
    PhasePoint free_rotor = step_map({1.2, 0.7}, zero);
    CHECK(free_rotor.J == doctest::Approx(0.7));
    CHECK(free_rotor.theta == doctest::Approx(wrap_angle(1.2 + 0.7)));

    auto cos1 = KickPotential::cosine(1.0);
    PhasePoint q = step_map({pi / 2.0, 0.0}, cos1);
    CHECK(q.J == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.theta == doctest::Approx(pi / 2.0 + 1.0).epsilon(1e-14));
}

TEST_CASE("all potentials: force has zero mean over one period") {
    // symmetric-pair quadrature about each potential's centre: the
    // principal value of the singular forces is probed without bias
    struct Case {
        KickPotential pot;
        double center;
    };
    std::vector<Case> cases = {{KickPotential::cosine(3.0), 0.0},
                               {KickPotential::cosine_phase(2.0, 0.7), -0.7},
                               {KickPotential::sawtooth(1.5), pi},
                               {KickPotential::power_law(2.0, 0.8), 0.0},
                               {KickPotential::power_law(2.0, -0.5), 0.0},
                               {KickPotential::log_singular(1.0), 0.0},
                               {KickPotential::piecewise_linear(1.0), 0.0}};
    const int Q = 100000;
    for (const auto& c : cases) {
        KahanSum acc;
        for (int j = 0; j < Q; ++j) {
            const double x = pi * (j + 0.5) / Q;
            acc.add(c.pot.force(c.center + x));
            acc.add(c.pot.force(c.center - x));
        }
        CHECK(std::abs(acc.value() / (2.0 * Q)) < 1e-10);
    }
}

TEST_CASE("all potentials: one-step Jacobian determinant is 1 to 1e-9") {
    std::vector<KickPotential> pots = {
        KickPotential::cosine(5.0),          KickPotential::cosine_phase(2.0, 1.1),
        KickPotential::sawtooth(1.5),        KickPotential::power_law(2.0, 0.8),
        KickPotential::power_law(1.0, -0.6), KickPotential::log_singular(0.7),
        KickPotential::piecewise_linear(1.3)};
    Rng rng(7);
    for (const auto& pot : pots) {
        for (int i = 0; i < 100; ++i) {
            // keep the FD probe away from the singular point and the wrap
            double th = rng.uniform(0.3, pi - 0.3);
            if (rng.uniform() < 0.5) th = two_pi - th;
            PhasePoint p{th, rng.uniform(-3.0, 3.0)};
            CHECK(std::abs(fd_jacobian_det(pot, p) - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("reversibility: inverse map returns the initial point at small K") {
    // K <= 1 per the contract, probed at K = 0.3: chaos amplification of
    // round-off limits larger K over 100 steps
    auto pot = KickPotential::cosine(0.3);
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        PhasePoint p0{rng.uniform(0.0, two_pi), rng.uniform(-1.0, 1.0)};
        PhasePoint p = p0;
        const int T = 100;
        for (int t = 0; t < T; ++t) p = step_map(p, pot);
        for (int t = 0; t < T; ++t) p = inverse_step_map(p, pot);
        CHECK(std::abs(p.J - p0.J) < 1e-8);
        double dth = p.theta - p0.theta;
        if (dth > pi) dth -= two_pi;
        if (dth < -pi) dth += two_pi;
        CHECK(std::abs(dth) < 1e-8);
    }
}

TEST_CASE("resonance-overlap constant exceeds the accepted K_c") {
    CHECK(chirikov_overlap_K == doctest::Approx(pi * pi / 4.0));
    CHECK(chirikov_overlap_K > standard_map_Kc);
    CHECK(chirikov_overlap_K > 0.97);
}

TEST_CASE("power-law alpha confined to [-1, 1]") {
    CHECK_THROWS_AS(KickPotential::power_law(1.0, 1.2), DomainError);
    CHECK_THROWS_AS(KickPotential::power_law(1.0, -1.2), DomainError);
}

TEST_CASE("evolve_ensemble: K=0 keeps the second moment constant") {
    auto pot = KickPotential::cosine(0.0);
    auto ens = make_gaussian_ensemble(2000, pi, 0.0, 0.5, 1.0, 99);
    auto res = evolve_ensemble(ens, pot, 50);
    const auto& var = res.series.col("varJ");
    for (double v : var) CHECK(v == doctest::Approx(var[0]).epsilon(1e-12));
}

TEST_CASE("evolve_ensemble: usage errors") {
    auto pot = KickPotential::cosine(1.0);
    Ensemble empty;
    CHECK_THROWS_AS(evolve_ensemble(empty, pot, 10), UsageError);
    auto ens = make_uniform_theta_ensemble(10, 0.0, 1);
    CHECK_THROWS_AS(evolve_ensemble(ens, pot, 0), UsageError);
}

TEST_CASE("seeded determinism: identical moments byte-for-byte") {
    auto pot = KickPotential::cosine(7.0);
    auto e1 = make_uniform_theta_ensemble(5000, 0.0, 2024);
    auto e2 = make_uniform_theta_ensemble(5000, 0.0, 2024);
    auto r1 = evolve_ensemble(e1, pot, 200);
    auto r2 = evolve_ensemble(e2, pot, 200);
    const auto& v1 = r1.series.col("varJ");
    const auto& v2 = r2.series.col("varJ");
    REQUIRE(v1.size() == v2.size());
    CHECK(std::memcmp(v1.data(), v2.data(), v1.size() * sizeof(double)) == 0);
    const auto& m1 = r1.series.col("meanJ");
    const auto& m2 = r2.series.col("meanJ");
    CHECK(std::memcmp(m1.data(), m2.data(), m1.size() * sizeof(double)) == 0);
}

TEST_CASE("power-law alpha=0.8: linear second-moment growth") {
    auto pot = KickPotential::power_law(2.0, 0.8);
    auto ens = make_uniform_theta_ensemble(20000, 0.0, 31);
    auto res = evolve_ensemble(ens, pot, 400);
    auto fit = diffusion_coefficient(res.series, 20.0, 400.0);
    CHECK(fit.D > 0.0);
    // linear growth: the slope over the first and second half agree
    auto early = diffusion_coefficient(res.series, 20.0, 210.0);
    auto late = diffusion_coefficient(res.series, 210.0, 400.0);
    CHECK(std::abs(late.D / early.D - 1.0) < 0.35);
}

TEST_CASE("diffusion: K=10 within 25% of the quasilinear estimate with C(K)") {
    const double K = 10.0;
    auto pot = KickPotential::cosine(K);
    auto ens = make_uniform_theta_ensemble(10000, 0.0, 7);
    auto res = evolve_ensemble(ens, pot, 1000);
    auto fit = diffusion_coefficient(res.series, 20.0, 1000.0);
    const double theory = 0.5 * K * K * (1.0 - std::cyl_bessel_j(2.0, K));
    CHECK(std::abs(fit.D / theory - 1.0) < 0.25);
}

TEST_CASE("diffusion: K=0 gives D = 0") {
    auto pot = KickPotential::cosine(0.0);
    auto ens = make_uniform_theta_ensemble(500, 0.5, 3);
    auto res = evolve_ensemble(ens, pot, 200);
    auto fit = diffusion_coefficient(res.series, 0.0, 200.0);
    CHECK(std::abs(fit.D) < 1e-12);
}

TEST_CASE("diffusion: K=5 fit matches a large-ensemble direct oracle within 2 sigma") {
    const double K = 5.0;
    auto pot = KickPotential::cosine(K);
    auto ens = make_uniform_theta_ensemble(20000, 0.0, 17);
    auto res = evolve_ensemble(ens, pot, 500);
    auto fit = diffusion_coefficient(res.series, 20.0, 500.0);

    // Oracle: 10 independent batches of 10^5 trajectories, 400 steps each;
    // D estimated from the endpoint second moment, no least squares.
    const long T = 400;
    std::vector<double> batch;
    for (int b = 0; b < 10; ++b) {
        auto oe = make_uniform_theta_ensemble(100000, 0.0, 1000 + b);
        auto orr = evolve_ensemble(oe, pot, T);
        batch.push_back(orr.series.col("varJ").back() / static_cast<double>(T));
    }
    double mean = 0.0;
    for (double d : batch) mean += d;
    mean /= batch.size();
    double var = 0.0;
    for (double d : batch) var += (d - mean) * (d - mean);
    const double sigma_oracle = std::sqrt(var / (batch.size() * (batch.size() - 1)));
    CHECK(std::abs(fit.D - mean) < 2.0 * (fit.sigma + sigma_oracle) + 0.02 * mean);
}

TEST_CASE("lyapunov: K=10 gives ln 5 within 10%") {
    auto pot = KickPotential::cosine(10.0);
    auto res = max_lyapunov(pot, {1.0, 0.3}, 200000, 1000);
    CHECK(res.chaotic);
    CHECK(std::abs(res.lambda / std::log(5.0) - 1.0) < 0.10);
}

TEST_CASE("lyapunov: K=0 is not chaotic") {
    auto pot = KickPotential::cosine(0.0);
    auto res = max_lyapunov(pot, {1.0, 0.3}, 20000, 100);
    CHECK(std::abs(res.lambda) < 2e-3);
    CHECK_FALSE(res.chaotic);
}

TEST_CASE("lyapunov: K=5 agrees with the two-trajectory divergence oracle") {
    auto pot = KickPotential::cosine(5.0);
    auto res = max_lyapunov(pot, {1.0, 0.3}, 200000, 1000);
    const double oracle = divergence_oracle(pot, {2.0, 0.7}, 200000);
    CHECK(std::abs(res.lambda - oracle) / oracle < 0.15);
    CHECK(std::abs(res.lambda - std::log(2.5)) / std::log(2.5) < 0.15);
}

TEST_CASE("poincare: tori bound excursions at K=0.5, not at K=5") {
    std::vector<PhasePoint> seeds;
    for (int i = 0; i < 12; ++i)
        seeds.push_back({two_pi * (i + 0.3) / 12.0, -pi + two_pi * (i % 5) / 5.0});

    auto small = poincare_section(KickPotential::cosine(0.5), seeds, 2000);
    for (const auto& cloud : small) {
        double lo = 1e300, hi = -1e300;
        for (const auto& p : cloud.points) {
            lo = std::min(lo, p.J);
            hi = std::max(hi, p.J);
        }
        CHECK(hi - lo < two_pi); // surviving tori confine J
    }

    auto big = poincare_section(KickPotential::cosine(5.0), seeds, 2000);
    double worst = 0.0;
    for (const auto& cloud : big) {
        double lo = 1e300, hi = -1e300;
        for (const auto& p : cloud.points) {
            lo = std::min(lo, p.J);
            hi = std::max(hi, p.J);
        }
        worst = std::max(worst, hi - lo);
    }
    CHECK(worst > two_pi);

    auto fp = poincare_section(KickPotential::cosine(5.0), {{0.0, 0.0}}, 50);
    for (const auto& p : fp[0].points) {
        CHECK(p.theta == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(p.J == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("torus geometry reduces J modulo 2 pi L") {
    auto ens = make_uniform_theta_ensemble(100, 7.0, 5, Geometry::torus(1));
    for (const auto& p : ens.points) {
        CHECK(p.J >= 0.0);
        CHECK(p.J < two_pi);
    }
    CHECK_THROWS_AS(Geometry::torus(0), UsageError);
}
