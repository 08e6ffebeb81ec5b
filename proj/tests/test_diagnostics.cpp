#include <doctest.h>

#include <cmath>
#include <functional>

#include "rotorlab/diagnostics.hpp"

using namespace rotorlab;
using namespace rotorlab::diagnostics;

namespace {

std::vector<double> exponential_profile(long L, double ell) {
    std::vector<double> P(static_cast<std::size_t>(2 * L + 1));
    double total = 0.0;
    for (long m = -L; m <= L; ++m) {
        P[static_cast<std::size_t>(m + L)] = std::exp(-2.0 * std::abs(m) / ell);
        total += P[static_cast<std::size_t>(m + L)];
    }
    for (auto& p : P) p /= total;
    return P;
}

TimeSeries synthetic_series(double t0, double t1, double dt,
                            const std::function<double(double)>& f) {
    TimeSeries s;
    auto& col = s.add_column("energy");
    for (double t = t0; t <= t1 + 1e-9; t += dt) {
        s.t.push_back(t);
        col.push_back(f(t));
    }
    return s;
}

} // namespace

TEST_CASE("localization fit: exact synthetic profile recovered to 2%") {
    auto P = exponential_profile(4000, 200.0);
    auto fit = fit_localization_length(P, -4000, 0.0);
    CHECK(std::abs(fit.ell - 200.0) / 200.0 < 0.02);
    CHECK(fit.r2 > 0.999);
}

TEST_CASE("localization fit is scale-equivariant") {
    auto P1 = exponential_profile(2000, 50.0);
    auto P3 = exponential_profile(6000, 150.0);
    auto f1 = fit_localization_length(P1, -2000, 0.0);
    auto f3 = fit_localization_length(P3, -6000, 0.0);
    CHECK(f3.ell / f1.ell == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("localization fit rejects non-exponential profiles") {
    // decaying core on a flat background: the tail fit has R^2 well below 0.8
    const long L = 3000;
    std::vector<double> P(static_cast<std::size_t>(2 * L + 1));
    double total = 0.0;
    for (long m = -L; m <= L; ++m) {
        double v = std::exp(-2.0 * std::abs(m) / 5.0) + 1e-7;
        P[static_cast<std::size_t>(m + L)] = v;
        total += v;
    }
    for (auto& p : P) p /= total;
    CHECK_THROWS_AS(fit_localization_length(P, -L, 0.0), ProfileError);

    // flat distribution: no decay at all
    std::vector<double> flat(static_cast<std::size_t>(2 * L + 1),
                             1.0 / static_cast<double>(2 * L + 1));
    CHECK_THROWS_AS(fit_localization_length(flat, -L, 0.0), ProfileError);
}

TEST_CASE("localization fit rejects unnormalized input") {
    auto P = exponential_profile(1000, 50.0);
    for (auto& p : P) p *= 2.0;
    CHECK_THROWS_AS(fit_localization_length(P, -1000, 0.0), UsageError);
}

TEST_CASE("growth law: exact quadratic recovered with its coefficient") {
    auto s = synthetic_series(1, 200, 1, [](double t) { return 0.25 * 9.0 * t * t; });
    auto fit = fit_growth_law(s, "energy", 1, 200);
    CHECK(fit.law == GrowthLaw::Quadratic);
    CHECK(fit.coefficient == doctest::Approx(2.25).epsilon(1e-6));
}

TEST_CASE("growth law: noiseless inputs are never misclassified") {
    auto sat = synthetic_series(1, 200, 1, [](double) { return 7.5; });
    CHECK(fit_growth_law(sat, "energy", 1, 200).law == GrowthLaw::Saturated);

    auto lin = synthetic_series(1, 200, 1, [](double t) { return 3.0 * t; });
    CHECK(fit_growth_law(lin, "energy", 1, 200).law == GrowthLaw::Linear);

    auto quad = synthetic_series(1, 200, 1, [](double t) { return 0.5 * t * t; });
    CHECK(fit_growth_law(quad, "energy", 1, 200).law == GrowthLaw::Quadratic);

    auto pow15 = synthetic_series(1, 200, 1, [](double t) { return 2.0 * std::pow(t, 1.5); });
    auto f15 = fit_growth_law(pow15, "energy", 1, 200);
    CHECK(f15.law == GrowthLaw::Power);
    CHECK(f15.mu == doctest::Approx(1.5).epsilon(0.01));

    auto pow3 = synthetic_series(1, 200, 1, [](double t) { return 0.1 * std::pow(t, 3.0); });
    auto f3 = fit_growth_law(pow3, "energy", 1, 200);
    // t^3 has no dedicated fixed-exponent model; power with mu = 3
    CHECK(f3.law == GrowthLaw::Power);
    CHECK(f3.mu == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("growth law: window too small raises FitError") {
    auto s = synthetic_series(1, 20, 1, [](double t) { return t; });
    CHECK_THROWS_AS(fit_growth_law(s, "energy", 1, 20), FitError);
}

TEST_CASE("saturation detector fires on a saturating series") {
    auto s = synthetic_series(0, 1000, 5, [](double t) { return 100.0 * (1.0 - std::exp(-t / 60.0)); });
    auto t_sat = saturation_time(s, "energy");
    REQUIRE(t_sat.has_value());
    CHECK(*t_sat > 100.0);
    CHECK(*t_sat < 900.0);

    auto growing = synthetic_series(0, 1000, 5, [](double t) { return 3.0 * t; });
    CHECK_FALSE(saturation_time(growing, "energy").has_value());
}

TEST_CASE("timescales: Ehrenfest and break-time estimates") {
    auto ts = timescales(5.0, 20.0, 0.25);
    CHECK(ts.t_E == doctest::Approx(1.512942).epsilon(1e-5));
    CHECK(ts.t_star == doctest::Approx(200.0));
    CHECK(ts.ell_pred == doctest::Approx(200.0));

    auto unit = timescales(5.0, 20.0, 1.0);
    CHECK(unit.t_E == doctest::Approx(0.0));

    CHECK_THROWS_AS(timescales(2.0, 20.0, 0.25), DomainError);
    CHECK_THROWS_AS(timescales(1.0, 20.0, 0.25), DomainError);
}

TEST_CASE("scaling verdict: smooth 1D rotor is an insulator") {
    auto v = scaling_verdict(1.0, 1.0, 1.0);
    CHECK(v.gamma_cl == doctest::Approx(-1.0));
    CHECK(v.phase == Phase::Insulator);
    CHECK(v.quantum_correction == QuantumCorrection::Growing);
}

TEST_CASE("scaling verdict: mu = 2/d sits on the critical boundary") {
    auto v = scaling_verdict(1.0, 1.0, 2.0);
    CHECK(std::abs(v.gamma_cl) < 1e-12);
    CHECK(v.phase == Phase::Critical);
    CHECK(v.quantum_correction == QuantumCorrection::Logarithmic);
}

TEST_CASE("scaling verdict: singular-potential sign convention") {
    // mu = 2(1-alpha) ties the singular family to the conductance exponent
    auto insulating = scaling_verdict(1.0, 1.0, 2.0 * (1.0 - 0.5), 0.5);
    CHECK(insulating.phase == Phase::Insulator);
    CHECK(*insulating.beta_singular == doctest::Approx(-1.0));

    auto metallic = scaling_verdict(1.0, 1.0, 2.0 * (1.0 + 0.5), -0.5);
    CHECK(metallic.phase == Phase::Metal);
    CHECK(*metallic.beta_singular == doctest::Approx(1.0 / 3.0));

    auto critical = scaling_verdict(1.0, 1.0, 2.0, 0.0);
    CHECK(critical.phase == Phase::Critical);
    CHECK(*critical.beta_singular == doctest::Approx(0.0));
}

TEST_CASE("scaling verdict: quantum-correction classification and errors") {
    CHECK(scaling_verdict(1, 1, 4.0).quantum_correction == QuantumCorrection::Subleading);
    CHECK_THROWS_AS(scaling_verdict(1, 1, -1.0), UsageError);
    CHECK_THROWS_AS(scaling_verdict(1, 0.0, 1.0), UsageError);
    CHECK_THROWS_AS(scaling_verdict(1, 1.5, 1.0), UsageError);
}
