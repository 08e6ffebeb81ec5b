#include "rotorlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace rotorlab::diagnostics {

LocalizationFit fit_localization_length(const std::vector<double>& P, long m_min, double center,
                                        double floor) {
    if (P.empty()) throw UsageError("fit_localization_length: empty distribution");
    KahanSum total;
    for (double p : P) total.add(p);
    if (std::abs(total.value() - 1.0) > 1e-6)
        throw UsageError("fit_localization_length: distribution not normalized");

    // ell guess from the interquartile range of the distribution.
    double q25 = 0.0, q75 = 0.0;
    {
        double acc = 0.0;
        bool have25 = false;
        for (std::size_t i = 0; i < P.size(); ++i) {
            acc += P[i];
            if (!have25 && acc >= 0.25) {
                q25 = static_cast<double>(m_min + static_cast<long>(i));
                have25 = true;
            }
            if (acc >= 0.75) {
                q75 = static_cast<double>(m_min + static_cast<long>(i));
                break;
            }
        }
    }
    const double ell_guess = std::max(q75 - q25, 1.0);
    const double exclude = ell_guess / 4.0;

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double m = static_cast<double>(m_min + static_cast<long>(i));
        const double d = std::abs(m - center);
        if (d < exclude) continue;
        if (P[i] <= floor) continue;
        xs.push_back(d);
        ys.push_back(std::log(P[i]));
    }
    if (xs.size() < 20)
        throw ProfileError("fit_localization_length: fewer than 20 usable tail bins");
    LineFit f = fit_line(xs, ys);
    if (f.slope >= 0.0)
        throw ProfileError("fit_localization_length: tail does not decay");
    if (f.r2 < 0.8)
        throw ProfileError("fit_localization_length: profile not exponential (R^2 = " +
                           std::to_string(f.r2) + ")");
    LocalizationFit out;
    out.ell = 2.0 / std::abs(f.slope);
    out.sigma = 2.0 * f.slope_stderr / (f.slope * f.slope);
    out.r2 = f.r2;
    out.n_bins = xs.size();
    return out;
}

std::string to_string(GrowthLaw law) {
    switch (law) {
    case GrowthLaw::Saturated: return "saturated";
    case GrowthLaw::Linear: return "linear";
    case GrowthLaw::Quadratic: return "quadratic";
    case GrowthLaw::Power: return "power";
    }
    return "?";
}

GrowthFit fit_growth_law(const TimeSeries& series, const std::string& column, double t0,
                         double t1) {
    const auto& col = series.col(column);
    std::vector<double> lt, le;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        if (series.t[i] < t0 || series.t[i] > t1) continue;
        if (series.t[i] <= 0.0 || col[i] <= 0.0) continue;
        lt.push_back(std::log(series.t[i]));
        le.push_back(std::log(col[i]));
    }
    const std::size_t n = lt.size();
    if (n < 30) throw FitError("fit_growth_law: window holds fewer than 30 usable samples");

    const double ln_n = std::log(static_cast<double>(n));
    auto rms = [&](double intercept, double slope) {
        KahanSum acc;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = le[i] - (intercept + slope * lt[i]);
            acc.add(r * r);
        }
        return std::sqrt(acc.value() / static_cast<double>(n));
    };

    // Fixed-exponent models: best intercept is the mean residual offset.
    auto mean_offset = [&](double slope) {
        KahanSum acc;
        for (std::size_t i = 0; i < n; ++i) acc.add(le[i] - slope * lt[i]);
        return acc.value() / static_cast<double>(n);
    };

    struct Candidate {
        GrowthLaw law;
        double intercept, slope, rms;
        int params;
    };
    std::vector<Candidate> cands;
    for (double s : {0.0, 1.0, 2.0}) {
        const double a = mean_offset(s);
        GrowthLaw law = s == 0.0 ? GrowthLaw::Saturated
                                 : (s == 1.0 ? GrowthLaw::Linear : GrowthLaw::Quadratic);
        cands.push_back({law, a, s, rms(a, s), 1});
    }
    {
        LineFit f = fit_line(lt, le);
        cands.push_back({GrowthLaw::Power, f.intercept, f.slope, rms(f.intercept, f.slope), 2});
    }

    // BIC-style: n*ln(max(RSS,eps)/n) + p*ln(n).
    double best = std::numeric_limits<double>::infinity();
    const Candidate* pick = nullptr;
    for (const auto& c : cands) {
        const double rss = std::max(c.rms * c.rms * static_cast<double>(n), 1e-28);
        const double score =
            static_cast<double>(n) * std::log(rss / static_cast<double>(n)) + c.params * ln_n;
        if (score < best) {
            best = score;
            pick = &c;
        }
    }
    if (!pick || !std::isfinite(pick->rms))
        throw FitError("fit_growth_law: no model fits the window");

    GrowthFit out;
    out.law = pick->law;
    out.coefficient = std::exp(pick->intercept);
    out.mu = pick->law == GrowthLaw::Power ? pick->slope : pick->slope;
    out.t0 = t0;
    out.t1 = t1;
    out.residual = pick->rms;
    return out;
}

std::optional<double> saturation_time(const TimeSeries& series, const std::string& column,
                                      double rel_slope_per_100) {
    const auto& col = series.col(column);
    const std::size_t n = series.t.size();
    for (std::size_t end = 0; end < n; ++end) {
        const double t_end = series.t[end];
        if (t_end < 30.0) continue; // need a usable trailing window
        const double t_lo = t_end * 2.0 / 3.0;
        std::vector<double> xs, ys;
        KahanSum mean;
        for (std::size_t i = 0; i <= end; ++i) {
            if (series.t[i] < t_lo) continue;
            xs.push_back(series.t[i]);
            ys.push_back(col[i]);
            mean.add(col[i]);
        }
        if (xs.size() < 5) continue;
        const double m = mean.value() / static_cast<double>(xs.size());
        if (m <= 0.0) continue;
        LineFit f = fit_line(xs, ys);
        if (std::abs(f.slope) * 100.0 / m < rel_slope_per_100) return t_end;
    }
    return std::nullopt;
}

Timescales timescales(double K, double k, double T) {
    if (K <= 2.0) throw DomainError("timescales: estimate requires K > 2 (ln(K/2) > 0)");
    Timescales ts;
    ts.t_E = std::abs(std::log(T)) / std::log(K / 2.0);
    ts.t_star = 0.5 * k * k;
    ts.ell_pred = ts.t_star;
    return ts;
}

std::string to_string(Phase p) {
    switch (p) {
    case Phase::Metal: return "metal";
    case Phase::Insulator: return "insulator";
    case Phase::Critical: return "critical";
    }
    return "?";
}

std::string to_string(QuantumCorrection q) {
    switch (q) {
    case QuantumCorrection::Growing: return "growing";
    case QuantumCorrection::Logarithmic: return "logarithmic";
    case QuantumCorrection::Subleading: return "subleading";
    }
    return "?";
}

ScalingVerdict scaling_verdict(double d, double d_e, double mu, std::optional<double> alpha,
                               double tolerance) {
    if (mu <= 0.0) throw UsageError("scaling_verdict: mu must be positive");
    if (d_e <= 0.0 || d_e > 1.0) throw UsageError("scaling_verdict: d_e must lie in (0, 1]");
    ScalingVerdict v;
    v.gamma_cl = d / d_e - 2.0 / mu;
    if (std::abs(v.gamma_cl) <= tolerance)
        v.phase = Phase::Critical;
    else
        v.phase = v.gamma_cl > 0.0 ? Phase::Metal : Phase::Insulator;
    if (alpha) {
        if (*alpha >= 1.0) throw DomainError("scaling_verdict: alpha must be < 1");
        v.beta_singular = -*alpha / (1.0 - *alpha);
    }
    const double two_over_mu = 2.0 / mu;
    if (std::abs(two_over_mu - 1.0) <= 1e-12)
        v.quantum_correction = QuantumCorrection::Logarithmic;
    else if (two_over_mu > 1.0)
        v.quantum_correction = QuantumCorrection::Growing;
    else
        v.quantum_correction = QuantumCorrection::Subleading;
    return v;
}

} // namespace rotorlab::diagnostics
