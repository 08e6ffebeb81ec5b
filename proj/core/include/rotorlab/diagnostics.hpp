#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rotorlab/common.hpp"

namespace rotorlab::diagnostics {

struct LocalizationFit {
    double ell = 0.0;   // intensity convention: W_m ~ exp(-2|m-m0|/ell)
    double sigma = 0.0; // propagated 1-sigma uncertainty
    double r2 = 0.0;
    std::size_t n_bins = 0;
};

// Fits ln P(m) vs |m - center| over the exponential tail. P is indexed by
// m - m_min; the central |m-m0| < ell_guess/4 region is excluded
// (curvature near the peak), ell_guess taken from the IQR.
LocalizationFit fit_localization_length(const std::vector<double>& P, long m_min, double center,
                                        double floor = 1e-14);

enum class GrowthLaw { Saturated, Linear, Quadratic, Power };

struct GrowthFit {
    GrowthLaw law = GrowthLaw::Saturated;
    double coefficient = 0.0;        // c in E = c (sat), c*t, c*t^2, c*t^mu
    double mu = 0.0;                 // exponent, set for Power
    double t0 = 0.0, t1 = 0.0;       // fit window
    double residual = 0.0;           // RMS of log-space deviations
};

std::string to_string(GrowthLaw law);

// Model selection among {saturated, t, t^2, t^mu} by log-space residual
// with a BIC-style penalty of one parameter per model (power carries two).
GrowthFit fit_growth_law(const TimeSeries& series, const std::string& column, double t0, double t1);

// Earliest recorded time at which the trailing third of [0, t_end] has a
// relative slope below `rel_slope_per_100` per 100 steps. The 0.02 default
// is the declared artifact convention for "stationary".
std::optional<double> saturation_time(const TimeSeries& series, const std::string& column,
                                      double rel_slope_per_100 = 0.02);

struct Timescales {
    double t_E = 0.0;      // Ehrenfest: |ln T| / ln(K/2)
    double t_star = 0.0;   // Heisenberg/break time ~ k^2/2
    double ell_pred = 0.0; // predicted localization length = t_star
};

Timescales timescales(double K, double k, double T);

enum class Phase { Metal, Insulator, Critical };
enum class QuantumCorrection { Growing, Logarithmic, Subleading };

struct ScalingVerdict {
    double gamma_cl = 0.0; // d/d_e - 2/mu
    Phase phase = Phase::Critical;
    std::optional<double> beta_singular; // -alpha/(1-alpha) when alpha given
    QuantumCorrection quantum_correction = QuantumCorrection::Subleading;
};

std::string to_string(Phase p);
std::string to_string(QuantumCorrection q);

ScalingVerdict scaling_verdict(double d, double d_e, double mu,
                               std::optional<double> alpha = std::nullopt,
                               double tolerance = 1e-9);

} // namespace rotorlab::diagnostics
