#pragma once

#include <optional>
#include <vector>

#include "rotorlab/common.hpp"

namespace rotorlab::nonhermitian {

// Quasienergies of the truncated PT-kicked-rotor Floquet operator
// U = e^{-i T I^2/2} e^{-i k (cos th + i gamma sin th)}, stored as
// (Re eps = arg lambda, ln|lambda|).
struct NHSpectrum {
    std::vector<cplx> lambda;        // sorted by Re eps, then ln|lambda|
    std::vector<double> re_eps;
    std::vector<double> log_abs;
    int L = 0;
    double gamma = 0.0, k = 0.0;
    Period T = Period::plain(1.0);

    double max_log_abs = 0.0;        // max |ln|lambda||
    double max_pos_log = 0.0;        // max(ln|lambda|, 0) maximum
    double mean_abs_log = 0.0;       // mean |ln|lambda|| over all states
    double mean_pos_log = 0.0;       // mean of max(ln|lambda|, 0)
    // Stability of the reality indicator under L -> L+64; the full
    // eigenvalue displacement is recorded alongside (resonant spectra move
    // along their limiting curves and are not expected to be pointwise
    // stable).
    double indicator_shift = 0.0;
    double eigenvalue_shift = 0.0;
    bool truncation_checked = false;
};

// Dense eigendecomposition of the same ring operator the split-step engine
// applies (free-phase diagonal times circulant kick), so the gamma = 0 limit
// is exactly unitary. When check_truncation is set, an unbroken-looking
// spectrum whose reality indicator is not stable under L -> L+64 raises
// TruncationError.
NHSpectrum nh_floquet_spectrum(double k, const Period& T, double gamma, int L,
                               bool check_truncation = true);

struct PtThreshold {
    std::optional<double> gamma_PT;  // empty: no crossing on the grid
    double bracket_lo = 0.0;         // highest unbroken gamma probed
    double bracket_hi = 0.0;         // lowest broken gamma probed (0 if none)
    double xi_L = 0.0;               // eigenstate decay length at gamma = 0
    double theory = 0.0;             // tanh(1/xi_L)
};

// Smallest gamma with max ln|lambda| > 1e-6, bisection-refined between
// bracketing grid points; xi_L from an eigenvector-decay fit of the
// Hermitian problem.
PtThreshold pt_threshold(double k, const Period& T, int L,
                         const std::vector<double>& gamma_grid);

struct RatchetFit {
    double v = 0.0;
    double r2 = 0.0;
    TimeSeries series; // t, meanI, log_norm
};

// Drift velocity of the normalised <I(t)> under the non-Hermitian kick;
// linear fit over the trailing half of the run. R^2 < 0.95 raises
// NoRatchetError (bounded transport, e.g. nonresonant T).
RatchetFit ratchet_velocity(double k, const Period& T, double gamma, long steps, int L);

} // namespace rotorlab::nonhermitian
