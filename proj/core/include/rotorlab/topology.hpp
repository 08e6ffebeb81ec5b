#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rotorlab/common.hpp"

namespace rotorlab::topology {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Spin-1/2 double kicked rotor parameters: kick Hamiltonians
// H_j = Kj0 cos(nu_j0 theta + alpha_j0) sigma_0 + Kj cos(nu_j theta + alpha_j) n_j.sigma
// sandwiched between the resonant free factors e^{+-i pi I^2/2}.
struct SpinDKRParams {
    double K10 = 0.8, K1 = 1.3;
    double K20 = 0.6, K2 = 1.1;
    int nu10 = 1, nu1 = 1, nu20 = 1, nu2 = 1;
    double alpha10 = 0.0, alpha1 = 0.0, alpha20 = 0.0, alpha2 = 0.0;
    std::array<double, 3> n1 = {1.0, 0.0, 0.0};
    std::array<double, 3> n2 = {0.0, 0.0, 1.0};
    // Kick-1-symmetric time frame: U = e^{-iH1/2} P+ e^{-iH2} P- e^{-iH1/2}.
    // The AZ relations hold in this frame.
    bool symmetric_frame = true;

    // CII class realisation: odd harmonics, lattice phases
    // alpha10=0, alpha1=pi/2, alpha20=pi/2, alpha2=0.
    static SpinDKRParams cii();
};

// On-resonance double kicked rotor with synthetic phase alpha:
// U(alpha) = e^{-i(T-T0)I^2/2} e^{-ik cos th} e^{-iT0 I^2/2} e^{-ik cos(th+alpha)},
// T = 4*pi, T0 = 2*pi*r/s.
struct ResonantDKRSpec {
    int r = 1;
    int s = 3;
    double k = 2.0;
    std::optional<SpinDKRParams> spin;

    ResonantDKRSpec() = default;
    ResonantDKRSpec(int r_, int s_, double k_);
    double T0() const { return two_pi * r / s; }
    int dim() const { return spin ? 2 * s : s; }
};

// Builds the reduced s x s (or 2s x 2s) Floquet matrix and its analytic
// derivatives by composing banded kick matrices (Bessel couplings, truncated
// at a recorded tolerance) with exact resonant free phases on a momentum
// window, then folding with the Bloch factor X(phi) = e^{i I phi / s}.
class ReducedFloquet {
public:
    explicit ReducedFloquet(const ResonantDKRSpec& spec, double band_cutoff = 1e-18);

    MatrixXcd matrix(double phi, double alpha) const;
    MatrixXcd dmatrix_dphi(double phi, double alpha) const;
    MatrixXcd dmatrix_dalpha(double phi, double alpha) const;

    int dim() const { return dim_; }
    int band_width() const { return d_max_; }
    const ResonantDKRSpec& spec() const { return spec_; }

private:
    MatrixXcd compose_window(double alpha, int alpha_derivative) const;
    MatrixXcd reduce(const MatrixXcd& full, double phi, bool dphi) const;

    ResonantDKRSpec spec_;
    int dim_;
    int d_max_;    // kick band half-width at the cutoff
    int window_;   // momentum window half-width for the composition
    std::vector<cplx> kick_band_;                  // scalar: (-i)^d J_d(k)
    std::vector<Eigen::Matrix2cd> spin_band1_;     // spin: kick-1 coefficients
    std::vector<Eigen::Matrix2cd> spin_band1_half_;
    std::vector<Eigen::Matrix2cd> spin_band2_;
    std::vector<cplx> free1_, free2_;              // diagonal free factors on the window
};

struct BandGrid {
    int n_phi = 0, n_alpha = 0, dim = 0;
    std::vector<double> phis, alphas;
    std::vector<Eigen::VectorXd> omega; // quasienergies in [0, 2pi), band-ordered
    std::vector<MatrixXcd> vectors;     // eigenvector columns, band-ordered
    std::vector<double> min_gap;        // chordal |e^{iw}-e^{iw'}| minimum per node
    double max_residual = 0.0;
    std::vector<std::string> warnings;

    std::size_t node(int i, int j) const {
        return static_cast<std::size_t>(i) * n_alpha + static_cast<std::size_t>(j);
    }
};

// Dense eigendecomposition at every mesh node, bands continued across the
// mesh by maximal-overlap matching with deterministic tie-breaking.
BandGrid band_spectrum(const ReducedFloquet& rf, int n_phi, int n_alpha,
                       double degeneracy_tol = 1e-6);

// Berry curvature per band from the resolvent formula with analytic
// operator derivatives. Near-degenerate nodes are masked with NaN.
std::vector<std::vector<double>> berry_curvature(const BandGrid& grid, const ReducedFloquet& rf,
                                                 double degeneracy_tol = 1e-6);

struct ChernNumbers {
    std::vector<int> lattice;        // gauge-invariant plaquette construction
    std::vector<double> quadrature;  // cross-check from berry_curvature
};

ChernNumbers chern_numbers(const BandGrid& grid, const ReducedFloquet& rf);

struct PumpResult {
    TimeSeries series; // t, alpha, meanI, leakage (NaN between samples)
    double deltaI = 0.0;
    int chern = 0;
    double prediction = 0.0; // -s * C_n
    double max_leakage = 0.0;
    std::vector<std::string> warnings;
};

// Thouless pump: band-n Wannier state evolved on the full momentum lattice
// while alpha steps through one cycle in d_f increments.
PumpResult thouless_pump(const ReducedFloquet& rf, const BandGrid& grid, int band, int d_f,
                         int L);

// Antiunitary/unitary symmetry action on the reduced Floquet matrix.
struct AZOperator {
    std::string name;
    MatrixXcd W;
    bool antiunitary = false;
    bool flip_phi = false;
    bool target_inverse = false;
};

// AZ operators satisfied by the CII parameter set: T = sigma_y K,
// C = S_pi sigma_y K, Gamma = S_pi, with S_pi = diag((-1)^m).
AZOperator cii_time_reversal(int s);
AZOperator cii_particle_hole(int s);
AZOperator cii_chiral(int s);

// Residual operator norms of W U(phi) W^-1 (conjugated for antiunitaries)
// against U(+-phi)^{+-1} over a phi sample. Class assignment is the
// caller's business.
std::vector<double> az_symmetry_check(const ReducedFloquet& rf,
                                      const std::vector<AZOperator>& ops,
                                      int phi_samples = 8);

} // namespace rotorlab::topology
