#pragma once

#include <vector>

#include "rotorlab/classical.hpp"
#include "rotorlab/common.hpp"

namespace rotorlab::pseudoclassical {

using classical::PhasePoint;

// Detuning from an integer-multiple-of-2pi resonance: T = 2*pi*l + delta,
// with the pseudoclassical kick strength K = k*delta.
struct Detuning {
    int l = 1;
    double delta = 0.0;
    double k = 0.0;

    Detuning(int l_, double delta_, double k_) : l(l_), delta(delta_), k(k_) {
        if (delta_ <= 0.0) throw UsageError("Detuning: delta must be positive");
    }
    double Keff() const { return k * delta; }
    Period period() const { return Period::rational_2pi(l, 1, delta); }
};

// Epsilon-classical map near T = 2*pi*l:
// J' = J + K sin(theta); theta' = theta + J' + pi*l (mod 2pi).
PhasePoint pc_step(const PhasePoint& p, double K, int l);

// Pseudoclassical map of the double-kicked rotor at T = 4*pi, T0 = 2*pi+delta
// (four-line composition; unstable fixed point at (J, theta) = (0, pi)).
PhasePoint dkr_pc_step(const PhasePoint& p, double K);

// Kicked-Harper coordinates (u, theta) = (J + theta, theta), both mod 2pi.
struct HarperPoint {
    double u = 0.0;
    double theta = 0.0;
};
HarperPoint to_harper(const PhasePoint& p);

struct FixedPointAnalysis {
    double lambda_numeric = 0.0; // from the finite-difference Jacobian at (0, pi)
    double lambda_paper = 0.0;   // closed form ln[(K^2+2+sqrt(K^2+4K))/2], verbatim
    double discrepancy = 0.0;    // |numeric - paper|; recorded, see manifest notes
    double jac_trace = 0.0;
    double jac_det = 0.0;

    // Predictions use the numerical value (declared convention).
    double t_exp(double delta) const { return std::log(pi / delta) / lambda_numeric; }
};

FixedPointAnalysis fixed_point_analysis(double K);

// Gaussian sums G_l = (1/s) sum_m exp(-i 2 pi (r/s) m (m-l)) decomposing the
// resonant free factor into momentum translations; the nonzero coefficients
// define the quasienergy bands and their Bloch phases 2*pi*r*l/s.
struct GaussSumData {
    int r = 1, s = 1;
    std::vector<cplx> G;            // all s coefficients
    std::vector<int> nonzero_l;     // l with |G_l| > 1e-12
    std::vector<cplx> amplitudes;   // G at the nonzero slots
    std::vector<double> bloch_phases; // 2*pi*r*l/s at the nonzero slots
    int n_bands() const { return static_cast<int>(nonzero_l.size()); }
};

GaussSumData gauss_sums(int r, int s);

// Multi-branch pseudoclassical state for high-order resonances.
struct Branch {
    double J = 0.0;
    double theta = 0.0;
    cplx A = {1.0, 0.0};
};

struct BranchState {
    std::vector<Branch> branches;
    std::size_t capacity = 1 << 20;
    double dropped_weight = 0.0;

    double retained_weight() const {
        KahanSum acc;
        for (const auto& b : branches) acc.add(std::norm(b.A));
        return acc.value();
    }
};

struct BranchEvolveResult {
    BranchState state;
    TimeSeries series; // weighted meanJ, meanJ2
};

// Each branch advances one step under H^(0) (l = 0 band Hamiltonian), then
// splits into one child per band with angle offset Delta_j and amplitude
// multiplier A_j; branches below the prune threshold are dropped with
// explicit weight accounting.
BranchEvolveResult multibranch_evolve(const BranchState& initial, double K,
                                      const GaussSumData& bands, long steps,
                                      double prune_threshold = 1e-12);

// ln<J^2> trajectory of a dkr_pc ensemble started in a strip of width delta
// around the stable manifold through (0, pi) (theta uniform, J uniform in
// [-delta/2, delta/2], matching the |0> momentum eigenstate).
TimeSeries dkr_exponential_run(double K, double delta, std::size_t n_traj, long steps,
                               std::uint64_t seed);

} // namespace rotorlab::pseudoclassical
