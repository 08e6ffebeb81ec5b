#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rotorlab/common.hpp"

namespace rotorlab::classical {

// One phase-space point of a kicked map: angle in [0, 2*pi), rescaled
// momentum J on the cylinder.
struct PhasePoint {
    double theta = 0.0;
    double J = 0.0;
};

// 2*pi-periodic kick potential V(theta) with force F = -dV/dtheta.
// The singular family (PowerLaw, Log) lives on the symmetric branch
// theta_hat in [-pi, pi); a guard interval around the singular point keeps
// the force finite (the map is not defined at the singularity itself).
class KickPotential {
public:
    enum class Kind { Cosine, CosinePhase, Sawtooth, PowerLaw, Log, PiecewiseLinear };

    static KickPotential cosine(double k) { return {Kind::Cosine, k, 0.0, 0.0}; }
    static KickPotential cosine_phase(double k, double phase) { return {Kind::CosinePhase, k, phase, 0.0}; }
    static KickPotential sawtooth(double k) { return {Kind::Sawtooth, k, 0.0, 0.0}; }
    static KickPotential power_law(double K, double alpha);
    static KickPotential log_singular(double K) { return {Kind::Log, K, 0.0, 0.0}; }
    static KickPotential piecewise_linear(double k) { return {Kind::PiecewiseLinear, k, 0.0, 0.0}; }

    double value(double theta) const;
    double force(double theta) const;
    double force_derivative(double theta) const;

    Kind kind() const { return kind_; }
    double amplitude() const { return k_; }
    double alpha() const { return alpha_; }
    // Even potentials make the Anderson hoppings real and symmetric.
    bool is_even() const { return kind_ == Kind::Cosine || kind_ == Kind::PowerLaw ||
                                  kind_ == Kind::Log || kind_ == Kind::PiecewiseLinear; }
    std::string describe() const;

    static constexpr double singular_guard = 1e-12;

private:
    KickPotential(Kind kind, double k, double phase, double alpha)
        : kind_(kind), k_(k), phase_(phase), alpha_(alpha) {}
    Kind kind_;
    double k_;
    double phase_;
    double alpha_;
};

struct Geometry {
    enum class Kind { Cylinder, Torus };
    Kind kind = Kind::Cylinder;
    int cells = 1; // torus: J reduced mod 2*pi*cells

    static Geometry cylinder() { return {Kind::Cylinder, 1}; }
    static Geometry torus(int cells);
};

struct Ensemble {
    std::vector<PhasePoint> points;
    std::uint64_t seed = 0;
    Geometry geometry = Geometry::cylinder();
};

// theta uniform in [0, 2*pi), J fixed at J0.
Ensemble make_uniform_theta_ensemble(std::size_t n, double J0, std::uint64_t seed,
                                     Geometry geom = Geometry::cylinder());
// Gaussian cloud centred at (theta0, J0).
Ensemble make_gaussian_ensemble(std::size_t n, double theta0, double J0, double sigma_theta,
                                double sigma_J, std::uint64_t seed,
                                Geometry geom = Geometry::cylinder());
// theta uniform, J uniform in [J0 - width/2, J0 + width/2].
Ensemble make_cell_ensemble(std::size_t n, double J0, double width, std::uint64_t seed,
                            Geometry geom = Geometry::cylinder());

// One step of the kicked map: kick first, then free rotation,
// J' = J + F(theta); theta' = theta + J' + drift (mod 2*pi).
PhasePoint step_map(const PhasePoint& p, const KickPotential& pot, double drift = 0.0);

// Exact inverse of step_map (up to round-off).
PhasePoint inverse_step_map(const PhasePoint& p, const KickPotential& pot, double drift = 0.0);

struct EnsembleSeries {
    TimeSeries series; // columns: meanJ, varJ
    std::vector<std::pair<long, std::vector<PhasePoint>>> snapshots;
};

EnsembleSeries evolve_ensemble(const Ensemble& e, const KickPotential& pot, long steps,
                               double drift = 0.0, long snapshot_every = 0);

struct DiffusionFit {
    double D = 0.0;
    double sigma = 0.0; // 1-sigma slope uncertainty from fit residuals
    std::size_t n_points = 0;
};

// Least-squares slope of var(J) vs t over [t0, t1].
DiffusionFit diffusion_coefficient(const TimeSeries& series, double t0, double t1);

struct LyapunovResult {
    double lambda = 0.0;
    double std_error = 0.0;
    bool chaotic = false; // false: trapped orbit (lambda ~ 0 within noise)
};

// Benettin tangent-vector iteration with per-step renormalisation.
LyapunovResult max_lyapunov(const KickPotential& pot, const PhasePoint& p0, long steps,
                            long transient = 1000, double drift = 0.0);

struct SectionCloud {
    std::size_t seed_id = 0;
    std::vector<PhasePoint> points; // theta in [0,2*pi), J unreduced (cylinder lift)
};

// Stroboscopic section samples per seed; no analysis. The plot emitter
// reduces J into the torus cell.
std::vector<SectionCloud> poincare_section(const KickPotential& pot,
                                           const std::vector<PhasePoint>& seeds, long steps,
                                           int torus_cells = 1, double drift = 0.0);

} // namespace rotorlab::classical
