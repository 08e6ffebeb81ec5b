#include "rotorlab/topology.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

namespace rotorlab::topology {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

double bessel_j(int d, double x) {
    const int ad = std::abs(d);
    if (x == 0.0) return ad == 0 ? 1.0 : 0.0;
    double v = std::cyl_bessel_j(static_cast<double>(ad), x);
    if (d < 0 && (ad % 2 != 0)) v = -v;
    return v;
}

// (-i)^d
cplx minus_i_pow(int d) {
    switch (((d % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
    }
}

int bessel_band_width(double k, double cutoff) {
    if (k == 0.0) return 0;
    int d = static_cast<int>(std::ceil(std::abs(k)));
    while (d < 4000 && std::abs(bessel_j(d, std::abs(k))) >= cutoff) ++d;
    return d;
}

} // namespace

SpinDKRParams SpinDKRParams::cii() {
    SpinDKRParams p;
    p.nu10 = p.nu1 = p.nu20 = p.nu2 = 1;
    p.alpha10 = 0.0;
    p.alpha1 = pi / 2.0;
    p.alpha20 = pi / 2.0;
    p.alpha2 = 0.0;
    return p;
}

ResonantDKRSpec::ResonantDKRSpec(int r_, int s_, double k_) : r(r_), s(s_), k(k_) {
    if (s < 1) throw UsageError("ResonantDKRSpec: s must be >= 1");
    if (std::gcd(r, s) != 1) throw UsageError("ResonantDKRSpec: r and s must be coprime");
}

ReducedFloquet::ReducedFloquet(const ResonantDKRSpec& spec, double band_cutoff) : spec_(spec) {
    if (spec_.spin) {
        if (spec_.s != 2)
            throw ConfigError("ReducedFloquet: the spin-1/2 double kicked rotor has lattice "
                              "period s = 2");
        dim_ = 2 * spec_.s;
        // Fourier coefficients of the 2x2 kick symbols on a fine grid.
        const auto& sp = *spec_.spin;
        const int Q = 2048;
        auto symbol = [&](int which, double theta, double scale) {
            double V0, W;
            const double* n;
            if (which == 1) {
                V0 = sp.K10 * std::cos(sp.nu10 * theta + sp.alpha10) * scale;
                W = sp.K1 * std::cos(sp.nu1 * theta + sp.alpha1) * scale;
                n = sp.n1.data();
            } else {
                V0 = sp.K20 * std::cos(sp.nu20 * theta + sp.alpha20) * scale;
                W = sp.K2 * std::cos(sp.nu2 * theta + sp.alpha2) * scale;
                n = sp.n2.data();
            }
            Eigen::Matrix2cd m;
            const double cw = std::cos(W), sw = std::sin(W);
            m(0, 0) = cplx(cw, -sw * n[2]);
            m(1, 1) = cplx(cw, sw * n[2]);
            m(0, 1) = cplx(-sw * n[1], -sw * n[0]);
            m(1, 0) = cplx(sw * n[1], -sw * n[0]);
            return (cplx(std::cos(V0), -std::sin(V0)) * m).eval();
        };
        auto fourier = [&](int which, double scale) {
            const int Dprobe = 96;
            std::vector<Eigen::Matrix2cd> coef(2 * Dprobe + 1, Eigen::Matrix2cd::Zero());
            for (int q = 0; q < Q; ++q) {
                const double th = two_pi * q / Q;
                const Eigen::Matrix2cd m = symbol(which, th, scale);
                for (int d = -Dprobe; d <= Dprobe; ++d) {
                    const cplx w(std::cos(d * th), -std::sin(d * th));
                    coef[static_cast<std::size_t>(d + Dprobe)] += w * m / static_cast<double>(Q);
                }
            }
            return coef;
        };
        const auto c1 = fourier(1, 1.0);
        const auto c1h = fourier(1, 0.5);
        const auto c2 = fourier(2, 1.0);
        const int Dprobe = 96;
        int dmax = 1;
        for (int d = 0; d <= Dprobe; ++d) {
            double mag = std::max({c1[static_cast<std::size_t>(d + Dprobe)].norm(),
                                   c2[static_cast<std::size_t>(d + Dprobe)].norm(),
                                   c1h[static_cast<std::size_t>(d + Dprobe)].norm()});
            if (mag >= band_cutoff) dmax = std::max(dmax, d + 1);
        }
        d_max_ = dmax;
        auto crop = [&](const std::vector<Eigen::Matrix2cd>& c) {
            std::vector<Eigen::Matrix2cd> out(2 * d_max_ + 1);
            for (int d = -d_max_; d <= d_max_; ++d)
                out[static_cast<std::size_t>(d + d_max_)] =
                    c[static_cast<std::size_t>(d + Dprobe)];
            return out;
        };
        spin_band1_ = crop(c1);
        spin_band1_half_ = crop(c1h);
        spin_band2_ = crop(c2);
    } else {
        dim_ = spec_.s;
        d_max_ = bessel_band_width(spec_.k, band_cutoff);
        kick_band_.resize(static_cast<std::size_t>(2 * d_max_ + 1));
        for (int d = -d_max_; d <= d_max_; ++d)
            kick_band_[static_cast<std::size_t>(d + d_max_)] =
                minus_i_pow(d) * bessel_j(d, spec_.k);
    }

    window_ = 3 * d_max_ + 2 * spec_.s + 4;
    const int n_sites = 2 * window_ + 1;
    free1_.resize(n_sites);
    free2_.resize(n_sites);
    for (int i = 0; i < n_sites; ++i) {
        const long long m = i - window_;
        const long long m2 = m * m;
        if (spec_.spin) {
            // P+ = e^{+i pi m^2/2}, P- = e^{-i pi m^2/2}
            const double ph = (pi / 2.0) * static_cast<double>(m2 % 4);
            free1_[static_cast<std::size_t>(i)] = cplx(std::cos(ph), std::sin(ph));
            free2_[static_cast<std::size_t>(i)] = cplx(std::cos(ph), -std::sin(ph));
        } else {
            // e^{-i(T-T0)m^2/2} with T = 4 pi and e^{-i T0 m^2/2}, exact mod 2 pi
            const long long s = spec_.s, r = spec_.r;
            long long a1 = ((2 * s - r) % (2 * s)) * (m2 % (2 * s)) % (2 * s);
            long long a2 = (r % (2 * s)) * (m2 % (2 * s)) % (2 * s);
            if (a1 < 0) a1 += 2 * s;
            if (a2 < 0) a2 += 2 * s;
            const double ph1 = pi * static_cast<double>(a1) / static_cast<double>(s);
            const double ph2 = pi * static_cast<double>(a2) / static_cast<double>(s);
            free1_[static_cast<std::size_t>(i)] = cplx(std::cos(ph1), -std::sin(ph1));
            free2_[static_cast<std::size_t>(i)] = cplx(std::cos(ph2), -std::sin(ph2));
        }
    }
}

MatrixXcd ReducedFloquet::compose_window(double alpha, int alpha_derivative) const {
    const int n_sites = 2 * window_ + 1;
    if (!spec_.spin) {
        MatrixXcd K1 = MatrixXcd::Zero(n_sites, n_sites);
        MatrixXcd K2 = MatrixXcd::Zero(n_sites, n_sites);
        for (int i = 0; i < n_sites; ++i) {
            for (int d = -d_max_; d <= d_max_; ++d) {
                const int j = i - d; // row i, column j: <i|K|j>, d = i - j
                if (j < 0 || j >= n_sites) continue;
                const cplx base = kick_band_[static_cast<std::size_t>(d + d_max_)];
                K1(i, j) = base;
                cplx phase(std::cos(d * alpha), std::sin(d * alpha));
                cplx val = base * phase;
                if (alpha_derivative == 1) val *= cplx(0.0, static_cast<double>(d));
                K2(i, j) = val;
            }
        }
        MatrixXcd U = K2;
        for (int i = 0; i < n_sites; ++i) U.row(i) *= free2_[static_cast<std::size_t>(i)];
        U = K1 * U;
        for (int i = 0; i < n_sites; ++i) U.row(i) *= free1_[static_cast<std::size_t>(i)];
        return U;
    }

    // Spin: U = [e^{-iH1/2}] P+ K2 P- K1 [e^{-iH1/2}] in the symmetric frame,
    // else P+ K2 P- K1.
    const int n_tot = 2 * n_sites;
    auto fill = [&](const std::vector<Eigen::Matrix2cd>& band) {
        MatrixXcd M = MatrixXcd::Zero(n_tot, n_tot);
        for (int i = 0; i < n_sites; ++i) {
            for (int d = -d_max_; d <= d_max_; ++d) {
                const int j = i - d;
                if (j < 0 || j >= n_sites) continue;
                const Eigen::Matrix2cd& blk = band[static_cast<std::size_t>(d + d_max_)];
                M.block<2, 2>(2 * i, 2 * j) = blk;
            }
        }
        return M;
    };
    auto scale_rows = [&](MatrixXcd& M, const std::vector<cplx>& diag) {
        for (int i = 0; i < n_sites; ++i) {
            M.row(2 * i) *= diag[static_cast<std::size_t>(i)];
            M.row(2 * i + 1) *= diag[static_cast<std::size_t>(i)];
        }
    };
    const bool sym = spec_.spin->symmetric_frame;
    MatrixXcd U = sym ? fill(spin_band1_half_) : fill(spin_band1_); // rightmost kick
    scale_rows(U, free2_);      // P-
    U = fill(spin_band2_) * U;  // kick 2
    scale_rows(U, free1_);      // P+
    if (sym) U = fill(spin_band1_half_) * U;
    return U;
}

MatrixXcd ReducedFloquet::reduce(const MatrixXcd& full, double phi, bool dphi) const {
    const int s = spec_.s;
    const int spin = spec_.spin ? 2 : 1;
    MatrixXcd out = MatrixXcd::Zero(dim_, dim_);
    const int reach = 2 * d_max_ + 1;
    for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) {
            const int l_lo = static_cast<int>(std::floor(static_cast<double>(a - reach - b) / s));
            const int l_hi = static_cast<int>(std::ceil(static_cast<double>(a + reach - b) / s));
            for (int l = l_lo; l <= l_hi; ++l) {
                const long n = b + static_cast<long>(l) * s;
                if (std::abs(n - a) > reach) continue;
                if (n < -window_ || n > window_) continue;
                const double arg = static_cast<double>(n - a) * phi / s;
                cplx w(std::cos(arg), std::sin(arg));
                if (dphi) w *= cplx(0.0, static_cast<double>(n - a) / s);
                const int row = (a + window_) * spin;
                const int col = (static_cast<int>(n) + window_) * spin;
                for (int u = 0; u < spin; ++u)
                    for (int v = 0; v < spin; ++v)
                        out(a * spin + u, b * spin + v) += w * full(row + u, col + v);
            }
        }
    }
    return out;
}

MatrixXcd ReducedFloquet::matrix(double phi, double alpha) const {
    return reduce(compose_window(alpha, 0), phi, false);
}

MatrixXcd ReducedFloquet::dmatrix_dphi(double phi, double alpha) const {
    return reduce(compose_window(alpha, 0), phi, true);
}

MatrixXcd ReducedFloquet::dmatrix_dalpha(double phi, double alpha) const {
    return reduce(compose_window(alpha, 1), phi, false);
}

namespace {

double chordal_gap(double w1, double w2) {
    return std::abs(cplx(std::cos(w1), std::sin(w1)) - cplx(std::cos(w2), std::sin(w2)));
}

struct NodeEig {
    Eigen::VectorXd omega;
    MatrixXcd vectors;
    double residual = 0.0;
};

NodeEig eigensolve_unitary(const MatrixXcd& U) {
    Eigen::ComplexEigenSolver<MatrixXcd> es(U);
    if (es.info() != Eigen::Success)
        throw NumericalError("band_spectrum: eigensolver failed");
    const int n = static_cast<int>(U.rows());
    NodeEig out;
    out.omega.resize(n);
    out.vectors = es.eigenvectors();
    for (int i = 0; i < n; ++i) {
        const cplx lam = es.eigenvalues()(i);
        double w = std::arg(lam);
        if (w < 0.0) w += two_pi;
        out.omega(i) = w;
        out.vectors.col(i).normalize();
        const double res = (U * out.vectors.col(i) -
                            cplx(std::cos(w), std::sin(w)) * out.vectors.col(i))
                               .norm();
        out.residual = std::max(out.residual, res);
    }
    return out;
}

// Greedy maximal-overlap band matching, lowest index wins ties.
std::vector<int> match_bands(const MatrixXcd& ref, const MatrixXcd& cur) {
    const int n = static_cast<int>(ref.cols());
    std::vector<int> assign(n, -1);
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        double best = -1.0;
        int pick = -1;
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            const double ov = std::abs(ref.col(i).dot(cur.col(j)));
            if (ov > best + 1e-15) {
                best = ov;
                pick = j;
            }
        }
        assign[i] = pick;
        used[pick] = true;
    }
    return assign;
}

} // namespace

BandGrid band_spectrum(const ReducedFloquet& rf, int n_phi, int n_alpha, double degeneracy_tol) {
    if (n_phi < 4 || n_alpha < 1) throw UsageError("band_spectrum: mesh too small");
    BandGrid grid;
    grid.n_phi = n_phi;
    grid.n_alpha = n_alpha;
    grid.dim = rf.dim();
    grid.phis.resize(n_phi);
    grid.alphas.resize(n_alpha);
    for (int i = 0; i < n_phi; ++i) grid.phis[i] = two_pi * i / n_phi;
    for (int j = 0; j < n_alpha; ++j) grid.alphas[j] = two_pi * j / n_alpha;
    grid.omega.resize(static_cast<std::size_t>(n_phi) * n_alpha);
    grid.vectors.resize(grid.omega.size());
    grid.min_gap.resize(grid.omega.size());

    for (int i = 0; i < n_phi; ++i) {
        for (int j = 0; j < n_alpha; ++j) {
            const MatrixXcd U = rf.matrix(grid.phis[i], grid.alphas[j]);
            const double unit_err = (U.adjoint() * U - MatrixXcd::Identity(rf.dim(), rf.dim()))
                                        .cwiseAbs()
                                        .maxCoeff();
            if (unit_err > 1e-10)
                throw TruncationError("band_spectrum: reduced Floquet matrix not unitary, "
                                      "truncation tolerance unmet");
            NodeEig eig = eigensolve_unitary(U);
            grid.max_residual = std::max(grid.max_residual, eig.residual);

            const std::size_t node = grid.node(i, j);
            std::vector<int> order(static_cast<std::size_t>(rf.dim()));
            std::iota(order.begin(), order.end(), 0);
            if (i == 0 && j == 0) {
                std::sort(order.begin(), order.end(),
                          [&](int a, int b) { return eig.omega(a) < eig.omega(b); });
            } else {
                const std::size_t ref_node = j > 0 ? grid.node(i, j - 1) : grid.node(i - 1, j);
                order = match_bands(grid.vectors[ref_node], eig.vectors);
            }
            Eigen::VectorXd w(rf.dim());
            MatrixXcd v(rf.dim(), rf.dim());
            for (int b = 0; b < rf.dim(); ++b) {
                w(b) = eig.omega(order[static_cast<std::size_t>(b)]);
                v.col(b) = eig.vectors.col(order[static_cast<std::size_t>(b)]);
            }
            grid.omega[node] = w;
            grid.vectors[node] = v;
            double gap = 1e300;
            for (int a = 0; a < rf.dim(); ++a)
                for (int b = a + 1; b < rf.dim(); ++b)
                    gap = std::min(gap, chordal_gap(w(a), w(b)));
            grid.min_gap[node] = rf.dim() > 1 ? gap : 1e300;
            if (rf.dim() > 1 && gap < degeneracy_tol)
                grid.warnings.push_back("gap closure near phi=" + std::to_string(grid.phis[i]) +
                                        " alpha=" + std::to_string(grid.alphas[j]));
        }
    }
    return grid;
}

std::vector<std::vector<double>> berry_curvature(const BandGrid& grid, const ReducedFloquet& rf,
                                                 double degeneracy_tol) {
    const int dim = grid.dim;
    std::vector<std::vector<double>> B(static_cast<std::size_t>(dim));
    for (auto& b : B) b.assign(grid.omega.size(), 0.0);

    for (int i = 0; i < grid.n_phi; ++i) {
        for (int j = 0; j < grid.n_alpha; ++j) {
            const std::size_t node = grid.node(i, j);
            if (grid.min_gap[node] < degeneracy_tol) {
                for (int n = 0; n < dim; ++n)
                    B[static_cast<std::size_t>(n)][node] = std::nan("");
                continue;
            }
            const MatrixXcd dUphi = rf.dmatrix_dphi(grid.phis[i], grid.alphas[j]);
            const MatrixXcd dUalpha = rf.dmatrix_dalpha(grid.phis[i], grid.alphas[j]);
            const MatrixXcd& V = grid.vectors[node];
            const MatrixXcd Aphi = V.adjoint() * dUphi * V;
            const MatrixXcd Aalpha = V.adjoint() * dUalpha * V;
            for (int n = 0; n < dim; ++n) {
                double acc = 0.0;
                for (int m = 0; m < dim; ++m) {
                    if (m == n) continue;
                    const double denom = chordal_gap(grid.omega[node](n), grid.omega[node](m));
                    const cplx num = std::conj(Aphi(m, n)) * Aalpha(m, n);
                    acc += -2.0 * num.imag() / (denom * denom);
                }
                B[static_cast<std::size_t>(n)][node] = acc;
            }
        }
    }
    return B;
}

ChernNumbers chern_numbers(const BandGrid& grid, const ReducedFloquet& rf) {
    const int dim = grid.dim;
    ChernNumbers out;
    out.lattice.resize(static_cast<std::size_t>(dim));
    out.quadrature.assign(static_cast<std::size_t>(dim), 0.0);

    for (int n = 0; n < dim; ++n) {
        double total = 0.0;
        for (int i = 0; i < grid.n_phi; ++i) {
            for (int j = 0; j < grid.n_alpha; ++j) {
                const int ip = (i + 1) % grid.n_phi;
                const int jp = (j + 1) % grid.n_alpha;
                const auto v00 = grid.vectors[grid.node(i, j)].col(n);
                const auto v10 = grid.vectors[grid.node(ip, j)].col(n);
                const auto v11 = grid.vectors[grid.node(ip, jp)].col(n);
                const auto v01 = grid.vectors[grid.node(i, jp)].col(n);
                const cplx u1 = v00.dot(v10);
                const cplx u2 = v10.dot(v11);
                const cplx u3 = v01.dot(v11);
                const cplx u4 = v00.dot(v01);
                if (std::abs(u1) < 1e-3 || std::abs(u2) < 1e-3 || std::abs(u3) < 1e-3 ||
                    std::abs(u4) < 1e-3)
                    throw ChernUndefinedError(
                        "chern_numbers: vanishing link at mesh node (" + std::to_string(i) +
                        "," + std::to_string(j) + "), band " + std::to_string(n));
                total += std::arg(u1 * u2 * std::conj(u3) * std::conj(u4));
            }
        }
        const double c = total / two_pi;
        const long rounded = std::lround(c);
        if (std::abs(c - static_cast<double>(rounded)) > 1e-6)
            throw ChernUndefinedError("chern_numbers: plaquette sum is not an integer");
        out.lattice[static_cast<std::size_t>(n)] = static_cast<int>(rounded);
    }

    const auto B = berry_curvature(grid, rf);
    const double cell = (two_pi / grid.n_phi) * (two_pi / grid.n_alpha) / two_pi;
    for (int n = 0; n < dim; ++n) {
        KahanSum acc;
        bool masked = false;
        for (std::size_t node = 0; node < grid.omega.size(); ++node) {
            const double b = B[static_cast<std::size_t>(n)][node];
            if (std::isnan(b)) {
                masked = true;
                break;
            }
            acc.add(b);
        }
        out.quadrature[static_cast<std::size_t>(n)] =
            masked ? std::nan("") : acc.value() * cell;
    }
    return out;
}

namespace {

// Full-lattice split-step engine for the scalar resonant DKR.
class DkrLatticeEngine {
public:
    DkrLatticeEngine(const ResonantDKRSpec& spec, int L) : spec_(spec), L_(L), N_(2 * L + 1) {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        buf_ = fftw_alloc_complex(static_cast<std::size_t>(N_));
        fwd_ = fftw_plan_dft_1d(N_, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(N_, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        theta_.resize(N_);
        for (int j = 0; j < N_; ++j) theta_[j] = two_pi * j / N_;
        free1_.resize(N_);
        free2_.resize(N_);
        const long long s = spec_.s, r = spec_.r;
        for (int a = 0; a < N_; ++a) {
            const long long m = a - L_;
            const long long m2 = m * m;
            long long a1 = ((2 * s - r) % (2 * s)) * (m2 % (2 * s)) % (2 * s);
            long long a2 = (r % (2 * s)) * (m2 % (2 * s)) % (2 * s);
            if (a1 < 0) a1 += 2 * s;
            if (a2 < 0) a2 += 2 * s;
            const double ph1 = pi * static_cast<double>(a1) / static_cast<double>(s);
            const double ph2 = pi * static_cast<double>(a2) / static_cast<double>(s);
            free1_[a] = cplx(std::cos(ph1), -std::sin(ph1));
            free2_[a] = cplx(std::cos(ph2), -std::sin(ph2));
        }
    }
    ~DkrLatticeEngine() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }

    void kick(std::vector<cplx>& amps, double alpha) {
        to_angle(amps);
        cplx* g = reinterpret_cast<cplx*>(buf_);
        for (int j = 0; j < N_; ++j) {
            const double v = spec_.k * std::cos(theta_[j] + alpha);
            g[j] *= cplx(std::cos(v), -std::sin(v));
        }
        to_momentum(amps);
    }

    void step(std::vector<cplx>& amps, double alpha) {
        kick(amps, alpha);
        for (int a = 0; a < N_; ++a) amps[static_cast<std::size_t>(a)] *= free2_[a];
        kick(amps, 0.0);
        for (int a = 0; a < N_; ++a) amps[static_cast<std::size_t>(a)] *= free1_[a];
    }

    int L() const { return L_; }

private:
    void to_angle(const std::vector<cplx>& amps) {
        for (int a = 0; a < N_; ++a) {
            const int m = a - L_;
            const int f = m >= 0 ? m : m + N_;
            buf_[f][0] = amps[static_cast<std::size_t>(a)].real();
            buf_[f][1] = amps[static_cast<std::size_t>(a)].imag();
        }
        fftw_execute(bwd_);
    }
    void to_momentum(std::vector<cplx>& amps) {
        fftw_execute(fwd_);
        const double inv = 1.0 / N_;
        for (int a = 0; a < N_; ++a) {
            const int m = a - L_;
            const int f = m >= 0 ? m : m + N_;
            amps[static_cast<std::size_t>(a)] = cplx(buf_[f][0] * inv, buf_[f][1] * inv);
        }
    }

    ResonantDKRSpec spec_;
    int L_, N_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
    std::vector<double> theta_;
    std::vector<cplx> free1_, free2_;
};

double mean_momentum(const std::vector<cplx>& amps, int L) {
    KahanSum w, wm;
    for (int a = 0; a < 2 * L + 1; ++a) {
        const double p = std::norm(amps[static_cast<std::size_t>(a)]);
        w.add(p);
        wm.add(p * static_cast<double>(a - L));
    }
    return wm.value() / w.value();
}

} // namespace

PumpResult thouless_pump(const ReducedFloquet& rf, const BandGrid& grid, int band, int d_f,
                         int L) {
    if (rf.spec().spin) throw UsageError("thouless_pump: scalar spec required");
    if (band < 0 || band >= grid.dim) throw UsageError("thouless_pump: band out of range");
    if (grid.alphas.empty() || grid.alphas[0] != 0.0)
        throw UsageError("thouless_pump: grid must start at alpha = 0");
    const int s = rf.spec().s;
    const int n_phi = grid.n_phi;

    // Smooth periodic gauge along phi at alpha = 0 by parallel transport,
    // with the wrap holonomy distributed over the mesh.
    std::vector<VectorXcd> u(static_cast<std::size_t>(n_phi));
    for (int j = 0; j < n_phi; ++j) u[static_cast<std::size_t>(j)] = grid.vectors[grid.node(j, 0)].col(band);
    for (int j = 1; j < n_phi; ++j) {
        const cplx ov = u[static_cast<std::size_t>(j - 1)].dot(u[static_cast<std::size_t>(j)]);
        u[static_cast<std::size_t>(j)] *= std::polar(1.0, -std::arg(ov));
    }
    // wrap: u(phi + 2 pi) = W^dagger u(phi), W = diag(e^{i 2 pi m / s})
    VectorXcd wrap = u[0];
    for (int m = 0; m < s; ++m)
        wrap(m) *= std::polar(1.0, -two_pi * static_cast<double>(m) / s);
    const double chi = std::arg(u[static_cast<std::size_t>(n_phi - 1)].dot(wrap));
    for (int j = 0; j < n_phi; ++j)
        u[static_cast<std::size_t>(j)] *= std::polar(1.0, chi * static_cast<double>(j) / n_phi);

    // Wannier superposition on the momentum lattice.
    const int N = 2 * L + 1;
    std::vector<cplx> amps(static_cast<std::size_t>(N), cplx(0.0, 0.0));
    for (int a = 0; a < N; ++a) {
        const int m = a - L;
        const int c = ((m % s) + s) % s;
        KahanSum re, im;
        for (int j = 0; j < n_phi; ++j) {
            const double arg = static_cast<double>(m) * grid.phis[static_cast<std::size_t>(j)] / s;
            const cplx v = std::polar(1.0, arg) * u[static_cast<std::size_t>(j)](c);
            re.add(v.real());
            im.add(v.imag());
        }
        amps[static_cast<std::size_t>(a)] = cplx(re.value(), im.value()) / static_cast<double>(n_phi);
    }
    {
        double n2 = 0.0;
        for (const auto& a : amps) n2 += std::norm(a);
        const double s0 = 1.0 / std::sqrt(n2);
        for (auto& a : amps) a *= s0;
    }

    // Chern number of this band from the same grid (consistent labels).
    ChernNumbers cn = chern_numbers(grid, rf);
    PumpResult out;
    out.chern = cn.lattice[static_cast<std::size_t>(band)];
    out.prediction = -static_cast<double>(s) * out.chern;

    DkrLatticeEngine engine(rf.spec(), L);
    auto& alpha_col = out.series.add_column("alpha");
    auto& meanI_col = out.series.add_column("meanI");
    auto& leak_col = out.series.add_column("leakage");

    const double I0 = mean_momentum(amps, L);
    const int leak_every = std::max(1, d_f / 20);
    std::vector<VectorXcd> band_ref = u; // tracks the band vectors along alpha

    auto leakage_probe = [&](double alpha) {
        // Projection weight outside the band-n Bloch family at this alpha.
        double inside = 0.0;
        for (int j = 0; j < n_phi; ++j) {
            const MatrixXcd U = rf.matrix(grid.phis[static_cast<std::size_t>(j)], alpha);
            NodeEig eig = eigensolve_unitary(U);
            // pick the band by overlap with the tracked reference
            int pick = 0;
            double best = -1.0;
            for (int b = 0; b < s; ++b) {
                const double ov = std::abs(band_ref[static_cast<std::size_t>(j)].dot(eig.vectors.col(b)));
                if (ov > best) {
                    best = ov;
                    pick = b;
                }
            }
            band_ref[static_cast<std::size_t>(j)] = eig.vectors.col(pick);
            // overlap of the lattice state with the normalised Bloch vector
            cplx ovl(0.0, 0.0);
            for (int a = 0; a < N; ++a) {
                const int m = a - L;
                const int c = ((m % s) + s) % s;
                const double arg = static_cast<double>(m) * grid.phis[static_cast<std::size_t>(j)] / s;
                ovl += std::conj(std::polar(1.0, arg) * eig.vectors.col(pick)(c)) *
                       amps[static_cast<std::size_t>(a)];
            }
            inside += std::norm(ovl) * static_cast<double>(s) / static_cast<double>(N);
        }
        double n2 = 0.0;
        for (const auto& a : amps) n2 += std::norm(a);
        return 1.0 - inside / n2;
    };

    out.series.t.push_back(0.0);
    alpha_col.push_back(0.0);
    meanI_col.push_back(0.0);
    leak_col.push_back(leakage_probe(0.0));

    for (int d = 1; d <= d_f; ++d) {
        const double alpha = two_pi * static_cast<double>(d) / static_cast<double>(d_f);
        engine.step(amps, alpha);
        out.series.t.push_back(static_cast<double>(d));
        alpha_col.push_back(alpha);
        meanI_col.push_back(mean_momentum(amps, L) - I0);
        if (d % leak_every == 0 || d == d_f) {
            const double leak = leakage_probe(alpha);
            leak_col.push_back(leak);
            out.max_leakage = std::max(out.max_leakage, leak);
        } else {
            leak_col.push_back(std::nan(""));
        }
    }
    out.deltaI = meanI_col.back();
    if (out.max_leakage > 0.05)
        out.warnings.push_back("adiabaticity breach: band leakage " +
                               std::to_string(out.max_leakage));
    return out;
}

namespace {

MatrixXcd s_pi_reduced(int s) {
    MatrixXcd m = MatrixXcd::Zero(2 * s, 2 * s);
    for (int a = 0; a < s; ++a) {
        const double sgn = a % 2 == 0 ? 1.0 : -1.0;
        m(2 * a, 2 * a) = sgn;
        m(2 * a + 1, 2 * a + 1) = sgn;
    }
    return m;
}

MatrixXcd sigma_y_reduced(int s) {
    MatrixXcd m = MatrixXcd::Zero(2 * s, 2 * s);
    for (int a = 0; a < s; ++a) {
        m(2 * a, 2 * a + 1) = cplx(0.0, -1.0);
        m(2 * a + 1, 2 * a) = cplx(0.0, 1.0);
    }
    return m;
}

} // namespace

AZOperator cii_time_reversal(int s) {
    return {"T", sigma_y_reduced(s), true, true, true};
}

AZOperator cii_particle_hole(int s) {
    return {"C", s_pi_reduced(s) * sigma_y_reduced(s), true, true, false};
}

AZOperator cii_chiral(int s) {
    return {"Gamma", s_pi_reduced(s), false, false, true};
}

std::vector<double> az_symmetry_check(const ReducedFloquet& rf,
                                      const std::vector<AZOperator>& ops, int phi_samples) {
    if (!rf.spec().spin) throw UsageError("az_symmetry_check: spin variant required");
    std::vector<double> residuals(ops.size(), 0.0);
    for (int p = 0; p < phi_samples; ++p) {
        const double phi = two_pi * (p + 0.371) / phi_samples; // generic sample points
        const MatrixXcd Up = rf.matrix(phi, 0.0);
        const MatrixXcd Um = rf.matrix(-phi, 0.0);
        for (std::size_t i = 0; i < ops.size(); ++i) {
            const AZOperator& op = ops[i];
            MatrixXcd lhs = op.antiunitary ? (op.W * Up.conjugate() * op.W.adjoint()).eval()
                                           : (op.W * Up * op.W.adjoint()).eval();
            const MatrixXcd& base = op.flip_phi ? Um : Up;
            MatrixXcd target = op.target_inverse ? MatrixXcd(base.adjoint()) : base;
            residuals[i] = std::max(residuals[i], (lhs - target).norm());
        }
    }
    return residuals;
}

} // namespace rotorlab::topology
