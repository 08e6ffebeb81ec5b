#include "rotorlab/coupled.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <mutex>

namespace rotorlab::coupled {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

double TwoRotorState::norm2() const {
    KahanSum acc;
    for (const auto& a : amps) acc.add(std::norm(a));
    return acc.value();
}

TwoRotorState init_product_gaussian(int L1, int L2, double width1, double width2, double theta01,
                                    double theta02) {
    if (L1 < 1 || L2 < 1) throw UsageError("init_product_gaussian: L must be >= 1");
    TwoRotorState s;
    s.L1 = L1;
    s.L2 = L2;
    s.amps.resize(static_cast<std::size_t>(s.n1()) * s.n2());
    std::vector<cplx> g1(static_cast<std::size_t>(s.n1())), g2(static_cast<std::size_t>(s.n2()));
    for (long m = -L1; m <= L1; ++m)
        g1[static_cast<std::size_t>(m + L1)] =
            std::exp(-static_cast<double>(m) * m / (4.0 * width1 * width1)) *
            std::polar(1.0, theta01 * static_cast<double>(m));
    for (long m = -L2; m <= L2; ++m)
        g2[static_cast<std::size_t>(m + L2)] =
            std::exp(-static_cast<double>(m) * m / (4.0 * width2 * width2)) *
            std::polar(1.0, theta02 * static_cast<double>(m));
    for (long m1 = -L1; m1 <= L1; ++m1)
        for (long m2 = -L2; m2 <= L2; ++m2)
            s.at(m1, m2) = g1[static_cast<std::size_t>(m1 + L1)] * g2[static_cast<std::size_t>(m2 + L2)];
    const double n = std::sqrt(s.norm2());
    for (auto& a : s.amps) a /= n;
    return s;
}

TwoRotorState init_product_delta(int L1, int L2, long m1, long m2) {
    if (std::abs(m1) > L1 || std::abs(m2) > L2)
        throw RangeError("init_product_delta: momentum outside lattice");
    TwoRotorState s;
    s.L1 = L1;
    s.L2 = L2;
    s.amps.assign(static_cast<std::size_t>(s.n1()) * s.n2(), cplx(0.0, 0.0));
    s.at(m1, m2) = cplx(1.0, 0.0);
    return s;
}

struct CoupledEngine::Impl {
    fftw_plan fwd = nullptr, bwd = nullptr;
    fftw_complex* buf = nullptr;
    std::vector<cplx> kick;
    std::vector<cplx> free1, free2;
    int n1 = 0, n2 = 0;

    Impl(const CoupledSpec& spec, int L1, int L2) {
        n1 = 2 * L1 + 1;
        n2 = 2 * L2 + 1;
        {
            std::lock_guard<std::mutex> lock(fftw_mutex());
            buf = fftw_alloc_complex(static_cast<std::size_t>(n1) * n2);
            fwd = fftw_plan_dft_2d(n1, n2, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_2d(n1, n2, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        kick.resize(static_cast<std::size_t>(n1) * n2);
        for (int j1 = 0; j1 < n1; ++j1) {
            const double th1 = two_pi * j1 / n1;
            for (int j2 = 0; j2 < n2; ++j2) {
                const double th2 = two_pi * j2 / n2;
                const double v = spec.K1 * std::cos(th1) + spec.K2 * std::cos(th2) +
                                 spec.xi * std::cos(th1 - th2);
                kick[static_cast<std::size_t>(j1) * n2 + j2] = cplx(std::cos(v), -std::sin(v));
            }
        }
        free1.resize(static_cast<std::size_t>(n1));
        free2.resize(static_cast<std::size_t>(n2));
        for (int a = 0; a < n1; ++a) {
            const double m = a - L1;
            const double ph = std::fmod(0.5 * m * m, two_pi);
            free1[static_cast<std::size_t>(a)] = cplx(std::cos(ph), -std::sin(ph));
        }
        for (int a = 0; a < n2; ++a) {
            const double m = a - L2;
            const double ph = std::fmod(0.5 * m * m, two_pi);
            free2[static_cast<std::size_t>(a)] = cplx(std::cos(ph), -std::sin(ph));
        }
    }
    ~Impl() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
};

CoupledEngine::CoupledEngine(CoupledSpec spec, int L1, int L2, double spill_threshold)
    : spec_(spec), L1_(L1), L2_(L2), spill_threshold_(spill_threshold),
      impl_(std::make_unique<Impl>(spec, L1, L2)) {}

CoupledEngine::~CoupledEngine() = default;

void CoupledEngine::step(TwoRotorState& s) {
    if (s.L1 != L1_ || s.L2 != L2_) throw UsageError("CoupledEngine: lattice mismatch");
    const int n1 = impl_->n1, n2 = impl_->n2;
    cplx* g = reinterpret_cast<cplx*>(impl_->buf);

    // momentum -> angle: index f = m mod N per axis
    for (int a1 = 0; a1 < n1; ++a1) {
        const int m1 = a1 - L1_;
        const int f1 = m1 >= 0 ? m1 : m1 + n1;
        for (int a2 = 0; a2 < n2; ++a2) {
            const int m2 = a2 - L2_;
            const int f2 = m2 >= 0 ? m2 : m2 + n2;
            g[static_cast<std::size_t>(f1) * n2 + f2] =
                s.amps[static_cast<std::size_t>(a1) * n2 + a2];
        }
    }
    fftw_execute(impl_->bwd);
    for (std::size_t i = 0; i < s.amps.size(); ++i) g[i] *= impl_->kick[i];
    fftw_execute(impl_->fwd);
    const double inv = 1.0 / (static_cast<double>(n1) * n2);
    for (int a1 = 0; a1 < n1; ++a1) {
        const int m1 = a1 - L1_;
        const int f1 = m1 >= 0 ? m1 : m1 + n1;
        const cplx ph1 = impl_->free1[static_cast<std::size_t>(a1)];
        for (int a2 = 0; a2 < n2; ++a2) {
            const int m2 = a2 - L2_;
            const int f2 = m2 >= 0 ? m2 : m2 + n2;
            s.amps[static_cast<std::size_t>(a1) * n2 + a2] =
                g[static_cast<std::size_t>(f1) * n2 + f2] * inv * ph1 *
                impl_->free2[static_cast<std::size_t>(a2)];
        }
    }

    // spill monitors on both axes
    double edge1 = 0.0, edge2 = 0.0;
    for (int a2 = 0; a2 < n2; ++a2) {
        edge1 += std::norm(s.at(-L1_, a2 - L2_));
        edge1 += std::norm(s.at(L1_, a2 - L2_));
    }
    for (int a1 = 0; a1 < n1; ++a1) {
        edge2 += std::norm(s.at(a1 - L1_, -L2_));
        edge2 += std::norm(s.at(a1 - L1_, L2_));
    }
    const double n2tot = s.norm2();
    if (edge1 / n2tot > spill_threshold_) s.spill1 = true;
    if (edge2 / n2tot > spill_threshold_) s.spill2 = true;
}

TwoRotorState coupled_step(const TwoRotorState& s, const CoupledSpec& spec) {
    CoupledEngine engine(spec, s.L1, s.L2);
    TwoRotorState out = s;
    engine.step(out);
    return out;
}

MarginalObservables marginal_observables(const TwoRotorState& s) {
    MarginalObservables o;
    o.P1.assign(static_cast<std::size_t>(s.n1()), 0.0);
    o.P2.assign(static_cast<std::size_t>(s.n2()), 0.0);
    const double n2 = s.norm2();
    for (long m1 = -s.L1; m1 <= s.L1; ++m1)
        for (long m2 = -s.L2; m2 <= s.L2; ++m2) {
            const double w = std::norm(s.at(m1, m2));
            o.P1[static_cast<std::size_t>(m1 + s.L1)] += w;
            o.P2[static_cast<std::size_t>(m2 + s.L2)] += w;
        }
    KahanSum e1, e2;
    for (long m1 = -s.L1; m1 <= s.L1; ++m1)
        e1.add(0.5 * static_cast<double>(m1) * m1 * o.P1[static_cast<std::size_t>(m1 + s.L1)]);
    for (long m2 = -s.L2; m2 <= s.L2; ++m2)
        e2.add(0.5 * static_cast<double>(m2) * m2 * o.P2[static_cast<std::size_t>(m2 + s.L2)]);
    o.E1 = e1.value() / n2;
    o.E2 = e2.value() / n2;
    for (auto& p : o.P1) p /= n2;
    for (auto& p : o.P2) p /= n2;
    return o;
}

Eigen::MatrixXcd reduced_density_matrix(const TwoRotorState& s, int keep) {
    if (keep != 1 && keep != 2) throw UsageError("reduced_density_matrix: keep must be 1 or 2");
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        s.amps.data(), s.n1(), s.n2());
    Eigen::MatrixXcd rho;
    if (keep == 1)
        rho = A * A.adjoint();
    else
        rho = A.transpose() * A.conjugate();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    rho /= tr;
    return rho;
}

namespace {

EntanglementMeasures measures_from_eigenvalues(std::vector<double> lam) {
    EntanglementMeasures m;
    double clip = 0.0;
    KahanSum sum;
    for (auto& l : lam) {
        if (l < 0.0) {
            clip += -l;
            l = 0.0;
        }
        sum.add(l);
    }
    const double tr = sum.value();
    if (std::abs(tr - 1.0) > 1e-8)
        throw StateError("entanglement_measures: trace deviates from 1 by more than 1e-8");
    KahanSum svn, p2;
    for (double l : lam) {
        // eigenvalues below 1e-14 are exact zeros for the entropy
        if (l > 1e-14) svn.add(-l * std::log(l));
        p2.add(l * l);
    }
    m.SvN = svn.value();
    m.Slin = 1.0 - p2.value();
    m.Neff = 1.0 / p2.value();
    m.clip_mass = clip;
    return m;
}

} // namespace

EntanglementMeasures entanglement_measures(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("entanglement_measures: eigensolver failed");
    std::vector<double> lam(es.eigenvalues().data(),
                            es.eigenvalues().data() + es.eigenvalues().size());
    // clip within -1e-12 tolerance; anything worse indicates a broken state
    for (double l : lam)
        if (l < -1e-10) throw StateError("entanglement_measures: negative eigenvalue " +
                                         std::to_string(l));
    return measures_from_eigenvalues(std::move(lam));
}

EntanglementMeasures entanglement_measures(const TwoRotorState& s) {
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        s.amps.data(), s.n1(), s.n2());
    const double n = std::sqrt(s.norm2());
    Eigen::MatrixXcd An = A / n;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(An);
    std::vector<double> lam;
    lam.reserve(static_cast<std::size_t>(svd.singularValues().size()));
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double sv = svd.singularValues()(i);
        lam.push_back(sv * sv);
    }
    return measures_from_eigenvalues(std::move(lam));
}

double purity(const TwoRotorState& s) {
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        s.amps.data(), s.n1(), s.n2());
    const double n2 = s.norm2();
    // Tr rho^2 = ||A^dagger A||_F^2 / ||A||^4
    Eigen::MatrixXcd G = A.adjoint() * A;
    return G.squaredNorm() / (n2 * n2);
}

std::vector<double> perturbative_slin(const TwoRotorState& initial, const CoupledSpec& spec,
                                      long t_max) {
    // Interaction-picture correlator route: F(r) = U0^{-r} F U0^r with
    // F = cos(th1 - th2) and U0 the uncoupled Floquet operator.
    const int n1 = initial.n1(), n2 = initial.n2();
    const int L1 = initial.L1, L2 = initial.L2;

    struct StepKit {
        fftw_plan fwd, bwd;
        fftw_complex* buf;
        int n1, n2, L1, L2;
        std::vector<cplx> kick, free1, free2;

        StepKit(const CoupledSpec& sp, int L1_, int L2_) : L1(L1_), L2(L2_) {
            n1 = 2 * L1 + 1;
            n2 = 2 * L2 + 1;
            {
                std::lock_guard<std::mutex> lock(fftw_mutex());
                buf = fftw_alloc_complex(static_cast<std::size_t>(n1) * n2);
                fwd = fftw_plan_dft_2d(n1, n2, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
                bwd = fftw_plan_dft_2d(n1, n2, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
            }
            kick.resize(static_cast<std::size_t>(n1) * n2);
            for (int j1 = 0; j1 < n1; ++j1) {
                const double th1 = two_pi * j1 / n1;
                for (int j2 = 0; j2 < n2; ++j2) {
                    const double th2 = two_pi * j2 / n2;
                    const double v = sp.K1 * std::cos(th1) + sp.K2 * std::cos(th2);
                    kick[static_cast<std::size_t>(j1) * n2 + j2] = cplx(std::cos(v), -std::sin(v));
                }
            }
            free1.resize(static_cast<std::size_t>(n1));
            free2.resize(static_cast<std::size_t>(n2));
            for (int a = 0; a < n1; ++a) {
                const double m = a - L1;
                const double ph = std::fmod(0.5 * m * m, two_pi);
                free1[static_cast<std::size_t>(a)] = cplx(std::cos(ph), -std::sin(ph));
            }
            for (int a = 0; a < n2; ++a) {
                const double m = a - L2;
                const double ph = std::fmod(0.5 * m * m, two_pi);
                free2[static_cast<std::size_t>(a)] = cplx(std::cos(ph), -std::sin(ph));
            }
        }
        ~StepKit() {
            std::lock_guard<std::mutex> lock(fftw_mutex());
            fftw_destroy_plan(fwd);
            fftw_destroy_plan(bwd);
            fftw_free(buf);
        }

        void to_angle(const std::vector<cplx>& amps) {
            cplx* g = reinterpret_cast<cplx*>(buf);
            for (int a1 = 0; a1 < n1; ++a1) {
                const int m1 = a1 - L1;
                const int f1 = m1 >= 0 ? m1 : m1 + n1;
                for (int a2 = 0; a2 < n2; ++a2) {
                    const int m2 = a2 - L2;
                    const int f2 = m2 >= 0 ? m2 : m2 + n2;
                    g[static_cast<std::size_t>(f1) * n2 + f2] =
                        amps[static_cast<std::size_t>(a1) * n2 + a2];
                }
            }
            fftw_execute(bwd);
        }
        void to_momentum(std::vector<cplx>& amps) {
            cplx* g = reinterpret_cast<cplx*>(buf);
            fftw_execute(fwd);
            const double inv = 1.0 / (static_cast<double>(n1) * n2);
            for (int a1 = 0; a1 < n1; ++a1) {
                const int m1 = a1 - L1;
                const int f1 = m1 >= 0 ? m1 : m1 + n1;
                for (int a2 = 0; a2 < n2; ++a2) {
                    const int m2 = a2 - L2;
                    const int f2 = m2 >= 0 ? m2 : m2 + n2;
                    amps[static_cast<std::size_t>(a1) * n2 + a2] =
                        g[static_cast<std::size_t>(f1) * n2 + f2] * inv;
                }
            }
        }
        void multiply_free(std::vector<cplx>& amps, bool conjugate) {
            for (int a1 = 0; a1 < n1; ++a1) {
                const cplx p1 = conjugate ? std::conj(free1[static_cast<std::size_t>(a1)])
                                          : free1[static_cast<std::size_t>(a1)];
                for (int a2 = 0; a2 < n2; ++a2) {
                    const cplx p2 = conjugate ? std::conj(free2[static_cast<std::size_t>(a2)])
                                              : free2[static_cast<std::size_t>(a2)];
                    amps[static_cast<std::size_t>(a1) * n2 + a2] *= p1 * p2;
                }
            }
        }
        void multiply_kick(std::vector<cplx>& amps, bool conjugate) {
            to_angle(amps);
            cplx* g = reinterpret_cast<cplx*>(buf);
            for (std::size_t i = 0; i < amps.size(); ++i)
                g[i] *= conjugate ? std::conj(kick[i]) : kick[i];
            to_momentum(amps);
        }
        void step(std::vector<cplx>& amps) {
            multiply_kick(amps, false);
            multiply_free(amps, false);
        }
        void inverse_step(std::vector<cplx>& amps) {
            multiply_free(amps, true);
            multiply_kick(amps, true);
        }
        void multiply_cos_diff(std::vector<cplx>& amps) {
            to_angle(amps);
            cplx* g = reinterpret_cast<cplx*>(buf);
            for (int j1 = 0; j1 < n1; ++j1) {
                const double th1 = two_pi * j1 / n1;
                for (int j2 = 0; j2 < n2; ++j2)
                    g[static_cast<std::size_t>(j1) * n2 + j2] *=
                        std::cos(th1 - two_pi * j2 / n2);
            }
            to_momentum(amps);
        }
    } kit(spec, L1, L2);

    // chi(r) = U0^{-r} F U0^r |Psi0>; M(r) = Tr_2 |chi(r)><Psi0|
    std::vector<cplx> psi = initial.amps;
    std::vector<Eigen::MatrixXcd> Kr; // M(r) - M(r)^dagger over rotor 1
    Kr.reserve(static_cast<std::size_t>(t_max));

    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Psi0(
        initial.amps.data(), n1, n2);

    for (long r = 1; r <= t_max; ++r) {
        kit.step(psi);
        std::vector<cplx> chi = psi;
        kit.multiply_cos_diff(chi);
        for (long back = 0; back < r; ++back) kit.inverse_step(chi);
        Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            Chi(chi.data(), n1, n2);
        Eigen::MatrixXcd M = Chi * Psi0.adjoint();
        Kr.push_back(M - M.adjoint());
    }

    // S_lin(t) = -xi^2 sum_{r,s<=t} Tr[K_r K_s]; incremental over t.
    std::vector<double> slin(static_cast<std::size_t>(t_max) + 1, 0.0);
    Eigen::MatrixXcd Ksum = Eigen::MatrixXcd::Zero(n1, n1);
    for (long t = 1; t <= t_max; ++t) {
        Ksum += Kr[static_cast<std::size_t>(t - 1)];
        slin[static_cast<std::size_t>(t)] = -spec.xi * spec.xi * (Ksum * Ksum).trace().real();
    }
    return slin;
}

} // namespace rotorlab::coupled
