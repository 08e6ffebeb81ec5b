#include "rotorlab/anderson.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace rotorlab::anderson {

namespace {

// Tangent argument (eps*T - n^2*T/2)/2 reduced mod pi, exact for the
// rational-of-2pi part of T.
double tan_argument_mod_pi(const Period& T, double eps, long n) {
    // n^2*T/4 with T = 2*pi*num/den + delta: exact part pi*num*n^2/(2*den).
    const long long m2 = static_cast<long long>(n) * static_cast<long long>(n);
    double arg = 0.0;
    if (T.num != 0) {
        const long long modulus = 2 * T.den;
        long long a = (T.num % modulus) * (m2 % modulus) % modulus;
        if (a < 0) a += modulus;
        arg -= pi * static_cast<double>(a) / static_cast<double>(modulus);
    }
    if (T.delta != 0.0) arg -= std::fmod(T.delta * static_cast<double>(m2) / 4.0, pi);
    arg += std::fmod(eps * T.value() / 2.0, pi);
    arg -= pi * std::floor(arg / pi);
    return arg; // in [0, pi)
}

} // namespace

std::vector<double> site_energies(const Period& T, double eps, long n_min, long n_max) {
    if (n_max < n_min) throw UsageError("site_energies: empty range");
    std::vector<double> W;
    W.reserve(static_cast<std::size_t>(n_max - n_min + 1));
    for (long n = n_min; n <= n_max; ++n) {
        const double arg = tan_argument_mod_pi(T, eps, n);
        if (std::abs(arg - pi / 2.0) < 1e-8)
            throw PoleError("site_energies: tangent pole at n = " + std::to_string(n));
        W.push_back(std::tan(arg));
    }
    return W;
}

std::vector<cplx> hoppings(const classical::KickPotential& pot, int l_max,
                           int quadrature_points) {
    if (l_max < 1) throw UsageError("hoppings: l_max must be >= 1");
    if (quadrature_points < 8 * l_max)
        throw UsageError("hoppings: need at least 8*l_max quadrature points");
    const int Q = quadrature_points;
    // Regularity check: tan(V/2) needs max|V| < pi.
    for (int j = 0; j < 4 * Q; ++j) {
        const double th = two_pi * j / static_cast<double>(4 * Q);
        if (std::abs(pot.value(th)) >= pi)
            throw SingularPotentialError("hoppings: |V| >= pi at theta = " + std::to_string(th) +
                                         " (tan(V/2) pole); mapping undefined");
    }
    std::vector<cplx> t(static_cast<std::size_t>(2 * l_max + 1));
    std::vector<double> tanv(Q);
    for (int j = 0; j < Q; ++j) {
        const double th = two_pi * j / static_cast<double>(Q);
        tanv[j] = std::tan(0.5 * pot.value(th));
    }
    for (int l = -l_max; l <= l_max; ++l) {
        KahanSum re, im;
        for (int j = 0; j < Q; ++j) {
            const double th = two_pi * j / static_cast<double>(Q);
            re.add(std::cos(l * th) * tanv[j]);
            im.add(std::sin(l * th) * tanv[j]);
        }
        t[static_cast<std::size_t>(l + l_max)] =
            cplx(-re.value() / Q, -im.value() / Q);
    }
    return t;
}

TightBindingChain build_chain(const Period& T, double eps, const classical::KickPotential& pot,
                              long n_sites, int l_max, int quadrature_points) {
    if (n_sites < 3) throw UsageError("build_chain: need at least 3 sites");
    TightBindingChain chain;
    chain.T = T;
    chain.eps = eps;
    chain.l_max = l_max;
    chain.n_min = -(n_sites / 2);
    chain.W = site_energies(T, eps, chain.n_min, chain.n_min + n_sites - 1);
    chain.t = hoppings(pot, l_max, quadrature_points);
    chain.E = -chain.t[static_cast<std::size_t>(l_max)].real();
    // Estimate the truncated hopping weight from a wider window.
    const int probe = 2 * l_max;
    std::vector<cplx> wide = hoppings(pot, probe, std::max(quadrature_points, 8 * probe));
    double w = 0.0;
    for (int l = -probe; l <= probe; ++l)
        if (std::abs(l) > l_max) w += std::norm(wide[static_cast<std::size_t>(l + probe)]);
    chain.truncated_weight = w;
    return chain;
}

namespace {

struct DecayFit {
    double ell = 0.0;
    double r2 = 0.0;
};

DecayFit fit_amplitude_decay(const std::vector<double>& absu, long n_min) {
    // Centre at the amplitude maximum, fit ln|u| against distance.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < absu.size(); ++i)
        if (absu[i] > absu[peak]) peak = i;
    const double n0 = static_cast<double>(n_min + static_cast<long>(peak));
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < absu.size(); ++i) {
        if (absu[i] < 1e-14) continue;
        const double d = std::abs(static_cast<double>(n_min + static_cast<long>(i)) - n0);
        if (d < 2.0) continue;
        xs.push_back(d);
        ys.push_back(std::log(absu[i]));
    }
    if (xs.size() < 10) return {0.0, 0.0};
    LineFit f = fit_line(xs, ys);
    if (f.slope >= 0.0) return {0.0, f.r2};
    return {1.0 / std::abs(f.slope), f.r2};
}

} // namespace

TbLocalization tb_localization_length(const TightBindingChain& chain, double energy,
                                      TbMethod method) {
    const long N = static_cast<long>(chain.W.size());
    if (method == TbMethod::EigvecDecay) {
        // Chains from real even potentials are real symmetric; fall back to
        // the complex Hermitian solver otherwise.
        double max_imag = 0.0;
        for (const auto& tl : chain.t) max_imag = std::max(max_imag, std::abs(tl.imag()));
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
        if (max_imag > 1e-10)
            throw UsageError("tb_localization_length: complex hoppings unsupported here");
        for (long i = 0; i < N; ++i) {
            H(i, i) = chain.W[static_cast<std::size_t>(i)];
            for (int l = 1; l <= chain.l_max; ++l) {
                if (i + l >= N) break;
                const double tl = chain.hopping(l).real();
                H(i, i + l) = tl;
                H(i + l, i) = chain.hopping(-l).real();
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        if (es.info() != Eigen::Success)
            throw NumericalError("tb_localization_length: eigensolver failed");
        // Median decay length over the eigenstates nearest the target energy.
        std::vector<std::pair<double, long>> order;
        for (long i = 0; i < N; ++i)
            order.emplace_back(std::abs(es.eigenvalues()(i) - energy), i);
        std::sort(order.begin(), order.end());
        const int n_probe = static_cast<int>(std::min<long>(9, N));
        std::vector<double> ells, r2s;
        for (int p = 0; p < n_probe; ++p) {
            const long col = order[static_cast<std::size_t>(p)].second;
            std::vector<double> absu(static_cast<std::size_t>(N));
            for (long i = 0; i < N; ++i)
                absu[static_cast<std::size_t>(i)] = std::abs(es.eigenvectors()(i, col));
            DecayFit f = fit_amplitude_decay(absu, chain.n_min);
            if (f.ell > 0.0) {
                ells.push_back(f.ell);
                r2s.push_back(f.r2);
            } else {
                ells.push_back(std::numeric_limits<double>::infinity());
                r2s.push_back(f.r2);
            }
        }
        std::sort(ells.begin(), ells.end());
        std::sort(r2s.begin(), r2s.end());
        const double med_ell = ells[ells.size() / 2];
        const double med_r2 = r2s[r2s.size() / 2];
        if (!std::isfinite(med_ell) || med_r2 < 0.5)
            throw ExtendedStateError(
                "tb_localization_length: no exponential decay (extended states)");
        TbLocalization out;
        out.ell = med_ell;
        out.r2 = med_r2;
        return out;
    }

    // Nearest-neighbour transfer matrix: u_{n+1} = ((E - W_n)/t1) u_n - u_{n-1}.
    const double t1 = chain.hopping(1).real();
    if (t1 == 0.0) throw UsageError("tb_localization_length: zero NN hopping");
    double trunc = 0.0;
    for (int l = 2; l <= chain.l_max; ++l)
        trunc += std::norm(chain.hopping(l)) + std::norm(chain.hopping(-l));
    double u_prev = 0.0, u = 1.0;
    KahanSum log_growth;
    long count = 0;
    for (long i = 0; i < N; ++i) {
        const double W = chain.W[static_cast<std::size_t>(i)];
        double u_next = ((energy - W) / t1) * u - u_prev;
        const double norm = std::hypot(u, u_next);
        if (norm > 0.0) {
            log_growth.add(std::log(norm));
            u_next /= norm;
            u /= norm;
            ++count;
        }
        u_prev = u;
        u = u_next;
    }
    const double gamma = log_growth.value() / static_cast<double>(count);
    TbLocalization out;
    out.truncation_error = trunc;
    if (gamma < 5.0 / static_cast<double>(N))
        throw ExtendedStateError("tb_localization_length: transfer matrix shows no decay");
    out.ell = 1.0 / gamma;
    out.r2 = 1.0;
    return out;
}

} // namespace rotorlab::anderson
