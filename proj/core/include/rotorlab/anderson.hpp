#pragma once

#include <vector>

#include "rotorlab/classical.hpp"
#include "rotorlab/common.hpp"

namespace rotorlab::anderson {

// Tight-binding chain the Floquet eigenproblem maps onto:
// W_n u_n + sum_{l!=0} t_l u_{n+l} = E u_n, with E = -t_0.
struct TightBindingChain {
    std::vector<double> W;    // site energies, site n = n_min + index
    long n_min = 0;
    std::vector<cplx> t;      // hoppings t_l for l in [-l_max, l_max], slot l + l_max
    int l_max = 0;
    double E = 0.0;           // reference energy -t_0
    Period T = Period::plain(1.0);
    double eps = 0.0;         // quasienergy entering W_n
    double truncated_weight = 0.0; // sum_{|l|>l_max} |t_l|^2 estimate

    cplx hopping(long l) const {
        if (l < -l_max || l > l_max) return {0.0, 0.0};
        return t[static_cast<std::size_t>(l + l_max)];
    }
};

// W_n = tan((eps*T - n^2*T/2)/2). Rational T/(2*pi) is reduced in integer
// arithmetic, so W is exactly periodic for resonant periods. A site whose
// tangent argument comes within 1e-8 of a pole raises PoleError.
std::vector<double> site_energies(const Period& T, double eps, long n_min, long n_max);

// t_l = -(1/2pi) Int e^{il theta} tan(V(theta)/2) dtheta via uniform-grid
// quadrature; requires max|V| < pi (hard failure beyond: the mapping itself
// is singular there).
std::vector<cplx> hoppings(const classical::KickPotential& pot, int l_max, int quadrature_points);

TightBindingChain build_chain(const Period& T, double eps, const classical::KickPotential& pot,
                              long n_sites, int l_max, int quadrature_points);

enum class TbMethod { EigvecDecay, TransferMatrixNN };

struct TbLocalization {
    double ell = 0.0; // amplitude convention: u_n ~ exp(-|n-n0|/ell)
    double r2 = 0.0;
    double truncation_error = 0.0; // transfer-matrix route only
    std::string convention = "amplitude"; // vs the dynamical intensity fit
};

// Localization length from the lattice side. EigvecDecay diagonalises the
// dense chain and fits the decay of eigenvectors with eigenvalue nearest E;
// TransferMatrixNN truncates hoppings to nearest neighbour and returns the
// inverse Lyapunov exponent of the transfer-matrix product.
TbLocalization tb_localization_length(const TightBindingChain& chain, double energy,
                                      TbMethod method);

} // namespace rotorlab::anderson
