#ifndef PEIFE_SPECTRAL_HPP
#define PEIFE_SPECTRAL_HPP

#include "peife/dst.hpp"
#include "peife/fem.hpp"
#include "peife/grid.hpp"

namespace peife {

/// Simultaneous diagonalization of the tensor-product mass and stiffness
/// operators in the sine eigenbasis. Per direction i and mode j (1-based):
///   stiffness eigenvalue kappa = (2D/h)(1 - cos th),
///   mass eigenvalue      m     = (h/6)(4 + 2 cos th),   th = j*pi/(n+1),
/// and the full operator eigenvalue is the Kronecker sum mu_k = sum_i kappa/m.
struct SpectralBasis {
    TensorGrid grid;
    double diffusion = 1.0;
    std::array<std::vector<double>, max_dim> dir_stiffness;
    std::array<std::vector<double>, max_dim> dir_mass;
    std::vector<double> operator_eig; // mu_k, aligned with NodalField ordering
    std::vector<double> mass_prod;    // prod_i m_{i,j_i}
    DstPlan plan;

    static SpectralBasis build(const TensorGrid& grid, double diffusion) {
        if (!(diffusion > 0.0)) throw std::invalid_argument("SpectralBasis: requires D > 0");
        SpectralBasis b;
        b.grid = grid;
        b.diffusion = diffusion;
        b.plan = DstPlan(grid);
        for (int i = 0; i < grid.dim; ++i) {
            const int n = grid.n[i];
            const double h = grid.h[i];
            b.dir_stiffness[i].resize(std::size_t(n));
            b.dir_mass[i].resize(std::size_t(n));
            for (int j = 1; j <= n; ++j) {
                const double th = j * M_PI / (n + 1);
                b.dir_stiffness[i][std::size_t(j - 1)] = (2.0 * diffusion / h) * (1.0 - std::cos(th));
                b.dir_mass[i][std::size_t(j - 1)] = (h / 6.0) * (4.0 + 2.0 * std::cos(th));
            }
        }
        const std::size_t total = grid.size();
        b.operator_eig.resize(total);
        b.mass_prod.resize(total);
        int idx[max_dim] = {0, 0, 0};
        for (std::size_t k = 0; k < total; ++k) {
            double mu = 0.0, mp = 1.0;
            for (int i = 0; i < grid.dim; ++i) {
                mu += b.dir_stiffness[i][std::size_t(idx[i])] / b.dir_mass[i][std::size_t(idx[i])];
                mp *= b.dir_mass[i][std::size_t(idx[i])];
            }
            b.operator_eig[k] = mu;
            b.mass_prod[k] = mp;
            for (int i = 0; i < grid.dim; ++i) {
                if (++idx[i] < grid.n[i]) break;
                idx[i] = 0;
            }
        }
        return b;
    }
};

inline SpectralField dst_forward(const SpectralBasis& basis, const NodalField& field) {
    if (!(field.grid == basis.grid)) throw std::invalid_argument("dst_forward: grid mismatch");
    SpectralField out{basis.grid, field.values};
    basis.plan.forward(out.coeffs);
    return out;
}

inline NodalField dst_backward(const SpectralBasis& basis, const SpectralField& spec) {
    if (!(spec.grid == basis.grid)) throw std::invalid_argument("dst_backward: grid mismatch");
    NodalField out{basis.grid, spec.coeffs};
    basis.plan.backward(out.values);
    return out;
}

/// L2 projection P_h applied to a load vector (f, phi_j): the mass solve is
/// a diagonal divide in the sine basis.
inline SpectralField project_l2(const SpectralBasis& basis, const NodalField& load) {
    SpectralField out = dst_forward(basis, load);
    for (std::size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] /= basis.mass_prod[k];
    return out;
}

} // namespace peife

#endif
