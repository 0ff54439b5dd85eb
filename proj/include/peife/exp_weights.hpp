#ifndef PEIFE_EXP_WEIGHTS_HPP
#define PEIFE_EXP_WEIGHTS_HPP

#include <cmath>
#include <limits>

#include "peife/spectral.hpp"

namespace peife {

namespace detail {

inline double factorial(int j) {
    static const std::array<double, 33> table = [] {
        std::array<double, 33> f{};
        f[0] = 1.0;
        for (int i = 1; i < 33; ++i) f[std::size_t(i)] = f[std::size_t(i - 1)] * i;
        return f;
    }();
    return table[std::size_t(j)];
}

/// Taylor series phi_j(z) = sum_m z^m / (m+j)!, truncated at 1e-20 relative.
inline double phi_taylor(int j, double z) {
    double term = 1.0 / factorial(j);
    double acc = term;
    for (int m = 1; m < 400; ++m) {
        term *= z / (m + j);
        acc += term;
        if (std::abs(term) <= 1e-20 * std::abs(acc)) break;
    }
    return acc;
}

/// Upward recurrence phi_{j+1} = (phi_j - 1/j!)/z seeded at phi_0 = e^z.
/// Stable away from z = 0 (each step divides by z).
inline double phi_recurrence(int j, double z) {
    double cur = std::exp(z);
    for (int m = 0; m < j; ++m) cur = (cur - 1.0 / factorial(m)) / z;
    return cur;
}

inline constexpr double phi_branch_point = 8.0;

} // namespace detail

/// phi_0(z) = e^z; phi_j(z) = int_0^1 e^{z(1-th)} th^{j-1}/(j-1)! dth, j >= 1.
/// Only nonpositive arguments arise (the operator spectrum is positive).
inline double phi(int j, double z) {
    if (j < 0) throw std::invalid_argument("phi: order must be >= 0");
    if (z > 0.0) throw std::invalid_argument("phi: defined for z <= 0");
    if (j == 0) return std::exp(z);
    if (-z < detail::phi_branch_point) return detail::phi_taylor(j, z);
    return detail::phi_recurrence(j, z);
}

/// Interpolation nodes c_1 < ... < c_s in [0,1].
struct StageNodes {
    std::vector<double> c;

    int count() const { return int(c.size()); }

    static StageNodes from(std::vector<double> nodes) {
        if (nodes.empty()) throw std::invalid_argument("StageNodes: needs s >= 1");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!(nodes[i] >= 0.0 && nodes[i] <= 1.0))
                throw std::invalid_argument("StageNodes: nodes must lie in [0,1]");
            if (i > 0 && !(nodes[i] - nodes[i - 1] > 1e-10))
                throw std::invalid_argument("StageNodes: nodes must be strictly increasing");
        }
        return {std::move(nodes)};
    }

    /// Default placement: c_i = (i-1)/s, the uniform spacing 1/s starting at 0.
    static StageNodes uniform(int s) {
        if (s < 1) throw std::invalid_argument("StageNodes: needs s >= 1");
        std::vector<double> c(std::size_t(s), 0.0);
        for (int i = 0; i < s; ++i) c[std::size_t(i)] = double(i) / double(s);
        return {std::move(c)};
    }
};

/// Monomial coefficients of the Lagrange polynomials: l_i(th) = sum_j a[i][j] th^j.
inline std::vector<std::vector<double>> lagrange_monomial_matrix(const StageNodes& nodes) {
    const int s = nodes.count();
    std::vector<std::vector<double>> a(std::size_t(s), std::vector<double>(std::size_t(s), 0.0));
    std::vector<double> poly, next;
    for (int i = 0; i < s; ++i) {
        poly.assign(1, 1.0);
        for (int m = 0; m < s; ++m) {
            if (m == i) continue;
            const double denom = nodes.c[std::size_t(i)] - nodes.c[std::size_t(m)];
            next.assign(poly.size() + 1, 0.0);
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k] += poly[k] * (-nodes.c[std::size_t(m)]) / denom;
                next[k + 1] += poly[k] / denom;
            }
            poly.swap(next);
        }
        for (std::size_t k = 0; k < poly.size(); ++k) a[std::size_t(i)][k] = poly[k];
    }
    return a;
}

/// Exponential Runge-Kutta weights b_i(z) = sum_j a[i][j] j! phi_{j+1}(z);
/// at z = 0 these reduce to the Newton-Cotes weights of the node set.
inline std::vector<double> weights_b(const StageNodes& nodes, double z) {
    const int s = nodes.count();
    const auto a = lagrange_monomial_matrix(nodes);
    std::vector<double> ph(std::size_t(s) + 1, 0.0);
    for (int j = 1; j <= s; ++j) ph[std::size_t(j)] = phi(j, z);
    std::vector<double> b(std::size_t(s), 0.0);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            b[std::size_t(i)] += a[std::size_t(i)][std::size_t(j)] * detail::factorial(j) * ph[std::size_t(j) + 1];
    return b;
}

/// Per-step tables over an eigenvalue array: decay E_k = e^{-dt mu_k} and
/// stage weights W[i][k] = b_i(-dt mu_k). Immutable once built; one table is
/// reused for every step of the same size.
struct WeightTable {
    double dt = 0.0;
    StageNodes nodes;
    std::vector<double> decay;
    std::vector<std::vector<double>> stage_weights;
};

inline WeightTable build_weight_table(const StageNodes& nodes, double dt,
                                      std::span<const double> eigenvalues) {
    if (!(dt > 0.0)) throw std::invalid_argument("build_weight_table: requires dt > 0");
    const int s = nodes.count();
    const auto a = lagrange_monomial_matrix(nodes);
    WeightTable t;
    t.dt = dt;
    t.nodes = nodes;
    t.decay.resize(eigenvalues.size());
    t.stage_weights.assign(std::size_t(s), std::vector<double>(eigenvalues.size()));
    double ph[34];
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        const double z = -dt * eigenvalues[k];
        t.decay[k] = std::exp(z);
        if (-z < detail::phi_branch_point) {
            for (int j = 1; j <= s; ++j) ph[j] = detail::phi_taylor(j, z);
        } else {
            double cur = t.decay[k];
            for (int j = 1; j <= s; ++j) {
                cur = (cur - 1.0 / detail::factorial(j - 1)) / z;
                ph[j] = cur;
            }
        }
        for (int i = 0; i < s; ++i) {
            double acc = 0.0;
            for (int j = 0; j < s; ++j) acc += a[std::size_t(i)][std::size_t(j)] * detail::factorial(j) * ph[j + 1];
            t.stage_weights[std::size_t(i)][k] = acc;
        }
    }
    return t;
}

inline WeightTable build_weight_table(const StageNodes& nodes, double dt, const SpectralBasis& basis) {
    return build_weight_table(nodes, dt, std::span<const double>(basis.operator_eig));
}

} // namespace peife

#endif
