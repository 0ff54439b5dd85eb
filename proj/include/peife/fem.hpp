#ifndef PEIFE_FEM_HPP
#define PEIFE_FEM_HPP

#include <cmath>
#include <cstdio>
#include <utility>

#include "peife/grid.hpp"

namespace peife {

/// Symmetric tridiagonal matrix, interior unknowns only.
struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off; // size diag.size()-1
};

/// 1D linear-FEM matrices on the interior nodes of one grid direction with
/// homogeneous Dirichlet conditions: mass = (h/6)*tridiag(1,4,1),
/// stiffness = (D/h)*tridiag(-1,2,-1). These exist for verification; the
/// production path is purely spectral and never factorizes them.
inline std::pair<Tridiagonal, Tridiagonal>
assemble_1d_matrices(const TensorGrid& grid, int axis, double diffusion) {
    if (axis < 0 || axis >= grid.dim)
        throw std::invalid_argument("assemble_1d_matrices: axis out of range");
    if (!(diffusion > 0.0))
        throw std::invalid_argument("assemble_1d_matrices: requires D > 0");
    const int n = grid.n[axis];
    const double h = grid.h[axis];
    Tridiagonal mass{std::vector<double>(n, 4.0 * h / 6.0), std::vector<double>(n > 1 ? n - 1 : 0, h / 6.0)};
    Tridiagonal stiff{std::vector<double>(n, 2.0 * diffusion / h),
                      std::vector<double>(n > 1 ? n - 1 : 0, -diffusion / h)};
    return {mass, stiff};
}

namespace detail {

inline void decompose_cell(const TensorGrid& g, std::size_t c, int* e) {
    for (int i = 0; i < g.dim; ++i) {
        std::size_t nc = std::size_t(g.cells(i));
        e[i] = int(c % nc);
        c /= nc;
    }
}

inline std::size_t cell_count(const TensorGrid& g) {
    std::size_t total = 1;
    for (int i = 0; i < g.dim; ++i) total *= std::size_t(g.cells(i));
    return total;
}

[[noreturn]] inline void throw_nonfinite(double t, const double* x, int dim) {
    char buf[160];
    if (dim == 1)
        std::snprintf(buf, sizeof buf, "source is not finite at t=%.17g, x=(%.17g)", t, x[0]);
    else if (dim == 2)
        std::snprintf(buf, sizeof buf, "source is not finite at t=%.17g, x=(%.17g, %.17g)", t, x[0], x[1]);
    else
        std::snprintf(buf, sizeof buf, "source is not finite at t=%.17g, x=(%.17g, %.17g, %.17g)", t, x[0],
                      x[1], x[2]);
    throw std::runtime_error(buf);
}

} // namespace detail

/// Load vector (f(t,·), phi_j) for all interior nodes j, assembled cell by
/// cell with the tensor Gauss rule. Deterministic summation order.
template <class F>
NodalField load_vector(const TensorGrid& grid, F&& f, double t, const QuadratureRule& rule) {
    NodalField out = NodalField::zeros(grid);
    const int d = grid.dim;
    const int q = rule.q_pts;
    const std::size_t ncells = detail::cell_count(grid);
    int qidx[max_dim] = {0, 0, 0};
    int e[max_dim] = {0, 0, 0};
    double x[max_dim];
    double cellw = 1.0;
    for (int i = 0; i < d; ++i) cellw *= grid.h[i];

    for (std::size_t c = 0; c < ncells; ++c) {
        detail::decompose_cell(grid, c, e);
        for (int i = 0; i < d; ++i) qidx[i] = 0;
        while (true) {
            double wq = cellw;
            for (int i = 0; i < d; ++i) {
                x[i] = grid.lo[i] + (e[i] + rule.abscissae[qidx[i]]) * grid.h[i];
                wq *= rule.weights[qidx[i]];
            }
            const double fv = f(t, std::span<const double>(x, std::size_t(d)));
            if (!std::isfinite(fv)) detail::throw_nonfinite(t, x, d);
            // scatter to the 2^d corner nodes, skipping boundary corners
            for (int corner = 0; corner < (1 << d); ++corner) {
                double hat = fv * wq;
                std::size_t flat = 0, stride = 1;
                bool inside = true;
                for (int i = 0; i < d; ++i) {
                    const int bit = (corner >> i) & 1;
                    const int node = e[i] - 1 + bit;
                    if (node < 0 || node >= grid.n[i]) {
                        inside = false;
                        break;
                    }
                    const double g = rule.abscissae[qidx[i]];
                    hat *= bit ? g : 1.0 - g;
                    flat += stride * std::size_t(node);
                    stride *= std::size_t(grid.n[i]);
                }
                if (inside) out.values[flat] += hat;
            }
            int i = 0;
            for (; i < d; ++i) {
                if (++qidx[i] < q) break;
                qidx[i] = 0;
            }
            if (i == d) break;
        }
    }
    return out;
}

/// Continuous L2 norm of (multilinear interpolant of `field` - exact), via
/// the same tensor Gauss rule per cell. The interpolant is zero on the
/// domain boundary.
template <class F>
double l2_error(const TensorGrid& grid, const NodalField& field, F&& exact, const QuadratureRule& rule) {
    if (!(field.grid == grid)) throw std::invalid_argument("l2_error: field/grid mismatch");
    const int d = grid.dim;
    const int q = rule.q_pts;
    const std::size_t ncells = detail::cell_count(grid);
    int qidx[max_dim] = {0, 0, 0};
    int e[max_dim] = {0, 0, 0};
    double x[max_dim];
    double corner_val[1 << max_dim];
    double cellw = 1.0;
    for (int i = 0; i < d; ++i) cellw *= grid.h[i];

    double acc = 0.0;
    for (std::size_t c = 0; c < ncells; ++c) {
        detail::decompose_cell(grid, c, e);
        for (int corner = 0; corner < (1 << d); ++corner) {
            std::size_t flat = 0, stride = 1;
            bool inside = true;
            for (int i = 0; i < d; ++i) {
                const int node = e[i] - 1 + ((corner >> i) & 1);
                if (node < 0 || node >= grid.n[i]) {
                    inside = false;
                    break;
                }
                flat += stride * std::size_t(node);
                stride *= std::size_t(grid.n[i]);
            }
            corner_val[corner] = inside ? field.values[flat] : 0.0;
        }
        for (int i = 0; i < d; ++i) qidx[i] = 0;
        while (true) {
            double wq = cellw;
            for (int i = 0; i < d; ++i) {
                x[i] = grid.lo[i] + (e[i] + rule.abscissae[qidx[i]]) * grid.h[i];
                wq *= rule.weights[qidx[i]];
            }
            double uh = 0.0;
            for (int corner = 0; corner < (1 << d); ++corner) {
                double hat = corner_val[corner];
                for (int i = 0; i < d; ++i) {
                    const double g = rule.abscissae[qidx[i]];
                    hat *= ((corner >> i) & 1) ? g : 1.0 - g;
                }
                uh += hat;
            }
            const double diff = uh - exact(std::span<const double>(x, std::size_t(d)));
            acc += wq * diff * diff;
            int i = 0;
            for (; i < d; ++i) {
                if (++qidx[i] < q) break;
                qidx[i] = 0;
            }
            if (i == d) break;
        }
    }
    return std::sqrt(acc);
}

/// Maximum nodal error over interior nodes.
template <class F>
double linf_error(const NodalField& field, F&& exact) {
    const TensorGrid& g = field.grid;
    double x[max_dim];
    int idx[max_dim] = {0, 0, 0};
    double m = 0.0;
    for (std::size_t k = 0; k < field.values.size(); ++k) {
        for (int i = 0; i < g.dim; ++i) x[i] = g.node(i, idx[i]);
        m = std::max(m, std::abs(field.values[k] - exact(std::span<const double>(x, std::size_t(g.dim)))));
        for (int i = 0; i < g.dim; ++i) {
            if (++idx[i] < g.n[i]) break;
            idx[i] = 0;
        }
    }
    return m;
}

} // namespace peife

#endif
