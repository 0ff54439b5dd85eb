#ifndef PEIFE_GRID_HPP
#define PEIFE_GRID_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace peife {

inline constexpr int max_dim = 3;

using SpaceFn = std::function<double(std::span<const double>)>;
using SpaceTimeFn = std::function<double(double, std::span<const double>)>;

/// Uniform tensor-product partition of a rectangular box. Only interior
/// nodes are stored; boundary values are identically zero (homogeneous
/// Dirichlet), so the unknown count per direction is n[i] and the spacing
/// is h[i] = (hi-lo)/(n[i]+1).
struct TensorGrid {
    int dim = 1;
    std::array<double, max_dim> lo{};
    std::array<double, max_dim> hi{};
    std::array<int, max_dim> n{};    // interior nodes per direction
    std::array<double, max_dim> h{}; // mesh spacing per direction

    static TensorGrid make(std::span<const double> lo_in,
                           std::span<const double> hi_in,
                           std::span<const int> interior) {
        if (interior.empty() || interior.size() > max_dim ||
            lo_in.size() != interior.size() || hi_in.size() != interior.size())
            throw std::invalid_argument("TensorGrid: dimension must be 1..3");
        TensorGrid g;
        g.dim = static_cast<int>(interior.size());
        std::size_t total = 1;
        for (int i = 0; i < g.dim; ++i) {
            if (!(hi_in[i] > lo_in[i]))
                throw std::invalid_argument("TensorGrid: requires hi > lo");
            if (interior[i] < 1)
                throw std::invalid_argument("TensorGrid: requires n >= 1 interior nodes");
            g.lo[i] = lo_in[i];
            g.hi[i] = hi_in[i];
            g.n[i] = interior[i];
            g.h[i] = (hi_in[i] - lo_in[i]) / (interior[i] + 1);
            if (total > (std::size_t(1) << 40) / std::size_t(interior[i]))
                throw std::invalid_argument("TensorGrid: node count overflows addressable memory");
            total *= std::size_t(interior[i]);
        }
        return g;
    }

    /// Grid with `cells[i]` uniform cells per direction (interior nodes = cells-1).
    static TensorGrid from_cells(std::span<const double> lo_in,
                                 std::span<const double> hi_in,
                                 std::span<const int> cells) {
        std::vector<int> interior(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i] < 2)
                throw std::invalid_argument("TensorGrid: requires >= 2 cells per direction");
            interior[i] = cells[i] - 1;
        }
        return make(lo_in, hi_in, interior);
    }

    std::size_t size() const {
        std::size_t total = 1;
        for (int i = 0; i < dim; ++i) total *= std::size_t(n[i]);
        return total;
    }

    int cells(int axis) const { return n[axis] + 1; }

    /// Coordinate of interior node j (0-based) along `axis`.
    double node(int axis, int j) const { return lo[axis] + (j + 1) * h[axis]; }

    bool operator==(const TensorGrid& o) const {
        if (dim != o.dim) return false;
        for (int i = 0; i < dim; ++i)
            if (lo[i] != o.lo[i] || hi[i] != o.hi[i] || n[i] != o.n[i]) return false;
        return true;
    }
};

/// Coefficients of a V_h function in the nodal (hat) basis, lexicographic
/// with direction 0 fastest.
struct NodalField {
    TensorGrid grid;
    std::vector<double> values;

    static NodalField zeros(const TensorGrid& g) { return {g, std::vector<double>(g.size(), 0.0)}; }
};

/// Coefficients in the orthogonal sine eigenbasis, same ordering as NodalField.
struct SpectralField {
    TensorGrid grid;
    std::vector<double> coeffs;

    static SpectralField zeros(const TensorGrid& g) { return {g, std::vector<double>(g.size(), 0.0)}; }
};

inline double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double inf_norm_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Gauss-Legendre rule on the reference interval [0,1]; exact for
/// polynomials of degree <= 2*q_pts-1, weights summing to one.
struct QuadratureRule {
    int q_pts = 3;
    std::vector<double> abscissae;
    std::vector<double> weights;

    static QuadratureRule gauss_legendre(int q) {
        if (q < 1 || q > 32)
            throw std::invalid_argument("QuadratureRule: q_pts must be in 1..32");
        QuadratureRule r;
        r.q_pts = q;
        r.abscissae.resize(q);
        r.weights.resize(q);
        // Newton iteration on P_q over [-1,1], then map to [0,1].
        for (int k = 0; k < q; ++k) {
            long double x = std::cos(M_PI * (k + 0.75L) / (q + 0.5L));
            for (int it = 0; it < 100; ++it) {
                long double p0 = 1.0L, p1 = x;
                for (int j = 2; j <= q; ++j) {
                    long double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                long double dp = q * (x * p1 - p0) / (x * x - 1.0L);
                long double dx = p1 / dp;
                x -= dx;
                if (std::abs((double)dx) < 1e-19) break;
            }
            long double p0 = 1.0L, p1 = x;
            for (int j = 2; j <= q; ++j) {
                long double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            long double dp = q * (x * p1 - p0) / (x * x - 1.0L);
            long double w = 2.0L / ((1.0L - x * x) * dp * dp);
            r.abscissae[q - 1 - k] = double((1.0L + x) / 2.0L);
            r.weights[q - 1 - k] = double(w / 2.0L);
        }
        return r;
    }
};

} // namespace peife

#endif
