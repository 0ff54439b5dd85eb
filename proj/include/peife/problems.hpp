#ifndef PEIFE_PROBLEMS_HPP
#define PEIFE_PROBLEMS_HPP

#include <optional>
#include <string>

#include "peife/grid.hpp"

namespace peife {

using ExactFn = std::function<double(double, std::span<const double>)>;

/// A parabolic model problem u_t = D lap u + f(t,x) on a box with
/// homogeneous Dirichlet data, over t in [t0, t0 + duration].
struct ProblemSpec {
    int dim = 1;
    std::array<double, max_dim> lo{};
    std::array<double, max_dim> hi{};
    double diffusion = 1.0;
    double t0 = 0.0;
    double duration = 1.0;
    SpaceTimeFn source;
    SpaceFn initial;
    ExactFn exact; // may be empty
    std::string label;

    bool has_exact() const { return bool(exact); }

    TensorGrid grid_from_cells(std::span<const int> cells) const {
        return TensorGrid::from_cells(std::span<const double>(lo.data(), std::size_t(dim)),
                                      std::span<const double>(hi.data(), std::size_t(dim)), cells);
    }

    SpaceFn exact_at(double t) const {
        ExactFn e = exact;
        return [e, t](std::span<const double> x) { return e(t, x); };
    }
};

namespace detail {

// Deterministic sample-point generator (plain LCG, fixed seed).
struct Lcg {
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    double next01() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return double(state >> 11) * (1.0 / 9007199254740992.0);
    }
};

inline void check_compatibility(const ProblemSpec& p) {
    Lcg rng;
    double x[max_dim];
    // exact(t0,.) must reproduce u0 at interior samples
    if (p.has_exact()) {
        for (int s = 0; s < 32; ++s) {
            for (int i = 0; i < p.dim; ++i) x[i] = p.lo[i] + (p.hi[i] - p.lo[i]) * rng.next01();
            std::span<const double> xs(x, std::size_t(p.dim));
            const double a = p.exact(p.t0, xs), b = p.initial(xs);
            if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(b)))
                throw std::invalid_argument("ProblemSpec: exact(t0,.) does not match u0");
        }
    }
    // u0 must vanish on the boundary faces
    for (int face = 0; face < 2 * p.dim; ++face) {
        for (int s = 0; s < 8; ++s) {
            for (int i = 0; i < p.dim; ++i) x[i] = p.lo[i] + (p.hi[i] - p.lo[i]) * rng.next01();
            x[face / 2] = (face % 2) ? p.hi[face / 2] : p.lo[face / 2];
            if (std::abs(p.initial(std::span<const double>(x, std::size_t(p.dim)))) > 1e-12)
                throw std::invalid_argument("ProblemSpec: u0 does not vanish on the boundary");
        }
    }
}

} // namespace detail

inline ProblemSpec ex1d() {
    ProblemSpec p;
    p.dim = 1;
    p.lo = {0.0};
    p.hi = {1.0};
    p.diffusion = 1.0;
    p.duration = 1.0;
    p.label = "ex1d";
    p.source = [](double t, std::span<const double> x) {
        return (2.0 + x[0] * (1.0 - x[0])) * std::exp(t);
    };
    p.initial = [](std::span<const double> x) { return x[0] * (1.0 - x[0]); };
    p.exact = [](double t, std::span<const double> x) { return x[0] * (1.0 - x[0]) * std::exp(t); };
    detail::check_compatibility(p);
    return p;
}

inline ProblemSpec ex2d() {
    ProblemSpec p;
    p.dim = 2;
    p.lo = {0.25, 0.125};
    p.hi = {1.25, 0.625};
    p.diffusion = 1.0;
    p.duration = 0.6;
    p.label = "ex2d";
    auto shape = [](std::span<const double> x) {
        return std::sin(M_PI * (x[0] - 0.25)) * std::sin(2.0 * M_PI * (x[1] - 0.125));
    };
    p.source = [shape](double t, std::span<const double> x) {
        return M_PI * M_PI * std::exp(-4.0 * M_PI * M_PI * t) * shape(x);
    };
    p.initial = [shape](std::span<const double> x) { return shape(x); };
    p.exact = [shape](double t, std::span<const double> x) {
        return std::exp(-4.0 * M_PI * M_PI * t) * shape(x);
    };
    detail::check_compatibility(p);
    return p;
}

inline ProblemSpec ex3d() {
    ProblemSpec p;
    p.dim = 3;
    p.lo = {0.0, 0.125, 0.0};
    p.hi = {0.25, 0.375, 0.25};
    p.diffusion = 0.125;
    p.duration = 0.4;
    p.label = "ex3d";
    auto shape = [](std::span<const double> x) {
        return std::sin(4.0 * M_PI * (x[0] - 0.25)) * std::sin(4.0 * M_PI * (x[1] - 0.125)) *
               std::sin(4.0 * M_PI * (x[2] - 0.5));
    };
    p.source = [shape](double t, std::span<const double> x) {
        return 2.0 * M_PI * M_PI * std::exp(-4.0 * M_PI * M_PI * t) * shape(x);
    };
    p.initial = [shape](std::span<const double> x) { return shape(x); };
    p.exact = [shape](double t, std::span<const double> x) {
        return std::exp(-4.0 * M_PI * M_PI * t) * shape(x);
    };
    detail::check_compatibility(p);
    return p;
}

/// Diffusion with a hat source of half-width w = 0.05 and height 100*sqrt(alpha)
/// whose center oscillates as c(t) = 1/2 + (1/2 - w) sin(2 pi freq t).
/// No closed-form solution.
inline ProblemSpec oscillating(double alpha, double freq) {
    if (!(alpha > 0.0)) throw std::invalid_argument("oscillating: requires alpha > 0");
    ProblemSpec p;
    p.dim = 1;
    p.lo = {0.0};
    p.hi = {1.0};
    p.diffusion = alpha;
    p.duration = 1.0;
    p.label = "oscillating";
    const double w = 0.05;
    const double height = 100.0 * std::sqrt(alpha);
    p.source = [w, height, freq](double t, std::span<const double> x) {
        const double c = 0.5 + (0.5 - w) * std::sin(2.0 * M_PI * freq * t);
        return height * std::max(1.0 - std::abs(c - x[0]) / w, 0.0);
    };
    p.initial = [](std::span<const double> x) { return 4.0 * x[0] * (1.0 - x[0]); };
    detail::check_compatibility(p);
    return p;
}

inline ProblemSpec builtin(const std::string& label, double alpha = 0.01, double freq = 1.0) {
    if (label == "ex1d") return ex1d();
    if (label == "ex2d") return ex2d();
    if (label == "ex3d") return ex3d();
    if (label == "oscillating") return oscillating(alpha, freq);
    throw std::invalid_argument("unknown problem label: " + label);
}

/// Manufactured problem: given analytically consistent u, du/dt and lap u,
/// sets f = u_t - D lap u so that u is the exact solution. Consistency of the
/// supplied derivatives is spot-checked against finite differences of u at a
/// few deterministic sample points.
inline ProblemSpec manufactured(ExactFn u, ExactFn u_t, ExactFn laplacian, double diffusion, int dim,
                                std::span<const double> lo, std::span<const double> hi, double t0,
                                double duration, const std::string& label = "manufactured") {
    if (!(diffusion > 0.0)) throw std::invalid_argument("manufactured: requires D > 0");
    ProblemSpec p;
    p.dim = dim;
    for (int i = 0; i < dim; ++i) {
        p.lo[i] = lo[i];
        p.hi[i] = hi[i];
    }
    p.diffusion = diffusion;
    p.t0 = t0;
    p.duration = duration;
    p.label = label;
    p.exact = u;
    p.initial = [u, t0](std::span<const double> x) { return u(t0, x); };
    p.source = [u_t, laplacian, diffusion](double t, std::span<const double> x) {
        return u_t(t, x) - diffusion * laplacian(t, x);
    };

    // spot-check u_t and lap u against 4th-order finite differences of u
    detail::Lcg rng;
    double x[max_dim];
    for (int s = 0; s < 10; ++s) {
        for (int i = 0; i < dim; ++i)
            x[i] = p.lo[i] + (p.hi[i] - p.lo[i]) * (0.1 + 0.8 * rng.next01());
        const double t = t0 + duration * rng.next01();
        std::span<const double> xs(x, std::size_t(dim));
        const double ht = 1e-3 * std::max(1.0, std::abs(duration));
        auto ut_fd = (8.0 * (u(t + ht, xs) - u(t - ht, xs)) - (u(t + 2 * ht, xs) - u(t - 2 * ht, xs))) /
                     (12.0 * ht);
        double lap_fd = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double hx = 1e-3 * (p.hi[i] - p.lo[i]);
            double xp[max_dim];
            for (int m = 0; m < dim; ++m) xp[m] = x[m];
            auto at = [&](double xi) {
                xp[i] = xi;
                return u(t, std::span<const double>(xp, std::size_t(dim)));
            };
            lap_fd += (-at(x[i] - 2 * hx) + 16 * at(x[i] - hx) - 30 * at(x[i]) + 16 * at(x[i] + hx) -
                       at(x[i] + 2 * hx)) /
                      (12.0 * hx * hx);
        }
        const double scale = std::max({1.0, std::abs(ut_fd), std::abs(lap_fd)});
        if (std::abs(ut_fd - u_t(t, xs)) > 1e-8 * scale ||
            std::abs(lap_fd - laplacian(t, xs)) > 1e-8 * scale)
            throw std::invalid_argument("manufactured: supplied derivatives disagree with u");
    }
    detail::check_compatibility(p);
    return p;
}

} // namespace peife

#endif
