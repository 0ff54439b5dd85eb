#ifndef PEIFE_PARAREAL_HPP
#define PEIFE_PARAREAL_HPP

#include <chrono>

#include "peife/eife.hpp"
#include "peife/problems.hpp"
#include "peife/thread_pool.hpp"

namespace peife {

/*
 * Parareal over N coarse intervals of M fine substeps each:
 *
 *   U^{n+1,(0)}   = G(U^{n,(0)})                                (predictor)
 *   U^{n+1,(k+1)} = G(U^{n,(k+1)}) + F^M(U^{n,(k)}) - G(U^{n,(k)})
 *
 * with a p-stage coarse propagator G (step T/N) and a q-stage fine
 * propagator F (step T/(N*M)), p <= q. The N fine sweeps of an iteration are
 * independent and run on a worker pool; the correction is sequential. The
 * update is evaluated as (G_new - G_old) + F so that once two consecutive
 * iterates of a checkpoint are bitwise equal the correction cancels exactly
 * and the checkpoint locks onto the sequential fine trajectory.
 */
struct PararealRun {
    int n_coarse = 4;      // N
    int m_fine = 1;        // M substeps per coarse interval
    int coarse_stages = 2; // p
    int fine_stages = 2;   // q
    int k_max = 4;         // iteration budget
    double tol = 0.0;      // increment tolerance (inf-norm over checkpoints), 0 disables
    int workers = 0;       // 0 = hardware concurrency
    bool record_snapshots = false;

    void validate() const {
        if (n_coarse < 1 || m_fine < 1) throw std::invalid_argument("PararealRun: requires N >= 1, M >= 1");
        if (coarse_stages < 1 || coarse_stages > fine_stages)
            throw std::invalid_argument("PararealRun: requires 1 <= p <= q");
        if (k_max < 0 || tol < 0.0) throw std::invalid_argument("PararealRun: requires k_max >= 0, tol >= 0");
        if (k_max == 0 && tol == 0.0)
            throw std::invalid_argument("PararealRun: iteration budget and tolerance cannot both be zero");
    }
};

struct PararealIteration {
    int k = 0;
    double increment_inf = 0.0; // max_n ||U^{n,(k)} - U^{n,(k-1)}||_inf, NaN for k = 0
    double fine_seconds = 0.0;
    double correction_seconds = 0.0;
    SpectralField terminal;                // U^{N,(k)}
    std::vector<SpectralField> snapshots;  // all N+1 checkpoints when recording
};

struct PararealResult {
    std::vector<SpectralField> checkpoints; // final U^{n}, n = 0..N
    std::vector<PararealIteration> history; // entry per k = 0..iterations
    int iterations = 0;                     // corrections performed
    bool tol_reached = false;
};

namespace detail {

inline double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

} // namespace detail

struct PararealPropagators {
    std::shared_ptr<const SpectralBasis> basis;
    EifePropagator coarse;
    EifePropagator fine;
    double coarse_dt;
    double fine_dt;
};

inline PararealPropagators make_propagators(const ProblemSpec& prob,
                                            std::shared_ptr<const SpectralBasis> basis,
                                            const PararealRun& run, const QuadratureRule& rule,
                                            SourceMode mode = SourceMode::l2_projection) {
    run.validate();
    const double coarse_dt = prob.duration / run.n_coarse;
    const double fine_dt = prob.duration / double(std::int64_t(run.n_coarse) * run.m_fine);
    return PararealPropagators{
        basis,
        EifePropagator(basis, StageNodes::uniform(run.coarse_stages), coarse_dt, prob.source, rule, mode),
        EifePropagator(basis, StageNodes::uniform(run.fine_stages), fine_dt, prob.source, rule, mode),
        coarse_dt, fine_dt};
}

/// Reference trajectory: the fine propagator applied sequentially over all
/// N*M steps, recorded at every coarse checkpoint. Uses the same chained
/// call pattern as the parallel fine sweeps, so a locked Parareal checkpoint
/// reproduces it bit for bit.
inline std::vector<SpectralField> sequential_fine_reference(const ProblemSpec& prob,
                                                            const PararealPropagators& props,
                                                            const PararealRun& run,
                                                            const QuadratureRule& rule) {
    std::vector<SpectralField> u;
    u.reserve(std::size_t(run.n_coarse) + 1);
    u.push_back(project_initial(*props.basis, prob.initial, rule));
    for (int n = 0; n < run.n_coarse; ++n)
        u.push_back(props.fine.integrate(u.back(), prob.t0, std::int64_t(n) * run.m_fine, run.m_fine));
    return u;
}

inline PararealResult parareal_solve(const ProblemSpec& prob, const PararealPropagators& props,
                                     const PararealRun& run, const QuadratureRule& rule) {
    run.validate();
    const int N = run.n_coarse;
    const double t0 = prob.t0;
    const double DT = props.coarse_dt;

    PararealResult res;
    std::vector<SpectralField> u(std::size_t(N) + 1);
    u[0] = project_initial(*props.basis, prob.initial, rule);

    double tick = detail::now_seconds();
    for (int n = 0; n < N; ++n) u[std::size_t(n) + 1] = props.coarse.step(u[std::size_t(n)], t0 + n * DT);
    {
        PararealIteration it0;
        it0.k = 0;
        it0.increment_inf = std::numeric_limits<double>::quiet_NaN();
        it0.correction_seconds = detail::now_seconds() - tick;
        it0.terminal = u[std::size_t(N)];
        if (run.record_snapshots) it0.snapshots = u;
        res.history.push_back(std::move(it0));
    }

    std::vector<SpectralField> fine_sweep(std::size_t(N) + 1);
    for (int k = 1; k <= run.k_max; ++k) {
        PararealIteration it;
        it.k = k;

        tick = detail::now_seconds();
        try {
            fork_join(N, run.workers, [&](int n) {
                fine_sweep[std::size_t(n) + 1] =
                    props.fine.integrate(u[std::size_t(n)], t0, std::int64_t(n) * run.m_fine, run.m_fine);
            });
        } catch (const TaskFailure& e) {
            throw std::runtime_error("parareal: fine sweep failed on interval " +
                                     std::to_string(e.task_index) + ": " + e.what());
        }
        it.fine_seconds = detail::now_seconds() - tick;

        tick = detail::now_seconds();
        std::vector<SpectralField> next(std::size_t(N) + 1);
        next[0] = u[0];
        double increment = 0.0;
        for (int n = 0; n < N; ++n) {
            const SpectralField g_new = props.coarse.step(next[std::size_t(n)], t0 + n * DT);
            const SpectralField g_old = props.coarse.step(u[std::size_t(n)], t0 + n * DT);
            SpectralField& target = next[std::size_t(n) + 1];
            target = SpectralField{g_new.grid, std::vector<double>(g_new.coeffs.size())};
            const auto& fbar = fine_sweep[std::size_t(n) + 1].coeffs;
            for (std::size_t i = 0; i < target.coeffs.size(); ++i)
                target.coeffs[i] = (g_new.coeffs[i] - g_old.coeffs[i]) + fbar[i];
            increment = std::max(increment, inf_norm_diff(target.coeffs, u[std::size_t(n) + 1].coeffs));
        }
        u = std::move(next);
        it.correction_seconds = detail::now_seconds() - tick;
        it.increment_inf = increment;
        it.terminal = u[std::size_t(N)];
        if (run.record_snapshots) it.snapshots = u;
        res.history.push_back(std::move(it));
        res.iterations = k;

        if (run.tol > 0.0 && increment <= run.tol) {
            res.tol_reached = true;
            break;
        }
    }
    res.checkpoints = std::move(u);
    return res;
}

/// Convenience entry point building the basis and propagators from a grid.
inline PararealResult parareal_solve(const ProblemSpec& prob, const TensorGrid& grid,
                                     const PararealRun& run,
                                     const QuadratureRule& rule = QuadratureRule::gauss_legendre(3)) {
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(grid, prob.diffusion));
    return parareal_solve(prob, make_propagators(prob, basis, run, rule), run, rule);
}

} // namespace peife

#endif
