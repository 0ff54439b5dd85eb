#ifndef PEIFE_EXPERIMENTS_HPP
#define PEIFE_EXPERIMENTS_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "peife/parareal.hpp"

namespace peife {

/// One experiment description: problem, scheme, refinement axes, run knobs.
struct ExperimentConfig {
    std::string problem = "ex1d";
    double alpha = 0.01; // oscillating only
    double freq = 1.0;   // oscillating only

    std::string study = "single-run"; // spatial | temporal | parareal-trace | single-run | perf
    std::string method = "peife";     // eife | peife
    int stages = 2;                   // s (eife)
    int p = 2, q = 2;                 // peife propagator stages

    std::vector<std::vector<int>> grids; // cells per direction, one entry per level
    int n_coarse = 4;                    // N (peife)
    std::vector<int> m_fine = {2};       // M per level (peife temporal axis)
    std::vector<int> nt = {8};           // N_T per level (eife temporal axis)

    int k_max = 4;
    double tol = 0.0;
    int workers = 0; // 0 = env PEIFE_WORKERS, then hardware
    int quad_points = 3;
    std::string outdir = "out";
    std::vector<double> times;        // snapshot times
    std::string reference = "exact";  // exact | self
    int perf_repeats = 2;
    bool record_snapshots = false;

    SourceMode source_mode = SourceMode::l2_projection;
};

struct ResultRow {
    std::string method_tag; // EIFE-s2, PEIFE-p2q3
    std::string nt_label;   // "8" or "4x2"
    std::string grid_label; // "64" or "64x32"
    double l2 = 0.0;
    double linf = 0.0;
    double rate = std::numeric_limits<double>::quiet_NaN(); // NaN on the first row
    double seconds = 0.0;
};

struct TraceRow {
    int k = 0;
    double l2_exact = std::numeric_limits<double>::quiet_NaN();
    double linf_exact = std::numeric_limits<double>::quiet_NaN();
    double l2_fine = 0.0;
    double linf_fine = 0.0;
    bool at_plateau = false;
};

struct PerfRow {
    std::string grid_label;
    std::size_t nodes = 0;
    double seconds_per_iter = 0.0;
    double growth = std::numeric_limits<double>::quiet_NaN(); // empty on the first row
};

namespace detail {

inline std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4e", v);
    return buf;
}

inline std::string format_rate(double r) {
    if (std::isnan(r)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", r);
    return buf;
}

inline std::string grid_label(std::span<const int> cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(cells[i]);
    }
    return s;
}

} // namespace detail

/// Convergence rate under one refinement halving, the tables' statistic.
inline double convergence_rate(double coarse_error, double fine_error) {
    return std::log2(coarse_error / fine_error);
}

inline int resolve_workers(const ExperimentConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    if (const char* env = std::getenv("PEIFE_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return default_worker_count();
}

inline ProblemSpec config_problem(const ExperimentConfig& cfg) {
    return builtin(cfg.problem, cfg.alpha, cfg.freq);
}

inline std::string method_tag(const ExperimentConfig& cfg) {
    if (cfg.method == "eife") return "EIFE-s" + std::to_string(cfg.stages);
    return "PEIFE-p" + std::to_string(cfg.p) + "q" + std::to_string(cfg.q);
}

namespace detail {

struct SolveOutcome {
    double l2 = 0.0;
    double linf = 0.0;
    double seconds = 0.0;
    NodalField nodal{TensorGrid{}, {}};
};

/// Runs the configured scheme once on `cells` with the given temporal
/// resolution and measures terminal-time errors against `ref` (the exact
/// solution or a precomputed reference field).
template <class RefFn>
SolveOutcome solve_once(const ExperimentConfig& cfg, const ProblemSpec& prob,
                        std::span<const int> cells, int nt_or_m, RefFn&& ref_at_T) {
    const TensorGrid grid = prob.grid_from_cells(cells);
    const QuadratureRule rule = QuadratureRule::gauss_legendre(cfg.quad_points);
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(grid, prob.diffusion));

    SolveOutcome out;
    const double start = now_seconds();
    SpectralField terminal{grid, {}};
    if (cfg.method == "eife") {
        const int nt = nt_or_m;
        EifePropagator prop(basis, StageNodes::uniform(cfg.stages), prob.duration / nt, prob.source, rule,
                            cfg.source_mode);
        terminal = prop.integrate(project_initial(*basis, prob.initial, rule), prob.t0, 0, nt);
    } else {
        PararealRun run;
        run.n_coarse = cfg.n_coarse;
        run.m_fine = nt_or_m;
        run.coarse_stages = cfg.p;
        run.fine_stages = cfg.q;
        run.k_max = cfg.k_max;
        run.tol = cfg.tol;
        run.workers = resolve_workers(cfg);
        auto props = make_propagators(prob, basis, run, rule, cfg.source_mode);
        terminal = parareal_solve(prob, props, run, rule).checkpoints.back();
    }
    out.seconds = now_seconds() - start;
    out.nodal = dst_backward(*basis, terminal);
    const auto exact = ref_at_T(grid);
    out.l2 = l2_error(grid, out.nodal, exact, rule);
    out.linf = linf_error(out.nodal, exact);
    return out;
}

} // namespace detail

/// Spatial or temporal refinement study; errors at the terminal time and
/// log2 rates between consecutive levels.
inline std::vector<ResultRow> run_convergence_study(const ExperimentConfig& cfg) {
    const ProblemSpec prob = config_problem(cfg);
    const bool spatial = cfg.study == "spatial";
    if (!spatial && cfg.study != "temporal")
        throw std::invalid_argument("run_convergence_study: study must be spatial or temporal");

    std::vector<std::vector<int>> levels_grid;
    std::vector<int> levels_nt;
    if (spatial) {
        if (cfg.grids.size() < 1) throw std::invalid_argument("spatial study: needs a grid list");
        levels_grid = cfg.grids;
        for (std::size_t l = 1; l < levels_grid.size(); ++l)
            for (std::size_t i = 0; i < levels_grid[l].size(); ++i)
                if (levels_grid[l][i] <= levels_grid[l - 1][i])
                    throw std::invalid_argument("spatial study: grid list must be strictly increasing");
        const int fixed = cfg.method == "eife" ? cfg.nt.at(0) : cfg.m_fine.at(0);
        levels_nt.assign(levels_grid.size(), fixed);
    } else {
        if (cfg.grids.size() != 1) throw std::invalid_argument("temporal study: needs exactly one grid");
        const auto& steps = cfg.method == "eife" ? cfg.nt : cfg.m_fine;
        if (steps.size() < 1) throw std::invalid_argument("temporal study: needs a step list");
        for (std::size_t l = 1; l < steps.size(); ++l)
            if (steps[l] <= steps[l - 1])
                throw std::invalid_argument("temporal study: step list must be strictly increasing");
        levels_nt = steps;
        levels_grid.assign(steps.size(), cfg.grids[0]);
    }

    // reference: exact solution, or a temporally over-resolved self reference
    std::optional<NodalField> self_ref;
    QuadratureRule rule = QuadratureRule::gauss_legendre(cfg.quad_points);
    if (!prob.has_exact() || cfg.reference == "self") {
        if (cfg.reference != "self")
            throw std::invalid_argument("run_convergence_study: problem '" + prob.label +
                                        "' has no exact solution; use reference=\"self\"");
        if (spatial)
            throw std::invalid_argument("run_convergence_study: self reference supports the temporal axis only");
        const TensorGrid grid = prob.grid_from_cells(levels_grid[0]);
        auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(grid, prob.diffusion));
        const int nt_ref = 8 * levels_nt.back() * (cfg.method == "eife" ? 1 : cfg.n_coarse);
        EifePropagator fine(basis, StageNodes::uniform(cfg.method == "eife" ? cfg.stages : cfg.q),
                            prob.duration / nt_ref, prob.source, rule, cfg.source_mode);
        self_ref = dst_backward(*basis,
                                fine.integrate(project_initial(*basis, prob.initial, rule), prob.t0, 0, nt_ref));
    }

    const double T_end = prob.t0 + prob.duration;
    auto ref_at_T = [&](const TensorGrid&) -> SpaceFn {
        if (self_ref) {
            const NodalField& r = *self_ref;
            // self reference lives on the same grid: compare nodally via interpolant values
            const TensorGrid g = r.grid;
            return [g, vals = r.values](std::span<const double> x) {
                // multilinear evaluation of the reference field
                double acc = 0.0;
                int base[max_dim];
                double frac[max_dim];
                for (int i = 0; i < g.dim; ++i) {
                    double s = (x[i] - g.lo[i]) / g.h[i]; // cell coordinate
                    int cell = int(std::floor(s));
                    cell = std::min(std::max(cell, 0), g.n[i]);
                    base[i] = cell - 1;
                    frac[i] = s - cell;
                }
                for (int corner = 0; corner < (1 << g.dim); ++corner) {
                    double w = 1.0;
                    std::size_t flat = 0, stride = 1;
                    bool inside = true;
                    for (int i = 0; i < g.dim; ++i) {
                        const int bit = (corner >> i) & 1;
                        const int node = base[i] + bit;
                        w *= bit ? frac[i] : 1.0 - frac[i];
                        if (node < 0 || node >= g.n[i]) {
                            inside = false;
                            break;
                        }
                        flat += stride * std::size_t(node);
                        stride *= std::size_t(g.n[i]);
                    }
                    if (inside) acc += w * vals[flat];
                }
                return acc;
            };
        }
        return prob.exact_at(T_end);
    };

    std::vector<ResultRow> rows;
    for (std::size_t l = 0; l < levels_grid.size(); ++l) {
        auto out = detail::solve_once(cfg, prob, levels_grid[l], levels_nt[l], ref_at_T);
        ResultRow row;
        row.method_tag = method_tag(cfg);
        row.grid_label = detail::grid_label(levels_grid[l]);
        row.nt_label = cfg.method == "eife" ? std::to_string(levels_nt[l])
                                            : std::to_string(cfg.n_coarse) + "x" + std::to_string(levels_nt[l]);
        row.l2 = out.l2;
        row.linf = out.linf;
        row.seconds = out.seconds;
        if (l > 0) row.rate = convergence_rate(rows.back().l2, out.l2);
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Error-versus-iteration curves for one Parareal run, against the exact
/// solution (when available) and the sequential fine reference. Flags the
/// first iteration within 1% of the sequential-fine plateau.
inline std::vector<TraceRow> run_parareal_trace(const ExperimentConfig& cfg) {
    const ProblemSpec prob = config_problem(cfg);
    if (cfg.grids.size() != 1) throw std::invalid_argument("parareal-trace: needs exactly one grid");
    const TensorGrid grid = prob.grid_from_cells(cfg.grids[0]);
    const QuadratureRule rule = QuadratureRule::gauss_legendre(cfg.quad_points);
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(grid, prob.diffusion));

    PararealRun run;
    run.n_coarse = cfg.n_coarse;
    run.m_fine = cfg.m_fine.at(0);
    run.coarse_stages = cfg.p;
    run.fine_stages = cfg.q;
    run.k_max = cfg.k_max;
    run.tol = cfg.tol;
    run.workers = resolve_workers(cfg);
    run.record_snapshots = cfg.record_snapshots;
    auto props = make_propagators(prob, basis, run, rule, cfg.source_mode);

    const auto fine_ref = sequential_fine_reference(prob, props, run, rule);
    const NodalField fine_nodal = dst_backward(*basis, fine_ref.back());
    const double T_end = prob.t0 + prob.duration;

    double fine_l2_exact = std::numeric_limits<double>::quiet_NaN();
    if (prob.has_exact()) fine_l2_exact = l2_error(grid, fine_nodal, prob.exact_at(T_end), rule);
    const double fine_scale = l2_error(
        grid, fine_nodal, [](std::span<const double>) { return 0.0; }, rule);

    const auto res = parareal_solve(prob, props, run, rule);

    std::vector<TraceRow> rows;
    for (const auto& it : res.history) {
        TraceRow row;
        row.k = it.k;
        const NodalField nodal = dst_backward(*basis, it.terminal);
        if (prob.has_exact()) {
            row.l2_exact = l2_error(grid, nodal, prob.exact_at(T_end), rule);
            row.linf_exact = linf_error(nodal, prob.exact_at(T_end));
        }
        NodalField diff = nodal;
        for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= fine_nodal.values[i];
        row.l2_fine = l2_error(
            grid, diff, [](std::span<const double>) { return 0.0; }, rule);
        row.linf_fine = inf_norm(diff.values);
        row.at_plateau = prob.has_exact() ? row.l2_exact <= 1.01 * fine_l2_exact
                                          : row.l2_fine <= 0.01 * fine_scale;
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Mean wall seconds per Parareal iteration across a grid refinement list;
/// growth factor log(t2/t1)/log(nodes2/nodes1) between consecutive levels.
inline double perf_growth_factor(double t_coarse, double t_fine, double nodes_coarse, double nodes_fine) {
    return std::log(t_fine / t_coarse) / std::log(nodes_fine / nodes_coarse);
}

inline std::vector<PerfRow> run_perf_growth(const ExperimentConfig& cfg) {
    const ProblemSpec prob = config_problem(cfg);
    if (cfg.grids.size() < 1) throw std::invalid_argument("perf study: needs a grid list");
    const QuadratureRule rule = QuadratureRule::gauss_legendre(cfg.quad_points);

    std::vector<PerfRow> rows;
    for (const auto& cells : cfg.grids) {
        const TensorGrid grid = prob.grid_from_cells(cells);
        auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(grid, prob.diffusion));
        PararealRun run;
        run.n_coarse = cfg.n_coarse;
        run.m_fine = cfg.m_fine.at(0);
        run.coarse_stages = cfg.p;
        run.fine_stages = cfg.q;
        run.k_max = std::max(cfg.k_max, 1);
        run.workers = resolve_workers(cfg);
        auto props = make_propagators(prob, basis, run, rule, cfg.source_mode);

        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < std::max(cfg.perf_repeats, 1); ++r) {
            const auto res = parareal_solve(prob, props, run, rule);
            double total = 0.0;
            int iters = 0;
            for (const auto& it : res.history) {
                if (it.k == 0) continue;
                total += it.fine_seconds + it.correction_seconds;
                ++iters;
            }
            best = std::min(best, total / std::max(iters, 1));
        }
        PerfRow row;
        row.grid_label = detail::grid_label(cells);
        row.nodes = grid.size();
        row.seconds_per_iter = best;
        if (!rows.empty())
            row.growth = perf_growth_factor(rows.back().seconds_per_iter, best, double(rows.back().nodes),
                                            double(row.nodes));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Nodal snapshot fields at the requested times (nearest step of the fine
/// propagator; t must lie in [t0, t0+T]).
inline std::vector<std::pair<double, NodalField>> snapshot_fields(const ExperimentConfig& cfg) {
    const ProblemSpec prob = config_problem(cfg);
    if (cfg.grids.size() != 1) throw std::invalid_argument("snapshots: needs exactly one grid");
    if (cfg.times.empty()) throw std::invalid_argument("snapshots: needs at least one time");
    const TensorGrid grid = prob.grid_from_cells(cfg.grids[0]);
    const QuadratureRule rule = QuadratureRule::gauss_legendre(cfg.quad_points);
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(grid, prob.diffusion));

    const int nt = cfg.method == "eife" ? cfg.nt.at(0) : cfg.n_coarse * cfg.m_fine.at(0);
    const double dt = prob.duration / nt;
    const int stages = cfg.method == "eife" ? cfg.stages : cfg.q;
    EifePropagator prop(basis, StageNodes::uniform(stages), dt, prob.source, rule, cfg.source_mode);

    std::vector<std::int64_t> target_steps;
    for (double t : cfg.times) {
        if (t < prob.t0 - 1e-12 || t > prob.t0 + prob.duration + 1e-12)
            throw std::invalid_argument("snapshots: requested time outside [t0, t0+T]");
        target_steps.push_back(std::llround((t - prob.t0) / dt));
    }

    std::vector<std::pair<double, NodalField>> out;
    SpectralField state = project_initial(*basis, prob.initial, rule);
    std::int64_t pos = 0;
    for (std::size_t i = 0; i < target_steps.size(); ++i) {
        const std::int64_t target = target_steps[i];
        if (target < pos) throw std::invalid_argument("snapshots: times must be nondecreasing");
        if (target > pos) {
            state = prop.integrate(std::move(state), prob.t0, pos, target - pos);
            pos = target;
        }
        out.emplace_back(prob.t0 + double(pos) * dt, dst_backward(*basis, state));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV emission. Fixed schemas; errors in %.4e (5 significant digits), rates
// in %.2f, blank rate/growth on first rows. Wall-time columns are the only
// nondeterministic content.
// ---------------------------------------------------------------------------

inline void write_convergence_csv(std::ostream& os, std::span<const ResultRow> rows) {
    os << "method,nt,grid,l2_error,linf_error,rate,seconds\n";
    for (const auto& r : rows) {
        char sec[32];
        std::snprintf(sec, sizeof sec, "%.3f", r.seconds);
        os << r.method_tag << ',' << r.nt_label << ',' << r.grid_label << ',' << detail::format_sci(r.l2)
           << ',' << detail::format_sci(r.linf) << ',' << detail::format_rate(r.rate) << ',' << sec << '\n';
    }
}

inline void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows) {
    os << "k,l2_error,linf_error,l2_vs_fine,linf_vs_fine,at_plateau\n";
    for (const auto& r : rows) {
        os << r.k << ',' << (std::isnan(r.l2_exact) ? "" : detail::format_sci(r.l2_exact)) << ','
           << (std::isnan(r.linf_exact) ? "" : detail::format_sci(r.linf_exact)) << ','
           << detail::format_sci(r.l2_fine) << ',' << detail::format_sci(r.linf_fine) << ','
           << (r.at_plateau ? 1 : 0) << '\n';
    }
}

inline void write_perf_csv(std::ostream& os, std::span<const PerfRow> rows) {
    os << "grid,nodes,seconds_per_iter,growth_factor\n";
    for (const auto& r : rows) {
        char sec[32];
        std::snprintf(sec, sizeof sec, "%.4f", r.seconds_per_iter);
        os << r.grid_label << ',' << r.nodes << ',' << sec << ','
           << (std::isnan(r.growth) ? "" : detail::format_rate(r.growth)) << '\n';
    }
}

inline void write_snapshot_csv(std::ostream& os, double t, const NodalField& field) {
    const TensorGrid& g = field.grid;
    os << "t,";
    os << (g.dim == 1 ? "x" : g.dim == 2 ? "x,y" : "x,y,z");
    os << ",value\n";
    char buf[64];
    int idx[max_dim] = {0, 0, 0};
    for (std::size_t k = 0; k < field.values.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", t);
        os << buf;
        for (int i = 0; i < g.dim; ++i) {
            std::snprintf(buf, sizeof buf, ",%.17g", g.node(i, idx[i]));
            os << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g\n", field.values[k]);
        os << buf;
        for (int i = 0; i < g.dim; ++i) {
            if (++idx[i] < g.n[i]) break;
            idx[i] = 0;
        }
    }
}

inline std::filesystem::path ensure_outdir(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.outdir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void emit_snapshots(const ExperimentConfig& cfg) {
    const auto fields = snapshot_fields(cfg);
    const auto dir = ensure_outdir(cfg);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%03zu.csv", i);
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw std::runtime_error("snapshots: cannot write to " + (dir / name).string());
        write_snapshot_csv(os, fields[i].first, fields[i].second);
    }
}

} // namespace peife

#endif
