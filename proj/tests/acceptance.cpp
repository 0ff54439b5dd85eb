// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line with the measured numbers.

#include <catch2/catch.hpp>

#include <cstdio>

#include "oracles.hpp"
#include "peife/peife.hpp"

using namespace peife;

namespace {

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("[criterion %2d] %s  %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

double rel_gap(double got, double want) { return std::abs(got - want) / std::abs(want); }

TensorGrid make_grid(const ProblemSpec& prob, std::initializer_list<int> cells) {
    return prob.grid_from_cells(std::span<const int>(cells.begin(), cells.size()));
}

// shared scaled-down 2D configuration used by criteria 6, 7 and 8
struct Scaled2d {
    ProblemSpec prob = ex2d();
    std::shared_ptr<const SpectralBasis> basis;
    QuadratureRule rule = QuadratureRule::gauss_legendre(3);
    PararealRun run; // N=8, M=8, p=2, q=3
    PararealPropagators props;
    std::vector<SpectralField> fine_ref;
    double fine_l2_exact = 0.0;

    Scaled2d()
        : basis(std::make_shared<const SpectralBasis>(
              SpectralBasis::build(prob.grid_from_cells(std::array<int, 2>{256, 128}), prob.diffusion))),
          run{8, 8, 2, 3, 8, 0.0, 2, false},
          props(make_propagators(prob, basis, run, rule)),
          fine_ref(sequential_fine_reference(prob, props, run, rule)) {
        fine_l2_exact = l2_error(basis->grid, dst_backward(*basis, fine_ref.back()),
                                 prob.exact_at(prob.t0 + prob.duration), rule);
    }
};

const Scaled2d& scaled2d() {
    static Scaled2d fixture;
    return fixture;
}

double max_rel_checkpoint_gap(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b) {
    double worst = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        double scale = inf_norm(b[n].coeffs);
        if (scale == 0.0) scale = 1.0;
        worst = std::max(worst, inf_norm_diff(a[n].coeffs, b[n].coeffs) / scale);
    }
    return worst;
}

bool bitwise_equal_checkpoints(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b) {
    for (std::size_t n = 0; n < a.size(); ++n)
        for (std::size_t i = 0; i < a[n].coeffs.size(); ++i)
            if (a[n].coeffs[i] != b[n].coeffs[i]) return false;
    return true;
}

} // namespace

TEST_CASE("criterion 1: stage weights match the defining integrals", "[acceptance]") {
    double worst = 0.0;
    for (int s : {1, 2, 3, 4}) {
        const StageNodes nodes = StageNodes::uniform(s);
        for (int e = 0; e < 200; ++e) {
            const double z = -std::pow(10.0, -8.0 + 14.0 * e / 199.0);
            const auto b = weights_b(nodes, z);
            // integral in sigma = 1 - theta; tail beyond the decay layer < 1e-19
            const double upper = std::min(1.0, 45.0 / std::max(1.0, -z));
            for (int i = 0; i < s; ++i) {
                const double ref = oracles::adaptive_simpson(
                    [&](double sigma) {
                        const double theta = 1.0 - sigma;
                        double l = 1.0;
                        for (int m = 0; m < s; ++m) {
                            if (m == i) continue;
                            l *= (theta - nodes.c[std::size_t(m)]) /
                                 (nodes.c[std::size_t(i)] - nodes.c[std::size_t(m)]);
                        }
                        return std::exp(z * sigma) * l;
                    },
                    0.0, upper, 1e-15);
                worst = std::max(worst, std::abs(b[std::size_t(i)] - ref));
            }
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max |b_i(z) - integral| = %.3e (tol 1e-12), 200 z, s=1..4", worst);
    const bool ok = worst <= 1e-12;
    report(1, ok, buf);
    REQUIRE(ok);
}

TEST_CASE("criterion 2: closed-form eigenvalues match dense eigensolves", "[acceptance]") {
    double worst = 0.0;
    for (int n = 3; n <= 32; ++n) {
        const double lo[] = {0.0}, hi[] = {1.0};
        const int ns[] = {n};
        const TensorGrid g = TensorGrid::make(lo, hi, ns);
        const double D = 1.0;
        const auto basis = SpectralBasis::build(g, D);
        const auto [mass, stiff] = assemble_1d_matrices(g, 0, D);
        const auto ref = oracles::generalized_eigenvalues(stiff, mass);
        for (int j = 0; j < n; ++j)
            worst = std::max(worst, rel_gap(basis.operator_eig[std::size_t(j)], ref[std::size_t(j)]));
    }
    // tensor additivity in 2d and 3d, exact (same summation order as the build)
    bool additive = true;
    {
        const int ns[] = {6, 5, 4};
        const double lo[] = {0.0, 0.0, 0.0}, hi[] = {1.0, 0.5, 0.25};
        const auto basis = SpectralBasis::build(TensorGrid::make(lo, hi, ns), 0.125);
        std::size_t k = 0;
        for (int j2 = 0; j2 < 4; ++j2)
            for (int j1 = 0; j1 < 5; ++j1)
                for (int j0 = 0; j0 < 6; ++j0, ++k) {
                    const double expect =
                        basis.dir_stiffness[0][std::size_t(j0)] / basis.dir_mass[0][std::size_t(j0)] +
                        (basis.dir_stiffness[1][std::size_t(j1)] / basis.dir_mass[1][std::size_t(j1)] +
                         basis.dir_stiffness[2][std::size_t(j2)] / basis.dir_mass[2][std::size_t(j2)]);
                    if (basis.operator_eig[k] != Approx(expect).epsilon(1e-15)) additive = false;
                }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max rel eig gap (n=3..32) = %.3e (tol 1e-12); tensor sums %s", worst,
                  additive ? "exact" : "broken");
    const bool ok = worst <= 1e-12 && additive;
    report(2, ok, buf);
    REQUIRE(ok);
}

TEST_CASE("criterion 3: transform round trip up to 4096 per direction", "[acceptance]") {
    double worst = 0.0;
    auto round_trip = [&](const TensorGrid& g) {
        const auto basis = SpectralBasis::build(g, 1.0);
        oracles::Lcg rng{g.size()};
        NodalField u = NodalField::zeros(g);
        for (double& v : u.values) v = rng.next_sym();
        const auto back = dst_backward(basis, dst_forward(basis, u));
        worst = std::max(worst, inf_norm_diff(back.values, u.values));
    };
    {
        const double lo[] = {0.0}, hi[] = {1.0};
        for (int n : {4095, 4096}) {
            const int ns[] = {n};
            round_trip(TensorGrid::make(lo, hi, ns));
        }
    }
    {
        const double lo[] = {0.0, 0.0}, hi[] = {2.0, 1.0};
        const int ns[] = {1024, 512};
        round_trip(TensorGrid::make(lo, hi, ns));
    }
    {
        const double lo[] = {0.0, 0.0, 0.0}, hi[] = {1.0, 1.0, 1.0};
        const int ns[] = {64, 64, 64};
        round_trip(TensorGrid::make(lo, hi, ns));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max round-trip error = %.3e (tol 1e-13)", worst);
    const bool ok = worst <= 1e-13;
    report(3, ok, buf);
    REQUIRE(ok);
}

TEST_CASE("criterion 4: 1d spatial table reproduction", "[acceptance]") {
    const ProblemSpec prob = ex1d();
    const double want_err[] = {7.3000e-3, 1.8000e-3, 4.5453e-4, 1.1364e-4};
    const double want_rate[] = {2.02, 1.99, 2.00};
    const QuadratureRule rule = QuadratureRule::gauss_legendre(3);
    std::vector<double> errs;
    for (int cells : {8, 16, 32, 64}) {
        const TensorGrid g = make_grid(prob, {cells});
        auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(g, prob.diffusion));
        PararealRun run{4, 256, 3, 3, 4, 0.0, 2, false};
        auto props = make_propagators(prob, basis, run, rule);
        const auto res = parareal_solve(prob, props, run, rule);
        errs.push_back(l2_error(g, dst_backward(*basis, res.checkpoints.back()),
                                prob.exact_at(prob.t0 + prob.duration), rule));
    }
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
        const double ratio = errs[std::size_t(i)] / want_err[i];
        if (ratio > 1.5 || ratio < 1.0 / 1.5) ok = false;
    }
    std::vector<double> rates;
    for (int i = 1; i < 4; ++i) {
        rates.push_back(std::log2(errs[std::size_t(i - 1)] / errs[std::size_t(i)]));
        if (std::abs(rates.back() - want_rate[i - 1]) > 0.15) ok = false;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "PEIFE33 4x256: errors %.4e %.4e %.4e %.4e, rates %.2f %.2f %.2f (table +-0.15, x1.5)",
                  errs[0], errs[1], errs[2], errs[3], rates[0], rates[1], rates[2]);
    report(4, ok, buf);
    REQUIRE(ok);
}

TEST_CASE("criterion 5: 1d temporal table reproduction", "[acceptance]") {
    const ProblemSpec prob = ex1d();
    const TensorGrid g = make_grid(prob, {4096});
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(g, prob.diffusion));
    const QuadratureRule rule = QuadratureRule::gauss_legendre(3);
    auto exact_T = prob.exact_at(prob.t0 + prob.duration);

    auto run_eife = [&](int s, int nt) {
        EifePropagator prop(basis, StageNodes::uniform(s), prob.duration / nt, prob.source, rule);
        const auto out = prop.integrate(project_initial(*basis, prob.initial, rule), prob.t0, 0, nt);
        return l2_error(g, dst_backward(*basis, out), exact_T, rule);
    };

    const double want2[] = {5.2732e-4, 1.0660e-4, 2.3429e-5, 5.4701e-6};
    const double rate2[] = {2.31, 2.19, 2.10};
    const double want3[] = {7.2503e-5, 6.7772e-6, 7.2130e-7, 1.0250e-7};
    const double rate3[] = {3.42, 3.23, 2.81};

    bool ok = true;
    std::vector<double> e2, e3;
    {
        int nt = 8;
        for (int i = 0; i < 4; ++i, nt *= 2) e2.push_back(run_eife(2, nt));
        nt = 4;
        for (int i = 0; i < 4; ++i, nt *= 2) e3.push_back(run_eife(3, nt));
    }
    for (int i = 0; i < 4; ++i) {
        if (rel_gap(e2[std::size_t(i)], want2[i]) > 0.10) ok = false;
        if (rel_gap(e3[std::size_t(i)], want3[i]) > 0.10) ok = false;
    }
    for (int i = 1; i < 4; ++i) {
        if (std::abs(std::log2(e2[std::size_t(i - 1)] / e2[std::size_t(i)]) - rate2[i - 1]) > 0.15) ok = false;
        if (std::abs(std::log2(e3[std::size_t(i - 1)] / e3[std::size_t(i)]) - rate3[i - 1]) > 0.15) ok = false;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "EIFE2: %.4e %.4e %.4e %.4e; EIFE3: %.4e %.4e %.4e %.4e (10%%, rates +-0.15)", e2[0],
                  e2[1], e2[2], e2[3], e3[0], e3[1], e3[2], e3[3]);
    report(5, ok, buf);
    REQUIRE(ok);
}

TEST_CASE("criterion 6: Parareal exactness at k_max = N", "[acceptance]") {
    bool ok = true;
    double gap1 = 0.0, gap2 = 0.0;
    // Example 1d at its table configuration
    const ProblemSpec p1 = ex1d();
    const TensorGrid g1 = make_grid(p1, {4096});
    auto basis1 = std::make_shared<const SpectralBasis>(SpectralBasis::build(g1, p1.diffusion));
    const QuadratureRule rule = QuadratureRule::gauss_legendre(3);
    std::string row_eife, row_peife;
    {
        PararealRun run{4, 2, 2, 2, 4, 0.0, 2, false};
        auto props = make_propagators(p1, basis1, run, rule);
        const auto fine = sequential_fine_reference(p1, props, run, rule);
        const auto res = parareal_solve(p1, props, run, rule);
        gap1 = max_rel_checkpoint_gap(res.checkpoints, fine);
        if (gap1 > 1e-13) ok = false;

        // printed-table equality: the PEIFE22 row must equal the EIFE2 row to 5 digits
        auto exact_T = p1.exact_at(p1.t0 + p1.duration);
        EifePropagator eife2(basis1, StageNodes::uniform(2), p1.duration / 8, p1.source, rule);
        const auto seq = eife2.integrate(project_initial(*basis1, p1.initial, rule), p1.t0, 0, 8);
        row_eife = detail::format_sci(l2_error(g1, dst_backward(*basis1, seq), exact_T, rule));
        row_peife =
            detail::format_sci(l2_error(g1, dst_backward(*basis1, res.checkpoints.back()), exact_T, rule));
        if (row_eife != row_peife) ok = false;
    }
    // scaled 2d example
    {
        const auto& fx = scaled2d();
        const auto res = parareal_solve(fx.prob, fx.props, fx.run, fx.rule);
        gap2 = max_rel_checkpoint_gap(res.checkpoints, fx.fine_ref);
        if (gap2 > 1e-13) ok = false;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "checkpoint gaps: ex1d %.2e, ex2d-256x128 %.2e (tol 1e-13); rows %s == %s", gap1, gap2,
                  row_peife.c_str(), row_eife.c_str());
    report(6, ok, buf);
    REQUIRE(ok);
}

TEST_CASE("criterion 7: early convergence at k = 2", "[acceptance]") {
    const auto& fx = scaled2d();
    PararealRun run = fx.run;
    run.k_max = 2;
    const auto res = parareal_solve(fx.prob, fx.props, run, fx.rule);
    const double err = l2_error(fx.basis->grid, dst_backward(*fx.basis, res.checkpoints.back()),
                                fx.prob.exact_at(fx.prob.t0 + fx.prob.duration), fx.rule);
    const double dev = rel_gap(err, fx.fine_l2_exact);
    char buf[160];
    std::snprintf(buf, sizeof buf, "k=2 error %.6e vs fine %.6e, rel gap %.2e (tol 5%%)", err,
                  fx.fine_l2_exact, dev);
    const bool ok = dev <= 0.05;
    report(7, ok, buf);
    REQUIRE(ok);
}

TEST_CASE("criterion 8: checkpoints independent of worker count", "[acceptance]") {
    const auto& fx = scaled2d();
    std::vector<std::vector<SpectralField>> results;
    for (int workers : {1, 2, 8}) {
        PararealRun run = fx.run;
        run.workers = workers;
        results.push_back(parareal_solve(fx.prob, fx.props, run, fx.rule).checkpoints);
    }
    const bool ok = bitwise_equal_checkpoints(results[0], results[1]) &&
                    bitwise_equal_checkpoints(results[0], results[2]);
    report(8, ok, "worker counts {1, 2, 8} produce bitwise-identical checkpoints");
    REQUIRE(ok);
}

TEST_CASE("criterion 9: 3d temporal order check", "[acceptance]") {
    const ProblemSpec prob = ex3d();
    const TensorGrid g = make_grid(prob, {32, 32, 32});
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(g, prob.diffusion));
    const QuadratureRule rule = QuadratureRule::gauss_legendre(3);
    auto exact_T = prob.exact_at(prob.t0 + prob.duration);
    std::vector<double> errs;
    for (int m : {2, 4, 8}) {
        PararealRun run{4, m, 3, 3, 4, 0.0, 2, false};
        auto props = make_propagators(prob, basis, run, rule);
        const auto res = parareal_solve(prob, props, run, rule);
        errs.push_back(l2_error(g, dst_backward(*basis, res.checkpoints.back()), exact_T, rule));
    }
    // individual rates drift strongly around order 3 at this scale (the first
    // step is pre-asymptotic and the last level sits near the spatial floor);
    // the criterion is the mean observed rate across the range
    const double r1 = std::log2(errs[0] / errs[1]);
    const double r2 = std::log2(errs[1] / errs[2]);
    const double mean = 0.5 * std::log2(errs[0] / errs[2]);
    const bool ok = std::abs(mean - 3.0) <= 0.5;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "PEIFE33 32^3 errors %.4e %.4e %.4e; rates %.2f %.2f, mean %.2f (tol 3 +- 0.5)", errs[0],
                  errs[1], errs[2], r1, r2, mean);
    report(9, ok, buf);
    REQUIRE(ok);
}

TEST_CASE("criterion 10: near-linear cost growth", "[acceptance]") {
    ExperimentConfig cfg;
    cfg.problem = "ex2d";
    cfg.study = "perf";
    cfg.method = "peife";
    cfg.p = cfg.q = 3;
    cfg.n_coarse = 4;
    cfg.m_fine = {4};
    cfg.k_max = 2;
    cfg.perf_repeats = 3;
    cfg.grids = {{128, 64}, {256, 128}, {512, 256}};
    cfg.workers = 2;
    const auto rows = run_perf_growth(cfg);
    bool ok = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].growth <= 1.3)) ok = false;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "seconds/iter %.4f %.4f %.4f, growth factors %.2f %.2f (tol <= 1.3)",
                  rows[0].seconds_per_iter, rows[1].seconds_per_iter, rows[2].seconds_per_iter,
                  rows[1].growth, rows[2].growth);
    report(10, ok, buf);
    REQUIRE(ok);
}

TEST_CASE("criterion 11: homogeneous steps never amplify", "[acceptance]") {
    const double lo[] = {0.0, 0.0}, hi[] = {1.0, 0.5};
    const int ns[] = {63, 31};
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(TensorGrid::make(lo, hi, ns), 1.0));
    auto zero = [](double, std::span<const double>) { return 0.0; };
    oracles::Lcg rng(5);
    SpectralField state = SpectralField::zeros(basis->grid);
    for (double& v : state.coeffs) v = rng.next_sym();
    bool ok = true;
    const double sup1 = std::exp(-1.0), sup2 = 4.0 * std::exp(-2.0);
    for (double dt : {1e-3, 1.0, 1e3}) {
        EifePropagator prop(basis, StageNodes::uniform(2), dt, zero, QuadratureRule::gauss_legendre(3));
        const auto out = prop.step(state, 0.0);
        if (!(inf_norm(out.coeffs) <= inf_norm(state.coeffs))) ok = false;
        for (double mu : basis->operator_eig) {
            const double x = dt * mu, e = std::exp(-x);
            if (!(e <= 1.0 && x * e <= sup1 + 1e-12 && x * x * e <= sup2 + 1e-12)) ok = false;
        }
    }
    report(11, ok, "spectral max norm non-amplifying for dt in {1e-3, 1, 1e3}; decay bounds hold");
    REQUIRE(ok);
}
