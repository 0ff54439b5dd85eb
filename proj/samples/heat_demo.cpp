// Minimal usage example: solve the 1d reaction-diffusion benchmark both
// sequentially and with Parareal, and print the terminal-time errors.

#include <cstdio>

#include "peife/peife.hpp"

int main() {
    using namespace peife;

    const ProblemSpec prob = ex1d(); // u_t = u_xx + (2 + x(1-x)) e^t on [0,1]
    const int cells[] = {256};
    const TensorGrid grid = prob.grid_from_cells(cells);
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(grid, prob.diffusion));
    const QuadratureRule rule = QuadratureRule::gauss_legendre(3);
    auto exact_at_T = prob.exact_at(prob.t0 + prob.duration);

    // sequential two-stage exponential integrator, 32 uniform steps
    EifePropagator eife(basis, StageNodes::uniform(2), prob.duration / 32, prob.source, rule);
    SpectralField u = project_initial(*basis, prob.initial, rule);
    u = eife.integrate(std::move(u), prob.t0, 0, 32);
    std::printf("EIFE-s2,  32 steps:   L2 error %.4e\n",
                l2_error(grid, dst_backward(*basis, u), exact_at_T, rule));

    // the same fine resolution accelerated across time: 4 intervals x 8 substeps
    PararealRun run;
    run.n_coarse = 4;
    run.m_fine = 8;
    run.coarse_stages = 2;
    run.fine_stages = 2;
    run.k_max = 2;
    auto props = make_propagators(prob, basis, run, rule);
    const auto result = parareal_solve(prob, props, run, rule);
    std::printf("PEIFE-p2q2, 4x8, k=2: L2 error %.4e  (%d corrections)\n",
                l2_error(grid, dst_backward(*basis, result.checkpoints.back()), exact_at_T, rule),
                result.iterations);
    return 0;
}
