#ifndef PEIFE_DST_HPP
#define PEIFE_DST_HPP

#include <fftw3.h>

#include <memory>
#include <mutex>

#include "peife/grid.hpp"

namespace peife {

/*
 * DST-I along every grid direction, the odd-extension FFT of logical length
 * 2(n+1) per line (FFTW RODFT00 kernel; no radix restriction on n+1).
 *
 * Normalization: with S_jk = sin(jk*pi/(n+1)),
 *   forward  c = prod_i (2/(n_i+1)) * S u   (analysis)
 *   backward u = S c                        (plain sine synthesis)
 * so forward∘backward is the identity and a mass solve is a diagonal divide.
 *
 * Plans are immutable after construction and shared; execution is reentrant
 * (per-call line scratch, FFTW_UNALIGNED so the codelet choice does not
 * depend on the caller's buffer alignment).
 */
class DstPlan {
  public:
    DstPlan() = default;

    explicit DstPlan(const TensorGrid& grid) {
        auto impl = std::make_shared<Impl>();
        impl->grid = grid;
        int nmax = 0;
        for (int i = 0; i < grid.dim; ++i) nmax = std::max(nmax, grid.n[i]);
        std::vector<double> in(std::size_t(nmax), 0.0), out(std::size_t(nmax), 0.0);
        std::lock_guard<std::mutex> lock(planner_mutex());
        for (int i = 0; i < grid.dim; ++i) {
            fftw_r2r_kind kind = FFTW_RODFT00;
            impl->plans[i] = fftw_plan_many_r2r(1, &grid.n[i], 1, in.data(), nullptr, 1, 0, out.data(),
                                                nullptr, 1, 0, &kind, FFTW_ESTIMATE | FFTW_UNALIGNED);
            if (!impl->plans[i]) throw std::runtime_error("DstPlan: FFTW plan creation failed");
        }
        impl_ = std::move(impl);
    }

    const TensorGrid& grid() const { return impl_->grid; }

    /// In-place analysis transform of a flat nodal array.
    void forward(std::vector<double>& data) const {
        for (int axis = 0; axis < impl_->grid.dim; ++axis)
            apply_axis(data, axis, 2.0 / (impl_->grid.n[axis] + 1));
    }

    /// In-place synthesis transform of a flat coefficient array.
    void backward(std::vector<double>& data) const {
        for (int axis = 0; axis < impl_->grid.dim; ++axis) apply_axis(data, axis, 1.0);
    }

  private:
    struct Impl {
        TensorGrid grid;
        std::array<fftw_plan, max_dim> plans{};
        ~Impl() {
            std::lock_guard<std::mutex> lock(planner_mutex());
            for (auto p : plans)
                if (p) fftw_destroy_plan(p);
        }
    };

    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    // RODFT00 computes y_k = 2 sum_j x_j sin((j+1)(k+1)pi/(n+1)) = 2 (S x)_k.
    void apply_axis(std::vector<double>& data, int axis, double scale) const {
        const TensorGrid& g = impl_->grid;
        const int n = g.n[axis];
        std::size_t stride = 1;
        for (int i = 0; i < axis; ++i) stride *= std::size_t(g.n[i]);
        const std::size_t lines = data.size() / std::size_t(n);
        std::vector<double> in(std::size_t(n), 0.0), out(std::size_t(n), 0.0);
        scale *= 0.5; // fold RODFT00's factor 2 into the per-axis scale
        for (std::size_t l = 0; l < lines; ++l) {
            const std::size_t low = l % stride;
            const std::size_t high = l / stride;
            const std::size_t base = low + high * stride * std::size_t(n);
            for (int j = 0; j < n; ++j) in[std::size_t(j)] = data[base + std::size_t(j) * stride];
            fftw_execute_r2r(impl_->plans[axis], in.data(), out.data());
            for (int j = 0; j < n; ++j) data[base + std::size_t(j) * stride] = scale * out[std::size_t(j)];
        }
    }

    std::shared_ptr<const Impl> impl_;
};

} // namespace peife

#endif
