#ifndef PEIFE_EIFE_HPP
#define PEIFE_EIFE_HPP

#include <cstdint>
#include <memory>

#include "peife/exp_weights.hpp"

namespace peife {

/// How stage sources P_h f(t_i) are realized: the quadrature load vector
/// followed by the diagonal mass inverse (the projection proper), or the
/// cheaper nodal interpolant of f (a documented shortcut for large 3D runs).
enum class SourceMode { l2_projection, nodal_interpolation };

/// Spectral coefficients of P_h u0.
inline SpectralField project_initial(const SpectralBasis& basis, const SpaceFn& u0,
                                     const QuadratureRule& rule) {
    NodalField load = load_vector(
        basis.grid, [&](double, std::span<const double> x) { return u0(x); }, 0.0, rule);
    return project_l2(basis, load);
}

/*
 * One-step exponential Runge-Kutta integrator in spectral space:
 *
 *   out_k = E_k * state_k + dt * sum_i W[i][k] * ghat_{i,k},
 *   ghat_i = P_h f(t_n + c_i dt),
 *
 * exact for homogeneous problems. The instance is immutable after
 * construction; step/integrate are const and safe to call concurrently on
 * distinct states. Stage times are always formed as
 * t_origin + step_index*dt + c_i*dt so that chained sub-runs reproduce a
 * long sequential run bit for bit.
 */
class EifePropagator {
  public:
    EifePropagator(std::shared_ptr<const SpectralBasis> basis, StageNodes nodes, double dt,
                   SpaceTimeFn source, QuadratureRule rule,
                   SourceMode mode = SourceMode::l2_projection)
        : basis_(std::move(basis)),
          nodes_(std::move(nodes)),
          dt_(dt),
          table_(build_weight_table(nodes_, dt, *basis_)),
          source_(std::move(source)),
          rule_(std::move(rule)),
          mode_(mode) {
        if (!(dt > 0.0)) throw std::invalid_argument("EifePropagator: requires dt > 0");
    }

    double dt() const { return dt_; }
    int stages() const { return nodes_.count(); }
    const SpectralBasis& basis() const { return *basis_; }
    const WeightTable& table() const { return table_; }

    SpectralField step(const SpectralField& state, double t_n) const {
        if (!(state.grid == basis_->grid)) throw std::invalid_argument("eife step: grid mismatch");
        const std::size_t total = state.coeffs.size();
        SpectralField out{state.grid, std::vector<double>(total)};
        for (std::size_t k = 0; k < total; ++k) out.coeffs[k] = table_.decay[k] * state.coeffs[k];
        for (int i = 0; i < nodes_.count(); ++i) {
            const double ti = t_n + nodes_.c[std::size_t(i)] * dt_;
            SpectralField g = stage_source(ti);
            const auto& w = table_.stage_weights[std::size_t(i)];
            for (std::size_t k = 0; k < total; ++k) out.coeffs[k] += dt_ * w[k] * g.coeffs[k];
        }
        return out;
    }

    /// Applies `n_steps` uniform steps; step l uses t = t_origin + (first_step+l)*dt.
    SpectralField integrate(SpectralField state, double t_origin, std::int64_t first_step,
                            std::int64_t n_steps) const {
        if (n_steps < 1) throw std::invalid_argument("eife integrate: requires n_steps >= 1");
        for (std::int64_t l = 0; l < n_steps; ++l)
            state = step(state, t_origin + double(first_step + l) * dt_);
        return state;
    }

  private:
    SpectralField stage_source(double t) const {
        if (mode_ == SourceMode::l2_projection)
            return project_l2(*basis_, load_vector(basis_->grid, source_, t, rule_));
        // nodal interpolant: coefficients are the plain forward transform
        const TensorGrid& g = basis_->grid;
        NodalField nodal = NodalField::zeros(g);
        double x[max_dim];
        int idx[max_dim] = {0, 0, 0};
        for (std::size_t k = 0; k < nodal.values.size(); ++k) {
            for (int i = 0; i < g.dim; ++i) x[i] = g.node(i, idx[i]);
            const double fv = source_(t, std::span<const double>(x, std::size_t(g.dim)));
            if (!std::isfinite(fv)) detail::throw_nonfinite(t, x, g.dim);
            nodal.values[k] = fv;
            for (int i = 0; i < g.dim; ++i) {
                if (++idx[i] < g.n[i]) break;
                idx[i] = 0;
            }
        }
        return dst_forward(*basis_, nodal);
    }

    std::shared_ptr<const SpectralBasis> basis_;
    StageNodes nodes_;
    double dt_;
    WeightTable table_;
    SpaceTimeFn source_;
    QuadratureRule rule_;
    SourceMode mode_;
};

} // namespace peife

#endif
