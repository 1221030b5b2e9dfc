#pragma once

// Reconstruction of the time factor v(t) from the integral over-determination
// condition int_0^1 u(t,.) d_q x = psi(t). Combining the mass identity
// D_q psi = -sum_k lambda_k u_k P_k + v F (where P_k = int phi~_k,
// F(t) = int f(t,.) d_q x) with the modal solution formula yields a Volterra
// q-integral equation of the second kind,
//
//   v(t) = psi_hat(t) - int_0^t v(s) K(t,s) d_q s,
//   psi_hat(t) = [D_{q,t} psi(t) + sum_k e_q^{-t lambda_k} <phi,phi~_k>
//                 lambda_k P_k] / F(t),
//   K(t,s)     = -[sum_k e_q^{-t lambda_k} E_q^{q s lambda_k}
//                 lambda_k P_k f_k(s)] / F(t).
//
// On the Jackson lattice the integral operator is lower-triangular plus a
// diagonal term, so the equation is solved exactly by back-substitution from
// the deepest lattice point; Picard iteration is kept as a cross-check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qheat/forward.hpp"
#include "qheat/qcore.hpp"
#include "qheat/spectral.hpp"

namespace qheat {

/// Data of the inverse source problem. phi is the initial state, f the known
/// source shape, psi the measured mass history, M1 the bound demanded of
/// |int_0^1 f(t,.) d_q x|^{-1} on the time lattice.
struct InverseSourceProblem {
    ScalarFn phi;                             // initial data on [0,1]
    std::function<double(double, double)> f;  // source shape (t,x)
    ScalarFn psi;                             // mass data on [0, horizon]
    double horizon = 1.0;
    double M1 = 100.0;
};

/// Reconstructed v on the time lattice with solver diagnostics.
struct ReconstructedSource {
    QLattice time_lattice;
    std::vector<double> v_values;          // v at lattice points, index = j
    std::vector<double> residual;          // per-point residual of the solved equation
    double tail_term_psi_hat = 0.0;        // last-mode term magnitude in psi_hat
    double tail_term_kernel = 0.0;         // last-mode term magnitude in K
    std::vector<double> picard_sup_diffs;  // sup|v^{n+1}-v^n|; empty for triangular

    /// v as an evaluable time function: exact on lattice exponents, constant
    /// continuation below the lattice floor.
    ScalarFn as_scalar_fn() const {
        QLattice lat = time_lattice;
        std::vector<double> vals = v_values;
        return ScalarFn(0.0, lat.base, [lat, vals](double t) {
            if (t <= lat.points.back()) return vals.back();
            double j = std::log(t / lat.base) / std::log(lat.q);
            long idx = std::lround(j);
            if (idx < 0) idx = 0;
            if (idx > lat.depth) idx = lat.depth;
            double p = lat.points[static_cast<size_t>(idx)];
            if (std::abs(p - t) > 1e-9 * p)
                throw domain_error("source evaluation off the time lattice");
            return vals[static_cast<size_t>(idx)];
        });
    }
};

/// Max over the time lattice of |int_0^1 f(t,.) d_q x|^{-1}. Throws a
/// validation error naming the offending lattice time when the bound M1
/// is violated.
inline double check_hypothesis(const InverseSourceProblem& prob,
                               const QParams& ctx) {
    QLattice lattice = make_time_lattice(prob.horizon, ctx);
    double worst = 0.0;
    for (double t : lattice.points) {
        ScalarFn slice([&prob, t](double x) { return prob.f(t, x); });
        double mean = q_integral(slice, 0.0, 1.0, ctx);
        double inv = 1.0 / std::abs(mean);
        if (!(inv <= prob.M1))
            throw validation_error(
                "source shape violates mean-value hypothesis at t=" +
                std::to_string(t));
        worst = std::max(worst, inv);
    }
    return worst;
}

/// Assembled Volterra system on the time lattice. Building it evaluates and
/// caches every modal quantity the kernel and data need; psi_hat and kernel
/// lookups are then O(K).
class VolterraSystem {
public:
    VolterraSystem(const InverseSourceProblem& prob, const SpectrumPtr& spec,
                   const QParams& ctx)
        : ctx_(ctx),
          spec_(spec),
          lattice_(make_time_lattice(prob.horizon, ctx)),
          phi_modal_(analyze(prob.phi, spec)) {
        const int K = spec->size();
        const int M = lattice_.depth;
        f_modes_.assign(static_cast<size_t>(K), std::vector<double>(static_cast<size_t>(M) + 1));
        logE_qs_.assign(static_cast<size_t>(K), std::vector<double>(static_cast<size_t>(M) + 1));
        logE_t_.assign(static_cast<size_t>(K), std::vector<double>(static_cast<size_t>(M) + 1));
        f_mean_.resize(static_cast<size_t>(M) + 1);
        dq_psi_.resize(static_cast<size_t>(M) + 1);
        // psi sampled once per lattice point, plus one step below the floor
        // to feed the deepest Jackson quotient
        std::vector<double> psi_vals(static_cast<size_t>(M) + 2);
        for (int j = 0; j <= M; ++j)
            psi_vals[static_cast<size_t>(j)] =
                prob.psi(lattice_.points[static_cast<size_t>(j)]);
        psi_vals[static_cast<size_t>(M) + 1] =
            prob.psi(lattice_.points[static_cast<size_t>(M)] * ctx.q);
        for (int j = 0; j <= M; ++j) {
            double t = lattice_.points[static_cast<size_t>(j)];
            ScalarFn slice([&prob, t](double x) { return prob.f(t, x); });
            f_mean_[static_cast<size_t>(j)] = q_integral(slice, 0.0, 1.0, ctx);
            dq_psi_[static_cast<size_t>(j)] =
                (psi_vals[static_cast<size_t>(j)] - psi_vals[static_cast<size_t>(j) + 1]) /
                (t * (1.0 - ctx.q));
            for (int k = 0; k < K; ++k) {
                double lambda = spec->lambdas[static_cast<size_t>(k)];
                f_modes_[static_cast<size_t>(k)][static_cast<size_t>(j)] =
                    source_mode(prob.f, spec, k, t);
                logE_qs_[static_cast<size_t>(k)][static_cast<size_t>(j)] =
                    log_big_E_q(ctx.q * t * lambda, ctx);
                logE_t_[static_cast<size_t>(k)][static_cast<size_t>(j)] =
                    log_big_E_q(t * lambda, ctx);
            }
        }
    }

    const QLattice& lattice() const { return lattice_; }
    int depth() const { return lattice_.depth; }

    /// psi_hat at lattice index j.
    double psi_hat(int j) const {
        double s = dq_psi_[static_cast<size_t>(j)];
        for (int k = 0; k < spec_->size(); ++k) s += psi_hat_term(k, j);
        return s / f_mean_[static_cast<size_t>(j)];
    }

    /// Kernel K(t_j, s_i) for i >= j (s below t on the lattice).
    double kernel(int j, int i) const {
        if (i < j) throw domain_error("kernel requires s <= t on the lattice");
        double s = 0.0;
        for (int k = 0; k < spec_->size(); ++k) s += kernel_term(k, j, i);
        return -s / f_mean_[static_cast<size_t>(j)];
    }

    /// Magnitude of the last retained modal term, as truncation proxies.
    double psi_hat_tail(int j) const {
        return std::abs(psi_hat_term(spec_->size() - 1, j) /
                        f_mean_[static_cast<size_t>(j)]);
    }
    double kernel_tail(int j, int i) const {
        return std::abs(kernel_term(spec_->size() - 1, j, i) /
                        f_mean_[static_cast<size_t>(j)]);
    }

    /// Jackson integral int_0^{t_j} v K(t_j, .) d_q s over the lattice,
    /// diagonal included.
    double apply_kernel(const std::vector<double>& v, int j) const {
        const int M = depth();
        double t = lattice_.points[static_cast<size_t>(j)];
        detail::comp_sum acc;
        double qm = 1.0;
        for (int m = 0; j + m <= M; ++m) {
            acc.add(qm * kernel(j, j + m) * v[static_cast<size_t>(j + m)]);
            qm *= ctx_.q;
        }
        return (1.0 - ctx_.q) * t * acc.get();
    }

private:
    double psi_hat_term(int k, int j) const {
        double decay = std::exp(-logE_t_[static_cast<size_t>(k)][static_cast<size_t>(j)]);
        return decay * phi_modal_.coeffs[static_cast<size_t>(k)] *
               spec_->lambdas[static_cast<size_t>(k)] *
               spec_->phi_integrals[static_cast<size_t>(k)];
    }
    double kernel_term(int k, int j, int i) const {
        double ratio = std::exp(logE_qs_[static_cast<size_t>(k)][static_cast<size_t>(i)] -
                                logE_t_[static_cast<size_t>(k)][static_cast<size_t>(j)]);
        return ratio * spec_->lambdas[static_cast<size_t>(k)] *
               spec_->phi_integrals[static_cast<size_t>(k)] *
               f_modes_[static_cast<size_t>(k)][static_cast<size_t>(i)];
    }

    QParams ctx_;
    SpectrumPtr spec_;
    QLattice lattice_;
    ModalSeries phi_modal_;
    std::vector<double> f_mean_;               // F(t_j)
    std::vector<double> dq_psi_;               // D_{q,t} psi at t_j
    std::vector<std::vector<double>> f_modes_; // f_k(t_i)
    std::vector<std::vector<double>> logE_qs_; // logE(q t_i lambda_k)
    std::vector<std::vector<double>> logE_t_;  // logE(t_j lambda_k)
};

/// psi_hat at lattice index j (convenience wrapper; assembles the system).
inline double psi_hat(const InverseSourceProblem& prob, const SpectrumPtr& spec,
                      const QParams& ctx, int j) {
    return VolterraSystem(prob, spec, ctx).psi_hat(j);
}

/// Kernel K(t_j, t_i) (convenience wrapper; assembles the system).
inline double kernel_K(const InverseSourceProblem& prob, const SpectrumPtr& spec,
                       const QParams& ctx, int j, int i) {
    return VolterraSystem(prob, spec, ctx).kernel(j, i);
}

namespace detail {

inline ReconstructedSource finalize(const VolterraSystem& sys,
                                    std::vector<double> v,
                                    std::vector<double> sup_diffs) {
    ReconstructedSource out;
    out.time_lattice = sys.lattice();
    out.residual.resize(v.size());
    for (int j = 0; j <= sys.depth(); ++j)
        out.residual[static_cast<size_t>(j)] =
            v[static_cast<size_t>(j)] - sys.psi_hat(j) + sys.apply_kernel(v, j);
    out.tail_term_psi_hat = 0.0;
    out.tail_term_kernel = 0.0;
    for (int j = 0; j <= sys.depth(); ++j) {
        out.tail_term_psi_hat = std::max(out.tail_term_psi_hat, sys.psi_hat_tail(j));
        out.tail_term_kernel = std::max(out.tail_term_kernel, sys.kernel_tail(j, j));
    }
    out.v_values = std::move(v);
    out.picard_sup_diffs = std::move(sup_diffs);
    return out;
}

}  // namespace detail

/// Solve the Volterra equation exactly on the lattice. At t = T q^j the
/// Jackson integral couples v(t) only to itself (m = 0, the diagonal) and to
/// deeper points T q^{j+m}; processing j from deepest to shallowest reduces
/// every step to one scalar equation.
inline ReconstructedSource solve_volterra(const InverseSourceProblem& prob,
                                          const SpectrumPtr& spec,
                                          const QParams& ctx) {
    check_hypothesis(prob, ctx);
    VolterraSystem sys(prob, spec, ctx);
    const int M = sys.depth();
    std::vector<double> v(static_cast<size_t>(M) + 1, 0.0);
    for (int j = M; j >= 0; --j) {
        double t = sys.lattice().points[static_cast<size_t>(j)];
        detail::comp_sum acc;
        double qm = ctx.q;
        for (int m = 1; j + m <= M; ++m) {
            acc.add(qm * sys.kernel(j, j + m) * v[static_cast<size_t>(j + m)]);
            qm *= ctx.q;
        }
        double pivot = 1.0 + (1.0 - ctx.q) * t * sys.kernel(j, j);
        if (std::abs(pivot) < 1e-12)
            throw numeric_error("degenerate diagonal in Volterra solve");
        v[static_cast<size_t>(j)] =
            (sys.psi_hat(j) - (1.0 - ctx.q) * t * acc.get()) / pivot;
    }
    return detail::finalize(sys, std::move(v), {});
}

/// Successive substitution v^{n+1}(t) = psi_hat(t) - int_0^t v^n K d_q s,
/// starting from v^0 = psi_hat. Errors out if the sup-difference grows for
/// five consecutive iterations.
inline ReconstructedSource picard_iterate(const InverseSourceProblem& prob,
                                          const SpectrumPtr& spec,
                                          const QParams& ctx, int n_iter) {
    if (n_iter < 1) throw validation_error("n_iter must be >= 1");
    check_hypothesis(prob, ctx);
    VolterraSystem sys(prob, spec, ctx);
    const int M = sys.depth();
    std::vector<double> ph(static_cast<size_t>(M) + 1);
    for (int j = 0; j <= M; ++j) ph[static_cast<size_t>(j)] = sys.psi_hat(j);
    std::vector<double> v = ph;
    std::vector<double> sup_diffs;
    sup_diffs.reserve(static_cast<size_t>(n_iter));
    int growing = 0;
    for (int n = 0; n < n_iter; ++n) {
        std::vector<double> next(static_cast<size_t>(M) + 1);
        double sup = 0.0;
        for (int j = 0; j <= M; ++j) {
            next[static_cast<size_t>(j)] =
                ph[static_cast<size_t>(j)] - sys.apply_kernel(v, j);
            sup = std::max(sup, std::abs(next[static_cast<size_t>(j)] -
                                         v[static_cast<size_t>(j)]));
        }
        if (!sup_diffs.empty() && sup > sup_diffs.back())
            ++growing;
        else
            growing = 0;
        sup_diffs.push_back(sup);
        if (growing >= 5)
            throw numeric_error("Picard iteration diverging; check T*sup|K|");
        v = std::move(next);
    }
    return detail::finalize(sys, std::move(v), std::move(sup_diffs));
}

}  // namespace qheat
