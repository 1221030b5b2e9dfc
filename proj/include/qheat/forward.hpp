#pragma once

// Series solution of the q-heat equation D_{q,t} u + L u = v(t) f(t,x) with
// initial data u(0,.) = phi. Each mode solves the scalar q-ODE
// D_q u_k = -lambda_k u_k + v f_k exactly:
//
//   u_k(t) = e_q^{-t lambda_k} <phi, phi~_k>
//          + e_q^{-t lambda_k} int_0^t E_q^{q s lambda_k} v(s) f_k(s) d_q s.
//
// The product e_q^{-t lambda} E_q^{q s lambda} is formed in the log domain
// as exp(logE(q s lambda) - logE(t lambda)); since s <= t the exponent is
// non-positive and the factor stays in (0, 1].

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "qheat/qcore.hpp"
#include "qheat/spectral.hpp"

namespace qheat {

/// Relative floor for solver time lattices: depth covers [floor*T, T].
/// Deeper lattices gain nothing: the Jackson quotient D_{q,t} psi amplifies
/// rounding noise like 1/t near the bottom of the lattice.
inline constexpr double kTimeFloorRel = 1e-8;

inline QLattice make_time_lattice(double horizon, const QParams& ctx) {
    return QLattice::make(horizon, ctx, kTimeFloorRel * horizon);
}

/// Source data for the forward problem: separable right-hand side
/// v(t) f(t,x) on [0,T] x [0,1].
struct SourceSpec {
    std::function<double(double, double)> f;  // (t, x) -> f(t,x)
    ScalarFn v;                               // time factor on [0,T]
    double horizon = 1.0;
};

/// Modal coefficient of the source slice: f_k(s) = <f(s,.), phi~_k>.
inline double source_mode(const std::function<double(double, double)>& f,
                          const SpectrumPtr& spec, int k, double s) {
    const auto& ctx = spec->ctx;
    double w = std::sqrt(spec->lambdas[static_cast<size_t>(k)]);
    double nk = spec->norms[static_cast<size_t>(k)];
    ScalarFn prod([&f, s, w, nk, &ctx](double x) {
        return f(s, x) * q_sin(w * x, ctx) / (w * nk);
    });
    return q_integral(prod, 0.0, 1.0, ctx);
}

inline double source_mode(const SourceSpec& src, const SpectrumPtr& spec,
                          int k, double s) {
    return source_mode(src.f, spec, k, s);
}

namespace detail {

// Jackson integral int_0^upper exp(logE(q s lambda_k) - log_shift) v(s) f_k(s) d_q s.
// With log_shift = logE(t lambda_k) this is the decayed source term of u_k(t);
// with log_shift = 0 it is the bare integral used by the initial-data solver.
template <typename ModeFn>
double modal_time_integral(double upper, double lambda, double log_shift,
                           const ScalarFn& v, ModeFn f_k, const QParams& ctx) {
    if (upper == 0.0) return 0.0;
    comp_sum acc;
    double qm = 1.0;
    bool converged = false;
    int below = 0;
    for (int m = 0; m < ctx.m_max; ++m) {
        double s = upper * qm;
        double e = std::exp(log_big_E_q(ctx.q * s * lambda, ctx) - log_shift);
        double term = (1.0 - ctx.q) * upper * qm * e * v(s) * f_k(s);
        acc.add(term);
        below = (std::abs(term) <= tail_threshold(ctx, acc.get()))
                    ? below + 1
                    : 0;
        if (below >= 2 && m >= 4) {
            converged = true;
            break;
        }
        qm *= ctx.q;
    }
    if (!converged)
        warnings::emit("modal time integral reached m_max without convergence");
    return acc.get();
}

}  // namespace detail

/// One modal coefficient u_k(t) of the series solution, for any t in [0,T].
/// phi_k_coeff is <phi, phi~_k>; k is zero-based.
inline double mode_solution(int k, double t, double phi_k_coeff,
                            const SourceSpec& src, const SpectrumPtr& spec,
                            const QParams& ctx) {
    if (k < 0 || k >= spec->size())
        throw domain_error("mode index out of range");
    if (t < 0.0 || t > src.horizon)
        throw domain_error("time outside [0, horizon]");
    if (t == 0.0) return phi_k_coeff;
    double lambda = spec->lambdas[static_cast<size_t>(k)];
    double log_decay = log_big_E_q(t * lambda, ctx);
    double homogeneous = std::exp(-log_decay) * phi_k_coeff;
    auto f_k = [&](double s) { return source_mode(src, spec, k, s); };
    double driven =
        detail::modal_time_integral(t, lambda, log_decay, src.v, f_k, ctx);
    return homogeneous + driven;
}

/// Solution sampled on the time lattice: per-point modal series and the
/// spatial mass int_0^1 u(t,.) d_q x in its exact modal form
/// sum_k u_k(t) * int phi~_k.
struct SolutionBundle {
    SpectrumPtr spectrum;
    QLattice time_lattice;
    ModalSeries initial;              // u(0,.) = analyze(phi)
    std::vector<ModalSeries> modal_u; // modal_u[j] at t = T q^j
    std::vector<double> mass;         // mass[j] = sum_k u_k(t_j) P_k
};

namespace detail {

// Shared per-solve cache: source modes and v on the extended exponent range
// {T q^i}, plus logE(t_j lambda_k) on the lattice. The time integral at
// t = T q^j only ever evaluates at exponents j + m, so one table serves all
// lattice points.
struct SourceTable {
    double horizon;
    int depth;      // lattice depth M
    int ext;        // extended exponent range: 0..ext
    std::vector<double> s_points;              // s_points[i] = T q^i
    std::vector<double> v_vals;                // v(s_i)
    std::vector<std::vector<double>> f_modes;  // f_modes[k][i] = f_k(s_i)
    std::vector<std::vector<double>> logE_qs;  // logE(q s_i lambda_k)
    std::vector<std::vector<double>> logE_t;   // logE(t_j lambda_k), j<=depth

    SourceTable(const SourceSpec& src, const SpectrumPtr& spec,
                const QLattice& lattice, const QParams& ctx)
        : horizon(src.horizon), depth(lattice.depth), ext(lattice.depth + ctx.m_max) {
        const int K = spec->size();
        s_points.resize(static_cast<size_t>(ext) + 1);
        v_vals.resize(s_points.size());
        double p = src.horizon;
        for (int i = 0; i <= ext; ++i) {
            s_points[static_cast<size_t>(i)] = p;
            v_vals[static_cast<size_t>(i)] = src.v(p);
            p *= ctx.q;
        }
        f_modes.assign(static_cast<size_t>(K), {});
        logE_qs.assign(static_cast<size_t>(K), {});
        logE_t.assign(static_cast<size_t>(K), {});
        for (int k = 0; k < K; ++k) {
            auto& fm = f_modes[static_cast<size_t>(k)];
            auto& lq = logE_qs[static_cast<size_t>(k)];
            auto& lt = logE_t[static_cast<size_t>(k)];
            fm.resize(s_points.size());
            lq.resize(s_points.size());
            lt.resize(static_cast<size_t>(depth) + 1);
            double lambda = spec->lambdas[static_cast<size_t>(k)];
            for (int i = 0; i <= ext; ++i) {
                double s = s_points[static_cast<size_t>(i)];
                fm[static_cast<size_t>(i)] = source_mode(src, spec, k, s);
                lq[static_cast<size_t>(i)] =
                    log_big_E_q(ctx.q * s * lambda, ctx);
                if (i <= depth)
                    lt[static_cast<size_t>(i)] = log_big_E_q(s * lambda, ctx);
            }
        }
    }

    // u_k at lattice point j, from cached pieces.
    double mode_at(int k, int j, double phi_k_coeff, const QParams& ctx) const {
        double lt = logE_t[static_cast<size_t>(k)][static_cast<size_t>(j)];
        double u = std::exp(-lt) * phi_k_coeff;
        comp_sum acc;
        double qm = 1.0;
        double t = s_points[static_cast<size_t>(j)];
        int below = 0;
        bool converged = false;
        for (int m = 0; j + m <= ext && m < ctx.m_max; ++m) {
            int i = j + m;
            double e = std::exp(logE_qs[static_cast<size_t>(k)][static_cast<size_t>(i)] - lt);
            double term = (1.0 - ctx.q) * t * qm * e *
                          v_vals[static_cast<size_t>(i)] *
                          f_modes[static_cast<size_t>(k)][static_cast<size_t>(i)];
            acc.add(term);
            below = (std::abs(term) <= tail_threshold(ctx, acc.get()))
                        ? below + 1
                        : 0;
            if (below >= 2 && m >= 4) {
                converged = true;
                break;
            }
            qm *= ctx.q;
        }
        if (!converged)
            warnings::emit("modal time integral reached m_max without convergence");
        return u + acc.get();
    }
};

}  // namespace detail

/// Solve the forward problem on the time lattice {T q^j}.
inline SolutionBundle solve_forward(const ScalarFn& phi, const SourceSpec& src,
                                    const SpectrumPtr& spec,
                                    const QParams& ctx) {
    SolutionBundle out;
    out.spectrum = spec;
    out.time_lattice = make_time_lattice(src.horizon, ctx);
    out.initial = analyze(phi, spec);
    detail::SourceTable table(src, spec, out.time_lattice, ctx);
    const int K = spec->size();
    out.modal_u.reserve(static_cast<size_t>(table.depth) + 1);
    out.mass.reserve(static_cast<size_t>(table.depth) + 1);
    for (int j = 0; j <= table.depth; ++j) {
        std::vector<double> c(static_cast<size_t>(K));
        double mass = 0.0;
        for (int k = 0; k < K; ++k) {
            c[static_cast<size_t>(k)] =
                table.mode_at(k, j, out.initial.coeffs[static_cast<size_t>(k)], ctx);
            mass += c[static_cast<size_t>(k)] *
                    spec->phi_integrals[static_cast<size_t>(k)];
        }
        out.modal_u.emplace_back(spec, std::move(c));
        out.mass.push_back(mass);
    }
    return out;
}

/// The over-determination data psi(t) = int_0^1 u(t,.) d_q x as an evaluable
/// function of t (modal mass at arbitrary t, not just lattice points).
inline ScalarFn mass_function(const ScalarFn& phi, const SourceSpec& src,
                              const SpectrumPtr& spec, const QParams& ctx) {
    ModalSeries phi_modal = analyze(phi, spec);
    SourceSpec src_copy = src;
    return ScalarFn(0.0, src.horizon, [phi_modal, src_copy, spec, ctx](double t) {
        double s = 0.0;
        for (int k = 0; k < spec->size(); ++k)
            s += mode_solution(k, t, phi_modal.coeffs[static_cast<size_t>(k)],
                               src_copy, spec, ctx) *
                 spec->phi_integrals[static_cast<size_t>(k)];
        return s;
    });
}

/// Residual of the q-heat equation at a lattice point: D_{q,t} u + L u - v f,
/// with D_{q,t} on the time lattice and L u in its modal form
/// sum_k lambda_k u_k(t) phi~_k(x). time_index must not be the deepest point.
inline double pde_residual(const SolutionBundle& bundle, const SourceSpec& src,
                           int time_index, double x, const QParams& ctx) {
    if (time_index < 0 || time_index >= bundle.time_lattice.depth)
        throw domain_error("time index must be an interior lattice point");
    if (x < 0.0 || x > 1.0)
        throw domain_error("x outside [0,1]");
    double t = bundle.time_lattice.points[static_cast<size_t>(time_index)];
    double u_t = synthesize(bundle.modal_u[static_cast<size_t>(time_index)], x);
    double u_qt = synthesize(bundle.modal_u[static_cast<size_t>(time_index) + 1], x);
    double dq_u = (u_t - u_qt) / (t * (1.0 - ctx.q));
    double Lu = 0.0;
    const auto& spec = *bundle.spectrum;
    const auto& c = bundle.modal_u[static_cast<size_t>(time_index)].coeffs;
    for (int k = 0; k < spec.size(); ++k)
        Lu += spec.lambdas[static_cast<size_t>(k)] * c[static_cast<size_t>(k)] *
              eigenfunction(spec, k, x);
    return dq_u + Lu - src.v(t) * src.f(t, x);
}

}  // namespace qheat
