#pragma once

// Eigenvalues and orthonormal eigenfunctions of the Dirichlet operator
// L = -(1/q) D_{1/q} D_q on [0,1], plus Fourier analysis/synthesis in
// L^2_q[0,1] and modal Sobolev norms. The eigenvalues are the squares of the
// positive zeros of the q-sine; eigenfunctions are q-sines scaled to unit
// L^2_q norm.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <vector>

#include "qheat/qcore.hpp"

namespace qheat {

/// First K eigenvalues with cached eigenfunction norms and the Jackson
/// integrals of the orthonormalized eigenfunctions over [0,1]. Immutable
/// after construction; mode indices are zero-based throughout the API.
struct Spectrum {
    QParams ctx;
    std::vector<double> lambdas;        // strictly increasing, positive
    std::vector<double> norms;          // ||phi_k||_{L^2_q} before normalization
    std::vector<double> phi_integrals;  // int_0^1 phi~_k d_q x

    int size() const { return static_cast<int>(lambdas.size()); }
};

using SpectrumPtr = std::shared_ptr<const Spectrum>;

/// Characteristic function of the eigenproblem: q_sin(sqrt(lambda)).
/// Its zeros are the eigenvalues.
inline double eigen_sine_residual(double lambda, const QParams& ctx) {
    if (!(lambda > 0.0))
        throw domain_error("eigen residual requires lambda > 0");
    return q_sin(std::sqrt(lambda), ctx);
}

/// Residual together with the series scale, for normalized zero tests.
inline QTrigResult eigen_sine_residual_scaled(double lambda,
                                              const QParams& ctx) {
    if (!(lambda > 0.0))
        throw domain_error("eigen residual requires lambda > 0");
    return q_sin_scaled(std::sqrt(lambda), ctx);
}

namespace detail {

// Locate the first K zeros of q_sin(w) for w > 0. Geometric scan keyed to
// the q^{-k}/(1-q) growth of the zeros, then bisection to relative width
// 1e-13 and a short secant polish down to the evaluation noise floor.
inline std::vector<double> eigen_sqrt_zeros(const QParams& ctx, int K) {
    std::vector<double> zeros;
    zeros.reserve(static_cast<size_t>(K));
    const double q = ctx.q;
    const double ratio = std::pow(q, -0.25);
    double w = q * q * q / (1.0 - q);  // below the first zero's scale
    double fw;
    try {
        fw = q_sin(w, ctx);
    } catch (const numeric_error&) {
        throw numeric_error("mode cap exceeds representable spectrum");
    }
    long safety = 0;
    while (static_cast<int>(zeros.size()) < K) {
        if (++safety > 20000)
            throw numeric_error("eigenvalue scan failed to bracket a zero");
        double w2 = w * ratio;
        double f2;
        try {
            f2 = q_sin(w2, ctx);
        } catch (const numeric_error&) {
            throw numeric_error("mode cap exceeds representable spectrum");
        }
        if (fw != 0.0 && ((fw < 0.0) != (f2 < 0.0))) {
            double a = w, b = w2, fa = fw;
            bool tight = false;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (a + b);
                double fm = q_sin(mid, ctx);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
                if (b - a < 1e-13 * a) {
                    tight = true;
                    break;
                }
            }
            if (!tight)
                throw numeric_error("eigenvalue bisection failed to converge");
            // secant polish; q_sin resolves the crossing to ~1 ulp in w
            double x0 = a, x1 = b;
            double f0 = q_sin(x0, ctx), f1 = q_sin(x1, ctx);
            double width = b - a;
            for (int it = 0; it < 8 && f1 != f0 && f1 != 0.0; ++it) {
                double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
                if (x2 < a - width || x2 > b + width) break;
                x0 = x1;
                f0 = f1;
                x1 = x2;
                f1 = q_sin(x1, ctx);
            }
            zeros.push_back(x1);
        }
        w = w2;
        fw = f2;
    }
    return zeros;
}

}  // namespace detail

/// Raw (un-normalized) eigenfunction value sin_q(sqrt(lambda_k) x)/sqrt(lambda_k).
inline double eigenfunction_raw(const Spectrum& spec, int k, double x) {
    if (k < 0 || k >= spec.size())
        throw domain_error("eigenfunction index out of range");
    double w = std::sqrt(spec.lambdas[static_cast<size_t>(k)]);
    return q_sin(w * x, spec.ctx) / w;
}

/// Orthonormalized eigenfunction value phi~_k(x), x in [0,1], k zero-based.
inline double eigenfunction(const Spectrum& spec, int k, double x) {
    if (k < 0 || k >= spec.size())
        throw domain_error("eigenfunction index out of range");
    if (x < 0.0 || x > 1.0)
        throw domain_error("eigenfunction argument outside [0,1]");
    return eigenfunction_raw(spec, k, x) / spec.norms[static_cast<size_t>(k)];
}

/// phi~_k as a ScalarFn on [0,1].
inline ScalarFn eigenfunction_fn(const SpectrumPtr& spec, int k) {
    if (k < 0 || k >= spec->size())
        throw domain_error("eigenfunction index out of range");
    return ScalarFn([spec, k](double x) { return eigenfunction(*spec, k, x); });
}

/// Compute the first K eigenvalues (zeros of the q-sine characteristic
/// function), eigenfunction norms and the integrals int_0^1 phi~_k d_q x.
inline SpectrumPtr find_eigenvalues(const QParams& ctx, int K) {
    if (K < 1) throw validation_error("mode count must be >= 1");
    if (K > ctx.k_max)
        throw validation_error("mode count exceeds k_max");
    auto spec = std::make_shared<Spectrum>(Spectrum{ctx, {}, {}, {}});
    auto zeros = detail::eigen_sqrt_zeros(ctx, K);
    spec->lambdas.reserve(zeros.size());
    for (double w : zeros) spec->lambdas.push_back(w * w);
    spec->norms.reserve(zeros.size());
    spec->phi_integrals.reserve(zeros.size());
    for (int k = 0; k < K; ++k) {
        double w = zeros[static_cast<size_t>(k)];
        ScalarFn phi2([w, &ctx](double x) {
            double v = q_sin(w * x, ctx) / w;
            return v * v;
        });
        spec->norms.push_back(std::sqrt(q_integral(phi2, 0.0, 1.0, ctx)));
        double nk = spec->norms.back();
        ScalarFn phin([w, nk, &ctx](double x) {
            return q_sin(w * x, ctx) / (w * nk);
        });
        spec->phi_integrals.push_back(q_integral(phin, 0.0, 1.0, ctx));
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Modal series
// ---------------------------------------------------------------------------

/// Coefficients of a function in the orthonormalized eigenbasis.
struct ModalSeries {
    SpectrumPtr spectrum;
    std::vector<double> coeffs;

    ModalSeries() = default;
    ModalSeries(SpectrumPtr spec, std::vector<double> c)
        : spectrum(std::move(spec)), coeffs(std::move(c)) {
        if (static_cast<int>(coeffs.size()) != spectrum->size())
            throw validation_error("coefficient count must match spectrum size");
    }

    /// |c_K| / lambda_K: proxy for the spectral truncation error.
    double tail_proxy() const {
        return std::abs(coeffs.back()) / spectrum->lambdas.back();
    }
};

/// Fourier coefficients c_k = <f, phi~_k> by Jackson integration.
inline ModalSeries analyze(const ScalarFn& f, const SpectrumPtr& spec) {
    const auto& ctx = spec->ctx;
    std::vector<double> c;
    c.reserve(static_cast<size_t>(spec->size()));
    for (int k = 0; k < spec->size(); ++k) {
        double w = std::sqrt(spec->lambdas[static_cast<size_t>(k)]);
        double nk = spec->norms[static_cast<size_t>(k)];
        ScalarFn prod([&f, w, nk, &ctx](double x) {
            return f(x) * q_sin(w * x, ctx) / (w * nk);
        });
        c.push_back(q_integral(prod, 0.0, 1.0, ctx));
    }
    return ModalSeries(spec, std::move(c));
}

/// Pointwise synthesis sum_k c_k phi~_k(x).
inline double synthesize(const ModalSeries& m, double x) {
    double s = 0.0;
    for (int k = 0; k < m.spectrum->size(); ++k)
        s += m.coeffs[static_cast<size_t>(k)] * eigenfunction(*m.spectrum, k, x);
    return s;
}

/// Synthesis wrapped as a ScalarFn on [0,1].
inline ScalarFn synthesize_fn(const ModalSeries& m) {
    return ScalarFn([m](double x) { return synthesize(m, x); });
}

/// Modal Sobolev norm (sum_k lambda_k^s c_k^2)^{1/2} over the retained modes.
inline double sobolev_norm(const ModalSeries& m, double s) {
    if (s < 0.0) throw domain_error("sobolev_norm requires s >= 0");
    double acc = 0.0;
    for (int k = 0; k < m.spectrum->size(); ++k) {
        double c = m.coeffs[static_cast<size_t>(k)];
        acc += std::pow(m.spectrum->lambdas[static_cast<size_t>(k)], s) * c * c;
    }
    return std::sqrt(acc);
}

}  // namespace qheat
