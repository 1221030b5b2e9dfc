#pragma once

// Jackson q-calculus primitives: q-numbers, q-derivatives, the Jackson
// integral, the two q-exponentials, q-trigonometric series and the
// second-order difference operator built from them. Everything here is a
// pure function of its inputs; all types are immutable after construction.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qheat {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation point or integration bounds outside the admissible set.
class domain_error : public error {
public:
    explicit domain_error(const std::string& what) : error(what) {}
};

/// Overflow, divergence, degenerate pivot, unrecoverable mode.
class numeric_error : public error {
public:
    explicit numeric_error(const std::string& what) : error(what) {}
};

/// Invalid configuration or violated data hypothesis.
class validation_error : public error {
public:
    explicit validation_error(const std::string& what) : error(what) {}
};

// ---------------------------------------------------------------------------
// Warning sink: truncation that hits the hard cap is reported, not silent.
// Thread-local so concurrent evaluations do not race.
// ---------------------------------------------------------------------------

namespace warnings {

struct state {
    long count = 0;
    std::string last;
};

inline state& local() {
    thread_local state s;
    return s;
}

inline void emit(const std::string& msg) {
    auto& s = local();
    ++s.count;
    s.last = msg;
}

inline long count() { return local().count; }
inline const std::string& last() { return local().last; }
inline void reset() { local() = state{}; }

}  // namespace warnings

// ---------------------------------------------------------------------------
// QParams
// ---------------------------------------------------------------------------

/// Global numeric context: base q, tail tolerance for truncating infinite
/// sums/products, hard cap on lattice depth / series terms, and the mode cap
/// used by the spectral modules.
struct QParams {
    double q;
    double tail_tol;
    int m_max;
    int k_max;

    explicit QParams(double q_, double tail_tol_ = 1e-14, int m_max_ = 60,
                     int k_max_ = 32)
        : q(q_), tail_tol(tail_tol_), m_max(m_max_), k_max(k_max_) {
        if (!(q > 0.0) || !(q < 1.0))
            throw validation_error("q must satisfy 0 < q < 1 strictly");
        if (!(tail_tol > 0.0))
            throw validation_error("tail_tol must be positive");
        if (m_max < 1) throw validation_error("m_max must be >= 1");
        if (k_max < 1) throw validation_error("k_max must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// ScalarFn: an evaluable real function on a closed interval. This is an
// evaluation contract, not a sample array; consumers do their own lattice
// sampling.
// ---------------------------------------------------------------------------

struct ScalarFn {
    double lo = 0.0;
    double hi = 1.0;
    std::function<double(double)> fn;

    ScalarFn() = default;

    /// Function on [0,1].
    explicit ScalarFn(std::function<double(double)> f) : fn(std::move(f)) {}

    ScalarFn(double lo_, double hi_, std::function<double(double)> f)
        : lo(lo_), hi(hi_), fn(std::move(f)) {
        if (!(lo >= 0.0) || !(hi > lo))
            throw validation_error("ScalarFn domain must satisfy 0 <= lo < hi");
    }

    bool contains(double x) const { return x >= lo && x <= hi; }

    double operator()(double x) const {
        if (!contains(x)) throw domain_error("point outside function domain");
        return fn(x);
    }
};

// ---------------------------------------------------------------------------
// QLattice: the geometric point set {b q^m : m = 0..M}.
// ---------------------------------------------------------------------------

struct QLattice {
    double base = 1.0;
    double q = 0.5;
    int depth = 0;
    std::vector<double> points;  // strictly decreasing, points[m] = base * q^m

    /// Build the lattice under `base`. Depth is the smallest M with
    /// base*q^M <= floor, capped at ctx.m_max; floor <= 0 selects the cap.
    static QLattice make(double base, const QParams& ctx, double floor = 0.0) {
        if (!(base > 0.0)) throw validation_error("lattice base must be positive");
        QLattice lat;
        lat.base = base;
        lat.q = ctx.q;
        int depth = ctx.m_max;
        if (floor > 0.0) {
            int m = 0;
            double p = base;
            while (p > floor && m < ctx.m_max) {
                p *= ctx.q;
                ++m;
            }
            depth = m;
        }
        lat.depth = depth;
        lat.points.reserve(static_cast<size_t>(depth) + 1);
        double p = base;
        for (int m = 0; m <= depth; ++m) {
            lat.points.push_back(p);
            p *= ctx.q;
        }
        return lat;
    }
};

// ---------------------------------------------------------------------------
// Elementary q-objects
// ---------------------------------------------------------------------------

/// The q-real number [alpha]_q = (1 - q^alpha) / (1 - q).
inline double q_number(double alpha, const QParams& ctx) {
    return (1.0 - std::pow(ctx.q, alpha)) / (1.0 - ctx.q);
}

/// [n]_q! = [1]_q [2]_q ... [n]_q, with [0]_q! = 1.
inline double q_factorial(int n, const QParams& ctx) {
    if (n < 0) throw domain_error("q_factorial requires n >= 0");
    double r = 1.0;
    for (int i = 1; i <= n; ++i) r *= q_number(i, ctx);
    return r;
}

/// Jackson q-derivative (f(x) - f(qx)) / (x (1-q)). Undefined at x = 0.
inline double q_derivative(const ScalarFn& f, double x, const QParams& ctx) {
    if (x == 0.0) throw domain_error("q-derivative undefined at zero");
    if (!f.contains(x) || !f.contains(ctx.q * x))
        throw domain_error("point outside function domain");
    return (f(x) - f(ctx.q * x)) / (x * (1.0 - ctx.q));
}

/// Inverse-base difference quotient (f(x) - f(x/q)) / (x (1 - 1/q)).
inline double q_derivative_inv(const ScalarFn& f, double x, const QParams& ctx) {
    if (x == 0.0) throw domain_error("q-derivative undefined at zero");
    if (!f.contains(x / ctx.q))
        throw domain_error("inverse-q step leaves domain");
    if (!f.contains(x)) throw domain_error("point outside function domain");
    return (f(x) - f(x / ctx.q)) / (x * (1.0 - 1.0 / ctx.q));
}

namespace detail {

// Stop threshold for geometrically decaying tails: after stopping at a term
// below this, the leftover tail (about term * q/(1-q)) stays below
// tail_tol * (1 + |sum|).
inline double tail_threshold(const QParams& ctx, double sum) {
    return ctx.tail_tol * (1.0 - ctx.q) / ctx.q * (1.0 + std::abs(sum));
}

// Neumaier-compensated accumulator.
struct comp_sum {
    double s = 0.0;
    double c = 0.0;
    void add(double v) {
        double t = s + v;
        if (std::abs(s) >= std::abs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    double get() const { return s + c; }
};

}  // namespace detail

/// Jackson integral over [a,b]: (1-q) sum_m q^m [b f(b q^m) - a f(a q^m)].
/// Truncates once the term magnitude stays below tail_tol*(1+|sum|) for two
/// consecutive m (one term can vanish by accident, e.g. f(b) = 0), or at
/// m_max with a warning.
inline double q_integral(const ScalarFn& f, double a, double b,
                         const QParams& ctx) {
    if (!(a >= 0.0) || !(b > a))
        throw domain_error("invalid q-integration bounds");
    detail::comp_sum sum;
    double qm = 1.0;
    int below = 0;
    bool converged = false;
    for (int m = 0; m < ctx.m_max; ++m) {
        double term = b * f(b * qm);
        if (a > 0.0) term -= a * f(a * qm);
        term *= (1.0 - ctx.q) * qm;
        sum.add(term);
        below = (std::abs(term) <= detail::tail_threshold(ctx, sum.get()))
                    ? below + 1
                    : 0;
        if (below >= 2 && m >= 4) {
            converged = true;
            break;
        }
        qm *= ctx.q;
    }
    if (!converged)
        warnings::emit("q_integral reached m_max without tail convergence");
    return sum.get();
}

/// Residual of the q-integration-by-parts identity:
/// int f D_q g + int g(q.) D_q f - [f(b)g(b) - f(a)g(a)].  Expected ~ 0.
inline double q_integration_by_parts_residual(const ScalarFn& f,
                                              const ScalarFn& g, double a,
                                              double b, const QParams& ctx) {
    ScalarFn lhs(f.lo, f.hi, [&f, &g, &ctx](double x) {
        return f(x) * q_derivative(g, x, ctx);
    });
    ScalarFn rhs(f.lo, f.hi, [&f, &g, &ctx](double x) {
        return g(ctx.q * x) * q_derivative(f, x, ctx);
    });
    double boundary = f(b) * g(b) - f(a) * g(a);
    return q_integral(lhs, a, b, ctx) + q_integral(rhs, a, b, ctx) - boundary;
}

// ---------------------------------------------------------------------------
// q-exponentials.  E_q is entire and computed from its convergent product
// Prod_m (1 + (1-q) q^m x); e_q at negative arguments is reached only through
// the duality e_q^{-t} E_q^{t} = 1, never through its divergent series.
// ---------------------------------------------------------------------------

/// E_q^x via the infinite product. Throws once the partial product would
/// leave the representable range; use log_big_E_q for large arguments.
inline double big_E_q(double x, const QParams& ctx) {
    double p = 1.0;
    double qm = 1.0;
    bool converged = false;
    for (int m = 0; m < ctx.m_max * 64; ++m) {
        double f = (1.0 - ctx.q) * qm * x;
        if (std::abs(f) < detail::tail_threshold(ctx, 0.0)) {
            converged = true;
            break;
        }
        p *= (1.0 + f);
        if (std::abs(p) > 1e290)
            throw numeric_error(
                "q-exponential product overflowed; use log_big_E_q");
        qm *= ctx.q;
    }
    if (!converged)
        warnings::emit("big_E_q product truncated before tail convergence");
    return p;
}

/// log E_q^x for x >= 0, as a sum of log1p terms; safe for large x.
inline double log_big_E_q(double x, const QParams& ctx) {
    if (x < 0.0) throw domain_error("log_big_E_q requires x >= 0");
    detail::comp_sum sum;
    double qm = 1.0;
    bool converged = false;
    for (int m = 0; m < ctx.m_max * 64; ++m) {
        double f = (1.0 - ctx.q) * qm * x;
        if (f < detail::tail_threshold(ctx, 0.0)) {
            converged = true;
            break;
        }
        sum.add(std::log1p(f));
        qm *= ctx.q;
    }
    if (!converged)
        warnings::emit("log_big_E_q truncated before tail convergence");
    return sum.get();
}

/// e_q^{-t} for t >= 0, computed as 1 / E_q^{t} in the log domain.
/// Underflows to 0 for huge t, which is the correct limit.
inline double small_e_q_neg(double t, const QParams& ctx) {
    if (t < 0.0) throw domain_error("small_e_q_neg requires t >= 0");
    return std::exp(-log_big_E_q(t, ctx));
}

// ---------------------------------------------------------------------------
// q-trigonometric series
// ---------------------------------------------------------------------------

/// Value of a q-trig series together with the largest term magnitude seen;
/// the scale is the natural normalizer for zero-residual tests.
struct QTrigResult {
    double value = 0.0;
    double scale = 0.0;
};

namespace detail {

// Sum sign-alternating series defined by the first term and the term ratio
// r(k) = term_{k+1}/term_k.  Truncates when the term magnitude drops below
// tail_tol * (max term) past the peak; rejects terms beyond 1e300.
template <typename Ratio>
QTrigResult alternating_series(double first, Ratio ratio, const QParams& ctx) {
    comp_sum sum;
    double term = first;
    double scale = std::abs(first);
    bool converged = false;
    for (int k = 0; k < ctx.m_max * 8; ++k) {
        sum.add(term);
        scale = std::max(scale, std::abs(term));
        double r = ratio(k);
        term *= r;
        if (std::abs(term) > 1e300)
            throw numeric_error("argument too large for fixed precision");
        if (std::abs(term) < ctx.tail_tol * scale && std::abs(r) < 1.0) {
            converged = true;
            break;
        }
    }
    if (!converged)
        warnings::emit("q-trigonometric series truncated before convergence");
    return {sum.get(), scale};
}

}  // namespace detail

/// q-sine series sum_k (-1)^k q^{k(k+1)} z^{2k+1} / [2k+1]_q!.
inline QTrigResult q_sin_scaled(double z, const QParams& ctx) {
    if (z == 0.0) return {0.0, 0.0};
    auto ratio = [z, &ctx](int k) {
        return -std::pow(ctx.q, 2 * (k + 1)) * z * z /
               (q_number(2 * k + 2, ctx) * q_number(2 * k + 3, ctx));
    };
    return detail::alternating_series(z, ratio, ctx);
}

/// q-cosine series sum_k (-1)^k q^{k^2} z^{2k} / [2k]_q!.
inline QTrigResult q_cos_scaled(double z, const QParams& ctx) {
    auto ratio = [z, &ctx](int k) {
        return -std::pow(ctx.q, 2 * k + 1) * z * z /
               (q_number(2 * k + 1, ctx) * q_number(2 * k + 2, ctx));
    };
    return detail::alternating_series(1.0, ratio, ctx);
}

inline double q_sin(double z, const QParams& ctx) {
    return q_sin_scaled(z, ctx).value;
}

inline double q_cos(double z, const QParams& ctx) {
    return q_cos_scaled(z, ctx).value;
}

// ---------------------------------------------------------------------------
// The operator L = -(1/q) D_{1/q} D_q, applied pointwise as the literal
// composition of the two difference quotients (3-point stencil on
// {qx, x, x/q}).
// ---------------------------------------------------------------------------

inline double apply_L(const ScalarFn& f, double x, const QParams& ctx) {
    if (x == 0.0) throw domain_error("q-derivative undefined at zero");
    if (!f.contains(x / ctx.q))
        throw domain_error("inverse-q step leaves domain");
    if (!f.contains(x) || !f.contains(ctx.q * x))
        throw domain_error("point outside function domain");
    const double q = ctx.q;
    const double fx = f(x);
    const double xq = x / q;
    double g_at_x = (fx - f(q * x)) / (x * (1.0 - q));
    double g_at_xq = (f(xq) - fx) / (xq * (1.0 - q));
    double outer = (g_at_x - g_at_xq) / (x * (1.0 - 1.0 / q));
    return -outer / q;
}

}  // namespace qheat
