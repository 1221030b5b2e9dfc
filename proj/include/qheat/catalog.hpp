#pragma once

// Built-in function catalog for the CLI and tests: constants, monomials,
// combinations of the orthonormal eigenbasis, and the standard time profiles.
// The catalog is closed by design; arbitrary functions enter through the
// library interface.

#include <cmath>
#include <string>

#include "qheat/qcore.hpp"
#include "qheat/spectral.hpp"

namespace qheat::catalog {

/// Space functions on [0,1].
///   zero, one, x, x^2, x^3        — constants and monomials
///   mode<k>                       — orthonormal eigenfunction phi~_k (1-based)
///   mode12                        — phi~_1 + 0.1 phi~_2
///   one-span                      — K-mode projection of the constant 1
///   zero-mean                     — x - 1/[2]_q (zero Jackson mean)
inline ScalarFn space_function(const std::string& name, const SpectrumPtr& spec) {
    const QParams& ctx = spec->ctx;
    if (name == "zero") return ScalarFn([](double) { return 0.0; });
    if (name == "one") return ScalarFn([](double) { return 1.0; });
    if (name == "x") return ScalarFn([](double x) { return x; });
    if (name == "x^2") return ScalarFn([](double x) { return x * x; });
    if (name == "x^3") return ScalarFn([](double x) { return x * x * x; });
    if (name == "mode12") {
        return ScalarFn([spec](double x) {
            return eigenfunction(*spec, 0, x) + 0.1 * eigenfunction(*spec, 1, x);
        });
    }
    if (name.rfind("mode", 0) == 0) {
        int k = 0;
        try {
            k = std::stoi(name.substr(4));
        } catch (...) {
            throw validation_error("unknown catalog function '" + name + "'");
        }
        if (k < 1 || k > spec->size())
            throw validation_error("catalog mode index out of range in '" +
                                   name + "'");
        return eigenfunction_fn(spec, k - 1);
    }
    if (name == "one-span") {
        ModalSeries ones = analyze(ScalarFn([](double) { return 1.0; }), spec);
        return synthesize_fn(ones);
    }
    if (name == "zero-mean") {
        double half = 1.0 / q_number(2.0, ctx);
        return ScalarFn([half](double x) { return x - half; });
    }
    throw validation_error("unknown catalog function '" + name + "'");
}

/// Time profiles on [0, horizon]: zero, one, affine (1 + t/2),
/// eqexp (e_q^{-t}).
inline ScalarFn time_function(const std::string& name, double horizon,
                              const QParams& ctx) {
    if (name == "zero")
        return ScalarFn(0.0, horizon, [](double) { return 0.0; });
    if (name == "one")
        return ScalarFn(0.0, horizon, [](double) { return 1.0; });
    if (name == "affine")
        return ScalarFn(0.0, horizon, [](double t) { return 1.0 + 0.5 * t; });
    if (name == "eqexp") {
        QParams c = ctx;
        return ScalarFn(0.0, horizon,
                        [c](double t) { return small_e_q_neg(t, c); });
    }
    throw validation_error("unknown catalog time profile '" + name + "'");
}

}  // namespace qheat::catalog
