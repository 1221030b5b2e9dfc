#pragma once

// Command-line driver: scenario configuration, self-tests, forward and
// inverse runs, CSV emission. Exit codes: 0 success, 1 numeric failure,
// 2 validation/config failure.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "qheat/catalog.hpp"
#include "qheat/config.hpp"
#include "qheat/csv.hpp"
#include "qheat/forward.hpp"
#include "qheat/inverse_initial.hpp"
#include "qheat/inverse_source.hpp"
#include "qheat/qcore.hpp"
#include "qheat/spectral.hpp"

namespace qheat::cli {

namespace detail {

// Deterministic noise in [-1,1] from the bit pattern of t (splitmix64).
inline double noise_sample(double t) {
    std::uint64_t z;
    std::memcpy(&z, &t, sizeof(z));
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

inline ScalarFn perturb(const ScalarFn& psi, double level) {
    if (level == 0.0) return psi;
    ScalarFn base = psi;
    return ScalarFn(psi.lo, psi.hi, [base, level](double t) {
        return base(t) * (1.0 + level * noise_sample(t));
    });
}

struct CheckRecord {
    std::string name;
    double q;
    double residual;
    double threshold;
};

// Identity battery behind `selftest`. Runs over a fixed parameter grid with
// lattice depths deep enough for the Jackson tails at each q.
inline std::vector<CheckRecord> selftest_battery() {
    std::vector<CheckRecord> recs;
    auto record = [&](const std::string& name, double q, double residual,
                      double threshold) {
        recs.push_back({name, q, residual, threshold});
    };
    for (double q : {0.3, 0.5, 0.9}) {
        int m_max = q > 0.8 ? 2000 : 200;
        QParams ctx(q, 1e-14, m_max, 8);
        double tol = 10.0 * ctx.tail_tol;

        // q-Leibniz product rule on polynomials, exact to rounding
        ScalarFn f([](double x) { return x * x; });
        ScalarFn g([](double x) { return 1.0 + x * x * x; });
        ScalarFn fg([](double x) { return x * x * (1.0 + x * x * x); });
        double worst = 0.0;
        for (double x : {0.25, 0.5, 0.75, 1.0}) {
            double lhs = q_derivative(fg, x, ctx);
            double rhs = f(q * x) * q_derivative(g, x, ctx) +
                         g(x) * q_derivative(f, x, ctx);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        record("q-leibniz", q, worst, tol);

        // integration by parts
        record("integration-by-parts", q,
               std::abs(q_integration_by_parts_residual(f, g, 0.0, 1.0, ctx)),
               tol);

        // D_q e_q = e_q through the duality representation
        ScalarFn eq_fn(0.0, 0.5, [ctx](double x) {
            return 1.0 / big_E_q(-x, ctx);
        });
        worst = 0.0;
        for (double x : {0.125, 0.25}) {
            double d = q_derivative(eq_fn, x, ctx);
            worst = std::max(worst, std::abs(d - eq_fn(x)));
        }
        record("dq-eq-identity", q, worst, 100.0 * tol);

        // e_q^{-t} E_q^{t} = 1
        worst = 0.0;
        for (double t : {0.1, 1.0, 10.0, 1000.0}) {
            double r = small_e_q_neg(t, ctx) *
                       std::exp(log_big_E_q(t, ctx)) - 1.0;
            worst = std::max(worst, std::abs(r));
        }
        record("eq-Eq-duality", q, worst, 1e-12);

        // fundamental theorem on the lattice
        ScalarFn h([](double x) { return 1.0 + x + x * x; });
        ScalarFn H([h, ctx](double x) { return q_integral(h, 0.0, x, ctx); });
        worst = 0.0;
        for (double x : {1.0, q, q * q, q * q * q}) {
            worst = std::max(worst,
                             std::abs(q_derivative(H, x, ctx) - h(x)));
        }
        record("fundamental-theorem", q, worst, 100.0 * tol);

        // Jackson integral closed forms
        ScalarFn mono2([](double x) { return x * x; });
        record("integral-x^2", q,
               std::abs(q_integral(mono2, 0.0, 1.0, ctx) -
                        1.0 / q_number(3.0, ctx)),
               tol);
    }

    // classical limit of the q-derivative on x^3
    {
        double prev = 1e300;
        bool monotone = true;
        double last = 0.0;
        for (double q : {0.9, 0.99, 0.999}) {
            QParams ctx(q, 1e-14, 60, 8);
            ScalarFn cube([](double x) { return x * x * x; });
            double worst = 0.0;
            for (int i = 1; i <= 10; ++i) {
                double x = i / 10.0;
                worst = std::max(worst, std::abs(q_derivative(cube, x, ctx) -
                                                 3.0 * x * x));
            }
            monotone = monotone && worst < prev;
            prev = worst;
            last = worst;
        }
        recs.push_back({"classical-limit-trend", 0.999,
                        monotone ? last : 1e300, 0.02});
    }
    return recs;
}

// ---------------------------------------------------------------------------
// Scenario assembly
// ---------------------------------------------------------------------------

struct ForwardScenario {
    ScalarFn phi;
    SourceSpec src;
};

inline ForwardScenario forward_scenario(const std::string& name,
                                        const SpectrumPtr& spec,
                                        const QParams& ctx, double T) {
    if (name == "decay") {
        return {catalog::space_function("mode1", spec),
                SourceSpec{[](double, double) { return 0.0; },
                           catalog::time_function("zero", T, ctx), T}};
    }
    if (name == "driven") {
        ScalarFn shape = catalog::space_function("mode1", spec);
        return {catalog::space_function("mode1", spec),
                SourceSpec{[shape](double, double x) { return shape(x); },
                           catalog::time_function("one", T, ctx), T}};
    }
    throw validation_error("unknown scenario '" + name + "' for command 'forward'");
}

struct InverseSourceScenario {
    ScalarFn phi;
    std::function<double(double, double)> f;
    ScalarFn v_true;
    bool expect_reject = false;
};

inline InverseSourceScenario inverse_source_scenario(const std::string& name,
                                                     const SpectrumPtr& spec,
                                                     const QParams& ctx,
                                                     double T) {
    auto profile = [&](const std::string& vname) {
        // source shape 1 + phi~_1 with the constant projected onto the
        // retained modes, so the data is exactly representable by the scheme
        ScalarFn one_span = catalog::space_function("one-span", spec);
        ScalarFn mode1 = catalog::space_function("mode1", spec);
        InverseSourceScenario s;
        s.phi = catalog::space_function("mode1", spec);
        s.f = [one_span, mode1](double, double x) {
            return one_span(x) + mode1(x);
        };
        s.v_true = catalog::time_function(vname, T, ctx);
        return s;
    };
    if (name == "const-v") return profile("one");
    if (name == "affine-v") return profile("affine");
    if (name == "eqexp-v") return profile("eqexp");
    if (name == "zero-mean-f") {
        ScalarFn zm = catalog::space_function("zero-mean", spec);
        InverseSourceScenario s;
        s.phi = catalog::space_function("mode1", spec);
        s.f = [zm](double, double x) { return zm(x); };
        s.v_true = catalog::time_function("affine", T, ctx);
        s.expect_reject = true;
        return s;
    }
    throw validation_error("unknown scenario '" + name +
                           "' for command 'inverse-source'");
}

struct InverseInitialScenario {
    ModalSeries gamma_true;
    SourceSpec src;
};

inline InverseInitialScenario inverse_initial_scenario(const std::string& name,
                                                       const SpectrumPtr& spec,
                                                       const QParams& ctx,
                                                       double T) {
    if (name == "modes12") {
        std::vector<double> c(static_cast<size_t>(spec->size()), 0.0);
        c[0] = 1.0;
        if (spec->size() > 1) c[1] = 0.1;
        ScalarFn shape = catalog::space_function("mode1", spec);
        return {ModalSeries(spec, std::move(c)),
                SourceSpec{[shape](double, double x) { return shape(x); },
                           catalog::time_function("one", T, ctx), T}};
    }
    throw validation_error("unknown scenario '" + name +
                           "' for command 'inverse-initial'");
}

inline std::string default_scenario(const std::string& command) {
    if (command == "forward") return "decay";
    if (command == "inverse-source") return "affine-v";
    if (command == "inverse-initial") return "modes12";
    return "";
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline int run_selftest(const RunConfig& cfg) {
    auto recs = selftest_battery();
    std::vector<std::vector<std::string>> rows;
    int passed = 0;
    double max_ratio = 0.0;
    for (const auto& r : recs) {
        bool ok = r.residual <= r.threshold;
        passed += ok ? 1 : 0;
        max_ratio = std::max(max_ratio, r.residual / r.threshold);
        rows.push_back({r.name, fmt_full(r.q), fmt_full(r.residual),
                        fmt_full(r.threshold), ok ? "1" : "0"});
    }
    emit_csv(cfg.out_path, {"check", "q", "residual", "threshold", "pass"}, rows);
    std::cout << passed << "/" << recs.size() << " identity checks passed\n";
    if (passed != static_cast<int>(recs.size())) {
        std::cout << "selftest FAILED\n";
        return 1;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", max_ratio);
    std::cout << "selftest ok max_err=" << buf << "\n";
    return 0;
}

inline int run_forward(const RunConfig& cfg, const QParams& ctx,
                       const SpectrumPtr& spec) {
    std::string scen = cfg.scenario.empty() ? default_scenario("forward")
                                            : cfg.scenario;
    ForwardScenario s = forward_scenario(scen, spec, ctx, cfg.T);
    SolutionBundle bundle = solve_forward(s.phi, s.src, spec, ctx);
    QLattice xlat = QLattice::make(1.0, ctx);
    std::vector<std::vector<std::string>> rows;
    for (int j = 0; j <= bundle.time_lattice.depth; ++j) {
        double t = bundle.time_lattice.points[static_cast<size_t>(j)];
        for (double x : xlat.points) {
            double u = synthesize(bundle.modal_u[static_cast<size_t>(j)], x);
            rows.push_back({fmt_full(t), fmt_full(x), fmt_full(u)});
        }
    }
    emit_csv(cfg.out_path, {"t", "x", "u"}, rows);
    double max_res = 0.0;
    int j_hi = std::min(bundle.time_lattice.depth - 1, 10);
    for (int j = 0; j <= j_hi; ++j)
        for (int m = 1; m <= 8 && m < static_cast<int>(xlat.points.size()); ++m)
            max_res = std::max(
                max_res, std::abs(pde_residual(bundle, s.src, j,
                                               xlat.points[static_cast<size_t>(m)],
                                               ctx)));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", max_res);
    std::cout << "forward ok max_err=" << buf << "\n";
    return 0;
}

inline int run_inverse_source(const RunConfig& cfg, const QParams& ctx,
                              const SpectrumPtr& spec) {
    std::string scen = cfg.scenario.empty() ? default_scenario("inverse-source")
                                            : cfg.scenario;
    InverseSourceScenario s = inverse_source_scenario(scen, spec, ctx, cfg.T);
    SourceSpec src{s.f, s.v_true, cfg.T};
    ScalarFn psi = mass_function(s.phi, src, spec, ctx);
    InverseSourceProblem prob{s.phi, s.f, perturb(psi, cfg.noise), cfg.T, 100.0};
    ReconstructedSource rec = solve_volterra(prob, spec, ctx);
    std::vector<std::vector<std::string>> rows;
    double max_rel = 0.0;
    for (int j = 0; j <= rec.time_lattice.depth; ++j) {
        double t = rec.time_lattice.points[static_cast<size_t>(j)];
        double vt = s.v_true(t);
        double vr = rec.v_values[static_cast<size_t>(j)];
        rows.push_back({fmt_full(t), fmt_full(vt), fmt_full(vr),
                        fmt_full(std::abs(vr - vt))});
        max_rel = std::max(max_rel, std::abs(vr - vt) / std::abs(vt));
    }
    emit_csv(cfg.out_path, {"t", "v_true", "v_rec", "abs_err"}, rows);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", max_rel);
    std::cout << "inverse-source ok max_err=" << buf << "\n";
    return 0;
}

inline int run_inverse_initial(const RunConfig& cfg, const QParams& ctx,
                               const SpectrumPtr& spec) {
    std::string scen = cfg.scenario.empty() ? default_scenario("inverse-initial")
                                            : cfg.scenario;
    InverseInitialScenario s = inverse_initial_scenario(scen, spec, ctx, cfg.T);
    double xi0 = cfg.xi0 == 0.0 ? cfg.T : cfg.xi0;

    // generate the over-determination data nu = u(xi0, .) from gamma_true
    std::vector<double> nu_modes(static_cast<size_t>(spec->size()));
    for (int k = 0; k < spec->size(); ++k)
        nu_modes[static_cast<size_t>(k)] =
            mode_solution(k, xi0, s.gamma_true.coeffs[static_cast<size_t>(k)],
                          s.src, spec, ctx);
    ScalarFn nu = synthesize_fn(ModalSeries(spec, std::move(nu_modes)));

    InverseInitialProblem prob{s.src, cfg.alpha, xi0, perturb(nu, cfg.noise),
                               cfg.K_reg, 12.0};
    InitialReconstruction rec = reconstruct_initial(prob, spec, ctx);

    std::vector<std::vector<std::string>> rows;
    double max_err = 0.0;
    for (int k = 0; k < spec->size(); ++k) {
        double amp = std::pow(10.0, rec.log10_amplification[static_cast<size_t>(k)]);
        rows.push_back({std::to_string(k + 1),
                        fmt_full(spec->lambdas[static_cast<size_t>(k)]),
                        fmt_full(rec.gamma.coeffs[static_cast<size_t>(k)]),
                        fmt_full(rec.tau.coeffs[static_cast<size_t>(k)]),
                        fmt_full(amp)});
        max_err = std::max(max_err,
                           std::abs(rec.gamma.coeffs[static_cast<size_t>(k)] -
                                    s.gamma_true.coeffs[static_cast<size_t>(k)]));
    }
    emit_csv(cfg.out_path, {"k", "lambda_k", "gamma_k", "tau_k", "amplification_k"},
             rows);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", max_err);
    std::cout << "inverse-initial ok max_err=" << buf << "\n";
    return 0;
}

}  // namespace detail

/// Execute a validated configuration. Returns the process exit code.
inline int run(const RunConfig& cfg) {
    try {
        validate_config(cfg);
        if (cfg.command == "selftest") return detail::run_selftest(cfg);
        QParams ctx(cfg.q, cfg.tail_tol, cfg.m_max, std::max(cfg.K, cfg.K_reg));
        SpectrumPtr spec = find_eigenvalues(ctx, cfg.K);
        if (cfg.command == "forward") return detail::run_forward(cfg, ctx, spec);
        if (cfg.command == "inverse-source")
            return detail::run_inverse_source(cfg, ctx, spec);
        if (cfg.command == "inverse-initial")
            return detail::run_inverse_initial(cfg, ctx, spec);
        throw validation_error("unknown command '" + cfg.command + "'");
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

/// argv entry point.
inline int run_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    RunConfig cfg;
    try {
        cfg = parse_args(args);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return run(cfg);
}

}  // namespace qheat::cli
