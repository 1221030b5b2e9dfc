// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// criteria hold at their stated tolerances. Default desk-scale parameters:
// q = 0.5, T = 1, K = 6, m_max = 60, tail_tol = 1e-14.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qheat/qheat.hpp"

using namespace qheat;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool ok,
            const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", index,
                name.c_str(), detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

// e_q within its radius of convergence, accumulated in extended precision.
double small_e_q_series(double x, const QParams& ctx) {
    long double sum = 0.0L, term = 1.0L;
    for (int k = 1; k < 400; ++k) {
        sum += term;
        long double qnum =
            (1.0L - powl((long double)ctx.q, k)) / (1.0L - (long double)ctx.q);
        term *= (long double)x / qnum;
        if (fabsl(term) < 1e-22L * (1.0L + fabsl(sum))) break;
    }
    return (double)(sum + term);
}

// ---------------------------------------------------------------------------

void criterion1_identities() {
    double worst = 0.0;
    const double tol = 1e-13;  // 10 * tail_tol
    for (double q : {0.3, 0.5, 0.9}) {
        QParams ctx(q, 1e-14, q > 0.8 ? 2000 : 200, 8);

        ScalarFn f([](double x) { return x * x; });
        ScalarFn g([](double x) { return 1.0 + x * x * x; });
        ScalarFn fg([](double x) { return x * x * (1.0 + x * x * x); });
        for (double x : {0.25, 0.5, 1.0}) {
            double lhs = q_derivative(fg, x, ctx);
            double rhs = f(q * x) * q_derivative(g, x, ctx) +
                         g(x) * q_derivative(f, x, ctx);
            worst = std::max(worst, std::abs(lhs - rhs));
        }

        worst = std::max(worst, std::abs(q_integration_by_parts_residual(
                                    f, g, 0.0, 1.0, ctx)));

        double xe = std::min(0.5 / (1.0 - q), 2.0);
        ScalarFn eq(0.0, 2.5, [ctx](double x) { return small_e_q_series(x, ctx); });
        worst = std::max(worst,
                         std::abs(q_derivative(eq, xe, ctx) - eq(xe)));

        for (double t : {0.1, 1.0, 10.0, 1000.0})
            worst = std::max(worst, std::abs(small_e_q_neg(t, ctx) *
                                                 big_E_q(t, ctx) -
                                             1.0));

        ScalarFn h([](double x) { return 1.0 + x + x * x; });
        ScalarFn H([h, ctx](double x) { return q_integral(h, 0.0, x, ctx); });
        double x = 1.0;
        for (int m = 0; m < 4; ++m) {
            worst = std::max(worst, std::abs(q_derivative(H, x, ctx) - h(x)));
            x *= q;
        }
    }
    report(1, "q-calculus identity suite", worst <= tol,
           "max residual " + fmt(worst) + " <= " + fmt(tol));
}

void criterion2_classical_limit() {
    double prev = 1e300, last = 0.0;
    bool monotone = true;
    for (double q : {0.9, 0.99, 0.999}) {
        QParams ctx(q, 1e-14, 60, 8);
        ScalarFn cube([](double x) { return x * x * x; });
        double worst = 0.0;
        for (int i = 1; i <= 10; ++i) {
            double x = i / 10.0;
            worst = std::max(worst,
                             std::abs(q_derivative(cube, x, ctx) - 3.0 * x * x));
        }
        monotone = monotone && (worst < prev);
        prev = worst;
        last = worst;
    }
    report(2, "classical limit of D_q", monotone && last <= 0.02,
           "monotone=" + std::string(monotone ? "yes" : "no") +
               ", err(q=0.999) " + fmt(last) + " <= 2.0e-02");
}

void criterion3_spectrum() {
    QParams ctx(0.5, 1e-14, 60, 8);
    auto spec = find_eigenvalues(ctx, 6);

    double worst_resid = 0.0;
    for (double lam : spec->lambdas) {
        QTrigResult r = eigen_sine_residual_scaled(lam, ctx);
        worst_resid = std::max(worst_resid, std::abs(r.value) / r.scale);
    }

    double worst_gram = 0.0;
    for (int i = 0; i < 6; ++i) {
        for (int j = i; j < 6; ++j) {
            ScalarFn prod([&spec, i, j](double x) {
                return eigenfunction(*spec, i, x) * eigenfunction(*spec, j, x);
            });
            double gij = q_integral(prod, 0.0, 1.0, ctx);
            worst_gram =
                std::max(worst_gram, std::abs(gij - (i == j ? 1.0 : 0.0)));
        }
    }

    double worst_eigrel = 0.0;
    for (int k = 0; k < 3; ++k) {
        ScalarFn phi = eigenfunction_fn(spec, k);
        double x = ctx.q;
        for (int m = 0; m < 6; ++m) {
            double lhs = apply_L(phi, x, ctx);
            double rhs = spec->lambdas[k] * phi(x);
            worst_eigrel =
                std::max(worst_eigrel, std::abs(lhs - rhs) / std::abs(rhs));
            x *= ctx.q;
        }
    }

    bool ok = worst_resid <= 1e-10 && worst_gram <= 1e-8 && worst_eigrel <= 1e-6;
    report(3, "spectrum correctness", ok,
           "scaled residual " + fmt(worst_resid) + " <= 1e-10, gram " +
               fmt(worst_gram) + " <= 1e-8, eigen-relation " +
               fmt(worst_eigrel) + " <= 1e-6");
}

void criterion4_forward() {
    QParams ctx(0.5, 1e-14, 60, 8);
    auto spec = find_eigenvalues(ctx, 6);
    double T = 1.0;
    double lambda = spec->lambdas[0];
    ScalarFn mode1 = eigenfunction_fn(spec, 0);

    // manufactured solution u = (1+t) phi~_1
    SourceSpec man{[mode1](double, double x) { return mode1(x); },
                   ScalarFn(0.0, T, [lambda](double t) {
                       return 1.0 + lambda * (1.0 + t);
                   }),
                   T};
    SolutionBundle bman = solve_forward(mode1, man, spec, ctx);
    double worst_res = 0.0;
    for (int j = 0; j <= 9; ++j) {
        for (double x : {0.5, 0.25, 0.125})
            worst_res =
                std::max(worst_res, std::abs(pde_residual(bman, man, j, x, ctx)));
        // per-mode q-ODE residual D_q u_k + lambda_k u_k - v f_k
        double t = bman.time_lattice.points[j];
        for (int k = 0; k < 6; ++k) {
            double dq = (bman.modal_u[j].coeffs[k] -
                         bman.modal_u[j + 1].coeffs[k]) /
                        (t * (1.0 - ctx.q));
            double bracket = dq + spec->lambdas[k] * bman.modal_u[j].coeffs[k] -
                             man.v(t) * source_mode(man, spec, k, t);
            worst_res = std::max(worst_res, std::abs(bracket));
        }
    }

    // homogeneous decay: L2 norm non-increasing in t (j ascending = t falling)
    SourceSpec hom{[](double, double) { return 0.0; },
                   ScalarFn(0.0, T, [](double) { return 0.0; }), T};
    ScalarFn phi([spec](double x) {
        return eigenfunction(*spec, 0, x) + 0.3 * eigenfunction(*spec, 2, x);
    });
    SolutionBundle bhom = solve_forward(phi, hom, spec, ctx);
    bool monotone = true;
    for (int j = 0; j < bhom.time_lattice.depth; ++j)
        monotone = monotone && (sobolev_norm(bhom.modal_u[j], 0.0) <=
                                sobolev_norm(bhom.modal_u[j + 1], 0.0) *
                                    (1.0 + 1e-12));

    // mass dual route on a driven problem
    SourceSpec drv{[mode1](double, double x) { return 1.0 + mode1(x); },
                   ScalarFn(0.0, T, [](double t) { return 1.0 + 0.5 * t; }), T};
    SolutionBundle bdrv = solve_forward(mode1, drv, spec, ctx);
    double worst_mass = 0.0;
    for (int j = 0; j <= bdrv.time_lattice.depth; j += 3) {
        ScalarFn u_j = synthesize_fn(bdrv.modal_u[j]);
        worst_mass = std::max(worst_mass,
                              std::abs(bdrv.mass[j] -
                                       q_integral(u_j, 0.0, 1.0, ctx)));
    }

    bool ok = worst_res <= 1e-8 && monotone && worst_mass <= 1e-8;
    report(4, "forward solver", ok,
           "manufactured residual " + fmt(worst_res) +
               " <= 1e-8, decay monotone=" + (monotone ? "yes" : "no") +
               ", mass dual-route " + fmt(worst_mass) + " <= 1e-8");
}

void criterion5_inverse_source() {
    QParams ctx(0.5, 1e-14, 60, 8);
    auto spec = find_eigenvalues(ctx, 6);
    double T = 1.0;
    ScalarFn one_span = catalog::space_function("one-span", spec);
    ScalarFn mode1 = catalog::space_function("mode1", spec);
    auto f = [one_span, mode1](double, double x) {
        return one_span(x) + mode1(x);
    };
    ScalarFn phi = catalog::space_function("mode1", spec);

    double worst_rt = 0.0;
    double worst_picard = 0.0;
    for (std::string vname : {std::string("one"), std::string("affine"),
                              std::string("eqexp")}) {
        ScalarFn v_true = catalog::time_function(vname, T, ctx);
        SourceSpec src{f, v_true, T};
        ScalarFn psi = mass_function(phi, src, spec, ctx);
        InverseSourceProblem prob{phi, f, psi, T, 100.0};
        ReconstructedSource tri = solve_volterra(prob, spec, ctx);
        for (int j = 0; j <= tri.time_lattice.depth; ++j) {
            double t = tri.time_lattice.points[j];
            worst_rt = std::max(worst_rt, std::abs(tri.v_values[j] - v_true(t)) /
                                              std::abs(v_true(t)));
        }
        ReconstructedSource pic = picard_iterate(prob, spec, ctx, 200);
        for (int j = 0; j <= tri.time_lattice.depth; ++j)
            worst_picard = std::max(
                worst_picard, std::abs(pic.v_values[j] - tri.v_values[j]));
    }

    RunConfig cfg;
    cfg.command = "inverse-source";
    cfg.scenario = "zero-mean-f";
    cfg.out_path =
        (std::filesystem::temp_directory_path() / "qheat_acc_zm.csv").string();
    int code = cli::run(cfg);

    bool ok = worst_rt <= 1e-6 && worst_picard <= 1e-8 && code == 2;
    report(5, "inverse source round trip", ok,
           "max relative error " + fmt(worst_rt) +
               " <= 1e-6, picard gap " + fmt(worst_picard) +
               " <= 1e-8, zero-mean rejection exit=" + std::to_string(code));
}

void criterion6_inverse_initial() {
    QParams ctx(0.5, 1e-14, 60, 8);
    auto spec = find_eigenvalues(ctx, 6);
    double T = 1.0;
    ScalarFn mode1 = catalog::space_function("mode1", spec);
    SourceSpec src{[mode1](double, double x) { return mode1(x); },
                   ScalarFn(0.0, T, [](double) { return 1.0; }), T};
    std::vector<double> gamma_true = {1.0, 0.1, 0.0, 0.0, 0.0, 0.0};

    double worst_modal = 0.0, worst_nonlocal = 0.0;
    bool amp_monotone = true;
    for (double alpha : {0.0, 1.0, -0.5}) {
        for (double xi0 : {T, T * ctx.q}) {  // T/2 is on-lattice at q = 0.5
            std::vector<double> nu_modes(6);
            for (int k = 0; k < 6; ++k)
                nu_modes[k] = mode_solution(k, xi0, gamma_true[k], src, spec, ctx);
            ScalarFn nu = synthesize_fn(ModalSeries(spec, nu_modes));
            InverseInitialProblem prob{src, alpha, xi0, nu, 2, 12.0};
            InitialReconstruction rec = reconstruct_initial(prob, spec, ctx);
            for (int k = 0; k < 6; ++k)
                worst_modal = std::max(
                    worst_modal,
                    std::abs(rec.gamma.coeffs[k] - gamma_true[k]));
            InitialDiagnostics diag = verify_reconstruction(prob, rec, spec, ctx);
            worst_nonlocal = std::max(worst_nonlocal, diag.nonlocal_residual);
            for (int k = 1; k < 6; ++k)
                amp_monotone = amp_monotone && (rec.log10_amplification[k] >
                                                rec.log10_amplification[k - 1]);
        }
    }

    bool rejected = false;
    try {
        InverseInitialProblem bad{src, 0.0, T,
                                  ScalarFn([](double) { return 0.0; }), 6, 12.0};
        reconstruct_gamma(bad, spec, ctx);
    } catch (const numeric_error& e) {
        rejected = std::string(e.what()).find("unrecoverable") !=
                   std::string::npos;
    }

    bool ok = worst_modal <= 1e-6 && worst_nonlocal <= 1e-8 && amp_monotone &&
              rejected;
    report(6, "inverse initial round trip", ok,
           "modal error " + fmt(worst_modal) + " <= 1e-6, nonlocal residual " +
               fmt(worst_nonlocal) + " <= 1e-8, amplification monotone=" +
               (amp_monotone ? "yes" : "no") +
               ", budget rejection=" + (rejected ? "yes" : "no"));
}

void criterion7_cli_determinism() {
    namespace fs = std::filesystem;
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    bool ok = true;
    std::string detail;
    for (std::string command :
         {std::string("selftest"), std::string("forward"),
          std::string("inverse-source"), std::string("inverse-initial")}) {
        RunConfig a, b;
        a.command = b.command = command;
        a.out_path = (fs::temp_directory_path() / ("qheat_acc_a_" + command + ".csv")).string();
        b.out_path = (fs::temp_directory_path() / ("qheat_acc_b_" + command + ".csv")).string();
        int ca = cli::run(a);
        int cb = cli::run(b);
        bool same = slurp(a.out_path) == slurp(b.out_path);
        bool cmd_ok = same && ca == cb && ca == 0;
        if (!cmd_ok) detail += command + " mismatch; ";
        ok = ok && cmd_ok;
    }
    report(7, "CLI determinism", ok,
           ok ? "byte-identical CSVs for all commands, selftest exit 0"
              : detail);
}

}  // namespace

int main() {
    criterion1_identities();
    criterion2_classical_limit();
    criterion3_spectrum();
    criterion4_forward();
    criterion5_inverse_source();
    criterion6_inverse_initial();
    criterion7_cli_determinism();
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
