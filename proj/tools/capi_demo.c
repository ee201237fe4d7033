/* Minimal C client of libyamabe: certify a small ball, run the iteration,
 * and print the per-step trace. Compiled as C89-compatible C to keep the
 * header honest about its ABI. */
#include <stdio.h>

#include "yamabe.h"

int main(void) {
    double center[3] = {0.0, 0.0, 0.0};
    ym_domain* ball = NULL;
    ym_certificate* cert = NULL;
    ym_run* run = NULL;
    ym_run_options opts;
    ym_trace_row rows[32];
    long long written = 0, k;
    char* clause = NULL;

    if (ym_domain_create_ball(center, 3, 0.05, &ball) != YM_OK) {
        fprintf(stderr, "domain: %s\n", ym_last_error());
        return 1;
    }

    if (ym_certificate_check(ball, 1.0, 0.0, 1, &cert) != YM_OK) {
        fprintf(stderr, "certificate: %s\n", ym_last_error());
        return 1;
    }
    ym_certificate_clause(cert, &clause);
    printf("certificate: %s via %s (k_bound %.6f, worst-case q %.6f)\n",
           ym_certificate_passed(cert) ? "PASS" : "FAIL", clause,
           ym_certificate_k_bound(cert), ym_certificate_contraction_q(cert));
    ym_string_free(clause);

    opts.mesh_size = 0.0125;
    opts.tol = 1e-9;
    opts.max_iter = 100;
    opts.override_certificate = 0;
    opts.unit_gradient_coefficient = 0;
    opts.seed = 7;
    if (ym_run_solve(ball, 3, "1", "0", 1.0, 0.0, &opts, &run) != YM_OK) {
        fprintf(stderr, "run: %s\n", ym_last_error());
        return 1;
    }

    printf("converged=%d K=%.6f q=%.6f final residual=%.3e min u=%.6f\n",
           ym_run_converged(run), ym_run_fixed_point(run), ym_run_contraction(run),
           ym_run_final_residual(run), ym_run_min_conformal_factor(run));
    ym_run_trace(run, rows, 32, &written);
    for (k = 0; k < written; ++k)
        printf("  k=%d sup_grad=%.3e diff_h10=%.3e residual=%.3e\n", rows[k].k,
               rows[k].sup_grad, rows[k].diff_h10, rows[k].residual);

    ym_run_free(run);
    ym_certificate_free(cert);
    ym_domain_free(ball);
    return 0;
}
