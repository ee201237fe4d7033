/* yamabe - certified Picard solver for Dirichlet problems of the
 * gradient-form constant-curvature (Yamabe-type) equation on small convex
 * domains, behind a C ABI.
 *
 * Conventions: every function returns YM_OK (0) on success and a nonzero
 * ym_status on failure; ym_last_error() describes the most recent failure
 * on the calling thread. Out-parameters are written only on success.
 * Handles are opaque and freed with their matching *_free function.
 * Strings returned through char** are heap-allocated; release them with
 * ym_string_free.
 */
#ifndef YAMABE_H
#define YAMABE_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ym_status {
    YM_OK = 0,
    YM_ERR_INVALID_ARGUMENT = 1,
    YM_ERR_PARSE = 2,
    YM_ERR_CERTIFICATE = 3,
    YM_ERR_SOLVER = 4,
    YM_ERR_IO = 5,
    YM_ERR_INTERNAL = 6
} ym_status;

typedef struct ym_domain ym_domain;
typedef struct ym_grid ym_grid;
typedef struct ym_field ym_field;
typedef struct ym_certificate ym_certificate;
typedef struct ym_run ym_run;

const char* ym_version(void);
/* Message for the last failure on this thread ("" when none). */
const char* ym_last_error(void);
void ym_string_free(char* s);

/* ------------------------------------------------------------- domains --- */

/* Ball in R^n, 3 <= n <= 8. */
ym_status ym_domain_create_ball(const double* center, int n, double radius, ym_domain** out);
/* Axis-aligned box, lo < hi componentwise. */
ym_status ym_domain_create_box(const double* lo, const double* hi, int n, ym_domain** out);
/* Intersection of m half-spaces normal.x <= offset in R^3; normals are
 * rows of a m x 3 array and must be unit length. Must be bounded with
 * nonempty interior. */
ym_status ym_domain_create_polytope(const double* normals, const double* offsets, int m,
                                    ym_domain** out);
void ym_domain_free(ym_domain* d);

int ym_domain_dim(const ym_domain* d);
/* Volume: closed form for balls/boxes; seeded Monte-Carlo rejection
 * sampling for polytopes (standard error <= 0.5%). */
ym_status ym_domain_volume(const ym_domain* d, unsigned long long seed, double* out);
/* Least distance between two parallel planes enclosing the domain. */
ym_status ym_domain_slab_diameter(const ym_domain* d, double* out);
ym_status ym_domain_diameter(const ym_domain* d, double* out);
/* Negative inside the domain. */
ym_status ym_domain_signed_distance(const ym_domain* d, const double* point, double* out);
ym_status ym_domain_contains(const ym_domain* d, const double* point, int* out);
/* The dilation factor * domain; the origin must be interior. */
ym_status ym_domain_scale(const ym_domain* d, double factor, ym_domain** out);

/* -------------------------------------------------------- certificates --- */

/* Convergence certificate for the Picard iteration on this domain with
 * sup|R| <= lambda_sup and sup|S| <= gamma_sup. theorem selects the
 * plain (1) or rescaled-curvature (2) bound family; the latter ignores
 * lambda_sup. */
ym_status ym_certificate_check(const ym_domain* d, double lambda_sup, double gamma_sup,
                               int theorem, ym_certificate** out);
void ym_certificate_free(ym_certificate* c);
int ym_certificate_passed(const ym_certificate* c);
/* Governing clause id, e.g. "T1_1a". */
ym_status ym_certificate_clause(const ym_certificate* c, char** out);
double ym_certificate_k_bound(const ym_certificate* c);
double ym_certificate_contraction_q(const ym_certificate* c);
ym_status ym_certificate_json(const ym_certificate* c, char** out);

/* ------------------------------------------------------ scalar analysis --- */

typedef enum ym_size_mode {
    YM_SIZE_VOLUME_CBRT = 0, /* size = volume^(1/3) */
    YM_SIZE_DIAMETER = 1,
    YM_SIZE_BALL_RADIUS = 2
} ym_size_mode;

typedef struct ym_majorant_params {
    int n;
    double lambda_sup;
    double gamma_sup;
    double size;
    double green_coeff; /* gradient-estimate constant (see ym_evans_bound, C_n) */
    int mode;           /* ym_size_mode */
} ym_majorant_params;

ym_status ym_majorant(const ym_majorant_params* p, double t, double* out);
/* Smallest root of t = majorant(t); *exists = 0 reports absence (not an
 * error). */
ym_status ym_smallest_fixed_point(const ym_majorant_params* p, double* k, int* exists);
ym_status ym_explicit_k_bound(const ym_majorant_params* p, double* out);
/* (1/(2(n-1))) (delta^2 L e^{K delta}/2 + sqrt(2) delta K); < 1 certifies
 * geometric convergence. */
ym_status ym_contraction_constant(double delta, double lambda_sup, double k, int n, double* out);
/* Convex 3-D gradient-integral bound 4.76 (pi^2 V)^(1/3). */
ym_status ym_evans_bound(double volume, double* out);

/* Dirichlet Green's function of the unit ball (image construction). */
ym_status ym_ball_green(int n, const double* x, const double* xp, double* out);
ym_status ym_ball_green_gradient(int n, const double* x, const double* xp, double* out_vec);
/* integral over the unit ball of |grad_x G(x, .)|. */
ym_status ym_green_gradient_integral(int n, const double* x, double rel_tol, double* out);
/* C_n = sup over x of the integral above; arg_radius may be NULL. */
ym_status ym_ball_green_constant(int n, double rel_tol, double* value, double* arg_radius);

/* ---------------------------------------------------- grids and fields --- */

/* Uniform Cartesian grid with embedded boundary; rejects mesh sizes
 * coarser than slab_diameter / 2. */
ym_status ym_grid_build(const ym_domain* d, double mesh_size, ym_grid** out);
void ym_grid_free(ym_grid* g);
long long ym_grid_size(const ym_grid* g); /* interior node count */
double ym_grid_mesh_size(const ym_grid* g);
/* Writes dim doubles. Nodes are ordered lexicographically by lattice
 * coordinate. */
ym_status ym_grid_node_position(const ym_grid* g, long long node, double* out);

/* Solves lap u = source, u = boundary on the domain boundary, both given
 * as expressions in x, y, z (or x1..x8): + - * /, exp, sin, cos, pi. */
ym_status ym_solve_dirichlet(const ym_grid* g, const char* source_expr,
                             const char* boundary_expr, ym_field** out);
void ym_field_free(ym_field* f);
long long ym_field_size(const ym_field* f);
ym_status ym_field_values(const ym_field* f, double* buffer, long long capacity);
/* Any out-pointer may be NULL. h10 is the l2 norm of the discrete
 * gradient. */
ym_status ym_field_norms(const ym_field* f, double* sup, double* l2, double* h10);
ym_status ym_field_write_csv(const ym_field* f, const char* path);
/* Raw little-endian float64 dump plus a <path>.json sidecar. */
ym_status ym_field_write_binary(const ym_field* f, const char* path);

/* -------------------------------------------------------------- runs ---- */

typedef struct ym_run_options {
    double mesh_size; /* must be <= slab_diameter / 8 */
    double tol;       /* 0 -> 1e-9 */
    int max_iter;     /* 0 -> 200 */
    int override_certificate;
    int unit_gradient_coefficient; /* 1: coefficient 1 instead of (n-1)(n-2) */
    unsigned long long seed;
} ym_run_options;

typedef struct ym_trace_row {
    int k;
    double sup_grad;
    double diff_h10;
    double ratio; /* NaN for k < 2 */
    double residual;
} ym_trace_row;

/* Picard iteration for lap f = -(1/(2(n-1)))[R e^{2f} + (n-1)(n-2)|grad f|^2] + S,
 * f = 0 on the boundary. R, S are expressions; lambda_sup/gamma_sup are
 * their certified sup bounds. A failing certificate without the override
 * flag yields YM_ERR_CERTIFICATE. */
ym_status ym_run_solve(const ym_domain* d, int n, const char* R, const char* S,
                       double lambda_sup, double gamma_sup, const ym_run_options* o,
                       ym_run** out);
/* Boundary constant c with curvature parameter lambda; requires
 * |lambda| e^{2c} <= 1/4. */
ym_status ym_run_shifted(const ym_domain* d, int n, double c, double lambda, const char* S,
                         double gamma_sup, const ym_run_options* o, ym_run** out);
/* Solves on d * base with R = lambda, pulls back, reports curvature
 * lambda / d^2. */
ym_status ym_run_deform(const ym_domain* base, double d, double lambda,
                        const ym_run_options* o, ym_run** out);
void ym_run_free(ym_run* r);

int ym_run_converged(const ym_run* r);
int ym_run_certified(const ym_run* r);
long long ym_run_iterations(const ym_run* r);
double ym_run_fixed_point(const ym_run* r); /* NaN when no fixed point exists */
double ym_run_contraction(const ym_run* r);
double ym_run_final_residual(const ym_run* r);
double ym_run_min_conformal_factor(const ym_run* r);
double ym_run_curvature(const ym_run* r); /* deform runs only, else NaN */
ym_status ym_run_trace(const ym_run* r, ym_trace_row* rows, long long capacity,
                       long long* written);
/* which: 0 = gradient-form solution f, 1 = conformal factor u,
 * 2 = pulled-back field (deform runs). Returns a copy owned by the
 * caller. */
ym_status ym_run_field(const ym_run* r, int which, ym_field** out);
ym_status ym_run_summary_json(const ym_run* r, char** out);

/* --------------------------------------------- config-driven front end --- */

typedef struct ym_experiment_options {
    const char* mode;       /* overrides the config's mode when non-NULL */
    const char* output_dir; /* overrides the config's output_dir when non-NULL */
    int has_seed;
    unsigned long long seed;
    int override_certificate;
    int workers; /* 0 = config / YAMABE_WORKERS / hardware */
    int fast;    /* verify subset */
} ym_experiment_options;

/* Parses the config text ([domain]/[problem]/[run] sections) and runs the
 * experiment. *exit_code follows the CLI contract: 0 success, 1 config or
 * usage error, 2 certificate failure without override, 3 non-convergence,
 * 4 verify-suite failure. The returned status is YM_OK whenever the
 * outcome was decided (even a nonzero exit_code); *report carries the
 * printable result or error listing. */
ym_status ym_experiment_run(const char* config_text, const ym_experiment_options* opts,
                            char** report, int* exit_code);

/* Runs the built-in verification suite (acceptance criteria + module
 * invariants). */
ym_status ym_verify(int fast, int workers, char** report, int* all_passed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* YAMABE_H */
