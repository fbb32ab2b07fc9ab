#ifndef LNSUM_H
#define LNSUM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Sums of lognormal random variables: forward transforms (MGF / chf),
 * numerical inversion to CDF/pdf, segmentation, and arctan-mixture fitting.
 *
 * All functions return an error code; results go through out-parameters.
 * A thread-local message for the most recent failure is available from
 * lnsum_last_error(). */

typedef enum {
    LNSUM_OK = 0,
    LNSUM_EINVAL = 1,  /* invalid argument / configuration */
    LNSUM_EDOM = 2,    /* argument outside a method's domain */
    LNSUM_ENOCONV = 3, /* iteration or quadrature did not converge */
    LNSUM_EIO = 4      /* file could not be read or parsed */
} lnsum_status;

typedef struct lnsum_model lnsum_model;

const char* lnsum_last_error(void);

/* ---- model ---- */

/* components given as parallel arrays mu[i], sigma[i], i < n */
int lnsum_model_create(const double* mu, const double* sigma, int n,
                       lnsum_model** out);
/* text file, '#' comments, one "mu=<v> sigma=<v>" record per line */
int lnsum_model_parse_file(const char* path, lnsum_model** out);
void lnsum_model_free(lnsum_model* m);
int lnsum_model_size(const lnsum_model* m, int* n);
int lnsum_model_component(const lnsum_model* m, int i, double* mu, double* sigma);

/* closed-form density / distribution; single-component models only */
int lnsum_ref_pdf(const lnsum_model* m, double x, double* out);
int lnsum_ref_cdf(const lnsum_model* m, double x, double* out);

/* Fenton-Williamson equivalent lognormal of the sum */
int lnsum_fw_equivalent(const lnsum_model* m, double* mu, double* sigma);

/* n deterministic draws of the sum for the given seed */
int lnsum_sample(const lnsum_model* m, uint64_t seed, size_t n, double* out);

/* ---- forward transforms ---- */

/* engine: "gh", "split_gh", "asymptotic_gh", "reduced_range", "holgate",
 * "barouch_kaufman". N: quadrature order (0 selects the default).
 * Real axis: out_im receives 0. Imaginary axis: s is the frequency omega. */
int lnsum_transform(const lnsum_model* m, const char* engine, int imaginary_axis,
                    double s, int N, double* out_re, double* out_im);

/* M1 (image of x <= 1) and M2 (x >= 1); single-component models */
int lnsum_mgf_split(const lnsum_model* m, double s, int N, double* m1, double* m2);

/* k-th derivative of M(s) with respect to s (analytic, reduced-range) */
int lnsum_mgf_derivative(const lnsum_model* m, double s, int k, double* out);

/* cumulant curve on an ascending grid starting at omega <= 1e-4 */
int lnsum_cumulants(const lnsum_model* m, const double* omegas, size_t n,
                    double* X1, double* X2, double* a1, double* b1, double* a2,
                    double* b2);

/* ---- inversion ---- */

typedef struct {
    int N;        /* node count: stehfest/zakian/pade order, post-widder k */
    int K;        /* fourier term count / arctan mixture size */
    double c;     /* fourier contour abscissa (0: auto) */
    double L;     /* fourier half-period (0: auto) */
    double d;     /* davies grid spacing (0: auto) */
    int segments; /* piecewise segment count */
    uint64_t seed;
} lnsum_invert_opts;

/* all-zero opts select documented defaults for every method */
void lnsum_invert_opts_default(lnsum_invert_opts* opts);

/* method: "davies", "gil_pelaez", "gaver", "zakian", "pade", "fourier",
 * "post_widder", "der_haar", "cumulant", "piecewise", "arctan", "fw".
 * xs: ascending positive grid of n points.
 * cdf_raw: unclamped CDF (NaN when the method has no CDF form).
 * cdf: clamped to [0, 1]. pdf: NaN when the method has no density form.
 * Any output pointer may be NULL to skip that column. */
int lnsum_invert(const lnsum_model* m, const char* method, const double* xs,
                 size_t n, const lnsum_invert_opts* opts, double* cdf,
                 double* cdf_raw, double* pdf);

/* ---- segmentation and arctan-mixture fit ---- */

/* per-segment columns lo, hi, a, b, X1_lo, X2_lo (each length n_segments) */
int lnsum_segment_plan(const lnsum_model* m, int n_segments, double* lo,
                       double* hi, double* a, double* b, double* X1_lo,
                       double* X2_lo);

/* fit a K-term damped-exponential mixture to the model's chf; the fitter may
 * drop or add terms (at most max_terms are written; *out_terms reports the
 * count). residual may be NULL. */
int lnsum_fit_arctan(const lnsum_model* m, int K, int max_terms, double* A,
                     double* a, double* b, int* out_terms, double* residual);

/* CDF / pdf of an explicit mixture (terms given as parallel arrays) */
int lnsum_arctan_cdf(const double* A, const double* a, const double* b, int n,
                     double x, double* out);
int lnsum_arctan_pdf(const double* A, const double* a, const double* b, int n,
                     double x, double* out);

#ifdef __cplusplus
}
#endif

#endif /* LNSUM_H */
