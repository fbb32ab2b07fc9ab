#include "lnsum/lnsum.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "forward.hpp"
#include "invert.hpp"
#include "model.hpp"
#include "segfit.hpp"

using namespace lnsum;

struct lnsum_model {
    SumModel m;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
int guarded(F&& f) {
    try {
        f();
        return LNSUM_OK;
    } catch (const config_error& e) {
        g_last_error = e.what();
        return LNSUM_EINVAL;
    } catch (const io_error& e) {
        g_last_error = e.what();
        return LNSUM_EIO;
    } catch (const domain_error& e) {
        g_last_error = e.what();
        return LNSUM_EDOM;
    } catch (const convergence_error& e) {
        g_last_error = e.what();
        return LNSUM_ENOCONV;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LNSUM_EINVAL;
    }
}

int require(bool cond, const char* msg) {
    if (!cond) {
        g_last_error = msg;
        return LNSUM_EINVAL;
    }
    return LNSUM_OK;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// frequency where the model's chf envelope falls below 1e-5
double envelope_cut(const SumModel& m) {
    double w = 1.0;
    while (std::abs(chf_model(m, w, 40)) > 1e-5) {
        w *= 1.3;
        if (w > 1e9) throw convergence_error("chf envelope does not decay");
    }
    return w;
}

CumulantCurve auto_curve(const SumModel& m, int points = 3000) {
    double wmax = 2.0 * envelope_cut(m);
    std::vector<double> oms(points);
    double lo = 1e-4;
    for (int i = 0; i < points; ++i)
        oms[i] = lo * std::pow(wmax / lo, static_cast<double>(i) / (points - 1));
    return cumulants(m, oms);
}

void fill(double* dst, std::size_t n, double v) {
    if (dst)
        for (std::size_t i = 0; i < n; ++i) dst[i] = v;
}

void store_cdf(double* cdf, double* cdf_raw, std::size_t i, double raw) {
    if (cdf_raw) cdf_raw[i] = raw;
    if (cdf) cdf[i] = std::clamp(raw, 0.0, 1.0);
}

}  // namespace

extern "C" {

const char* lnsum_last_error(void) { return g_last_error.c_str(); }

int lnsum_model_create(const double* mu, const double* sigma, int n,
                       lnsum_model** out) {
    if (int rc = require(mu && sigma && out && n > 0, "null argument")) return rc;
    return guarded([&] {
        SumModel m;
        for (int i = 0; i < n; ++i) m.components.push_back({mu[i], sigma[i]});
        validate(m);
        *out = new lnsum_model{std::move(m)};
    });
}

int lnsum_model_parse_file(const char* path, lnsum_model** out) {
    if (int rc = require(path && out, "null argument")) return rc;
    return guarded([&] { *out = new lnsum_model{parse_model_file(path)}; });
}

void lnsum_model_free(lnsum_model* m) { delete m; }

int lnsum_model_size(const lnsum_model* m, int* n) {
    if (int rc = require(m && n, "null argument")) return rc;
    *n = static_cast<int>(m->m.components.size());
    return LNSUM_OK;
}

int lnsum_model_component(const lnsum_model* m, int i, double* mu, double* sigma) {
    if (int rc = require(m && mu && sigma, "null argument")) return rc;
    if (int rc = require(i >= 0 && i < static_cast<int>(m->m.components.size()),
                         "component index out of range"))
        return rc;
    *mu = m->m.components[i].mu;
    *sigma = m->m.components[i].sigma;
    return LNSUM_OK;
}

int lnsum_ref_pdf(const lnsum_model* m, double x, double* out) {
    if (int rc = require(m && out, "null argument")) return rc;
    if (int rc = require(m->m.components.size() == 1,
                         "closed form needs a single-component model"))
        return rc;
    return guarded([&] { *out = pdf(x, m->m.components[0]); });
}

int lnsum_ref_cdf(const lnsum_model* m, double x, double* out) {
    if (int rc = require(m && out, "null argument")) return rc;
    if (int rc = require(m->m.components.size() == 1,
                         "closed form needs a single-component model"))
        return rc;
    return guarded([&] { *out = cdf(x, m->m.components[0]); });
}

int lnsum_fw_equivalent(const lnsum_model* m, double* mu, double* sigma) {
    if (int rc = require(m && mu && sigma, "null argument")) return rc;
    return guarded([&] {
        LognormalComponent eq = fw_equivalent(m->m);
        *mu = eq.mu;
        *sigma = eq.sigma;
    });
}

int lnsum_sample(const lnsum_model* m, uint64_t seed, size_t n, double* out) {
    if (int rc = require(m && out && n > 0, "null argument")) return rc;
    return guarded([&] {
        std::vector<double> v = sample_sum(m->m, n, seed);
        std::copy(v.begin(), v.end(), out);
    });
}

int lnsum_transform(const lnsum_model* m, const char* engine, int imaginary_axis,
                    double s, int N, double* out_re, double* out_im) {
    if (int rc = require(m && engine && out_re && out_im, "null argument"))
        return rc;
    return guarded([&] {
        Axis axis = imaginary_axis ? Axis::imaginary_omega : Axis::real_s;
        Engine e = engine_from_name(engine);
        int order = N > 0 ? N : (axis == Axis::real_s ? 20 : 40);
        TransformTable t = transform_product(m->m, {s}, axis, e, order);
        *out_re = t.values[0].real();
        *out_im = t.values[0].imag();
    });
}

int lnsum_mgf_split(const lnsum_model* m, double s, int N, double* m1, double* m2) {
    if (int rc = require(m && m1 && m2, "null argument")) return rc;
    if (int rc = require(m->m.components.size() == 1,
                         "split needs a single-component model"))
        return rc;
    return guarded([&] {
        const auto& c = m->m.components[0];
        auto [v1, v2] = mgf_split(s * std::exp(c.mu), c.sigma, N > 0 ? N : 20);
        *m1 = v1;
        *m2 = v2;
    });
}

int lnsum_mgf_derivative(const lnsum_model* m, double s, int k, double* out) {
    if (int rc = require(m && out, "null argument")) return rc;
    if (int rc = require(k >= 0 && k <= 8, "derivative order must be in [0, 8]"))
        return rc;
    return guarded([&] { *out = make_mgf_sampler(m->m).derivative(s, k); });
}

int lnsum_cumulants(const lnsum_model* m, const double* omegas, size_t n,
                    double* X1, double* X2, double* a1, double* b1, double* a2,
                    double* b2) {
    if (int rc = require(m && omegas && n > 0, "null argument")) return rc;
    return guarded([&] {
        CumulantCurve cc = cumulants(m->m, std::vector<double>(omegas, omegas + n));
        for (size_t i = 0; i < n; ++i) {
            if (X1) X1[i] = cc.X1[i];
            if (X2) X2[i] = cc.X2[i];
            if (a1) a1[i] = cc.a1[i];
            if (b1) b1[i] = cc.b1[i];
            if (a2) a2[i] = cc.a2[i];
            if (b2) b2[i] = cc.b2[i];
        }
    });
}

void lnsum_invert_opts_default(lnsum_invert_opts* opts) {
    if (opts) std::memset(opts, 0, sizeof(*opts));
}

int lnsum_invert(const lnsum_model* m, const char* method, const double* xs,
                 size_t n, const lnsum_invert_opts* opts, double* cdf_out,
                 double* cdf_raw, double* pdf_out) {
    if (int rc = require(m && method && xs && n > 0, "null argument")) return rc;
    lnsum_invert_opts o;
    lnsum_invert_opts_default(&o);
    if (opts) o = *opts;
    return guarded([&] {
        const SumModel& model = m->m;
        std::vector<double> grid(xs, xs + n);
        for (size_t i = 0; i < n; ++i) {
            if (!(grid[i] > 0.0)) throw config_error("x grid must be positive");
            if (i && !(grid[i] > grid[i - 1]))
                throw config_error("x grid must be ascending");
        }
        double x_max = grid.back();
        std::string name(method);
        fill(cdf_out, n, kNaN);
        fill(cdf_raw, n, kNaN);
        fill(pdf_out, n, kNaN);

        if (name == "davies") {
            ChfSampler chf = make_chf_sampler(model);
            DaviesParams p;
            if (o.d > 0.0) {
                p.d = o.d;
                p.N = static_cast<int>(envelope_cut(model) / p.d) + 1;
            } else {
                p = davies_auto(model, x_max);
            }
            std::vector<double> F = davies_cdf_grid(chf, grid, p.d, p.N);
            for (size_t i = 0; i < n; ++i) store_cdf(cdf_out, cdf_raw, i, F[i]);
        } else if (name == "gil_pelaez") {
            ChfSampler chf = make_chf_sampler(model);
            for (size_t i = 0; i < n; ++i)
                store_cdf(cdf_out, cdf_raw, i, gil_pelaez_cdf(chf, grid[i]));
        } else if (name == "gaver" || name == "zakian") {
            MgfSampler ms = make_mgf_sampler(model);
            int N = o.N > 0 ? o.N : 12;
            for (size_t i = 0; i < n; ++i) {
                double F = (name == "gaver") ? gaver_stehfest_cdf(ms, grid[i], N)
                                             : zakian_cdf(ms, grid[i], N);
                store_cdf(cdf_out, cdf_raw, i, F);
                if (pdf_out)
                    pdf_out[i] = (name == "gaver") ? gaver_stehfest(ms, grid[i], N)
                                                   : zakian(ms, grid[i], N);
            }
        } else if (name == "pade") {
            InversionNodes nodes = pade_nodes(o.N > 0 ? o.N : 16);
            ComplexMgf cm = make_complex_mgf(model);
            for (size_t i = 0; i < n; ++i) {
                store_cdf(cdf_out, cdf_raw, i, gauss_quadrature_cdf(cm, grid[i], nodes));
                if (pdf_out) pdf_out[i] = gauss_quadrature_invert(cm, grid[i], nodes);
            }
        } else if (name == "fourier") {
            ComplexMgf cm = make_complex_mgf(model);
            int K = o.K > 0 ? o.K : 2000;
            double c = o.c > 0.0 ? o.c : 1.5 / x_max;
            double L = o.L > 0.0 ? o.L : 2.0 * x_max;
            std::vector<double> f = fourier_series_invert(cm, grid, c, L, K,
                                                          FourierVariant::cosine);
            ComplexMgf cm_over_s = [cm](cplx s) { return cm(s) / s; };
            std::vector<double> F = fourier_series_invert(cm_over_s, grid, c, L, K,
                                                          FourierVariant::cosine);
            for (size_t i = 0; i < n; ++i) {
                store_cdf(cdf_out, cdf_raw, i, F[i]);
                if (pdf_out) pdf_out[i] = f[i];
            }
        } else if (name == "post_widder") {
            MgfSampler ms = make_mgf_sampler(model);
            int k = o.N > 0 ? o.N : 20;
            for (size_t i = 0; i < n; ++i)
                if (pdf_out) pdf_out[i] = post_widder(ms, grid[i], k);
        } else if (name == "der_haar") {
            MgfSampler ms = make_mgf_sampler(model);
            for (size_t i = 0; i < n; ++i)
                if (pdf_out) pdf_out[i] = der_haar(ms, grid[i], DerHaarVariant::one);
        } else if (name == "cumulant") {
            CumulantCurve cc = auto_curve(model);
            for (size_t i = 0; i < n; ++i)
                store_cdf(cdf_out, cdf_raw, i, cumulant_cdf(cc, grid[i]));
        } else if (name == "piecewise") {
            CumulantCurve cc = auto_curve(model);
            SegmentPlan plan =
                build_segment_plan(cc, o.segments > 0 ? o.segments : 4);
            for (size_t i = 0; i < n; ++i)
                store_cdf(cdf_out, cdf_raw, i, expint_piecewise_cdf(plan, grid[i]));
        } else if (name == "arctan") {
            int K = o.K > 0 ? o.K : 8;
            CumulantCurve cc = auto_curve(model);
            std::vector<double> nodes = node_intervals(cc, K);
            std::vector<double> samp = node_intervals(cc, 400);
            TransformTable t;
            t.axis = Axis::imaginary_omega;
            t.grid = samp;
            for (double w : samp) t.values.push_back(chf_model(model, w));
            ArctanMixture mix = fit_exponential_sum(t, nodes, K);
            for (size_t i = 0; i < n; ++i) {
                store_cdf(cdf_out, cdf_raw, i, arctan_mixture_cdf(mix, grid[i]));
                if (pdf_out) pdf_out[i] = arctan_mixture_pdf(mix, grid[i]);
            }
        } else if (name == "fw") {
            LognormalComponent eq = fw_equivalent(model);
            for (size_t i = 0; i < n; ++i) {
                store_cdf(cdf_out, cdf_raw, i, cdf(grid[i], eq));
                if (pdf_out) pdf_out[i] = pdf(grid[i], eq);
            }
        } else {
            throw config_error("unknown inversion method: " + name);
        }
    });
}

int lnsum_segment_plan(const lnsum_model* m, int n_segments, double* lo,
                       double* hi, double* a, double* b, double* X1_lo,
                       double* X2_lo) {
    if (int rc = require(m, "null argument")) return rc;
    return guarded([&] {
        CumulantCurve cc = auto_curve(m->m);
        SegmentPlan plan = build_segment_plan(cc, n_segments);
        for (int i = 0; i < n_segments; ++i) {
            const Segment& s = plan.segments[i];
            if (lo) lo[i] = s.lo;
            if (hi) hi[i] = s.hi;
            if (a) a[i] = s.a;
            if (b) b[i] = s.b;
            if (X1_lo) X1_lo[i] = s.X_lo.real();
            if (X2_lo) X2_lo[i] = s.X_lo.imag();
        }
    });
}

int lnsum_fit_arctan(const lnsum_model* m, int K, int max_terms, double* A,
                     double* a, double* b, int* out_terms, double* residual) {
    if (int rc = require(m && A && a && b && out_terms && max_terms > 0,
                         "null argument"))
        return rc;
    return guarded([&] {
        CumulantCurve cc = auto_curve(m->m);
        std::vector<double> nodes = node_intervals(cc, K);
        std::vector<double> samp = node_intervals(cc, 400);
        TransformTable t;
        t.axis = Axis::imaginary_omega;
        t.grid = samp;
        for (double w : samp) t.values.push_back(chf_model(m->m, w));
        double res = 0.0;
        ArctanMixture mix = fit_exponential_sum(t, nodes, K, &res);
        if (static_cast<int>(mix.terms.size()) > max_terms)
            throw config_error("fitted mixture exceeds max_terms");
        *out_terms = static_cast<int>(mix.terms.size());
        for (size_t i = 0; i < mix.terms.size(); ++i) {
            A[i] = mix.terms[i].A;
            a[i] = mix.terms[i].a;
            b[i] = mix.terms[i].b;
        }
        if (residual) *residual = res;
    });
}

int lnsum_arctan_cdf(const double* A, const double* a, const double* b, int n,
                     double x, double* out) {
    if (int rc = require(A && a && b && out && n > 0, "null argument")) return rc;
    return guarded([&] {
        ArctanMixture mix;
        for (int i = 0; i < n; ++i) mix.terms.push_back({A[i], a[i], b[i]});
        *out = arctan_mixture_cdf(mix, x);
    });
}

int lnsum_arctan_pdf(const double* A, const double* a, const double* b, int n,
                     double x, double* out) {
    if (int rc = require(A && a && b && out && n > 0, "null argument")) return rc;
    return guarded([&] {
        ArctanMixture mix;
        for (int i = 0; i < n; ++i) mix.terms.push_back({A[i], a[i], b[i]});
        *out = arctan_mixture_pdf(mix, x);
    });
}

}  // extern "C"
