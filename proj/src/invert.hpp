#pragma once

#include <array>
#include <functional>

#include "forward.hpp"

namespace lnsum {

enum class NodeFamily { stehfest_real, zakian, pade_complex };

struct InversionNodes {
    std::vector<cplx> nodes;    // a_n
    std::vector<cplx> weights;  // K_n
    int order = 0;
    NodeFamily family = NodeFamily::stehfest_real;
};

// Real-argument transform sampler with optional analytic derivatives.
struct MgfSampler {
    std::function<double(double)> value;                 // M(s)
    std::function<double(double, int)> derivative;       // d^k M / ds^k
};

// Complex-argument sampler (Re s > 0) for the Padé and Fourier methods.
using ComplexMgf = std::function<cplx(cplx)>;

// Characteristic-function sampler phi(j omega) with the distribution mean
// (the omega->0 Gil-Pelaez limit needs it).
struct ChfSampler {
    std::function<cplx(double)> phi;
    double mean = 0.0;
};

MgfSampler make_mgf_sampler(const SumModel& m);       // reduced-range engine
ComplexMgf make_complex_mgf(const SumModel& m);
ChfSampler make_chf_sampler(const SumModel& m, int N = 40);

// ---- Post-Widder family ----

double post_widder(const MgfSampler& M, double x, int k);

enum class DerHaarVariant { one, half };
double der_haar(const MgfSampler& M, double x, DerHaarVariant v);

// ---- Gaver-Stehfest / Zakian ----

InversionNodes stehfest_coefficients(int N);  // a_n = n ln2 conceptually
InversionNodes zakian_nodes(int N);           // same K_n, a = 2

double gaver_stehfest(const MgfSampler& M, double x, int N);
double zakian(const MgfSampler& M, double x, int N);
double gaver_stehfest_cdf(const MgfSampler& M, double x, int N);
double zakian_cdf(const MgfSampler& M, double x, int N);

// ---- Padé-node Gaussian quadrature ----

InversionNodes pade_nodes(int N);

// k = 0 gives the pdf; use gauss_quadrature_cdf for the CDF.
double gauss_quadrature_invert(const ComplexMgf& M, double x,
                               const InversionNodes& nodes, int k = 0);
double gauss_quadrature_cdf(const ComplexMgf& M, double x,
                            const InversionNodes& nodes);

// ---- Fourier series (Durbin) ----

enum class FourierVariant { cosine, sine };
std::vector<double> fourier_series_invert(const ComplexMgf& M,
                                          const std::vector<double>& xs, double c,
                                          double L, int K, FourierVariant v);

// ---- Gil-Pelaez / Davies ----

double gil_pelaez_cdf(const ChfSampler& chf, double x);
double davies_cdf(const ChfSampler& chf, double x, double d, int N);
std::vector<double> davies_cdf_grid(const ChfSampler& chf,
                                    const std::vector<double>& xs, double d, int N);

struct DaviesParams {
    double d = 0.0;
    int N = 0;
};
// Grid spacing from the half-period bound, term count from the envelope
// decay of the model's chf.
DaviesParams davies_auto(const SumModel& m, double x_max, int gh_order = 40);

// ---- cumulant / piecewise exponential-integral methods ----

double cumulant_cdf(const CumulantCurve& curve, double x);

struct Segment {
    double lo = 0.0, hi = 0.0;
    double a = 0.0, b = 0.0;          // mid-segment attenuation / group delay
    cplx X_lo = 0.0;                  // cumulant at the left endpoint
    double amplitude = 1.0;           // envelope exp(Re X_lo)
    cplx slope = 0.0;                 // secant d(log phi)/d omega over the segment
    std::vector<cplx> corrections;    // sine-series residual coefficients c_k
};

struct SegmentPlan {
    std::vector<Segment> segments;
    double omega_m = 0.0, a_m = 0.0, b_m = 0.0;  // terminal stretch
    cplx X_m = 0.0;
};

double expint_piecewise_cdf(const SegmentPlan& plan, double x);

// Additive CDF correction contributed by one segment's sine coefficients;
// expint_piecewise_cdf already includes it.
double segment_correction(const std::vector<cplx>& coeffs, const Segment& seg,
                          double x);

// ---- arctan mixtures ----

struct ArctanTerm {
    double A = 0.0, a = 0.0, b = 0.0;
};
struct ArctanMixture {
    std::vector<ArctanTerm> terms;
};

void validate(const ArctanMixture& mix);
double arctan_mixture_cdf(const ArctanMixture& mix, double x);
double arctan_mixture_pdf(const ArctanMixture& mix, double x);

// Single-term CDF in the combined one-arctan form with the +pi branch
// correction for x^2 > a^2 + b^2 (cross-check of the two-arctan form).
double arctan_cdf_combined(double a, double b, double x);

// ---- second-order cumulant pdf ----

struct ChirpTerm {
    double A = 0.0, a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
};
double second_order_pdf(const std::vector<ChirpTerm>& terms, double x);

// ---- converse: chf from a tabulated CDF ----

TransformTable chf_from_cdf(const DistributionTable& table,
                            const std::vector<double>& omegas);

}  // namespace lnsum
