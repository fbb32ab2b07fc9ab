// Acceptance battery: each criterion is selected by its index on the command
// line, prints one PASS/FAIL line, and exits 0/1.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "invert.hpp"
#include "segfit.hpp"

using namespace lnsum;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo * std::pow(hi / lo, i / (n - 1.0));
    return xs;
}

CumulantCurve curve_for(const SumModel& m, double omega_hi, int n = 3000) {
    std::vector<double> omegas;
    for (int i = 0; i < n; ++i)
        omegas.push_back(1e-4 * std::pow(omega_hi / 1e-4, i / (n - 1.0)));
    return cumulants(m, omegas);
}

bool report(int id, bool ok, const std::string& what, const std::string& metric) {
    std::printf("criterion %2d: %s  %s  (%s)\n", id, ok ? "PASS" : "FAIL",
                what.c_str(), metric.c_str());
    return ok;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

// bisect a sign change of g on [lo, hi]
double bisect(const std::function<double(double)>& g, double lo, double hi) {
    double flo = g(lo);
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = g(mid);
        if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// ---- criteria ----

bool c1_closed_form_round_trip() {
    double worst = 0.0;
    for (double sg : {0.5, 1.0, 2.0}) {
        SumModel m{{{0.0, sg}}};
        auto chf = make_chf_sampler(m);
        auto p = davies_auto(m, 20.0);
        auto xs = log_grid(0.05, 20.0, 200);
        auto F = davies_cdf_grid(chf, xs, p.d, p.N);
        for (int i = 0; i < 200; ++i)
            worst = std::max(worst, std::fabs(F[i] - cdf(xs[i], m.components[0])));
    }
    return report(1, worst <= 1e-3, "single lognormal: grid CDF vs closed form",
                  "max abs err " + fmt("%.3e", worst) + " tol 1e-3");
}

bool c2_known_pair_battery() {
    MgfSampler M;
    M.value = [](double s) { return 1.0 / (s + 1.0); };
    M.derivative = [](double s, int k) {
        double v = 1.0 / (s + 1.0), d = v;
        for (int i = 1; i <= k; ++i) d *= -i * v;
        return d;
    };
    ComplexMgf Mc = [](cplx s) { return 1.0 / (s + 1.0); };
    std::vector<double> xs{0.5, 1.0, 2.0, 5.0};
    auto pade = pade_nodes(8);

    double e_gs = 0.0, e_pade = 0.0, e_fourier = 0.0, e_pw = 0.0;
    auto four = fourier_series_invert(Mc, xs, 0.3, 12.0, 2000,
                                      FourierVariant::cosine);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double x = xs[i], ref = std::exp(-x);
        e_gs = std::max(e_gs, std::fabs(gaver_stehfest(M, x, 12) - ref) / ref);
        e_pade = std::max(
            e_pade, std::fabs(gauss_quadrature_invert(Mc, x, pade) - ref) / ref);
        e_fourier = std::max(e_fourier, std::fabs(four[i] - ref) / ref);
        e_pw = std::max(e_pw, std::fabs(post_widder(M, x, 20) - ref) / ref);
    }
    bool ok = e_gs <= 1e-4 && e_pade <= 1e-6 && e_fourier <= 1e-3 && e_pw <= 3e-2;
    return report(2, ok, "four inverters recover the unit exponential",
                  "rel err gs " + fmt("%.2e", e_gs) + "/1e-4, pade " +
                      fmt("%.2e", e_pade) + "/1e-6, fourier " +
                      fmt("%.2e", e_fourier) + "/1e-3, pw " + fmt("%.2e", e_pw) +
                      "/3e-2");
}

bool c3_cross_engine_agreement() {
    double worst = 0.0;
    for (double sg : {0.5, 1.0, 2.0}) {
        for (double s : log_grid(0.01, 50.0, 50)) {
            double a = mgf_gh(s, sg, 64);
            double b = mgf_asymptotic_gh(s, sg, 64);
            double c = mgf_reduced(s, sg);
            double den = std::max({a, b, c});
            worst = std::max(worst, (std::max({a, b, c}) - std::min({a, b, c})) / den);
        }
    }
    return report(3, worst <= 1e-5, "three forward engines agree pairwise",
                  "max rel spread " + fmt("%.3e", worst) + " tol 1e-5");
}

bool c4_mgf_crossings() {
    const double sgs[3] = {0.5, 1.0, 2.0};
    bool ok = true;
    std::string where;
    for (int i = 0; i < 3 && ok; ++i) {
        for (int j = i + 1; j < 3 && ok; ++j) {
            auto g = [&](double s) {
                return mgf_reduced(s, sgs[i]) - mgf_reduced(s, sgs[j]);
            };
            // sign change must live inside [0.3, 1.0]
            double lo = 0.05, hi = 5.0;
            double s_star = bisect(g, lo, hi);
            ok = ok && s_star >= 0.3 && s_star <= 1.0;
            where += fmt(" %.3f", s_star);
        }
    }
    return report(4, ok, "transform curves cross pairwise in [0.3, 1.0]",
                  "crossings" + where);
}

bool c5_envelope_crossings() {
    const double sgs[3] = {0.5, 1.0, 2.0};
    std::vector<CumulantCurve> curves;
    for (double sg : sgs) curves.push_back(curve_for(SumModel{{{0.0, sg}}}, 50.0, 4000));
    bool ok = true;
    std::string where;
    const auto& oms = curves[0].omegas;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            double w_star = -1.0;
            for (std::size_t k = 1; k < oms.size(); ++k) {
                double d0 = curves[i].X1[k - 1] - curves[j].X1[k - 1];
                double d1 = curves[i].X1[k] - curves[j].X1[k];
                if (oms[k] > 0.05 && d0 * d1 < 0.0) {
                    w_star = 0.5 * (oms[k - 1] + oms[k]);
                    break;
                }
            }
            ok = ok && w_star >= 1.0 && w_star <= 4.0;
            where += fmt(" %.3f", w_star);
        }
    }
    return report(5, ok, "cumulant envelopes cross pairwise in [1, 4]",
                  "crossings" + where);
}

bool c6_arctan_fit_sigma2() {
    SumModel m{{{0.0, 2.0}}};
    auto cc = curve_for(m, 2.0 * std::exp(3.6 * 2.0));
    auto nodes = node_intervals(cc, 8);
    auto samp = node_intervals(cc, 400);
    TransformTable t;
    t.axis = Axis::imaginary_omega;
    t.grid = samp;
    for (double w : samp) t.values.push_back(chf_model(m, w));
    auto fit = fit_exponential_sum(t, nodes, 8);
    double worst = 0.0;
    for (double x : log_grid(0.1, 50.0, 200))
        worst = std::max(worst, std::fabs(arctan_mixture_cdf(fit, x) -
                                          cdf(x, m.components[0])));
    return report(6, worst <= 0.05, "8-term mixture CDF vs closed form, sigma 2",
                  "max abs err " + fmt("%.4f", worst) + " tol 0.05");
}

bool c7_piecewise_on_sum() {
    SumModel m{{{0.0, 0.5}, {0.3, 1.0}, {-0.2, 1.5}}};
    auto cc = curve_for(m, 80.0);
    auto plan = build_segment_plan(cc, 4);
    auto chf = make_chf_sampler(m);
    auto p = davies_auto(m, 40.0);

    // central 90% mass from the reference inverter
    auto xs = log_grid(0.05, 40.0, 300);
    auto ref = davies_cdf_grid(chf, xs, p.d, p.N);
    double worst = 0.0, worst_mono = 0.0, prev = -1.0;
    for (int i = 0; i < 300; ++i) {
        double F = expint_piecewise_cdf(plan, xs[i]);
        if (ref[i] >= 0.05 && ref[i] <= 0.95)
            worst = std::max(worst, std::fabs(F - ref[i]));
        if (prev > -1.0) worst_mono = std::max(worst_mono, prev - F);
        prev = F;
    }
    bool ok = worst <= 0.02 && worst_mono <= 1e-3;
    return report(7, ok, "4-segment piecewise CDF on a 3-term sum",
                  "max abs err " + fmt("%.4f", worst) + " tol 0.02, mono slack " +
                      fmt("%.1e", worst_mono) + " tol 1e-3");
}

bool c8_monte_carlo_ks() {
    SumModel m{{{0.0, 0.5}, {0.3, 1.0}, {-0.2, 1.5}}};
    auto samples = sample_sum(m, 1000000, 20260826);
    std::sort(samples.begin(), samples.end());
    auto chf = make_chf_sampler(m);
    auto p = davies_auto(m, samples[samples.size() - 2]);
    auto xs = log_grid(0.1, 60.0, 400);
    auto F = davies_cdf_grid(chf, xs, p.d, p.N);
    double ks = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto it = std::upper_bound(samples.begin(), samples.end(), xs[i]);
        double emp = static_cast<double>(it - samples.begin()) / samples.size();
        ks = std::max(ks, std::fabs(emp - F[i]));
    }
    return report(8, ks <= 0.01, "grid CDF vs one-million-draw empirical CDF",
                  "KS distance " + fmt("%.5f", ks) + " tol 0.01");
}

bool c9_derivative_consistency() {
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
        for (double s : {0.5, 1.0, 2.0}) {
            double d = mgf_derivative_gh(s, 1.0, n, 64);
            // Richardson-extrapolated central differences of the quadrature
            auto f = [&](double v) { return mgf_gh(v, 1.0, 64); };
            auto D = [&](double h) {
                if (n == 1) return (f(s + h) - f(s - h)) / (2 * h);
                if (n == 2) return (f(s + h) - 2 * f(s) + f(s - h)) / (h * h);
                if (n == 3)
                    return (f(s + 2 * h) - 2 * f(s + h) + 2 * f(s - h) -
                            f(s - 2 * h)) /
                           (2 * h * h * h);
                return (f(s + 2 * h) - 4 * f(s + h) + 6 * f(s) - 4 * f(s - h) +
                        f(s - 2 * h)) /
                       (h * h * h * h);
            };
            const double h = 0.02;
            double fd = (4.0 * D(h / 2) - D(h)) / 3.0;
            worst = std::max(worst, std::fabs(d - fd) / std::fabs(fd));
        }
    }
    // s = 0 moments at sigma = 0.5: |M^(n)(0)| = e^{n^2 sigma^2 / 2}
    double worst0 = 0.0;
    for (int n = 1; n <= 4; ++n) {
        double expect = std::exp(0.5 * n * n * 0.25);
        double got = std::fabs(mgf_derivative_gh(0.0, 0.5, n, 64));
        worst0 = std::max(worst0, std::fabs(got - expect) / expect);
    }
    bool ok = worst <= 1e-5 && worst0 <= 1e-6;
    return report(9, ok, "analytic transform derivatives vs finite differences",
                  "rel err " + fmt("%.2e", worst) + " tol 1e-5, moments " +
                      fmt("%.2e", worst0) + " tol 1e-6");
}

bool c10_split_identity() {
    auto [m1, m2] = mgf_split(0.0, 1.0, 40);
    double e0 = std::max(std::fabs(m1 - 0.5), std::fabs(m2 - 0.5));
    double worst = 0.0;
    for (double s : log_grid(0.01, 20.0, 40)) {
        auto [a, b] = mgf_split(s, 1.0, 40);
        worst = std::max(worst, std::fabs(a + b - mgf_gh(s, 1.0, 40)));
    }
    bool ok = e0 <= 1e-14 && worst <= 1e-13;
    return report(10, ok, "split halves at the origin and additivity",
                  "origin err " + fmt("%.1e", e0) + " tol 1e-14, sum err " +
                      fmt("%.1e", worst));
}

bool c11_arctan_median_law() {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.02, 20.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        double a = u(rng), b = u(rng);
        ArctanMixture one{{{1.0, a, b}}};
        double med = std::sqrt(a * a + b * b);
        worst = std::max(worst, std::fabs(arctan_mixture_cdf(one, med) - 0.5));
    }
    return report(11, worst <= 1e-12, "one-term mixture median at sqrt(a^2+b^2)",
                  "max dev " + fmt("%.2e", worst) + " tol 1e-12");
}

bool c12_lambert_residuals() {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ur(-0.999 / std::exp(1.0), 1e4);
    std::uniform_real_distribution<double> uc(-8.0, 8.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double y = ur(rng);
        double w = lambert_w_real(y);
        worst = std::max(worst,
                         std::fabs(w * std::exp(w) - y) / std::max(1.0, std::fabs(y)));
        cplx z(uc(rng), uc(rng));
        cplx wc = lambert_w0(z);
        worst = std::max(worst,
                         std::abs(wc * std::exp(wc) - z) / std::max(1.0, std::abs(z)));
    }
    bool quad = true;
    for (int i = 1; i <= 100; ++i) {
        cplx z = lambert_saddle(cplx(0.0, 0.3 * i));
        quad = quad && z.real() <= 1e-12 && z.imag() >= 0.0;
    }
    bool ok = worst <= 1e-12 && quad;
    return report(12, ok, "both Lambert solvers: residuals and saddle branch",
                  "max rel residual " + fmt("%.2e", worst) + " tol 1e-12, branch " +
                      (quad ? "ok" : "violated"));
}

bool c13_high_frequency_trend() {
    double prev = -1.0;
    bool mono = true;
    std::string errs;
    for (double s : {10.0, 100.0, 1000.0}) {
        double ref = mgf_reduced(s, 1.0);
        double err = std::fabs(mgf_barouch_kaufman(s, 1.0) - ref) / ref;
        if (prev >= 0.0 && err >= prev) mono = false;
        prev = err;
        errs += fmt(" %.3e", err);
    }
    return report(13, mono, "closed high-frequency form error decreases with s",
                  "rel errs" + errs);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..13>\n");
        return 2;
    }
    int id = std::atoi(argv[1]);
    bool ok = false;
    switch (id) {
        case 1: ok = c1_closed_form_round_trip(); break;
        case 2: ok = c2_known_pair_battery(); break;
        case 3: ok = c3_cross_engine_agreement(); break;
        case 4: ok = c4_mgf_crossings(); break;
        case 5: ok = c5_envelope_crossings(); break;
        case 6: ok = c6_arctan_fit_sigma2(); break;
        case 7: ok = c7_piecewise_on_sum(); break;
        case 8: ok = c8_monte_carlo_ks(); break;
        case 9: ok = c9_derivative_consistency(); break;
        case 10: ok = c10_split_identity(); break;
        case 11: ok = c11_arctan_median_law(); break;
        case 12: ok = c12_lambert_residuals(); break;
        case 13: ok = c13_high_frequency_trend(); break;
        default:
            std::fprintf(stderr, "unknown criterion %d\n", id);
            return 2;
    }
    return ok ? 0 : 1;
}
