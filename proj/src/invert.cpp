#include "invert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_complex.hpp>

namespace lnsum {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double binom(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                    std::lgamma(n - k + 1.0));
}

}  // namespace

MgfSampler make_mgf_sampler(const SumModel& m) {
    validate(m);
    SumModel model = m;
    MgfSampler s;
    s.value = [model](double sv) {
        double v = 1.0;
        for (const auto& c : model.components)
            v *= mgf_reduced(sv * std::exp(c.mu), c.sigma);
        return v;
    };
    s.derivative = [model](double sv, int k) {
        // Leibniz fold of per-component analytic derivative stacks
        std::vector<double> acc(k + 1);
        for (int j = 0; j <= k; ++j) {
            double emu = std::exp(model.components[0].mu);
            acc[j] = std::pow(emu, j) *
                     mgf_derivative_reduced(sv * emu, model.components[0].sigma, j);
        }
        for (std::size_t ci = 1; ci < model.components.size(); ++ci) {
            const auto& c = model.components[ci];
            double emu = std::exp(c.mu);
            std::vector<double> cur(k + 1), next(k + 1, 0.0);
            for (int j = 0; j <= k; ++j)
                cur[j] = std::pow(emu, j) * mgf_derivative_reduced(sv * emu, c.sigma, j);
            for (int j = 0; j <= k; ++j)
                for (int i = 0; i <= j; ++i)
                    next[j] += binom(j, i) * acc[i] * cur[j - i];
            acc = next;
        }
        return acc[k];
    };
    return s;
}

ComplexMgf make_complex_mgf(const SumModel& m) {
    validate(m);
    SumModel model = m;
    return [model](cplx s) {
        cplx v = 1.0;
        for (const auto& c : model.components)
            v *= mgf_reduced_complex(s * std::exp(c.mu), c.sigma);
        return v;
    };
}

ChfSampler make_chf_sampler(const SumModel& m, int N) {
    validate(m);
    SumModel model = m;
    ChfSampler s;
    s.phi = [model, N](double w) { return chf_model(model, w, N); };
    s.mean = 0.0;
    for (const auto& c : m.components)
        s.mean += std::exp(c.mu + 0.5 * c.sigma * c.sigma);
    return s;
}

double post_widder(const MgfSampler& M, double x, int k) {
    if (!(x > 0.0)) throw domain_error("post_widder: x must be positive");
    if (k < 1) throw config_error("post_widder: order must be >= 1");
    if (!M.derivative) throw config_error("post_widder: derivative sampler required");
    double mk = M.derivative(k / x, k);
    if (mk == 0.0) return 0.0;
    double sign = (k % 2 ? -1.0 : 1.0) * (mk < 0.0 ? -1.0 : 1.0);
    double lf = std::log(std::abs(mk)) + (k + 1.0) * std::log(k / x) -
                std::lgamma(k + 1.0);
    if (lf > 700.0) throw convergence_error("post_widder: overflow in scaling");
    return sign * std::exp(lf);
}

double der_haar(const MgfSampler& M, double x, DerHaarVariant v) {
    if (!(x > 0.0)) throw domain_error("der_haar: x must be positive");
    if (v == DerHaarVariant::one) return M.value(1.0 / x) / x;
    return M.value(1.0 / (2.0 * x)) / (2.0 * x);
}

InversionNodes stehfest_coefficients(int N) {
    if (N < 2 || N > 16 || N % 2)
        throw config_error("stehfest_coefficients: N must be even, in [2, 16]");
    static const auto lfact = [] {
        std::array<long double, 34> t{};
        t[0] = 0.0L;
        for (int i = 1; i < 34; ++i) t[i] = t[i - 1] + std::log(static_cast<long double>(i));
        return t;
    }();
    InversionNodes nodes;
    nodes.order = N;
    nodes.family = NodeFamily::stehfest_real;
    const int half = N / 2;
    for (int n = 1; n <= N; ++n) {
        long double acc = 0.0L;
        for (int j = (n + 1) / 2; j <= std::min(n, half); ++j) {
            long double lt = half * std::log(static_cast<long double>(j)) + lfact[2 * j] -
                             lfact[half - j] - lfact[j] - lfact[j - 1] - lfact[n - j] -
                             lfact[2 * j - n];
            acc += std::exp(lt);
        }
        long double kn = ((n + half) % 2 ? -acc : acc);
        nodes.nodes.push_back(cplx(n * kLn2, 0.0));
        nodes.weights.push_back(cplx(static_cast<double>(kn), 0.0));
    }
    return nodes;
}

InversionNodes zakian_nodes(int N) {
    InversionNodes nodes = stehfest_coefficients(N);
    nodes.family = NodeFamily::zakian;
    for (int n = 1; n <= N; ++n) nodes.nodes[n - 1] = cplx(2.0 * n, 0.0);
    return nodes;
}

namespace {

double real_node_invert(const MgfSampler& M, double x, int N, double a, bool cdf) {
    if (!(x > 0.0)) throw domain_error("inversion: x must be positive");
    InversionNodes nodes = stehfest_coefficients(N);
    double acc = 0.0, comp = 0.0;  // Neumaier compensation
    for (int n = 1; n <= N; ++n) {
        double kn = nodes.weights[n - 1].real();
        double term = kn * M.value(n * a / x);
        if (cdf) term /= n;
        double t = acc + term;
        comp += std::abs(acc) >= std::abs(term) ? (acc - t) + term : (term - t) + acc;
        acc = t;
    }
    acc += comp;
    return cdf ? acc : (a / x) * acc;
}

}  // namespace

double gaver_stehfest(const MgfSampler& M, double x, int N) {
    return real_node_invert(M, x, N, kLn2, false);
}
double zakian(const MgfSampler& M, double x, int N) {
    return real_node_invert(M, x, N, 2.0, false);
}
double gaver_stehfest_cdf(const MgfSampler& M, double x, int N) {
    return real_node_invert(M, x, N, kLn2, true);
}
double zakian_cdf(const MgfSampler& M, double x, int N) {
    return real_node_invert(M, x, N, 2.0, true);
}

InversionNodes pade_nodes(int N) {
    if (N < 2 || N > 24) throw config_error("pade_nodes: N must be in [2, 24]");
    // Denominator-root extraction suffers catastrophic cancellation in double
    // precision beyond N ~ 12, so build everything in 50-digit floats.
    using mpf = boost::multiprecision::cpp_bin_float_50;
    using mpc = boost::multiprecision::cpp_complex_50;
    const int m = N - 1;  // numerator degree of the (N-1)/N approximant of e^z
    auto fact = [](int v) {
        mpf f = 1;
        for (int i = 2; i <= v; ++i) f *= i;
        return f;
    };
    std::vector<mpf> P(m + 1), Q(N + 1);
    for (int j = 0; j <= m; ++j)
        P[j] = fact(m + N - j) * fact(m) / (fact(m + N) * fact(j) * fact(m - j));
    for (int j = 0; j <= N; ++j) {
        Q[j] = fact(m + N - j) * fact(N) / (fact(m + N) * fact(j) * fact(N - j));
        if (j % 2) Q[j] = -Q[j];
    }
    auto polyval = [](const std::vector<mpf>& c, const mpc& z) {
        mpc acc = 0;
        for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j) acc = acc * z + c[j];
        return acc;
    };
    std::vector<mpf> Qd(N);
    for (int j = 1; j <= N; ++j) Qd[j - 1] = Q[j] * j;

    // Durand-Kerner on the monic denominator, seeded on the right-half-plane
    // arc where the roots are known to lie (moduli ~ 1.3 N .. 1.6 N)
    std::vector<mpc> r(N);
    const double rad = 1.4 * N;
    for (int i = 0; i < N; ++i) {
        double th = M_PI * (i + 0.5) / N - M_PI / 2.0;
        r[i] = mpc(rad * std::cos(th), rad * std::sin(th));
    }
    mpf qn = Q[N];
    bool done = false;
    for (int it = 0; it < 400 && !done; ++it) {
        mpf worst = 0;
        for (int i = 0; i < N; ++i) {
            mpc num = polyval(Q, r[i]) / qn;
            mpc den = 1;
            for (int j = 0; j < N; ++j)
                if (j != i) den *= (r[i] - r[j]);
            mpc step = num / den;
            r[i] -= step;
            worst = std::max(worst, mpf(abs(step)));
        }
        done = worst < mpf("1e-32");
    }
    if (!done) throw convergence_error("pade_nodes: root iteration did not converge");

    // residues; the weight identity sum K_n / a_n = 1 is checked at build
    // precision (for N >= 20 the folded double sum loses ~|K| eps absolutely)
    std::vector<mpc> K(N);
    mpc ident = 0;
    for (int i = 0; i < N; ++i) {
        K[i] = polyval(P, r[i]) / polyval(Qd, r[i]);
        ident += K[i] / r[i];
    }
    if (abs(ident + 1) < abs(ident - 1)) {
        for (auto& k : K) k = -k;
        ident = -ident;
    }
    if (static_cast<double>(abs(ident - mpc(1))) > 1e-10)
        throw convergence_error("pade_nodes: weight identity violated");

    std::vector<std::pair<cplx, cplx>> rw(N);
    for (int i = 0; i < N; ++i) {
        rw[i] = {cplx(static_cast<double>(r[i].real()),
                      static_cast<double>(r[i].imag())),
                 cplx(static_cast<double>(K[i].real()),
                      static_cast<double>(K[i].imag()))};
    }
    std::sort(rw.begin(), rw.end(), [](const auto& a, const auto& b) {
        if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
        return a.first.imag() < b.first.imag();
    });

    InversionNodes nodes;
    nodes.order = N;
    nodes.family = NodeFamily::pade_complex;
    for (const auto& [root, weight] : rw) {
        nodes.nodes.push_back(root);
        nodes.weights.push_back(weight);
    }
    return nodes;
}

namespace {

double checked_real(cplx acc, const char* what) {
    if (std::abs(acc.imag()) > 1e-9 * std::abs(acc.real()) + 1e-12)
        throw convergence_error(std::string(what) + ": imaginary residue too large");
    return acc.real();
}

}  // namespace

double gauss_quadrature_invert(const ComplexMgf& M, double x,
                               const InversionNodes& nodes, int k) {
    if (!(x > 0.0)) throw domain_error("gauss_quadrature_invert: x must be positive");
    if (nodes.family != NodeFamily::pade_complex)
        throw config_error("gauss_quadrature_invert: needs pade_complex nodes");
    cplx acc = 0.0;
    for (int i = 0; i < nodes.order; ++i) {
        cplx an = nodes.nodes[i];
        acc += nodes.weights[i] * std::pow(an / x, k) * M(an / x);
    }
    return checked_real(acc / x, "gauss_quadrature_invert");
}

double gauss_quadrature_cdf(const ComplexMgf& M, double x,
                            const InversionNodes& nodes) {
    if (!(x > 0.0)) throw domain_error("gauss_quadrature_cdf: x must be positive");
    if (nodes.family != NodeFamily::pade_complex)
        throw config_error("gauss_quadrature_cdf: needs pade_complex nodes");
    cplx acc = 0.0;
    for (int i = 0; i < nodes.order; ++i)
        acc += nodes.weights[i] / nodes.nodes[i] * M(nodes.nodes[i] / x);
    return checked_real(acc, "gauss_quadrature_cdf");
}

std::vector<double> fourier_series_invert(const ComplexMgf& M,
                                          const std::vector<double>& xs, double c,
                                          double L, int K, FourierVariant v) {
    if (!(c > 0.0)) throw config_error("fourier_series_invert: c must be positive");
    if (K < 32) throw config_error("fourier_series_invert: K must be >= 32");
    double xmax = xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
    if (!(L >= 2.0 * xmax))
        throw config_error("fourier_series_invert: L must be >= 2 max(xs)");
    std::vector<cplx> mv(K + 1);
    for (int k = 0; k <= K; ++k) mv[k] = M(cplx(c, k * M_PI / L));
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) {
        double acc = 0.0;
        if (v == FourierVariant::cosine) {
            acc = 0.5 * mv[0].real();
            for (int k = 1; k <= K; ++k)
                acc += mv[k].real() * std::cos(k * M_PI * x / L);
        } else {
            for (int k = 1; k <= K; ++k)
                acc -= mv[k].imag() * std::sin(k * M_PI * x / L);
        }
        out.push_back(2.0 * std::exp(c * x) / L * acc);
    }
    return out;
}

double gil_pelaez_cdf(const ChfSampler& chf, double x) {
    if (!(x > 0.0)) throw domain_error("gil_pelaez_cdf: x must be positive");
    const double panel = M_PI / std::max({x, chf.mean, 1.0});
    auto h = [&](double w) {
        if (w < 1e-12) return chf.mean - x;
        cplx v = chf.phi(w) * std::exp(cplx(0.0, -w * x));
        return v.imag() / w;
    };
    double total = 0.0;
    double w = 0.0;
    double env = 1.0;
    long panels = 0;
    while (true) {
        total += integrate_panel(h, w, w + panel);
        w += panel;
        if (++panels > 4000000)
            throw convergence_error("gil_pelaez_cdf: tail did not fall below tolerance");
        if (panels % 16 == 0) {
            env = std::abs(chf.phi(w));
            // tail bound: |integrand| <= env / w per unit omega, alternating
            if (env / std::max(w * x, 1.0) < 1e-10 && env < 1e-8) break;
        }
    }
    return 0.5 - total / M_PI;  // raw; callers clamp for presentation
}

std::vector<double> davies_cdf_grid(const ChfSampler& chf,
                                    const std::vector<double>& xs, double d, int N) {
    if (!(d > 0.0)) throw config_error("davies_cdf: d must be positive");
    if (N < 1) throw config_error("davies_cdf: N must be positive");
    std::vector<cplx> phis(N);
    for (int k = 0; k < N; ++k) phis[k] = chf.phi((k + 0.5) * d);
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) {
        const cplx rot = std::exp(cplx(0.0, -d * x));
        cplx ph = std::exp(cplx(0.0, -0.5 * d * x));
        double acc = 0.0;
        for (int k = 0; k < N; ++k) {
            acc += (phis[k] * ph).imag() / (k + 0.5);
            ph *= rot;
        }
        out.push_back(0.5 - acc / M_PI);
    }
    return out;
}

double davies_cdf(const ChfSampler& chf, double x, double d, int N) {
    return davies_cdf_grid(chf, {x}, d, N)[0];
}

DaviesParams davies_auto(const SumModel& m, double x_max, int gh_order) {
    validate(m);
    LognormalComponent eq = fw_equivalent(m);
    double L = std::max(6.0 * x_max, std::exp(3.6 * eq.sigma));
    DaviesParams p;
    p.d = 2.0 * M_PI / L;
    double w = 1.0;
    while (std::abs(chf_model(m, w, gh_order)) > 1e-5) {
        w *= 1.3;
        if (w > 1e9) throw convergence_error("davies_auto: envelope does not decay");
    }
    p.N = static_cast<int>(w / p.d) + 1;
    return p;
}

namespace {

// Im of int_{lo}^{hi} exp(X_lo) * pref * e^{(qq + j y)(w - lo)} e^{-j y w} / w dw,
// with qq already carrying the -j y rotation of the evaluation point y.
double e1_interval(cplx X_lo, cplx pref, cplx qq, double y, double lo, double hi) {
    if (lo == 0.0) {
        // pair-cancelling Ein form (the pure 1/w part carries no Im here)
        return (std::exp(X_lo) * pref * (-expint_ein(-qq * hi))).imag();
    }
    cplx e1lo = expint_e1(-qq * lo);
    cplx e1hi = expint_e1(-qq * hi);
    return (std::exp(X_lo - (qq + cplx(0.0, y)) * lo) * pref * (e1lo - e1hi)).imag();
}

double plan_G(const SegmentPlan& plan, double y) {
    double total = 0.0;
    for (const auto& seg : plan.segments) {
        cplx q = seg.slope - cplx(0.0, y);
        total += e1_interval(seg.X_lo, 1.0, q, y, seg.lo, seg.hi);
        const double Lseg = seg.hi - seg.lo;
        for (std::size_t k = 1; k <= seg.corrections.size(); ++k) {
            double gk = M_PI * static_cast<double>(k) / Lseg;
            cplx ck = seg.corrections[k - 1];
            cplx fac(0.0, -0.5);  // 1/(2j)
            total += e1_interval(seg.X_lo, ck * fac, q + cplx(0.0, gk), y, seg.lo,
                                 seg.hi);
            total += e1_interval(seg.X_lo, -ck * fac, q - cplx(0.0, gk), y, seg.lo,
                                 seg.hi);
        }
    }
    cplx qt = cplx(-plan.a_m, plan.b_m - y);
    total += (std::exp(plan.X_m - (qt + cplx(0.0, y)) * plan.omega_m) *
              expint_e1(-qt * plan.omega_m))
                 .imag();
    return total / M_PI;
}

}  // namespace

double expint_piecewise_cdf(const SegmentPlan& plan, double x) {
    if (!(x > 0.0)) throw domain_error("expint_piecewise_cdf: x must be positive");
    if (plan.segments.empty()) throw config_error("expint_piecewise_cdf: empty plan");
    return plan_G(plan, -x) - plan_G(plan, x);
}

double segment_correction(const std::vector<cplx>& coeffs, const Segment& seg,
                          double x) {
    auto part = [&](double y) {
        cplx q = seg.slope - cplx(0.0, y);
        const double Lseg = seg.hi - seg.lo;
        double total = 0.0;
        for (std::size_t k = 1; k <= coeffs.size(); ++k) {
            double gk = M_PI * static_cast<double>(k) / Lseg;
            cplx fac(0.0, -0.5);
            total += e1_interval(seg.X_lo, coeffs[k - 1] * fac, q + cplx(0.0, gk), y,
                                 seg.lo, seg.hi);
            total += e1_interval(seg.X_lo, -coeffs[k - 1] * fac, q - cplx(0.0, gk), y,
                                 seg.lo, seg.hi);
        }
        return total / M_PI;
    };
    return part(-x) - part(x);
}

double cumulant_cdf(const CumulantCurve& curve, double x) {
    if (!(x > 0.0)) throw domain_error("cumulant_cdf: x must be positive");
    const std::size_t n = curve.omegas.size();
    if (n < 2) throw config_error("cumulant_cdf: curve too short");
    if (!(curve.omegas.front() <= 1e-3))
        throw config_error("cumulant_cdf: curve must start at omega <= 1e-3");

    double x1max = 0.0, x2max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x1max = std::max(x1max, std::abs(curve.X1[i]));
        x2max = std::max(x2max, std::abs(curve.X2[i]));
    }
    if (x1max < 1e-14 && x2max < 1e-14) return 1.0;  // point mass at the origin

    if (std::exp(curve.X1.back()) > 1e-4)
        throw domain_error("cumulant_cdf: insufficient envelope coverage");

    double total = 0.0;
    // stretch [0, omega_0] with X(0) = 0
    {
        cplx X0(curve.X1[0], curve.X2[0]);
        cplx q = X0 / curve.omegas[0] - cplx(0.0, x);
        total += (-expint_ein(-q * curve.omegas[0])).imag();
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cplx Xl(curve.X1[i], curve.X2[i]);
        cplx Xh(curve.X1[i + 1], curve.X2[i + 1]);
        double lo = curve.omegas[i], hi = curve.omegas[i + 1];
        cplx q = (Xh - Xl) / (hi - lo) - cplx(0.0, x);
        total += e1_interval(Xl, 1.0, q, x, lo, hi);
    }
    {
        cplx Xm(curve.X1[n - 1], curve.X2[n - 1]);
        double wm = curve.omegas[n - 1];
        cplx qt = cplx(-curve.a1[n - 1], curve.b1[n - 1] - x);
        total += (std::exp(Xm - (qt + cplx(0.0, x)) * wm) * expint_e1(-qt * wm)).imag();
    }
    return 0.5 - total / M_PI;
}

void validate(const ArctanMixture& mix) {
    if (mix.terms.empty()) throw config_error("arctan mixture: no terms");
    double sum = 0.0;
    for (const auto& t : mix.terms) {
        if (!(t.a > 0.0)) throw config_error("arctan mixture: a_k must be positive");
        sum += t.A;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw config_error("arctan mixture: weights must sum to 1");
}

double arctan_mixture_cdf(const ArctanMixture& mix, double x) {
    if (!(x >= 0.0)) throw domain_error("arctan_mixture_cdf: x must be nonnegative");
    double f = 0.0;
    for (const auto& t : mix.terms)
        f += t.A * (std::atan((t.b + x) / t.a) - std::atan((t.b - x) / t.a));
    return f / M_PI;
}

double arctan_mixture_pdf(const ArctanMixture& mix, double x) {
    double p = 0.0;
    for (const auto& t : mix.terms) {
        double dp = t.b + x, dm = t.b - x;
        p += t.A * (t.a / (t.a * t.a + dp * dp) + t.a / (t.a * t.a + dm * dm));
    }
    return p / M_PI;
}

double arctan_cdf_combined(double a, double b, double x) {
    double den = a * a + b * b - x * x;
    double f = std::atan(2.0 * a * x / den);
    if (den < 0.0) f += M_PI;
    return f / M_PI;
}

double second_order_pdf(const std::vector<ChirpTerm>& terms, double x) {
    auto half = [&](double xx) {
        double acc = 0.0;
        for (const auto& t : terms) {
            if (t.a2 < 0.0) throw config_error("second_order_pdf: a2 must be >= 0");
            cplx beta(t.a1, -(t.b1 - xx));
            if (t.a2 == 0.0 && t.b2 == 0.0) {
                acc += t.A * (1.0 / beta).real();
                continue;
            }
            cplx alpha(t.a2, -t.b2);
            cplx ra = std::sqrt(alpha);
            cplx u = beta / (2.0 * ra);
            cplx iu(-u.imag(), u.real());
            cplx I = 0.5 * std::sqrt(M_PI) / ra * faddeeva_w(iu);
            acc += t.A * I.real();
        }
        return acc / M_PI;
    };
    return half(x) + half(-x);
}

TransformTable chf_from_cdf(const DistributionTable& table,
                            const std::vector<double>& omegas) {
    const std::size_t n = table.xs.size();
    if (n < 2 || table.cdf.size() != n) throw config_error("chf_from_cdf: bad table");
    if (table.cdf.front() > 1e-3 || 1.0 - table.cdf.back() > 1e-3)
        throw domain_error("chf_from_cdf: CDF coverage below 1 - 1e-3");
    std::vector<double> mids(n - 1), steps(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        mids[i] = 0.5 * (table.xs[i] + table.xs[i + 1]);
        steps[i] = table.cdf[i + 1] - table.cdf[i];
    }
    TransformTable t;
    t.axis = Axis::imaginary_omega;
    t.engine = Engine::product;  // staircase synthesis has no forward engine tag
    t.grid = omegas;
    t.values.reserve(omegas.size());
    for (double w : omegas) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            acc += steps[i] * std::exp(cplx(0.0, w * mids[i]));
        t.values.push_back(acc);
    }
    return t;
}

}  // namespace lnsum
