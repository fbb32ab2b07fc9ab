#include "specfun.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_lambert.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>

namespace lnsum {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;

void disable_gsl_abort() {
    static std::once_flag flag;
    std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
    if (n < 1 || n > 64) throw config_error("gauss_hermite: order must be in [1, 64]");
    QuadratureRule rule;
    rule.order = n;
    if (n == 1) {
        rule.nodes = {0.0};
        rule.weights = {1.0};
        return rule;
    }
    // Golub-Welsch: Jacobi matrix of the Hermite recurrence has zero diagonal
    // and off-diagonal beta_k = sqrt(k/2).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw convergence_error("gauss_hermite: eigen decomposition failed");
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()[k];
        double v = es.eigenvectors()(0, k);
        rule.weights[k] = v * v;  // already sums to 1 in this normalization
    }
    // Enforce exact symmetry: pair up mirrored nodes.
    for (int k = 0; k < n / 2; ++k) {
        int m = n - 1 - k;
        double x = 0.5 * (rule.nodes[m] - rule.nodes[k]);
        double w = 0.5 * (rule.weights[k] + rule.weights[m]);
        rule.nodes[k] = -x;
        rule.nodes[m] = x;
        rule.weights[k] = rule.weights[m] = w;
    }
    if (n % 2) rule.nodes[n / 2] = 0.0;
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    for (double& w : rule.weights) w /= sum;
    return rule;
}

double lambert_w_real(double y) {
    static const double min_y = -std::exp(-1.0);
    if (!(y >= min_y)) throw domain_error("lambert_w_real: argument below -1/e");
    disable_gsl_abort();
    gsl_sf_result res;
    int status = gsl_sf_lambert_W0_e(y, &res);
    if (status != GSL_SUCCESS && status != GSL_EMAXITER)
        throw convergence_error("lambert_w_real: evaluation failed");
    double w = res.val;
    // one Halley polish to pin the residual
    for (int i = 0; i < 3; ++i) {
        double ew = std::exp(w);
        double f = w * ew - y;
        if (std::abs(f) <= 1e-14 * std::max(1.0, std::abs(y))) break;
        double d = ew * (w + 1.0) - f * (w + 2.0) / (2.0 * (w + 1.0));
        w -= f / d;
    }
    return w;
}

cplx lambert_w0(cplx z) {
    if (z == cplx(0.0)) return 0.0;
    cplx w;
    const double az = std::abs(z);
    if (std::abs(z + std::exp(-1.0)) < 0.2) {
        cplx p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (az < 0.3) {
        w = z * (1.0 - z);
    } else if (az < 3.0) {
        w = std::log(1.0 + z);
    } else {
        cplx l1 = std::log(z), l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    const double tol = 1e-13 * std::max(1.0, az);
    for (int it = 0; it < 64; ++it) {
        cplx ew = std::exp(w);
        cplx f = w * ew - z;
        if (std::abs(f) <= tol) return w;
        cplx wp1 = w + 1.0;
        cplx d = ew * wp1 - f * (w + 2.0) / (2.0 * wp1);
        w -= f / d;
    }
    if (std::abs(w * std::exp(w) - z) <= 100 * tol) return w;
    throw convergence_error("lambert_w0: Halley iteration did not converge");
}

cplx lambert_saddle(cplx zeta) {
    if (zeta == cplx(0.0)) return 0.0;
    if (zeta.imag() < 0.0) return std::conj(lambert_saddle(std::conj(zeta)));
    cplx z = -lambert_w0(-zeta);
    if (std::abs(z * std::exp(-z) - zeta) > 1e-12 * std::max(1.0, std::abs(zeta)))
        throw convergence_error("lambert_saddle: residual too large");
    return z;
}

cplx expint_e1(cplx z) {
    if (z == cplx(0.0)) throw domain_error("expint_e1: argument is zero");
    if (z.imag() == 0.0 && z.real() < 0.0)
        throw domain_error("expint_e1: argument on the branch cut");
    const double az = std::abs(z);
    if (az <= 4.0) {
        // E1(z) = -gamma - log z + sum_{n>=1} (-1)^{n+1} z^n / (n n!)
        cplx sum = 0.0, term = 1.0;
        for (int n = 1; n <= 64; ++n) {
            term *= -z / static_cast<double>(n);
            cplx add = -term / static_cast<double>(n);
            sum += add;
            if (std::abs(add) < 1e-17 * (std::abs(sum) + 1.0)) break;
        }
        return -kEulerGamma - std::log(z) + sum;
    }
    // Modified Lentz on the continued fraction
    // E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...))))
    const double tiny = 1e-290;
    cplx b = z + 1.0;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i <= 200; ++i) {
        double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) return h * std::exp(-z);
    }
    throw convergence_error("expint_e1: continued fraction did not converge");
}

cplx expint_ein(cplx z) {
    if (z == cplx(0.0)) return 0.0;
    if (std::abs(z) <= 4.0) {
        // Ein(z) = sum_{n>=1} (-1)^{n+1} z^n / (n n!), entire
        cplx sum = 0.0, term = 1.0;
        for (int n = 1; n <= 64; ++n) {
            term *= -z / static_cast<double>(n);
            cplx add = -term / static_cast<double>(n);
            sum += add;
            if (std::abs(add) < 1e-17 * (std::abs(sum) + 1.0)) break;
        }
        return sum;
    }
    return kEulerGamma + std::log(z) + expint_e1(z);
}

cplx log_gamma(cplx z) {
    if (!(z.real() > 0.0)) throw domain_error("log_gamma: requires Re z > 0");
    disable_gsl_abort();
    gsl_sf_result lnr, arg;
    if (gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg) != GSL_SUCCESS)
        throw convergence_error("log_gamma: evaluation failed");
    return {lnr.val, arg.val};
}

namespace {

// Weideman (1994) rational approximation of the Faddeeva function on the
// upper half-plane; coefficients built once by a direct DFT.
struct WeidemanTable {
    static constexpr int N = 64;
    double L;
    std::array<double, N> a;
    WeidemanTable() {
        const int M = 2 * N, M2 = 4 * N;
        L = std::sqrt(N / std::sqrt(2.0));
        std::vector<double> g(M2, 0.0);
        for (int j = 1; j < M2; ++j) {
            int k = j - M;  // k in (-M, M)
            double theta = k * M_PI / M;
            double t = L * std::tan(0.5 * theta);
            g[j] = std::exp(-t * t) * (L * L + t * t);
        }
        std::vector<double> gs(M2);
        for (int i = 0; i < M2; ++i) gs[i] = g[(i + M) % M2];
        for (int n = 1; n <= N; ++n) {
            double acc = 0.0;
            for (int i = 0; i < M2; ++i)
                acc += gs[i] * std::cos(2.0 * M_PI * n * i / M2);
            a[n - 1] = acc / M2;
        }
    }
};

cplx faddeeva_upper(cplx z) {
    static const WeidemanTable tab;
    const cplx iz(-z.imag(), z.real());
    const cplx den = tab.L - iz;
    const cplx Z = (tab.L + iz) / den;
    cplx p = 0.0;  // sum_{m=1..N} a_m Z^{m-1}, Horner from the top
    for (int m = WeidemanTable::N; m >= 1; --m) p = p * Z + tab.a[m - 1];
    return 2.0 * p / (den * den) + (1.0 / std::sqrt(M_PI)) / den;
}

}  // namespace

cplx faddeeva_w(cplx z) {
    if (z.imag() >= 0.0) return faddeeva_upper(z);
    // w(z) = 2 e^{-z^2} - w(-z); may overflow deep in the lower half-plane
    cplx e = std::exp(-z * z);
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
        throw domain_error("faddeeva_w: unstable region (Im z << 0)");
    return 2.0 * e - faddeeva_upper(-z);
}

namespace {

double gsl_fn_adapter(double x, void* p) {
    return (*static_cast<const std::function<double(double)>*>(p))(x);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
    disable_gsl_abort();
    static thread_local std::unique_ptr<gsl_integration_workspace,
                                        void (*)(gsl_integration_workspace*)>
        ws(gsl_integration_workspace_alloc(4000), gsl_integration_workspace_free);
    gsl_function gf;
    gf.function = &gsl_fn_adapter;
    gf.params = const_cast<std::function<double(double)>*>(&f);
    double result = 0.0, abserr = 0.0;
    int status = gsl_integration_qag(&gf, a, b, abs_tol, 1e-11, 4000,
                                     GSL_INTEG_GAUSS61, ws.get(), &result, &abserr);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
        throw convergence_error("integrate: adaptive quadrature failed");
    return result;
}

double integrate_panel(const std::function<double(double)>& f, double a,
                       double b, int order) {
    disable_gsl_abort();
    static thread_local std::unique_ptr<gsl_integration_glfixed_table,
                                        void (*)(gsl_integration_glfixed_table*)>
        tab(gsl_integration_glfixed_table_alloc(15),
            gsl_integration_glfixed_table_free);
    (void)order;
    gsl_function gf;
    gf.function = &gsl_fn_adapter;
    gf.params = const_cast<std::function<double(double)>*>(&f);
    return gsl_integration_glfixed(&gf, a, b, tab.get());
}

}  // namespace lnsum
