#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace lnsum {

using cplx = std::complex<double>;

// Error taxonomy shared across the library; the C boundary maps these to codes.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureRule {
    std::vector<double> nodes;    // ascending, symmetric about 0
    std::vector<double> weights;  // positive, sum to 1
    int order = 0;
};

// N-point Gauss-Hermite rule (physicists' weight e^{-x^2}), weights scaled by
// 1/sqrt(pi) so they form a probability rule: sum w_k = 1 and
// sum w_k f(x_k) ~ E[f(Z/sqrt(2))] for standard normal Z.
QuadratureRule gauss_hermite(int n);

// Principal-branch Lambert W on the real line, y >= -1/e.
double lambert_w_real(double y);

// Principal branch W0 on the complex plane, w e^w = z.
cplx lambert_w0(cplx z);

// z solving z e^{-z} = zeta on the branch that puts z in the second quadrant
// for zeta on the positive imaginary axis (z = -W0(-zeta)); conjugate
// symmetric for the lower half-plane.
cplx lambert_saddle(cplx zeta);

// Principal-branch exponential integral E1(z), z != 0, off the negative real
// axis. Power series for small |z|, modified-Lentz continued fraction
// otherwise.
cplx expint_e1(cplx z);

// Entire function Ein(z) = gamma + log z + E1(z) = int_0^z (1-e^{-t})/t dt.
cplx expint_ein(cplx z);

// log Gamma(z) for Re z > 0.
cplx log_gamma(cplx z);

// Faddeeva function w(z) = e^{-z^2} erfc(-iz). Weideman rational
// approximation on the upper half-plane, reflected below.
cplx faddeeva_w(cplx z);

// Adaptive quadrature of f over [a, b] to the given absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12);

// Non-adaptive fixed-order Gauss-Legendre panel (for oscillatory sums where
// the panel width is already matched to the integrand).
double integrate_panel(const std::function<double(double)>& f, double a,
                       double b, int order = 15);

}  // namespace lnsum
