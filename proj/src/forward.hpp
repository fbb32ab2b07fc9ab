#pragma once

#include <utility>

#include "model.hpp"
#include "specfun.hpp"

namespace lnsum {

enum class Axis { real_s, imaginary_omega };
enum class Engine {
    gh,
    split_gh,
    asymptotic_gh,
    reduced_range,
    holgate,
    barouch_kaufman,
    product,
};

Engine engine_from_name(const std::string& name);
const char* engine_name(Engine e);

// M(s) = E[e^{-sX}] for a zero-mu lognormal by plain Gauss-Hermite quadrature.
double mgf_gh(double s, double sigma, int N = 20);

// Split into the images of 0 <= x <= 1 (M1) and x >= 1 (M2); M1 + M2 = M.
std::pair<double, double> mgf_split(double s, double sigma, int N = 20);

// n-th derivative w.r.t. s. sigma_corrected selects the derivative weight
// exp(n sqrt(2) sigma x_k); the variant without sigma in the exponent is kept
// for comparison (it fails finite-difference checks).
double mgf_derivative_gh(double s, double sigma, int n, int N = 20,
                         bool sigma_corrected = true);

// Holgate saddle-point chf, exp(-(z^2-2z)/(2 sigma^2)) / sqrt(1-z).
cplx chf_holgate(double omega, double sigma);

// Asymptotic preprocessing + Gauss-Hermite. printed_form selects the
// (W^2+2W)/g-1 arrangement; both are algebraically identical.
double mgf_asymptotic_gh(double s, double sigma, int N = 20,
                         bool printed_form = false);

// Same engine continued to the imaginary axis: phi(j omega).
cplx chf_asymptotic_gh(double omega, double sigma, int N = 40);

// Reduced-range adaptive quadrature over x in (0, 1] (exponential
// substitution x = e^t), and its s-derivatives.
double mgf_reduced(double s, double sigma);
double mgf_derivative_reduced(double s, double sigma, int k);
cplx mgf_reduced_complex(cplx s, double sigma);  // Re s >= 0
cplx chf_reduced(double omega, double sigma);

// High-frequency closed form; n-th derivative by augmenting the Gamma
// argument and dividing by (-s)^n (signed result).
double mgf_barouch_kaufman(double s, double sigma, int n = 0);

struct TransformTable {
    Axis axis = Axis::real_s;
    Engine engine = Engine::gh;
    std::vector<double> grid;
    std::vector<cplx> values;
};

// Pointwise product over components with mu restored by argument scaling
// s -> s e^{mu_i} (omega likewise).
TransformTable transform_product(const SumModel& m, const std::vector<double>& grid,
                                 Axis axis, Engine engine, int N = 20);

// Product chf of the model at a single frequency (asymptotic-GH engine).
cplx chf_model(const SumModel& m, double omega, int N = 40);

struct CumulantCurve {
    std::vector<double> omegas;
    std::vector<double> X1, X2;  // log phi = X1 + j X2, X2 unwrapped
    std::vector<double> a1, b1;  // a1 = -dX1/dw, b1 = dX2/dw
    std::vector<double> a2, b2;  // halved second derivatives: a2 = -X1''/2, b2 = X2''/2
};

CumulantCurve cumulants(const SumModel& m, const std::vector<double>& omegas,
                        int N = 40);

}  // namespace lnsum
