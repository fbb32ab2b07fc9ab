#include "forward.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace lnsum {

namespace {

const QuadratureRule& cached_gh(int N) {
    static std::mutex mu;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(N);
    if (it == cache.end()) it = cache.emplace(N, gauss_hermite(N)).first;
    return it->second;
}

constexpr double kSqrt2 = 1.4142135623730950488;

}  // namespace

Engine engine_from_name(const std::string& name) {
    if (name == "gh") return Engine::gh;
    if (name == "split_gh") return Engine::split_gh;
    if (name == "asymptotic_gh") return Engine::asymptotic_gh;
    if (name == "reduced_range") return Engine::reduced_range;
    if (name == "holgate") return Engine::holgate;
    if (name == "barouch_kaufman") return Engine::barouch_kaufman;
    if (name == "product") return Engine::product;
    throw config_error("unknown engine: " + name);
}

const char* engine_name(Engine e) {
    switch (e) {
        case Engine::gh: return "gh";
        case Engine::split_gh: return "split_gh";
        case Engine::asymptotic_gh: return "asymptotic_gh";
        case Engine::reduced_range: return "reduced_range";
        case Engine::holgate: return "holgate";
        case Engine::barouch_kaufman: return "barouch_kaufman";
        case Engine::product: return "product";
    }
    return "?";
}

double mgf_gh(double s, double sigma, int N) {
    if (!(s >= 0.0)) throw domain_error("mgf_gh: s must be nonnegative");
    const auto& r = cached_gh(N);
    double acc = 0.0;
    for (int k = 0; k < r.order; ++k)
        acc += r.weights[k] * std::exp(-s * std::exp(kSqrt2 * sigma * r.nodes[k]));
    return acc;
}

std::pair<double, double> mgf_split(double s, double sigma, int N) {
    if (!(s >= 0.0)) throw domain_error("mgf_split: s must be nonnegative");
    const auto& r = cached_gh(N);
    double m1 = 0.0, m2 = 0.0;
    for (int k = 0; k < r.order; ++k) {
        double e = std::exp(kSqrt2 * sigma * r.nodes[k]);
        if (r.nodes[k] < 0.0)
            m1 += r.weights[k] * std::exp(-s * e);
        else if (r.nodes[k] > 0.0)
            m2 += r.weights[k] * std::exp(-s * e);
        else {  // odd rule: split the centre node evenly
            m1 += 0.5 * r.weights[k] * std::exp(-s);
            m2 += 0.5 * r.weights[k] * std::exp(-s);
        }
    }
    return {m1, m2};
}

double mgf_derivative_gh(double s, double sigma, int n, int N, bool sigma_corrected) {
    if (!(s >= 0.0)) throw domain_error("mgf_derivative_gh: s must be nonnegative");
    if (n < 0 || n > 8) throw config_error("mgf_derivative_gh: order must be in [0, 8]");
    const auto& r = cached_gh(N);
    const double c = sigma_corrected ? sigma : 1.0;
    double acc = 0.0;
    for (int k = 0; k < r.order; ++k) {
        double x = r.nodes[k];
        acc += r.weights[k] * std::exp(n * kSqrt2 * c * x) *
               std::exp(-s * std::exp(kSqrt2 * sigma * x));
    }
    return (n % 2 ? -acc : acc);
}

cplx chf_holgate(double omega, double sigma) {
    if (omega == 0.0) return 1.0;
    if (!(omega > 0.0)) throw domain_error("chf_holgate: omega must be nonnegative");
    cplx z = lambert_saddle(cplx(0.0, omega * sigma * sigma));
    return std::exp(-(z * z - 2.0 * z) / (2.0 * sigma * sigma)) / std::sqrt(1.0 - z);
}

double mgf_asymptotic_gh(double s, double sigma, int N, bool printed_form) {
    if (!(s >= 0.0)) throw domain_error("mgf_asymptotic_gh: s must be nonnegative");
    if (s == 0.0) return 1.0;
    const auto& r = cached_gh(N);
    const double s2 = sigma * sigma;
    const double W = lambert_w_real(s * s2);
    double acc = 0.0;
    if (printed_form) {
        for (int k = 0; k < r.order; ++k) {
            double u = kSqrt2 * sigma * r.nodes[k];
            acc += r.weights[k] * std::exp(-(W / s2) * (std::exp(u) - u - 1.0));
        }
        return std::exp(-(W * W + 2.0 * W) / (2.0 * s2)) * acc;
    }
    for (int k = 0; k < r.order; ++k) {
        double u = kSqrt2 * sigma * r.nodes[k];
        acc += r.weights[k] * std::exp(-(W / s2) * (std::exp(u) - u));
    }
    return std::exp(-W * W / (2.0 * s2)) * acc;
}

cplx chf_asymptotic_gh(double omega, double sigma, int N) {
    if (omega == 0.0) return 1.0;
    if (!(omega > 0.0)) return std::conj(chf_asymptotic_gh(-omega, sigma, N));
    const auto& r = cached_gh(N);
    const double s2 = sigma * sigma;
    const cplx z = lambert_saddle(cplx(0.0, omega * s2));
    cplx acc = 0.0;
    for (int k = 0; k < r.order; ++k) {
        double u = kSqrt2 * sigma * r.nodes[k];
        acc += r.weights[k] * std::exp((z / s2) * (std::exp(u) - u - 1.0));
    }
    return std::exp(-(z * z - 2.0 * z) / (2.0 * s2)) * acc;
}

double mgf_reduced(double s, double sigma) {
    return mgf_derivative_reduced(s, sigma, 0);
}

double mgf_derivative_reduced(double s, double sigma, int k) {
    if (!(s >= 0.0)) throw domain_error("mgf_derivative_reduced: s must be nonnegative");
    if (k < 0) throw config_error("mgf_derivative_reduced: negative order");
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    auto f = [&](double t) {
        double gauss = norm * std::exp(-t * t / (2.0 * sigma * sigma));
        // x = e^t in (0,1]: x^k e^{-sx}; mirrored half: x^{-k} e^{-s/x}
        double lo = std::exp(k * t - s * std::exp(t));
        double hi = std::exp(-k * t - s * std::exp(-t));
        return gauss * (lo + hi);
    };
    double v = integrate(f, -13.0 * sigma, 0.0, 1e-13);
    return (k % 2 ? -v : v);
}

cplx mgf_reduced_complex(cplx s, double sigma) {
    if (!(s.real() >= 0.0))
        throw domain_error("mgf_reduced_complex: requires Re s >= 0");
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    auto part = [&](bool imag_part) {
        return integrate(
            [&](double t) {
                double gauss = norm * std::exp(-t * t / (2.0 * sigma * sigma));
                cplx v = std::exp(-s * std::exp(t)) + std::exp(-s * std::exp(-t));
                return gauss * (imag_part ? v.imag() : v.real());
            },
            -13.0 * sigma, 0.0, 1e-12);
    };
    return {part(false), part(true)};
}

cplx chf_reduced(double omega, double sigma) {
    if (omega == 0.0) return 1.0;
    if (!(omega > 0.0)) return std::conj(chf_reduced(-omega, sigma));
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    // x in (0, 1]: phase bounded by omega, adaptive quadrature is fine
    auto low = [&](bool imag_part) {
        return integrate(
            [&](double t) {
                double gauss = norm * std::exp(-t * t / (2.0 * sigma * sigma));
                double ph = omega * std::exp(t);
                return gauss * (imag_part ? std::sin(ph) : std::cos(ph));
            },
            -13.0 * sigma, 0.0, 1e-12);
    };
    // x in [1, inf): integrate the lognormal density against e^{j omega x}
    // in half-period panels
    const double umax = std::exp(7.5 * sigma);
    const double panel = M_PI / omega;
    const double npanels = (umax - 1.0) / panel;
    if (npanels > 2e6) throw convergence_error("chf_reduced: omega too large");
    cplx high = 0.0;
    double u = 1.0;
    while (u < umax) {
        double v = std::min(u + std::max(panel, 1e-8), umax);
        double re = integrate_panel(
            [&](double uu) {
                double lu = std::log(uu);
                return norm / uu * std::exp(-lu * lu / (2.0 * sigma * sigma)) *
                       std::cos(omega * uu);
            },
            u, v);
        double im = integrate_panel(
            [&](double uu) {
                double lu = std::log(uu);
                return norm / uu * std::exp(-lu * lu / (2.0 * sigma * sigma)) *
                       std::sin(omega * uu);
            },
            u, v);
        high += cplx(re, im);
        u = v;
    }
    return cplx(low(false), low(true)) + high;
}

double mgf_barouch_kaufman(double s, double sigma, int n) {
    if (!(std::log(s) > 0.0))
        throw domain_error("mgf_barouch_kaufman: requires ln s > 0");
    if (n < 0 || n > 8) throw config_error("mgf_barouch_kaufman: order in [0, 8]");
    const double s2 = sigma * sigma;
    const double ls = std::log(s);
    // Gamma argument augmented by n, result divided by (-s)^n
    double lg = log_gamma(cplx(ls / s2 + n, 0.0)).real();
    double v = std::exp(-ls * ls / (2.0 * s2) + lg - n * ls) /
               (std::sqrt(2.0 * M_PI) * sigma);
    return (n % 2 ? -v : v);
}

namespace {

cplx engine_value(Engine engine, Axis axis, double arg, double sigma, int N) {
    if (axis == Axis::real_s) {
        switch (engine) {
            case Engine::gh: return mgf_gh(arg, sigma, N);
            case Engine::split_gh: {
                auto [m1, m2] = mgf_split(arg, sigma, N);
                return m1 + m2;
            }
            case Engine::asymptotic_gh: return mgf_asymptotic_gh(arg, sigma, N);
            case Engine::reduced_range: return mgf_reduced(arg, sigma);
            case Engine::barouch_kaufman:
                return arg == 0.0 ? 1.0 : mgf_barouch_kaufman(arg, sigma);
            default: break;
        }
        throw config_error("engine not valid on the real-s axis");
    }
    switch (engine) {
        case Engine::asymptotic_gh: return chf_asymptotic_gh(arg, sigma, N);
        case Engine::holgate: return chf_holgate(arg, sigma);
        case Engine::reduced_range: return chf_reduced(arg, sigma);
        case Engine::gh: {  // plain quadrature; fine at low omega only
            const auto& r = cached_gh(N);
            cplx acc = 0.0;
            for (int k = 0; k < r.order; ++k)
                acc += r.weights[k] *
                       std::exp(cplx(0.0, arg * std::exp(kSqrt2 * sigma * r.nodes[k])));
            return acc;
        }
        default: break;
    }
    throw config_error("engine not valid on the imaginary-omega axis");
}

}  // namespace

TransformTable transform_product(const SumModel& m, const std::vector<double>& grid,
                                 Axis axis, Engine engine, int N) {
    validate(m);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0)) throw config_error("transform_product: grid must be nonnegative");
        if (i && !(grid[i] > grid[i - 1]))
            throw config_error("transform_product: grid must be ascending");
    }
    TransformTable t;
    t.axis = axis;
    t.engine = m.components.size() > 1 ? Engine::product : engine;
    t.grid = grid;
    t.values.reserve(grid.size());
    for (double g : grid) {
        cplx v = 1.0;
        for (const auto& c : m.components)
            v *= engine_value(engine, axis, g * std::exp(c.mu), c.sigma, N);
        t.values.push_back(v);
    }
    return t;
}

cplx chf_model(const SumModel& m, double omega, int N) {
    cplx v = 1.0;
    for (const auto& c : m.components)
        v *= chf_asymptotic_gh(omega * std::exp(c.mu), c.sigma, N);
    return v;
}

CumulantCurve cumulants(const SumModel& m, const std::vector<double>& omegas, int N) {
    validate(m);
    if (omegas.empty()) throw config_error("cumulants: empty grid");
    if (!(omegas.front() > 0.0) || omegas.front() > 1e-4)
        throw config_error("cumulants: first grid point must be in (0, 1e-4]");
    for (std::size_t i = 1; i < omegas.size(); ++i)
        if (!(omegas[i] > omegas[i - 1]))
            throw config_error("cumulants: grid must be ascending");

    CumulantCurve cc;
    cc.omegas = omegas;
    const std::size_t n = omegas.size();
    cc.X1.resize(n);
    cc.X2.resize(n);
    cc.a1.resize(n);
    cc.b1.resize(n);
    cc.a2.resize(n);
    cc.b2.resize(n);

    // sweep with phase continuity; refine by bisection when a step is too big
    std::vector<cplx> phis(n);
    for (std::size_t i = 0; i < n; ++i) phis[i] = chf_model(m, omegas[i], N);

    auto arg_step = [&](double w_lo, cplx p_lo, double w_hi, cplx p_hi) {
        double total = 0.0;
        struct Item { double wl, wh; cplx pl, ph; int depth; };
        std::vector<Item> stack{{w_lo, w_hi, p_lo, p_hi, 0}};
        while (!stack.empty()) {
            Item it = stack.back();
            stack.pop_back();
            double d = std::arg(it.ph / it.pl);
            if (std::abs(d) <= M_PI / 2) {
                total += d;
                continue;
            }
            if (it.depth >= 14)
                throw convergence_error("cumulants: phase unwrap step exceeds pi/2");
            double wm = 0.5 * (it.wl + it.wh);
            cplx pm = chf_model(m, wm, N);
            stack.push_back({it.wl, wm, it.pl, pm, it.depth + 1});
            stack.push_back({wm, it.wh, pm, it.ph, it.depth + 1});
        }
        return total;
    };

    double x2 = std::arg(phis[0]);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) x2 += arg_step(omegas[i - 1], phis[i - 1], omegas[i], phis[i]);
        cc.X1[i] = std::log(std::abs(phis[i]));
        cc.X2[i] = x2;

        // central differences with one Richardson pass (step ratio 2)
        const double w = omegas[i];
        const double h = 1e-3 * w;
        auto X_at = [&](double ww) -> cplx {
            cplx p = chf_model(m, ww, N);
            return cplx(std::log(std::abs(p)), cc.X2[i] + std::arg(p / phis[i]));
        };
        cplx xp = X_at(w + h), xm = X_at(w - h);
        cplx xp2 = X_at(w + 0.5 * h), xm2 = X_at(w - 0.5 * h);
        cplx x0(cc.X1[i], cc.X2[i]);
        cplx d1h = (xp - xm) / (2.0 * h);
        cplx d1h2 = (xp2 - xm2) / h;
        cplx d1 = (4.0 * d1h2 - d1h) / 3.0;
        cplx d2h = (xp - 2.0 * x0 + xm) / (h * h);
        cplx d2h2 = (xp2 - 2.0 * x0 + xm2) / (0.25 * h * h);
        cplx d2 = (4.0 * d2h2 - d2h) / 3.0;
        cc.a1[i] = -d1.real();
        cc.b1[i] = d1.imag();
        cc.a2[i] = -0.5 * d2.real();
        cc.b2[i] = 0.5 * d2.imag();
    }
    return cc;
}

}  // namespace lnsum
