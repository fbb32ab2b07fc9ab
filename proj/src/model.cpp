#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <Eigen/Dense>

namespace lnsum {

void validate(const LognormalComponent& c) {
    if (!std::isfinite(c.mu)) throw config_error("component: mu must be finite");
    if (!(c.sigma > 0.0) || !std::isfinite(c.sigma))
        throw config_error("component: sigma must be positive and finite");
}

void validate(const SumModel& m) {
    if (m.components.empty()) throw config_error("model: needs at least one component");
    for (const auto& c : m.components) validate(c);
}

double pdf(double x, const LognormalComponent& c) {
    if (!(x > 0.0)) throw domain_error("pdf: x must be positive");
    double t = (std::log(x) - c.mu) / c.sigma;
    return std::exp(-0.5 * t * t) / (x * c.sigma * std::sqrt(2.0 * M_PI));
}

double cdf(double x, const LognormalComponent& c) {
    if (!(x > 0.0)) throw domain_error("cdf: x must be positive");
    return 0.5 + 0.5 * std::erf((std::log(x) - c.mu) / (std::sqrt(2.0) * c.sigma));
}

double lognormality_residual(const std::vector<double>& xs,
                             const std::vector<double>& ps) {
    if (xs.size() != ps.size()) throw config_error("lognormality_residual: size mismatch");
    std::set<double> distinct(xs.begin(), xs.end());
    if (distinct.size() < 4)
        throw config_error("lognormality_residual: needs at least 4 distinct abscissas");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw config_error("lognormality_residual: xs must be strictly increasing");
    const auto n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ps[i] > 0.0))
            throw domain_error("lognormality_residual: samples must be positive");
        double t = std::log(xs[i]);
        A(i, 0) = 1.0;
        A(i, 1) = t;
        A(i, 2) = t * t;
        y[i] = std::log(ps[i]);
    }
    Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
    return std::sqrt((A * coef - y).squaredNorm() / static_cast<double>(n));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double to_unit(std::uint64_t u) {  // (0, 1]
    return (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
}

// one standard normal per (seed, draw, component), Box-Muller
double keyed_normal(std::uint64_t seed, std::uint64_t draw, std::uint64_t comp) {
    std::uint64_t k = splitmix64(seed ^ splitmix64(draw * 0x100000001b3ULL + comp));
    double u1 = to_unit(k);
    double u2 = to_unit(splitmix64(k));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

std::vector<double> sample_sum(const SumModel& m, std::size_t n, std::uint64_t seed) {
    validate(m);
    if (n < 1) throw config_error("sample_sum: n must be >= 1");
    std::vector<double> out(n);
    const std::size_t nc = m.components.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& comp = m.components[c];
            s += std::exp(comp.mu + comp.sigma * keyed_normal(seed, i, c));
        }
        out[i] = s;
    }
    return out;
}

LognormalComponent fw_equivalent(const SumModel& m) {
    validate(m);
    double m1 = 0.0, var = 0.0;
    for (const auto& c : m.components) {
        double s2 = c.sigma * c.sigma;
        m1 += std::exp(c.mu + 0.5 * s2);
        var += std::exp(2.0 * c.mu + s2) * (std::exp(s2) - 1.0);
    }
    double m2 = var + m1 * m1;
    double sig2 = std::log(m2 / (m1 * m1));
    LognormalComponent eq;
    eq.sigma = std::sqrt(sig2);
    eq.mu = std::log(m1) - 0.5 * sig2;
    return eq;
}

SumModel parse_model(std::istream& in) {
    SumModel m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        LognormalComponent c;
        bool has_mu = false, has_sigma = false, any = false;
        while (ls >> tok) {
            any = true;
            auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw config_error("model file line " + std::to_string(lineno) +
                                   ": expected key=value, got '" + tok + "'");
            std::string key = tok.substr(0, eq);
            std::string val = tok.substr(eq + 1);
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(val, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != val.size())
                throw config_error("model file line " + std::to_string(lineno) +
                                   ": bad number '" + val + "'");
            if (key == "mu") {
                c.mu = v;
                has_mu = true;
            } else if (key == "sigma") {
                c.sigma = v;
                has_sigma = true;
            } else {
                throw config_error("model file line " + std::to_string(lineno) +
                                   ": unknown key '" + key + "'");
            }
        }
        if (!any) continue;
        if (!has_mu || !has_sigma)
            throw config_error("model file line " + std::to_string(lineno) +
                               ": record needs both mu and sigma");
        validate(c);
        m.components.push_back(c);
    }
    validate(m);
    return m;
}

SumModel parse_model_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open model file: " + path);
    return parse_model(f);
}

std::string format_model(const SumModel& m) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& c : m.components) os << "mu=" << c.mu << " sigma=" << c.sigma << "\n";
    return os.str();
}

}  // namespace lnsum
