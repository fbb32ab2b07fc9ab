#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "specfun.hpp"

namespace lnsum {

struct LognormalComponent {
    double mu = 0.0;     // location of the underlying normal, log-units
    double sigma = 1.0;  // scale of the underlying normal, > 0
};

struct SumModel {
    std::vector<LognormalComponent> components;
};

void validate(const LognormalComponent& c);
void validate(const SumModel& m);

// Tabulated distribution: xs ascending and positive, cdf nondecreasing;
// pdf is optional (empty when the producing method has none).
struct DistributionTable {
    std::vector<double> xs;
    std::vector<double> cdf;
    std::vector<double> pdf;
};

double pdf(double x, const LognormalComponent& c);
double cdf(double x, const LognormalComponent& c);

// RMS residual of a quadratic fit of ln ps against ln xs; ~0 iff the samples
// are lognormal-shaped.
double lognormality_residual(const std::vector<double>& xs,
                             const std::vector<double>& ps);

// n independent draws of sum_i exp(mu_i + sigma_i Z_i). Counter-based keying:
// identical seeds give identical sequences regardless of evaluation order.
std::vector<double> sample_sum(const SumModel& m, std::size_t n,
                               std::uint64_t seed);

// Fenton-Williamson moment matching: single equivalent lognormal with the
// sum's first two moments.
LognormalComponent fw_equivalent(const SumModel& m);

// Model file: '#' comments; one "mu=<v> sigma=<v>" record per line.
SumModel parse_model(std::istream& in);
SumModel parse_model_file(const std::string& path);
std::string format_model(const SumModel& m);

}  // namespace lnsum
